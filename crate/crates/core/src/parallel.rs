//! Order-preserving trial maps.
//!
//! Every Monte Carlo loop in this crate produces one value per trial index
//! and reduces them afterwards in ascending trial order. The map below is the
//! only place where threads enter: with the `parallel` feature it fans out on
//! a rayon pool, without it it is a plain loop. Because each trial derives
//! its randomness from its own index and collection preserves order, the
//! reduced results are bit-identical whichever path runs and whatever the
//! thread count is.

/// How many workers to use for a trial map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parallelism {
    /// One worker, no thread pool involved. Always available.
    Sequential,
    /// All available cores (rayon's default pool).
    Auto,
    /// A dedicated pool with exactly this many threads.
    Threads(usize),
}

impl Parallelism {
    /// Map a config-style integer: 1 means sequential, 0 means auto,
    /// anything else a fixed pool size.
    pub fn from_degree(threads: usize) -> Self {
        match threads {
            0 => Parallelism::Auto,
            1 => Parallelism::Sequential,
            k => Parallelism::Threads(k),
        }
    }
}

impl Default for Parallelism {
    fn default() -> Self {
        Parallelism::Auto
    }
}

/// Apply `f` to `0..n` and collect the results in index order.
pub fn map_trials<T, F>(n: u64, parallelism: Parallelism, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match parallelism {
        Parallelism::Sequential => (0..n).map(f).collect(),
        #[cfg(feature = "parallel")]
        Parallelism::Auto => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        #[cfg(feature = "parallel")]
        Parallelism::Threads(k) => {
            use rayon::prelude::*;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .expect("building a rayon pool cannot fail with sane thread counts");
            pool.install(|| (0..n).into_par_iter().map(f).collect())
        }
        #[cfg(not(feature = "parallel"))]
        Parallelism::Auto | Parallelism::Threads(_) => (0..n).map(f).collect(),
    }
}

/// Like [`map_trials`] but over an explicit slice of inputs.
pub fn map_items<I, T, F>(items: &[I], parallelism: Parallelism, f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    match parallelism {
        Parallelism::Sequential => items.iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Parallelism::Auto => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        #[cfg(feature = "parallel")]
        Parallelism::Threads(k) => {
            use rayon::prelude::*;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .expect("building a rayon pool cannot fail with sane thread counts");
            pool.install(|| items.par_iter().map(f).collect())
        }
        #[cfg(not(feature = "parallel"))]
        Parallelism::Auto | Parallelism::Threads(_) => items.iter().map(f).collect(),
    }
}
