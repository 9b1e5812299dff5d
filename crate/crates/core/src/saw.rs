//! Self-avoiding-walk tables and walk-growth summability checks.
//!
//! `c_x(n)` counts walks of length `n` from `x` that never revisit a vertex.
//! The counts feed two kinds of consumers: the moment bounds in
//! [`crate::resolvent`], whose decay constants multiply `c_x(d)`, and the
//! summability reports here, which decide whether weighted walk series of the
//! form `sum_k alpha^{d(k,y)} c_k(d(k,y))` converge within a truncation.
//!
//! Counting is exact depth-first enumeration with iterative deepening, so a
//! run that hits the extension budget still reports every fully completed
//! length. Enumeration fans out across the first step of the walk; counts are
//! integers and are reduced in vertex order, so results do not depend on the
//! thread count.

use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use crate::graph::{Graph, GraphError, VertexId};
use crate::parallel::{self, Parallelism};

/// Default cap on walk extensions per [`count_saws`] call.
pub const DEFAULT_EXTENSION_BUDGET: u64 = 100_000_000;
/// Shells inspected by the ratio test.
pub const RATIO_WINDOW: usize = 3;
/// Dead band of the ratio test: ratios inside `1 +- RATIO_TOLERANCE` are
/// treated as neither growth nor decay.
pub const RATIO_TOLERANCE: f64 = 0.02;
/// Residual band inside which the two growth fits count as indistinguishable.
pub const RESIDUAL_BAND: f64 = 0.10;
/// Fitted exponential rates at or below this classify as bounded growth.
pub const EXP_RATE_FLOOR: f64 = 0.05;
/// Bracket width at which the critical-parameter bisection stops.
pub const BISECTION_BRACKET: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum SawError {
    #[error(
        "walk extension budget {budget} exceeded while counting length {failed_n}; \
         lengths 0..={last_completed} finished"
    )]
    BudgetExceeded {
        budget: u64,
        failed_n: usize,
        last_completed: usize,
        /// Counts for every fully enumerated length.
        completed: Vec<u64>,
    },
    #[error("parameter out of range: {0}")]
    InvalidParameter(String),
    #[error(
        "truncation too small: vertex {vertex} needs a clean ball of radius {needed}, \
         the nearest unclean vertex is at distance {available}"
    )]
    BoundaryContamination { vertex: VertexId, needed: usize, available: usize },
    #[error("sphere sequence is degenerate: {0}")]
    DegenerateSpheres(String),
    #[error("walk table has no usable lengths")]
    EmptyCounts,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Exact walk counts from one origin.
#[derive(Clone, Debug)]
pub struct SawTable {
    pub origin: VertexId,
    /// `counts[n]` = number of self-avoiding walks of length `n`; `counts[0] = 1`.
    pub counts: Vec<u64>,
    /// Largest `n` for which `counts[n]` agrees with the infinite graph.
    pub clean_radius: usize,
}

impl SawTable {
    pub fn n_max(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn count(&self, n: usize) -> u64 {
        self.counts[n]
    }
}

/// Ratio-test outcome over the last [`RATIO_WINDOW`] shell contributions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Converging,
    Diverging,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Converging => "converging",
            Verdict::Diverging => "diverging",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Truncated evaluation of one walk-growth series.
#[derive(Clone, Debug)]
pub struct AssumptionReport {
    /// The weight parameter the series was evaluated at.
    pub parameter: f64,
    pub truncation_radius: usize,
    /// Contribution of each shell (distance, or summed walk length).
    pub shell_terms: Vec<f64>,
    /// Running prefix sums of `shell_terms`; non-decreasing.
    pub partial_sums: Vec<f64>,
    pub verdict: Verdict,
    /// Filled by [`critical_parameter_estimate`], absent otherwise.
    pub estimated_critical: Option<f64>,
}

struct Budget {
    used: AtomicU64,
    cap: u64,
}

struct BudgetHit;

/// Batches extension ticks before touching the shared counter. The flush in
/// `finish` keeps the global tally exact, so whether a level exceeds the cap
/// depends only on the total amount of work, not on thread interleaving.
struct Ticker<'a> {
    budget: &'a Budget,
    pending: u64,
}

impl<'a> Ticker<'a> {
    const BATCH: u64 = 4096;

    fn new(budget: &'a Budget) -> Self {
        Ticker { budget, pending: 0 }
    }

    #[inline]
    fn tick(&mut self) -> Result<(), BudgetHit> {
        self.pending += 1;
        if self.pending >= Self::BATCH {
            self.flush()
        } else {
            Ok(())
        }
    }

    fn flush(&mut self) -> Result<(), BudgetHit> {
        if self.pending == 0 {
            return Ok(());
        }
        let before = self.budget.used.fetch_add(self.pending, Ordering::Relaxed);
        let now = before + self.pending;
        self.pending = 0;
        if now > self.budget.cap {
            Err(BudgetHit)
        } else {
            Ok(())
        }
    }

    fn finish(mut self) -> Result<(), BudgetHit> {
        self.flush()
    }
}

fn walks_below(
    g: &Graph,
    v: VertexId,
    visited: &mut [bool],
    remaining: usize,
    ticker: &mut Ticker<'_>,
) -> Result<u64, BudgetHit> {
    if remaining == 0 {
        return Ok(1);
    }
    let mut total = 0;
    for &u in g.neighbors(v) {
        if !visited[u.index()] {
            ticker.tick()?;
            visited[u.index()] = true;
            total += walks_below(g, u, visited, remaining - 1, ticker)?;
            visited[u.index()] = false;
        }
    }
    Ok(total)
}

fn count_exact_length(
    g: &Graph,
    x: VertexId,
    n: usize,
    budget: &Budget,
    parallelism: Parallelism,
) -> Result<u64, BudgetHit> {
    if n == 0 {
        return Ok(1);
    }
    let branches: Vec<VertexId> = g.neighbors(x).to_vec();
    let base: Vec<bool> = {
        let mut v = vec![false; g.vertex_count()];
        v[x.index()] = true;
        v
    };
    let per_branch = parallel::map_items(&branches, parallelism, |&k| {
        let mut ticker = Ticker::new(budget);
        let mut visited = base.clone();
        ticker.tick()?;
        visited[k.index()] = true;
        let walks = walks_below(g, k, &mut visited, n - 1, &mut ticker)?;
        ticker.finish()?;
        Ok(walks)
    });
    per_branch.into_iter().sum::<Result<u64, BudgetHit>>()
}

/// Count self-avoiding walks of every length up to `n_max` from `x`, exactly,
/// with the default extension budget.
pub fn count_saws(g: &Graph, x: VertexId, n_max: usize) -> Result<SawTable, SawError> {
    count_saws_with(g, x, n_max, DEFAULT_EXTENSION_BUDGET, Parallelism::Auto)
}

/// [`count_saws`] with an explicit extension budget and thread policy.
///
/// Runs one exact depth-first enumeration per length (iterative deepening),
/// splitting across the walk's first step. On budget exhaustion the error
/// carries every length that did complete.
pub fn count_saws_with(
    g: &Graph,
    x: VertexId,
    n_max: usize,
    budget: u64,
    parallelism: Parallelism,
) -> Result<SawTable, SawError> {
    if !g.contains(x) {
        return Err(GraphError::VertexOutOfRange(x.0).into());
    }
    let budget = Budget { used: AtomicU64::new(0), cap: budget };
    let mut counts = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        match count_exact_length(g, x, n, &budget, parallelism) {
            Ok(c) => counts.push(c),
            Err(BudgetHit) => {
                return Err(SawError::BudgetExceeded {
                    budget: budget.cap,
                    failed_n: n,
                    last_completed: n - 1,
                    completed: counts,
                })
            }
        }
    }
    let clean_radius = g.clean_radius(x).min(n_max);
    Ok(SawTable { origin: x, counts, clean_radius })
}

/// Growth-rate estimates `c(n)^(1/n)` for `n = 1..` as far as the table is
/// both present and clean.
pub fn connective_estimate(table: &SawTable) -> Result<Vec<f64>, SawError> {
    let upper = table.n_max().min(table.clean_radius);
    if upper < 1 {
        return Err(SawError::EmptyCounts);
    }
    Ok((1..=upper).map(|n| (table.counts[n] as f64).powf(1.0 / n as f64)).collect())
}

/// Ratio-test verdict over the trailing [`RATIO_WINDOW`] shell terms.
fn ratio_verdict(shell_terms: &[f64]) -> Verdict {
    if shell_terms.len() < RATIO_WINDOW + 1 {
        return Verdict::Inconclusive;
    }
    let tail = &shell_terms[shell_terms.len() - RATIO_WINDOW - 1..];
    if tail.iter().any(|&t| t <= 0.0) {
        return Verdict::Inconclusive;
    }
    let ratios: Vec<f64> = tail.windows(2).map(|w| w[1] / w[0]).collect();
    if ratios.iter().all(|&r| r <= 1.0 - RATIO_TOLERANCE) {
        Verdict::Converging
    } else if ratios.iter().all(|&r| r >= 1.0 + RATIO_TOLERANCE) {
        Verdict::Diverging
    } else {
        Verdict::Inconclusive
    }
}

fn check_unit_interval(name: &str, value: f64) -> Result<(), SawError> {
    if value.is_finite() && value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(SawError::InvalidParameter(format!("{name} must lie in (0,1), got {value}")))
    }
}

/// Raw (weight-free) shell data for the single-sum series around `y`:
/// `raw[i] = sum over vertices k at distance i of c_k(i)`.
fn single_sum_shells(g: &Graph, y: VertexId, radius: usize) -> Result<Vec<f64>, SawError> {
    if !g.contains(y) {
        return Err(GraphError::VertexOutOfRange(y.0).into());
    }
    let dist_y = g.distances_from(y);
    let unclean = g.distances_to_unclean();
    let clean_at = |v: VertexId| unclean[v.index()] as usize;
    if g.clean_radius(y) < radius {
        return Err(SawError::BoundaryContamination {
            vertex: y,
            needed: radius,
            available: g.clean_radius(y),
        });
    }
    let mut members: Vec<VertexId> = g
        .vertices()
        .filter(|v| dist_y[v.index()] != u32::MAX && (dist_y[v.index()] as usize) <= radius)
        .collect();
    members.sort_unstable();
    for &k in &members {
        let i = dist_y[k.index()] as usize;
        if clean_at(k) < i {
            return Err(SawError::BoundaryContamination {
                vertex: k,
                needed: i,
                available: clean_at(k),
            });
        }
    }
    let tables = parallel::map_items(&members, Parallelism::Auto, |&k| {
        let i = dist_y[k.index()] as usize;
        count_saws_with(g, k, i, DEFAULT_EXTENSION_BUDGET, Parallelism::Sequential)
            .map(|t| (i, t.counts[i]))
    });
    let mut raw_integer = vec![0u64; radius + 1];
    for entry in tables {
        let (i, c) = entry?;
        raw_integer[i] += c;
    }
    Ok(raw_integer.into_iter().map(|c| c as f64).collect())
}

fn report_from_shells(
    parameter: f64,
    radius: usize,
    shell_terms: Vec<f64>,
) -> AssumptionReport {
    let mut partial_sums = Vec::with_capacity(shell_terms.len());
    let mut acc = 0.0;
    for &t in &shell_terms {
        acc += t;
        partial_sums.push(acc);
    }
    let verdict = ratio_verdict(&shell_terms);
    AssumptionReport {
        parameter,
        truncation_radius: radius,
        shell_terms,
        partial_sums,
        verdict,
        estimated_critical: None,
    }
}

/// Truncated series `sum_k alpha^{d(k,y)} c_k(d(k,y))` over the ball of the
/// given radius around `y`, organised into distance shells.
///
/// Every summed vertex must be far enough from the truncation boundary that
/// its walk count is exact; otherwise the call errors instead of silently
/// under-counting.
pub fn assumption1_partial_sum(
    g: &Graph,
    y: VertexId,
    alpha: f64,
    radius: usize,
) -> Result<AssumptionReport, SawError> {
    check_unit_interval("alpha", alpha)?;
    let raw = single_sum_shells(g, y, radius)?;
    let terms: Vec<f64> =
        raw.iter().enumerate().map(|(i, &c)| alpha.powi(i as i32) * c).collect();
    Ok(report_from_shells(alpha, radius, terms))
}

/// Raw shell data for the double sum:
/// `raw[m] = sum over pairs (x, k) with d(x,k) + d(k,y) = m of
/// |d(o,x)|^p sqrt(c_x(d(x,k)) c_k(d(k,y)))`, for `m <= radius`.
///
/// Shells are indexed by the summed walk length so that each shell is the
/// complete infinite-graph shell: a ball restriction on the pair set would
/// deplete the top shells and corrupt the ratio test.
fn double_sum_shells(
    g: &Graph,
    o: VertexId,
    y: VertexId,
    p: u32,
    radius: usize,
) -> Result<Vec<f64>, SawError> {
    for v in [o, y] {
        if !g.contains(v) {
            return Err(GraphError::VertexOutOfRange(v.0).into());
        }
    }
    let dist_o = g.distances_from(o);
    let dist_y = g.distances_from(y);
    let unclean = g.distances_to_unclean();
    let clean_at = |v: VertexId| unclean[v.index()] as usize;
    if g.clean_radius(y) < radius {
        return Err(SawError::BoundaryContamination {
            vertex: y,
            needed: radius,
            available: g.clean_radius(y),
        });
    }
    // Everything that can appear in a pair lies within `radius` of y.
    let mut members: Vec<VertexId> = g
        .vertices()
        .filter(|v| dist_y[v.index()] != u32::MAX && (dist_y[v.index()] as usize) <= radius)
        .collect();
    members.sort_unstable();
    let position_of = |v: VertexId| members.binary_search(&v).expect("pair member");

    let dist_maps = parallel::map_items(&members, Parallelism::Auto, |&k| g.distances_from(k));

    // Longest walk each member contributes, as either pair component.
    let mut needed = vec![0usize; members.len()];
    for (ki, &k) in members.iter().enumerate() {
        let j = dist_y[k.index()] as usize;
        // k enumerates its partners x over B_k(radius - j), and contributes
        // its own walk count of length j.
        let reach = radius - j;
        needed[ki] = needed[ki].max(j);
        let have = clean_at(k);
        if have < j.max(reach) {
            return Err(SawError::BoundaryContamination {
                vertex: k,
                needed: j.max(reach),
                available: have,
            });
        }
        for (xi, &x) in members.iter().enumerate() {
            let i = dist_maps[ki][x.index()];
            if i != u32::MAX && (i as usize) <= reach {
                needed[xi] = needed[xi].max(i as usize);
            }
        }
    }
    for (xi, &x) in members.iter().enumerate() {
        if clean_at(x) < needed[xi] {
            return Err(SawError::BoundaryContamination {
                vertex: x,
                needed: needed[xi],
                available: clean_at(x),
            });
        }
        if dist_o[x.index()] == u32::MAX {
            return Err(GraphError::Disconnected { x, y: o }.into());
        }
    }

    let tables = parallel::map_items(&members, Parallelism::Auto, |&x| {
        let xi = position_of(x);
        count_saws_with(g, x, needed[xi], DEFAULT_EXTENSION_BUDGET, Parallelism::Sequential)
    });
    let mut counts: Vec<Vec<u64>> = Vec::with_capacity(members.len());
    for t in tables {
        counts.push(t?.counts);
    }

    let mut raw = vec![0.0f64; radius + 1];
    for (ki, &k) in members.iter().enumerate() {
        let j = dist_y[k.index()] as usize;
        let ck = counts[ki][j] as f64;
        for &x in &members {
            let i = dist_maps[ki][x.index()];
            if i == u32::MAX || (i as usize) + j > radius {
                continue;
            }
            let i = i as usize;
            let weight = (dist_o[x.index()] as f64).powi(p as i32);
            let cx = counts[position_of(x)][i] as f64;
            raw[i + j] += weight * (cx * ck).sqrt();
        }
    }
    Ok(raw)
}

/// Truncated double series
/// `sum_{x,k} |d(o,x)|^p (beta^{d(x,k)+d(k,y)} c_x(d(x,k)) c_k(d(k,y)))^{1/2}`
/// over pairs from the ball of the given radius around `o`, organised into
/// shells by the summed walk length `d(x,k) + d(k,y)`.
pub fn assumption2_partial_sum(
    g: &Graph,
    o: VertexId,
    y: VertexId,
    p: u32,
    beta: f64,
    radius: usize,
) -> Result<AssumptionReport, SawError> {
    check_unit_interval("beta", beta)?;
    let raw = double_sum_shells(g, o, y, p, radius)?;
    let terms: Vec<f64> = raw
        .iter()
        .enumerate()
        .map(|(m, &c)| beta.sqrt().powi(m as i32) * c)
        .collect();
    Ok(report_from_shells(beta, radius, terms))
}

/// Which weighted series a critical parameter refers to.
#[derive(Clone, Copy, Debug)]
pub enum SeriesKind {
    /// Single sum around `y`, weight `alpha^distance`.
    SingleSum,
    /// Double sum with moment weight `|d(o,x)|^p`, weight `beta^(summed length)`.
    DoubleSum { o: VertexId, p: u32 },
}

/// Largest weight for which the truncated series does not yet look divergent.
///
/// Bisects the weight over (0,1) with the ratio-test verdict as predicate;
/// the predicate holds when the verdict is anything other than diverging, so
/// a series whose shell ratio stays at 1 (the chain) reports a critical value
/// just below 1 rather than at the dead band's lower edge. The bracket is
/// narrowed to [`BISECTION_BRACKET`]; the report echoes the shell data at the
/// returned estimate.
pub fn critical_parameter_estimate(
    g: &Graph,
    y: VertexId,
    kind: SeriesKind,
    radius: usize,
) -> Result<AssumptionReport, SawError> {
    let (raw, weight_exponent): (Vec<f64>, fn(usize) -> f64) = match kind {
        SeriesKind::SingleSum => (single_sum_shells(g, y, radius)?, |i| i as f64),
        SeriesKind::DoubleSum { o, p } => {
            (double_sum_shells(g, o, y, p, radius)?, |m| m as f64 / 2.0)
        }
    };
    let terms_at = |w: f64| -> Vec<f64> {
        raw.iter().enumerate().map(|(i, &c)| w.powf(weight_exponent(i)) * c).collect()
    };
    let not_diverging = |w: f64| ratio_verdict(&terms_at(w)) != Verdict::Diverging;

    let mut lo = BISECTION_BRACKET;
    let mut hi = 1.0 - BISECTION_BRACKET;
    let estimate = if !not_diverging(lo) {
        lo
    } else if not_diverging(hi) {
        // No divergence anywhere below 1 at this truncation.
        (hi + 1.0) / 2.0
    } else {
        while hi - lo > BISECTION_BRACKET {
            let mid = 0.5 * (lo + hi);
            if not_diverging(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let mut report = report_from_shells(estimate, radius, terms_at(estimate));
    report.estimated_critical = Some(estimate);
    Ok(report)
}

/// How sphere sizes `|S_y(n)|` grow with `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrowthClass {
    Polynomial,
    Exponential,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct GrowthReport {
    pub spheres: Vec<usize>,
    /// Exponent of the power-law fit `|S(n)| ~ n^p`.
    pub poly_exponent: f64,
    /// Rate of the exponential fit `|S(n)| ~ b^n`, as `ln b`.
    pub exp_rate: f64,
    pub poly_residual: f64,
    pub exp_residual: f64,
    pub class: GrowthClass,
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rss: f64 =
        xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    (intercept, slope, rss)
}

/// Fit sphere growth around `y` against a power law and an exponential on
/// `n = 1..=radius` and pick the better model.
///
/// Bounded spheres (fitted exponential rate at most [`EXP_RATE_FLOOR`])
/// classify as polynomial outright; otherwise the fit with the smaller
/// residual wins unless the residuals are within [`RESIDUAL_BAND`] of each
/// other, which is inconclusive.
pub fn sphere_growth_classify(
    g: &Graph,
    y: VertexId,
    radius: usize,
) -> Result<GrowthReport, SawError> {
    if radius < RATIO_WINDOW {
        return Err(SawError::InvalidParameter(format!(
            "growth classification needs radius >= {RATIO_WINDOW}, got {radius}"
        )));
    }
    if g.clean_radius(y) < radius {
        return Err(SawError::BoundaryContamination {
            vertex: y,
            needed: radius,
            available: g.clean_radius(y),
        });
    }
    let dist = g.distances_from(y);
    let mut spheres = vec![0usize; radius + 1];
    for v in g.vertices() {
        let d = dist[v.index()];
        if d != u32::MAX && (d as usize) <= radius {
            spheres[d as usize] += 1;
        }
    }
    let spheres: Vec<usize> = spheres[1..].to_vec();
    if spheres.iter().all(|&s| s <= 1) {
        return Err(SawError::DegenerateSpheres(format!(
            "no sphere around vertex {y} has more than one vertex"
        )));
    }
    if spheres.iter().any(|&s| s == 0) {
        return Err(SawError::DegenerateSpheres(format!(
            "sphere sequence around vertex {y} hits zero inside the clean radius"
        )));
    }
    let log_s: Vec<f64> = spheres.iter().map(|&s| (s as f64).ln()).collect();
    let ns: Vec<f64> = (1..=spheres.len()).map(|n| n as f64).collect();
    let log_ns: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let (_, poly_exponent, poly_residual) = least_squares(&log_ns, &log_s);
    let (_, exp_rate, exp_residual) = least_squares(&ns, &log_s);
    let class = if exp_rate <= EXP_RATE_FLOOR {
        GrowthClass::Polynomial
    } else if (poly_residual - exp_residual).abs() <= RESIDUAL_BAND * poly_residual.max(exp_residual)
    {
        GrowthClass::Inconclusive
    } else if poly_residual < exp_residual {
        GrowthClass::Polynomial
    } else {
        GrowthClass::Exponential
    };
    Ok(GrowthReport { spheres, poly_exponent, exp_rate, poly_residual, exp_residual, class })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{
        build_hub_lattice, build_lattice_box, build_log_tree, from_edges, DEFAULT_VERTEX_BUDGET,
    };

    fn lattice(dim: u32, radius: u32) -> Graph {
        build_lattice_box(dim, radius, DEFAULT_VERTEX_BUDGET).unwrap()
    }

    fn at(g: &Graph, label: &str) -> VertexId {
        g.vertex_by_label(label).unwrap()
    }

    /// First entries of the square-lattice SAW counting sequence.
    const Z2_COUNTS: [u64; 9] = [1, 4, 12, 36, 100, 284, 780, 2172, 5916];

    #[test]
    fn chain_interior_has_two_walks_per_length() {
        let g = lattice(1, 10);
        let table = count_saws(&g, at(&g, "(0)"), 10).unwrap();
        assert_eq!(table.counts[0], 1);
        assert!(table.counts[1..].iter().all(|&c| c == 2));
        assert_eq!(table.clean_radius, 10);
    }

    #[test]
    fn chain_end_has_one_walk_per_length() {
        let g = lattice(1, 6);
        let table = count_saws(&g, at(&g, "(-6)"), 12).unwrap();
        assert_eq!(table.counts, vec![1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1]);
        assert_eq!(table.clean_radius, 0);
    }

    #[test]
    fn square_lattice_counts_match_the_known_sequence() {
        let g = lattice(2, 8);
        let table = count_saws(&g, at(&g, "(0,0)"), 8).unwrap();
        assert_eq!(table.counts, Z2_COUNTS);
        assert_eq!(table.clean_radius, 8);
    }

    #[test]
    fn four_cycle_walks_wrap_but_never_close() {
        let labels = vec!["a".into(), "b".into(), "c".into(), "d".into()];
        let g = from_edges(labels, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let table = count_saws(&g, VertexId(0), 5).unwrap();
        assert_eq!(table.counts, vec![1, 2, 2, 2, 0, 0]);
    }

    #[test]
    fn log_tree_root_walks_follow_the_branching() {
        let g = build_log_tree(20, DEFAULT_VERTEX_BUDGET).unwrap();
        let table = count_saws(&g, at(&g, "g0.0"), 8).unwrap();
        assert_eq!(table.counts[4], 1);
        assert_eq!(table.counts[5], 2);
        assert_eq!(table.counts[8], 2);
        // One step down from the root's line, walks can also climb back up.
        let spine = count_saws(&g, at(&g, "g5.0"), 1).unwrap();
        assert_eq!(spine.counts[1], 2);
    }

    #[test]
    fn budget_exhaustion_reports_completed_lengths() {
        let g = lattice(2, 8);
        let full = count_saws(&g, at(&g, "(0,0)"), 8).unwrap();
        let err = count_saws_with(&g, at(&g, "(0,0)"), 8, 500, Parallelism::Sequential)
            .expect_err("budget of 500 extensions cannot cover length 8");
        match err {
            SawError::BudgetExceeded { completed, last_completed, failed_n, .. } => {
                assert_eq!(failed_n, last_completed + 1);
                assert_eq!(completed[..], full.counts[..=last_completed]);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn budget_outcome_is_thread_count_independent() {
        let g = lattice(2, 6);
        for budget in [300u64, 1_000, 5_000] {
            let serial = count_saws_with(&g, at(&g, "(0,0)"), 6, budget, Parallelism::Sequential);
            let parallel = count_saws_with(&g, at(&g, "(0,0)"), 6, budget, Parallelism::Threads(4));
            match (serial, parallel) {
                (Ok(a), Ok(b)) => assert_eq!(a.counts, b.counts),
                (Err(SawError::BudgetExceeded { last_completed: a, .. }),
                 Err(SawError::BudgetExceeded { last_completed: b, .. })) => assert_eq!(a, b),
                (s, p) => panic!("outcomes diverged: {s:?} vs {p:?}"),
            }
        }
    }

    #[test]
    fn connective_estimate_decreases_on_the_square_lattice() {
        let g = lattice(2, 8);
        let table = count_saws(&g, at(&g, "(0,0)"), 8).unwrap();
        let mu = connective_estimate(&table).unwrap();
        assert_eq!(mu.len(), 8);
        assert!((mu[3] - 100f64.powf(0.25)).abs() < 1e-12);
        assert!(mu.windows(2).all(|w| w[1] < w[0]), "{mu:?}");
    }

    #[test]
    fn connective_estimate_respects_clean_radius() {
        let g = lattice(1, 3);
        let table = count_saws(&g, at(&g, "(2)"), 3).unwrap();
        assert_eq!(table.clean_radius, 1);
        assert_eq!(connective_estimate(&table).unwrap().len(), 1);
    }

    #[test]
    fn single_sum_on_the_chain_converges_below_one() {
        let g = lattice(1, 24);
        let report = assumption1_partial_sum(&g, at(&g, "(0)"), 0.5, 12).unwrap();
        assert_eq!(report.verdict, Verdict::Converging);
        assert!((report.shell_terms[0] - 1.0).abs() < 1e-15);
        for i in 1..=12 {
            assert!((report.shell_terms[i] - 0.5f64.powi(i as i32) * 4.0).abs() < 1e-12);
        }
        assert!(report.partial_sums.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn single_sum_tiny_weight_leaves_only_the_origin_term() {
        let g = lattice(2, 12);
        let report = assumption1_partial_sum(&g, at(&g, "(0,0)"), 1e-9, 6).unwrap();
        assert!((report.partial_sums.last().unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn single_sum_on_the_square_lattice_diverges_at_high_weight() {
        let g = lattice(2, 12);
        let report = assumption1_partial_sum(&g, at(&g, "(0,0)"), 0.9, 6).unwrap();
        assert_eq!(report.verdict, Verdict::Diverging);
    }

    #[test]
    fn single_sum_rejects_contaminated_truncations() {
        let g = lattice(1, 5);
        let err = assumption1_partial_sum(&g, at(&g, "(0)"), 0.5, 5).unwrap_err();
        assert!(matches!(err, SawError::BoundaryContamination { .. }), "{err:?}");
        assert!(matches!(
            assumption1_partial_sum(&g, at(&g, "(0)"), 1.5, 2),
            Err(SawError::InvalidParameter(_))
        ));
    }

    #[test]
    fn unbounded_degree_families_converge_at_small_weight() {
        let g = build_log_tree(20, DEFAULT_VERTEX_BUDGET).unwrap();
        let report = assumption1_partial_sum(&g, at(&g, "g0.0"), 0.2, 8).unwrap();
        assert_eq!(report.verdict, Verdict::Converging);
        // Hub shortcuts pull the unclean boundary ring within 5 hops of some
        // ball vertices, so 5 is the deepest contamination-free truncation here.
        let g = build_hub_lattice(20, DEFAULT_VERTEX_BUDGET).unwrap();
        let report = assumption1_partial_sum(&g, at(&g, "(0,0)"), 0.2, 5).unwrap();
        assert_eq!(report.verdict, Verdict::Converging);
    }

    #[test]
    fn double_sum_examples() {
        let g = lattice(1, 30);
        let center = at(&g, "(0)");
        let report = assumption2_partial_sum(&g, center, center, 0, 0.25, 8).unwrap();
        assert_eq!(report.verdict, Verdict::Converging);

        let report = assumption2_partial_sum(&g, center, center, 0, 1e-12, 4).unwrap();
        assert!((report.partial_sums.last().unwrap() - 1.0).abs() < 1e-4);

        let g = lattice(2, 12);
        let center = at(&g, "(0,0)");
        let report = assumption2_partial_sum(&g, center, center, 2, 0.9, 4).unwrap();
        assert_eq!(report.verdict, Verdict::Diverging);
    }

    #[test]
    fn chain_critical_weight_sits_just_below_one() {
        let g = lattice(1, 24);
        let report =
            critical_parameter_estimate(&g, at(&g, "(0)"), SeriesKind::SingleSum, 8).unwrap();
        let est = report.estimated_critical.unwrap();
        assert!((0.99..1.0).contains(&est), "estimate {est}");
    }

    #[test]
    fn square_lattice_critical_weight_tracks_the_connective_constant() {
        let g = lattice(2, 12);
        let center = at(&g, "(0,0)");
        let report =
            critical_parameter_estimate(&g, center, SeriesKind::SingleSum, 6).unwrap();
        let est = report.estimated_critical.unwrap();
        let table = count_saws(&g, center, 6).unwrap();
        let mu = connective_estimate(&table).unwrap();
        let reference = 1.0 / mu.last().unwrap();
        assert!(
            (est - reference).abs() <= 0.15 * reference,
            "estimate {est} vs 1/mu {reference}"
        );
    }

    #[test]
    fn growth_classification_by_family() {
        let g = lattice(2, 8);
        let report = sphere_growth_classify(&g, at(&g, "(0,0)"), 8).unwrap();
        assert_eq!(report.class, GrowthClass::Polynomial);
        assert!((report.poly_exponent - 1.0).abs() < 1e-9, "{}", report.poly_exponent);

        let g = lattice(1, 10);
        let report = sphere_growth_classify(&g, at(&g, "(0)"), 10).unwrap();
        assert_eq!(report.class, GrowthClass::Polynomial);

        // Full binary tree, depth 9, heap-indexed.
        let n = (1 << 9) - 1;
        let labels: Vec<String> = (0..n).map(|i| format!("t{i}")).collect();
        let edges: Vec<(u32, u32)> =
            (1..n as u32).map(|child| ((child - 1) / 2, child)).collect();
        let g = from_edges(labels, &edges).unwrap();
        let report = sphere_growth_classify(&g, VertexId(0), 8).unwrap();
        assert_eq!(report.class, GrowthClass::Exponential);
        assert!((report.exp_rate - 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn growth_classification_rejects_degenerate_spheres() {
        let labels: Vec<String> = (0..6).map(|i| format!("p{i}")).collect();
        let edges: Vec<(u32, u32)> = (0..5).map(|i| (i, i + 1)).collect();
        let g = from_edges(labels, &edges).unwrap();
        assert!(matches!(
            sphere_growth_classify(&g, VertexId(0), 5),
            Err(SawError::DegenerateSpheres(_))
        ));
    }

    #[test]
    fn ratio_verdict_dead_band_is_inconclusive() {
        let flat: Vec<f64> = (0..6).map(|i| 1.01f64.powi(i)).collect();
        assert_eq!(ratio_verdict(&flat), Verdict::Inconclusive);
        let short = [1.0, 0.5];
        assert_eq!(ratio_verdict(&short), Verdict::Inconclusive);
    }
}
