//! Helpers shared by the integration-test targets.
//!
//! The walk-count oracle here is deliberately written against the grain of
//! the library enumerator: a single non-recursive depth-first sweep over an
//! explicit stack, visiting neighbours in reversed adjacency order and
//! tallying every depth in one pass, instead of the library's per-length
//! recursive deepening in forward order. Agreement between the two is then
//! evidence about the counts, not about shared code.
#![allow(dead_code)]

use andergraph_core::graph::{from_edges, Graph};
use andergraph_core::VertexId;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::collections::BTreeSet;

/// Exact self-avoiding-walk counts from `x` for every length `0..=n_max`,
/// enumerated independently of the library.
pub fn oracle_counts(g: &Graph, x: VertexId, n_max: usize) -> Vec<u64> {
    let mut counts = vec![0u64; n_max + 1];
    counts[0] = 1;
    if n_max == 0 {
        return counts;
    }
    let mut visited = vec![false; g.vertex_count()];
    visited[x.index()] = true;
    // Each frame holds the vertex it stands on and how many of its
    // neighbours (in reversed order) have been expanded so far.
    let mut stack: Vec<(VertexId, usize)> = vec![(x, 0)];
    while let Some(top) = stack.len().checked_sub(1) {
        let (v, cursor) = stack[top];
        let nbrs = g.neighbors(v);
        if cursor == nbrs.len() {
            visited[v.index()] = false;
            stack.pop();
            continue;
        }
        stack[top].1 += 1;
        let u = nbrs[nbrs.len() - 1 - cursor];
        if !visited[u.index()] {
            counts[stack.len()] += 1;
            if stack.len() < n_max {
                visited[u.index()] = true;
                stack.push((u, 0));
            }
        }
    }
    counts
}

/// One draw uniform on `[0, 1)`.
pub fn unit(rng: &mut ChaCha12Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * 2f64.powi(-53)
}

/// One draw uniform on `[lo, hi)`.
pub fn uniform(rng: &mut ChaCha12Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * unit(rng)
}

/// One draw from `0..n`.
pub fn index(rng: &mut ChaCha12Rng, n: usize) -> usize {
    (rng.next_u64() % n as u64) as usize
}

pub fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Connected graph on `2..=max_vertices` vertices: a random attachment tree
/// plus up to one extra random edge per vertex.
pub fn random_connected_graph(rng: &mut ChaCha12Rng, max_vertices: usize) -> Graph {
    let n = 2 + index(rng, max_vertices - 1);
    let mut edges: BTreeSet<(u32, u32)> = BTreeSet::new();
    for v in 1..n as u32 {
        let parent = index(rng, v as usize) as u32;
        edges.insert((parent, v));
    }
    for _ in 0..index(rng, n) {
        let a = index(rng, n) as u32;
        let b = index(rng, n) as u32;
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    let labels = (0..n).map(|i| i.to_string()).collect();
    let edges: Vec<(u32, u32)> = edges.into_iter().collect();
    from_edges(labels, &edges).expect("normalized edge list is valid")
}

/// The vertex carrying a label, which must exist.
pub fn at(g: &Graph, label: &str) -> VertexId {
    g.vertex_by_label(label).unwrap_or_else(|| panic!("no vertex labelled {label}"))
}
