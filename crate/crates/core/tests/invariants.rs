//! Property tests that tie the modules together: the walk enumerator against
//! an independently coded oracle, growth monotonicity of walk counts and
//! weighted walk series, serialization round trips, and the symmetries every
//! Green function must carry.

mod common;

use andergraph_core::graph::{build_lattice_box, from_edges, Graph, DEFAULT_VERTEX_BUDGET};
use andergraph_core::resolvent::GreenSolver;
use andergraph_core::saw::{self, SeriesKind};
use andergraph_core::{
    DisorderModel, FiniteVolume, HamiltonianMatrix, UniformDensity, VertexId,
};
use num_complex::Complex64;
use proptest::prelude::*;

/// The subgraph induced by a vertex mask, relabelled compactly, plus the new
/// id of one distinguished vertex that the mask must keep.
fn induced_subgraph(g: &Graph, keep: &[bool], pinned: VertexId) -> (Graph, VertexId) {
    assert!(keep[pinned.index()]);
    let mut new_id = vec![None; g.vertex_count()];
    let mut labels = Vec::new();
    for v in g.vertices().filter(|v| keep[v.index()]) {
        new_id[v.index()] = Some(labels.len() as u32);
        labels.push(g.label(v).to_string());
    }
    let edges: Vec<(u32, u32)> = g
        .edges()
        .filter(|&(a, b)| keep[a.index()] && keep[b.index()])
        .map(|(a, b)| (new_id[a.index()].unwrap(), new_id[b.index()].unwrap()))
        .collect();
    let sub = from_edges(labels, &edges).expect("induced edge list is valid");
    (sub, VertexId(new_id[pinned.index()].unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn enumerator_agrees_with_the_oracle(seed in any::<u64>(), n_max in 0usize..=8) {
        let mut rng = common::rng(seed);
        let g = common::random_connected_graph(&mut rng, 30);
        let x = VertexId(common::index(&mut rng, g.vertex_count()) as u32);
        let table = saw::count_saws(&g, x, n_max).unwrap();
        let oracle = common::oracle_counts(&g, x, n_max);
        for n in 0..=n_max {
            prop_assert_eq!(table.count(n), oracle[n], "length {}", n);
        }
    }

    #[test]
    fn walk_counts_never_shrink_on_a_larger_graph(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let g = common::random_connected_graph(&mut rng, 24);
        let x = VertexId(common::index(&mut rng, g.vertex_count()) as u32);
        let keep: Vec<bool> = g
            .vertices()
            .map(|v| v == x || common::unit(&mut rng) < 0.7)
            .collect();
        let (sub, sx) = induced_subgraph(&g, &keep, x);
        let full = saw::count_saws(&g, x, 6).unwrap();
        let smaller = saw::count_saws(&sub, sx, 6).unwrap();
        for n in 0..=6 {
            prop_assert!(smaller.count(n) <= full.count(n), "length {}", n);
        }
    }

    #[test]
    fn weighted_series_monotone_in_weight_and_radius(
        alpha in 0.05f64..0.85,
        bump in 0.01f64..0.1,
        radius in 2usize..=5,
    ) {
        // Box radius 12 keeps walk counts clean for every vertex the series
        // touches: a vertex at distance r needs untruncated counts to
        // length r, so r + 1 <= 6 must not exceed half the box.
        let g = build_lattice_box(2, 12, DEFAULT_VERTEX_BUDGET).unwrap();
        let y = common::at(&g, "(0,0)");
        let base = saw::assumption1_partial_sum(&g, y, alpha, radius).unwrap();
        let heavier = saw::assumption1_partial_sum(&g, y, alpha + bump, radius).unwrap();
        let wider = saw::assumption1_partial_sum(&g, y, alpha, radius + 1).unwrap();

        for pair in base.partial_sums.windows(2) {
            prop_assert!(pair[0] <= pair[1]);
        }
        let at = |r: &saw::AssumptionReport| *r.partial_sums.last().unwrap();
        let slack = 1e-12 * (1.0 + at(&heavier));
        prop_assert!(at(&base) <= at(&heavier) + slack);
        prop_assert!(at(&base) <= at(&wider) + slack);
        prop_assert_eq!(base.partial_sums.len(), radius + 1);
        prop_assert_eq!(wider.partial_sums.len(), radius + 2);
    }

    #[test]
    fn graph_text_round_trips(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let g = common::random_connected_graph(&mut rng, 30);
        let back = Graph::parse_text(g.to_text().as_bytes()).unwrap();
        prop_assert_eq!(back.vertex_count(), g.vertex_count());
        for v in g.vertices() {
            prop_assert_eq!(back.label(v), g.label(v));
            prop_assert_eq!(back.is_clean(v), g.is_clean(v));
        }
        let edges: Vec<_> = g.edges().collect();
        let back_edges: Vec<_> = back.edges().collect();
        prop_assert_eq!(edges, back_edges);
    }

    #[test]
    fn green_function_is_symmetric_bounded_and_conjugate_covariant(
        seed in any::<u64>(),
        re in -3.0f64..3.0,
        im in 0.2f64..2.0,
        flip in any::<bool>(),
        lambda in 0.0f64..5.0,
    ) {
        let mut rng = common::rng(seed);
        let g = common::random_connected_graph(&mut rng, 24);
        let volume = FiniteVolume::whole(&g);
        let model =
            DisorderModel::new(lambda, UniformDensity::symmetric_unit(), seed).unwrap();
        let h = HamiltonianMatrix::assemble(&g, &model, 0, &volume).unwrap();
        let z = Complex64::new(re, if flip { -im } else { im });

        let at_z = GreenSolver::new(&h, z).unwrap().dense().unwrap();
        let at_conj = GreenSolver::new(&h, z.conj()).unwrap().dense().unwrap();
        let cap = 1.0 / im + 1e-9;
        for i in 0..volume.len() {
            for j in 0..volume.len() {
                prop_assert!((at_z[(i, j)] - at_z[(j, i)]).norm() < 1e-9);
                prop_assert!((at_z[(i, j)] - at_conj[(j, i)].conj()).norm() < 1e-9);
                prop_assert!(at_z[(i, j)].norm() <= cap);
            }
        }
    }
}

#[test]
fn chain_critical_weight_sits_just_below_one() {
    let g = build_lattice_box(1, 40, DEFAULT_VERTEX_BUDGET).unwrap();
    let y = common::at(&g, "(0)");
    let report =
        saw::critical_parameter_estimate(&g, y, SeriesKind::SingleSum, 20).unwrap();
    let estimate = report.estimated_critical.unwrap();
    assert!((0.99..1.0).contains(&estimate), "estimate {estimate}");
}
