//! Acceptance suite: fourteen numbered end-to-end checks, one test each.
//!
//! Every test prints exactly one `[criterion NN] PASS/FAIL` line (visible
//! with `--nocapture`; the harness result line mirrors it) and then asserts.
//! All tolerances, instance sizes, seeds, and runtime budgets are pinned in
//! this file. The Monte Carlo configurations are cached in `OnceLock`s so
//! the determinism check replays the exact same configuration bit for bit.

mod common;

use std::sync::OnceLock;
use std::time::Instant;

use andergraph_core::dynamics::{
    dynamical_scan, graf_inequality_check, log_time_grid, stone_variant_check,
    DynamicsReport, EigenDecomposition,
};
use andergraph_core::graph::{
    build_hub_lattice, build_lattice_box, build_log_tree, from_edges, Graph,
    DEFAULT_VERTEX_BUDGET,
};
use andergraph_core::resolvent::{
    fractional_moments_mc, rank_one_structure_check, resolvent_identity_check,
    saw_expansion_check, second_moments_mc, spectral_averaging_check, verify_fractional_bound,
    verify_second_moment_bound, BoundConstants, MomentEstimate,
};
use andergraph_core::saw::{
    assumption1_partial_sum, connective_estimate, count_saws, critical_parameter_estimate,
    SeriesKind, Verdict,
};
use andergraph_core::{
    DisorderModel, FiniteVolume, HamiltonianMatrix, Parallelism, SpectralParams,
    UniformDensity, VertexId,
};
use num_complex::Complex64;

fn report(number: u32, name: &str, passed: bool, detail: &str) {
    println!(
        "[criterion {number:02}] {} {name}: {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
    assert!(passed, "criterion {number:02} ({name}) failed: {detail}");
}

// --- pinned Monte Carlo configurations, cached for the determinism replay ---

const MOMENT_TRIALS: u64 = 2000;
const SCAN_TRIALS: u64 = 20;
const CHAIN_SEED: u64 = 42;
const GRID_SEED: u64 = 43;
const SCAN_SEED: u64 = 7;
const GRAF_SEED: u64 = 1105;
const CONFIDENCE: f64 = 2.33;

fn moment_z() -> Complex64 {
    Complex64::new(1.0, 0.5)
}

fn chain201() -> Graph {
    build_lattice_box(1, 100, DEFAULT_VERTEX_BUDGET).unwrap()
}

fn grid15() -> Graph {
    build_lattice_box(2, 7, DEFAULT_VERTEX_BUDGET).unwrap()
}

/// 400-vertex path with no marked truncation: the whole object is the graph
/// under study, so the dynamics scan sees no boundary shell.
fn chain400() -> Graph {
    let labels = (0..400).map(|i| i.to_string()).collect();
    let edges: Vec<(u32, u32)> = (0..399).map(|i| (i, i + 1)).collect();
    from_edges(labels, &edges).unwrap()
}

/// 20 x 20 grid, column-major ids, likewise boundary-free by construction.
fn grid20() -> Graph {
    let n = 20u32;
    let labels = (0..n * n).map(|id| format!("{},{}", id / n, id % n)).collect();
    let mut edges = Vec::new();
    for col in 0..n {
        for row in 0..n {
            let id = col * n + row;
            if row + 1 < n {
                edges.push((id, id + 1));
            }
            if col + 1 < n {
                edges.push((id, id + n));
            }
        }
    }
    from_edges(labels, &edges).unwrap()
}

fn run_chain_fractional(parallelism: Parallelism) -> Vec<MomentEstimate> {
    let g = chain201();
    let volume = FiniteVolume::whole(&g);
    let model =
        DisorderModel::new(10.0, UniformDensity::symmetric_unit(), CHAIN_SEED).unwrap();
    let params = SpectralParams::new(moment_z(), 0.5).unwrap();
    let x = common::at(&g, "(0)");
    let ys: Vec<VertexId> =
        (0..=5).map(|d| common::at(&g, &format!("({d})"))).collect();
    fractional_moments_mc(&g, &volume, &model, params, x, &ys, MOMENT_TRIALS, parallelism)
        .unwrap()
}

fn run_grid_fractional(parallelism: Parallelism) -> Vec<MomentEstimate> {
    let g = grid15();
    let volume = FiniteVolume::whole(&g);
    let model =
        DisorderModel::new(10.0, UniformDensity::symmetric_unit(), GRID_SEED).unwrap();
    let params = SpectralParams::new(moment_z(), 0.5).unwrap();
    let x = common::at(&g, "(0,0)");
    let ys: Vec<VertexId> =
        (0..=3).map(|d| common::at(&g, &format!("({d},0)"))).collect();
    fractional_moments_mc(&g, &volume, &model, params, x, &ys, MOMENT_TRIALS, parallelism)
        .unwrap()
}

fn run_chain_second(parallelism: Parallelism) -> Vec<MomentEstimate> {
    let g = chain201();
    let volume = FiniteVolume::whole(&g);
    let model =
        DisorderModel::new(10.0, UniformDensity::symmetric_unit(), CHAIN_SEED).unwrap();
    let x = common::at(&g, "(0)");
    let ys: Vec<VertexId> =
        (0..=3).map(|d| common::at(&g, &format!("({d})"))).collect();
    second_moments_mc(&g, &volume, &model, moment_z(), x, &ys, MOMENT_TRIALS, parallelism)
        .unwrap()
}

fn run_scan(lambda: f64, parallelism: Parallelism) -> Vec<DynamicsReport> {
    let g = chain400();
    let volume = FiniteVolume::whole(&g);
    let model =
        DisorderModel::new(lambda, UniformDensity::symmetric_unit(), SCAN_SEED).unwrap();
    let o = common::at(&g, "200");
    let mut psi = vec![0.0; volume.len()];
    psi[volume.position(o).unwrap()] = 1.0;
    let times = log_time_grid(0.1, 200.0, 64).unwrap();
    // (-30, 30) encloses the spectrum for both couplings, so the projection
    // keeps the whole state.
    dynamical_scan(
        &g,
        &volume,
        &model,
        (-30.0, 30.0),
        o,
        1.0,
        &psi,
        &times,
        SCAN_TRIALS,
        parallelism,
    )
    .unwrap()
}

fn chain_fractional() -> &'static [MomentEstimate] {
    static CACHE: OnceLock<Vec<MomentEstimate>> = OnceLock::new();
    CACHE.get_or_init(|| run_chain_fractional(Parallelism::Auto))
}

fn grid_fractional() -> &'static [MomentEstimate] {
    static CACHE: OnceLock<Vec<MomentEstimate>> = OnceLock::new();
    CACHE.get_or_init(|| run_grid_fractional(Parallelism::Auto))
}

fn chain_second() -> &'static [MomentEstimate] {
    static CACHE: OnceLock<Vec<MomentEstimate>> = OnceLock::new();
    CACHE.get_or_init(|| run_chain_second(Parallelism::Auto))
}

fn weak_scan() -> &'static [DynamicsReport] {
    static CACHE: OnceLock<Vec<DynamicsReport>> = OnceLock::new();
    CACHE.get_or_init(|| run_scan(0.1, Parallelism::Auto))
}

fn strong_scan() -> &'static [DynamicsReport] {
    static CACHE: OnceLock<Vec<DynamicsReport>> = OnceLock::new();
    CACHE.get_or_init(|| run_scan(10.0, Parallelism::Auto))
}

#[test]
fn criterion_01_walk_counts_match_the_independent_oracle() {
    let start = Instant::now();
    let chain = build_lattice_box(1, 30, DEFAULT_VERTEX_BUDGET).unwrap();
    let cycle = from_edges(
        vec!["0".into(), "1".into(), "2".into(), "3".into()],
        &[(0, 1), (1, 2), (2, 3), (0, 3)],
    )
    .unwrap();
    let grid = build_lattice_box(2, 8, DEFAULT_VERTEX_BUDGET).unwrap();
    let tree = build_log_tree(20, DEFAULT_VERTEX_BUDGET).unwrap();
    let hub = build_hub_lattice(20, DEFAULT_VERTEX_BUDGET).unwrap();

    let cases: [(&str, &Graph, VertexId, usize); 6] = [
        ("chain", &chain, common::at(&chain, "(0)"), 8),
        ("4-cycle", &cycle, VertexId(0), 8),
        ("grid interior", &grid, common::at(&grid, "(0,0)"), 6),
        ("log tree root", &tree, common::at(&tree, "g0.0"), 8),
        ("hub lattice center", &hub, common::at(&hub, "(0,0)"), 6),
        ("hub lattice hub", &hub, common::at(&hub, "(8,0)"), 6),
    ];
    let mut matched = 0usize;
    for (name, g, x, n_max) in cases {
        let table = count_saws(g, x, n_max).unwrap();
        let oracle = common::oracle_counts(g, x, n_max);
        for n in 0..=n_max {
            assert_eq!(table.count(n), oracle[n], "{name}, length {n}");
        }
        matched += 1;
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        1,
        "walk counts match the independent oracle",
        matched == 6 && elapsed < 120.0,
        &format!("exact on {matched}/6 origins across 5 graphs in {elapsed:.1} s (< 120 s)"),
    );
}

#[test]
fn criterion_02_square_lattice_interior_counts() {
    let grid = build_lattice_box(2, 8, DEFAULT_VERTEX_BUDGET).unwrap();
    let table = count_saws(&grid, common::at(&grid, "(0,0)"), 4).unwrap();
    let got: Vec<u64> = (1..=4).map(|n| table.count(n)).collect();
    let passed = got == [4, 12, 36, 100];
    report(
        2,
        "square-lattice interior walk counts",
        passed,
        &format!("c(1..4) = {got:?}, expected [4, 12, 36, 100], exact"),
    );
}

#[test]
fn criterion_03_spectral_averaging_inequality() {
    let start = Instant::now();
    let density = UniformDensity::symmetric_unit();
    let (lhs, rhs) = spectral_averaging_check(&density, 0.5, Complex64::ZERO).unwrap();
    let reference_ok =
        (lhs - 2.0).abs() <= 1e-6 && (rhs - 2.0 * 2f64.sqrt()).abs() <= 1e-12 && lhs <= rhs;

    let mut rng = common::rng(9);
    let mut below = 0usize;
    for k in 0..100 {
        let s = common::uniform(&mut rng, 0.05, 0.95);
        let re = common::uniform(&mut rng, -1.5, 1.5);
        let im = if k % 2 == 0 { 0.0 } else { common::uniform(&mut rng, 0.05, 1.0) };
        let (l, r) = spectral_averaging_check(&density, s, Complex64::new(re, im)).unwrap();
        if l <= r {
            below += 1;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        3,
        "spectral averaging inequality",
        reference_ok && below == 100 && elapsed < 10.0,
        &format!(
            "lhs = {lhs:.7} (2 +- 1e-6), rhs = {rhs:.12} (2*sqrt(2) +- 1e-12), \
             lhs <= rhs on {below}/100 random (s, beta) in {elapsed:.1} s (< 10 s)"
        ),
    );
}

#[test]
fn criterion_04_decay_constants_closed_form() {
    let constants = BoundConstants::new(0.5, 4.0, 0.5).unwrap();
    let dc = (constants.c() - 2f64.sqrt()).abs();
    let dcp = (constants.c_prime() - 4.0).abs();
    report(
        4,
        "decay constants closed form",
        dc <= 1e-12 && dcp <= 1e-12,
        &format!("|C - sqrt(2)| = {dc:.1e}, |C' - 4| = {dcp:.1e}, both <= 1e-12"),
    );
}

#[test]
fn criterion_05_walk_expansion_identity() {
    let start = Instant::now();
    let mut rng = common::rng(11);
    let mut worst = 0.0f64;
    for trial in 0..20u64 {
        let g = common::random_connected_graph(&mut rng, 50);
        let volume = FiniteVolume::whole(&g);
        let x = VertexId(common::index(&mut rng, g.vertex_count()) as u32);
        let dist = g.distances_from(x);
        let near: Vec<VertexId> = g
            .vertices()
            .filter(|v| (1..=4).contains(&(dist[v.index()] as usize)))
            .collect();
        let y = near[common::index(&mut rng, near.len())];
        let lambda = common::uniform(&mut rng, 0.3, 1.2);
        let model =
            DisorderModel::new(lambda, UniformDensity::symmetric_unit(), 1000 + trial)
                .unwrap();
        let sign = if common::index(&mut rng, 2) == 0 { 1.0 } else { -1.0 };
        let z = Complex64::new(
            common::uniform(&mut rng, -2.0, 2.0),
            sign * common::uniform(&mut rng, 0.8, 2.0),
        );
        let rep = saw_expansion_check(&g, &model, trial, &volume, z, x, y).unwrap();
        worst = worst.max(rep.relative_deviation);
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        5,
        "walk expansion identity",
        worst <= 1e-9 && elapsed < 60.0,
        &format!(
            "worst relative deviation {worst:.2e} <= 1e-9 over 20 instances \
             (<= 50 vertices, d <= 4) in {elapsed:.1} s (< 60 s)"
        ),
    );
}

#[test]
fn criterion_06_depletion_identity_and_cross_block_vanishing() {
    let mut rng = common::rng(12);
    let mut worst_dev = 0.0f64;
    let mut worst_cross = 0.0f64;
    for trial in 0..50u64 {
        let g = common::random_connected_graph(&mut rng, 200);
        let n = g.vertex_count();
        let volume = FiniteVolume::whole(&g);
        let mut keep: Vec<bool> = (0..n).map(|_| common::unit(&mut rng) < 0.5).collect();
        keep[0] = true;
        keep[n - 1] = false;
        let block = FiniteVolume::new(
            &g,
            (0..n).filter(|&i| keep[i]).map(|i| VertexId(i as u32)).collect(),
        )
        .unwrap();
        let lambda = common::uniform(&mut rng, 0.0, 5.0);
        let model =
            DisorderModel::new(lambda, UniformDensity::symmetric_unit(), 2000 + trial)
                .unwrap();
        let sign = if common::index(&mut rng, 2) == 0 { 1.0 } else { -1.0 };
        let z = Complex64::new(
            common::uniform(&mut rng, -3.0, 3.0),
            sign * common::uniform(&mut rng, 0.3, 2.0),
        );
        let rep = resolvent_identity_check(&g, &model, trial, &volume, &block, z).unwrap();
        worst_dev = worst_dev.max(rep.max_deviation);
        worst_cross = worst_cross.max(rep.cross_block_max);
    }
    report(
        6,
        "depletion identity and cross-block vanishing",
        worst_dev <= 1e-9 && worst_cross <= 1e-9,
        &format!(
            "50 instances (<= 200 vertices): max identity deviation {worst_dev:.2e}, \
             max cross-block entry {worst_cross:.2e}, both <= 1e-9"
        ),
    );
}

#[test]
fn criterion_07_single_site_affine_structure() {
    let mut rng = common::rng(13);
    let mut worst = 0.0f64;
    for trial in 0..20u64 {
        let g = common::random_connected_graph(&mut rng, 80);
        let volume = FiniteVolume::whole(&g);
        let x = VertexId(common::index(&mut rng, g.vertex_count()) as u32);
        let lambda = common::uniform(&mut rng, 0.5, 5.0);
        let model =
            DisorderModel::new(lambda, UniformDensity::symmetric_unit(), 3000 + trial)
                .unwrap();
        let sign = if common::index(&mut rng, 2) == 0 { 1.0 } else { -1.0 };
        let z = Complex64::new(
            common::uniform(&mut rng, -2.0, 2.0),
            sign * common::uniform(&mut rng, 0.3, 1.5),
        );
        let rep = rank_one_structure_check(&g, &model, trial, &volume, z, x).unwrap();
        worst = worst.max(rep.slope_deviation);
    }
    report(
        7,
        "single-site affine structure",
        worst <= 1e-8,
        &format!("worst |slope - lambda| = {worst:.2e} <= 1e-8 over 20 instances"),
    );
}

#[test]
fn criterion_08_fractional_moment_bound() {
    let start = Instant::now();
    let constants = BoundConstants::new(0.5, 10.0, 0.5).unwrap();

    let chain = chain201();
    let chain_walks = count_saws(&chain, common::at(&chain, "(0)"), 5).unwrap();
    let mut margin = f64::INFINITY;
    let mut all = true;
    for est in chain_fractional() {
        let rep =
            verify_fractional_bound(*est, &constants, chain_walks.count(est.distance), CONFIDENCE);
        all &= rep.passed && est.clean;
        margin = margin.min(rep.bound - (est.mean + CONFIDENCE * est.stderr));
    }

    let grid = grid15();
    let grid_walks = count_saws(&grid, common::at(&grid, "(0,0)"), 3).unwrap();
    for est in grid_fractional() {
        let rep =
            verify_fractional_bound(*est, &constants, grid_walks.count(est.distance), CONFIDENCE);
        all &= rep.passed && est.clean;
        margin = margin.min(rep.bound - (est.mean + CONFIDENCE * est.stderr));
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        8,
        "fractional moment bound",
        all && elapsed < 180.0,
        &format!(
            "mean + {CONFIDENCE} stderr <= C' C^d c(d) on chain d <= 5 and 15x15 grid d <= 3 \
             ({MOMENT_TRIALS} trials), slimmest margin {margin:.3} in {elapsed:.1} s (< 180 s)"
        ),
    );
}

#[test]
fn criterion_09_second_moment_bound() {
    let constants = BoundConstants::new(0.5, 10.0, 0.5).unwrap();
    let chain = chain201();
    let walks = count_saws(&chain, common::at(&chain, "(0)"), 3).unwrap();
    let mut margin = f64::INFINITY;
    let mut all = true;
    for est in chain_second() {
        let rep =
            verify_second_moment_bound(*est, &constants, walks.count(est.distance), CONFIDENCE);
        all &= rep.passed && est.clean;
        margin = margin.min(rep.bound - (est.mean + CONFIDENCE * est.stderr));
    }
    report(
        9,
        "second moment bound",
        all,
        &format!(
            "|Im z| (mean + {CONFIDENCE} stderr of |G|^2) <= max(1, pi rho) C' C^d c(d) \
             on chain d <= 3 ({MOMENT_TRIALS} trials), slimmest margin {margin:.3}"
        ),
    );
}

#[test]
fn criterion_10_resolvent_identity_half_weight_at_endpoints() {
    let g = from_edges(vec!["a".into(), "b".into()], &[]).unwrap();
    let volume = FiniteVolume::whole(&g);
    let h = HamiltonianMatrix::with_potential(&g, 1.0, &volume, vec![0.0, 1.0]).unwrap();
    let ed = EigenDecomposition::new(&h).unwrap();
    let rep = stone_variant_check(
        &ed,
        |_| 1.0,
        0.0,
        0.5,
        &[1.0, 0.0],
        &[1e-1, 1e-2, 1e-3, 1e-4],
        1e-10,
    )
    .unwrap();
    let errors: Vec<f64> = rep.samples.iter().map(|s| s.error).collect();
    let final_lhs = rep.samples.last().unwrap().lhs;
    let passed = (rep.target - 0.5).abs() <= 1e-12
        && (final_lhs - 0.5).abs() <= 1e-2
        && errors.windows(2).all(|w| w[1] < w[0]);
    let shown: Vec<String> = errors.iter().map(|e| format!("{e:.2e}")).collect();
    report(
        10,
        "half weight at interval endpoints",
        passed,
        &format!(
            "H = diag(0, 1), interval (0, 0.5): lhs(1e-4) = {final_lhs:.6} (1/2 +- 1e-2), \
             errors [{}] strictly decreasing",
            shown.join(", ")
        ),
    );
}

#[test]
fn criterion_11_time_average_versus_resolvent_average() {
    let g = grid20();
    let volume = FiniteVolume::whole(&g);
    let model =
        DisorderModel::new(10.0, UniformDensity::symmetric_unit(), GRAF_SEED).unwrap();
    // State on the left of the grid, spatial projection onto the right half,
    // a narrow window in the middle of the spectrum.
    let source = common::at(&g, "2,10");
    let sites: Vec<VertexId> = (200..400).map(VertexId).collect();
    let mut psi = vec![0.0; volume.len()];
    psi[volume.position(source).unwrap()] = 1.0;

    let mut worst_gap = f64::NEG_INFINITY;
    let mut all = true;
    for trial in 0..10u64 {
        let h = HamiltonianMatrix::assemble(&g, &model, trial, &volume).unwrap();
        let ed = EigenDecomposition::new(&h).unwrap();
        let mid = 0.5 * (ed.eigenvalues()[0] + ed.eigenvalues()[ed.dim() - 1]);
        let samples = graf_inequality_check(
            &ed,
            &sites,
            mid - 0.4,
            mid + 0.4,
            &psi,
            &[0.1, 0.01],
            600.0,
            1e-8,
        )
        .unwrap();
        for s in &samples {
            all &= s.lhs <= s.rhs + 1e-3;
            worst_gap = worst_gap.max(s.lhs - s.rhs);
        }
    }
    report(
        11,
        "time average versus resolvent average",
        all,
        &format!(
            "lhs <= rhs + 1e-3 on 10 random 20x20 instances at eps in {{0.1, 0.01}}, \
             worst lhs - rhs = {worst_gap:.2e}"
        ),
    );
}

#[test]
fn criterion_12_dynamical_contrast_between_couplings() {
    let start = Instant::now();
    let weak = weak_scan();
    let strong = strong_scan();
    let mut ratios: Vec<f64> = weak
        .iter()
        .zip(strong.iter())
        .map(|(w, s)| {
            assert_eq!(w.trial, s.trial);
            w.supremum / s.supremum
        })
        .collect();
    ratios.sort_by(f64::total_cmp);
    let median = 0.5 * (ratios[ratios.len() / 2 - 1] + ratios[ratios.len() / 2]);
    let elapsed = start.elapsed().as_secs_f64();
    report(
        12,
        "dynamical contrast between couplings",
        median >= 10.0 && elapsed < 600.0,
        &format!(
            "400-vertex chain, p = 1, horizon 200, {SCAN_TRIALS} trials: median \
             sup-moment ratio (lambda 0.1 over 10) = {median:.1} >= 10 in {elapsed:.1} s (< 600 s)"
        ),
    );
}

#[test]
fn criterion_13_series_checker_sanity() {
    let chain = build_lattice_box(1, 40, DEFAULT_VERTEX_BUDGET).unwrap();
    let chain_est = critical_parameter_estimate(
        &chain,
        common::at(&chain, "(0)"),
        SeriesKind::SingleSum,
        20,
    )
    .unwrap()
    .estimated_critical
    .unwrap();

    let grid = build_lattice_box(2, 16, DEFAULT_VERTEX_BUDGET).unwrap();
    let origin = common::at(&grid, "(0,0)");
    let table = count_saws(&grid, origin, 8).unwrap();
    let mu = *connective_estimate(&table).unwrap().last().unwrap();
    let grid_est =
        critical_parameter_estimate(&grid, origin, SeriesKind::SingleSum, 8)
            .unwrap()
            .estimated_critical
            .unwrap();
    let relative = (grid_est - 1.0 / mu).abs() / (1.0 / mu);

    let hub = build_hub_lattice(20, DEFAULT_VERTEX_BUDGET).unwrap();
    let hub_verdict =
        assumption1_partial_sum(&hub, common::at(&hub, "(0,0)"), 0.2, 5).unwrap().verdict;

    let tree = build_log_tree(20, DEFAULT_VERTEX_BUDGET).unwrap();
    let tree_verdict =
        assumption1_partial_sum(&tree, common::at(&tree, "g0.0"), 0.2, 10).unwrap().verdict;

    let passed = chain_est >= 0.99
        && relative <= 0.15
        && hub_verdict == Verdict::Converging
        && tree_verdict == Verdict::Converging;
    report(
        13,
        "series checker sanity",
        passed,
        &format!(
            "chain critical weight {chain_est:.4} >= 0.99; grid estimate {grid_est:.4} vs \
             1/mu-hat(8) = {:.4} (off by {:.1}% <= 15%); hub and tree verdicts at weight 0.2: \
             {hub_verdict}, {tree_verdict}",
            1.0 / mu,
            100.0 * relative
        ),
    );
}

#[test]
fn criterion_14_bit_identical_reruns() {
    fn estimates_identical(a: &[MomentEstimate], b: &[MomentEstimate]) -> bool {
        a.len() == b.len()
            && a.iter().zip(b).all(|(p, q)| {
                p.mean.to_bits() == q.mean.to_bits()
                    && p.stderr.to_bits() == q.stderr.to_bits()
                    && p.trials == q.trials
                    && p.distance == q.distance
            })
    }
    fn scans_identical(a: &[DynamicsReport], b: &[DynamicsReport]) -> bool {
        a.len() == b.len()
            && a.iter().zip(b).all(|(p, q)| {
                p.trial == q.trial
                    && p.supremum.to_bits() == q.supremum.to_bits()
                    && p.moments.len() == q.moments.len()
                    && p
                        .moments
                        .iter()
                        .zip(&q.moments)
                        .all(|(m, n)| m.to_bits() == n.to_bits())
                    && p.boundary_flagged == q.boundary_flagged
            })
    }

    let chain_replay = estimates_identical(chain_fractional(), &run_chain_fractional(Parallelism::Auto));
    let chain_serial =
        estimates_identical(chain_fractional(), &run_chain_fractional(Parallelism::Sequential));
    let grid_serial =
        estimates_identical(grid_fractional(), &run_grid_fractional(Parallelism::Sequential));
    let second_serial =
        estimates_identical(chain_second(), &run_chain_second(Parallelism::Sequential));
    let scan_serial = scans_identical(weak_scan(), &run_scan(0.1, Parallelism::Sequential));

    let passed =
        chain_replay && chain_serial && grid_serial && second_serial && scan_serial;
    report(
        14,
        "bit-identical Monte Carlo reruns",
        passed,
        &format!(
            "replay/thread-count invariance: chain fractional rerun {chain_replay}, \
             sequential {chain_serial}; grid fractional {grid_serial}; chain second moment \
             {second_serial}; dynamics scan {scan_serial}"
        ),
    );
}
