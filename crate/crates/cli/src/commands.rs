//! Flag-driven subcommands. Each one validates its inputs (exit code 2 on
//! rejection), runs the computation (exit code 3 on failure), and writes CSV
//! to stdout or atomically to `--out`.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use num_complex::Complex64;

use andergraph_core::dynamics::{
    approx_identity_check, dynamical_scan, graf_inequality_check, log_time_grid,
    stone_variant_check, summarize_scan, DynamicsReport, EigenDecomposition, StepFunction,
};
use andergraph_core::graph::{
    build_hub_lattice, build_lattice_box, build_log_tree, Graph, DEFAULT_VERTEX_BUDGET,
};
use andergraph_core::linalg::MAX_EIGEN_DIM;
use andergraph_core::operator::HamiltonianMatrix;
use andergraph_core::resolvent::{
    fractional_moments_mc, second_moments_mc, verify_fractional_bound,
    verify_second_moment_bound, BoundConstants, BoundReport, MIN_MC_TRIALS,
};
use andergraph_core::saw::{
    assumption1_partial_sum, assumption2_partial_sum, count_saws_with, AssumptionReport, SawTable,
    DEFAULT_EXTENSION_BUDGET,
};
use andergraph_core::{
    DisorderModel, FiniteVolume, Parallelism, SpectralParams, UniformDensity, VertexId,
};

use crate::error::{Classify, CliError};
use crate::record::{make_run_id, sha256_hex, unix_now, write_output};

// ---------------------------------------------------------------------------
// Shared helpers

pub fn load_graph(path: &Path) -> Result<Graph, CliError> {
    let file = File::open(path)
        .map_err(|e| CliError::config(format!("cannot open graph {}: {e}", path.display())))?;
    Graph::parse_text(BufReader::new(file))
        .or_config(&format!("graph file {}", path.display()))
}

pub fn vertex(g: &Graph, id: u32) -> Result<VertexId, CliError> {
    let v = VertexId(id);
    if g.contains(v) {
        Ok(v)
    } else {
        Err(CliError::config(format!(
            "vertex id {id} is outside the graph ({} vertices)",
            g.vertex_count()
        )))
    }
}

/// One CSV document: header plus rows, every field already formatted.
pub(crate) fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Shortest round-trip decimal form; identical reruns print identical digits.
pub(crate) fn num(v: f64) -> String {
    format!("{v}")
}

/// Canonical `key = value` echo of a flag set, hashed into the run id so CSV
/// rows carry the same provenance as config-driven runs.
fn flags_text(pairs: &[(&str, String)]) -> String {
    let mut text = String::new();
    for (k, v) in pairs {
        text.push_str(k);
        text.push_str(" = ");
        text.push_str(v);
        text.push('\n');
    }
    text
}

fn density_from(a: f64, b: f64) -> Result<UniformDensity, CliError> {
    UniformDensity::new(a, b).or_config("density")
}

// ---------------------------------------------------------------------------
// graph build

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// Box truncation of the hypercubic lattice; takes dimension and radius.
    Lattice,
    /// Sparsely branching tree; takes the maximum generation.
    Logtree,
    /// Planar box with two long-range hub vertices; takes the radius.
    Hublattice,
}

#[derive(Debug, Args)]
pub struct GraphBuildArgs {
    /// Graph family to construct.
    #[arg(long, value_enum)]
    pub family: Family,
    /// Family parameter; repeat for families with several (lattice takes
    /// dimension then radius, the others a single size).
    #[arg(long = "param", required = true)]
    pub param: Vec<u64>,
    /// Abort construction beyond this many vertices.
    #[arg(long, default_value_t = DEFAULT_VERTEX_BUDGET)]
    pub budget: u64,
    /// Destination file for the graph text.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn graph_build(args: &GraphBuildArgs) -> Result<(), CliError> {
    let want = |n: usize| -> Result<(), CliError> {
        if args.param.len() == n {
            Ok(())
        } else {
            Err(CliError::config(format!(
                "--family {:?} takes {n} --param value(s), got {}",
                args.family,
                args.param.len()
            )))
        }
    };
    let as_u32 = |v: u64, what: &str| -> Result<u32, CliError> {
        u32::try_from(v).map_err(|_| CliError::config(format!("{what} {v} is out of range")))
    };
    let g = match args.family {
        Family::Lattice => {
            want(2)?;
            let dim = as_u32(args.param[0], "dimension")?;
            let radius = as_u32(args.param[1], "radius")?;
            build_lattice_box(dim, radius, args.budget).or_config("graph build")?
        }
        Family::Logtree => {
            want(1)?;
            build_log_tree(as_u32(args.param[0], "generation")?, args.budget)
                .or_config("graph build")?
        }
        Family::Hublattice => {
            want(1)?;
            build_hub_lattice(as_u32(args.param[0], "radius")?, args.budget)
                .or_config("graph build")?
        }
    };
    crate::record::write_atomic(&args.out, &g.to_text())?;
    println!(
        "wrote {}: {} vertices, {} edges",
        args.out.display(),
        g.vertex_count(),
        g.edge_count()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// saw count / saw assumption

#[derive(Debug, Args)]
pub struct SawCountArgs {
    /// Graph text file, as written by `graph build`.
    #[arg(long)]
    pub graph: PathBuf,
    /// Vertex id the walks start from.
    #[arg(long)]
    pub origin: u32,
    /// Longest walk length to count.
    #[arg(long)]
    pub nmax: usize,
    /// Abort enumeration beyond this many walk extensions.
    #[arg(long, default_value_t = DEFAULT_EXTENSION_BUDGET)]
    pub budget: u64,
    /// Worker threads; 0 uses all available cores.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn saw_count(args: &SawCountArgs) -> Result<(), CliError> {
    let g = load_graph(&args.graph)?;
    let x = vertex(&g, args.origin)?;
    let table = count_saws_with(&g, x, args.nmax, args.budget, Parallelism::from_degree(args.threads))
        .or_numeric("walk count")?;
    write_output(args.out.as_deref(), &csv(&["n", "c_n", "clean"], &count_rows(&table)))
}

/// Rows `n, c_n, clean`; a count is clean when the truncation cannot have
/// altered it.
pub fn count_rows(table: &SawTable) -> Vec<Vec<String>> {
    table
        .counts
        .iter()
        .enumerate()
        .map(|(n, &c)| vec![n.to_string(), c.to_string(), (n <= table.clean_radius).to_string()])
        .collect()
}

#[derive(Debug, Args)]
pub struct SawAssumptionArgs {
    /// Graph text file.
    #[arg(long)]
    pub graph: PathBuf,
    /// Which weighted walk series to sum: 1 (single sum over walks to the
    /// reference vertex) or 2 (double sum with distance-polynomial weights).
    #[arg(long)]
    pub which: u8,
    /// Series weight per walk step, in (0, 1).
    #[arg(long)]
    pub alpha: f64,
    /// Reference vertex id the walks end at.
    #[arg(long)]
    pub origin: u32,
    /// Truncation radius of the partial sum.
    #[arg(long)]
    pub radius: usize,
    /// Center vertex id for the distance weight (series 2; defaults to the
    /// reference vertex).
    #[arg(long)]
    pub center: Option<u32>,
    /// Polynomial exponent of the distance weight (series 2).
    #[arg(long, default_value_t = 1)]
    pub p: u32,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn saw_assumption(args: &SawAssumptionArgs) -> Result<(), CliError> {
    let g = load_graph(&args.graph)?;
    let y = vertex(&g, args.origin)?;
    let report = match args.which {
        1 => assumption1_partial_sum(&g, y, args.alpha, args.radius).or_config("series")?,
        2 => {
            let o = vertex(&g, args.center.unwrap_or(args.origin))?;
            assumption2_partial_sum(&g, o, y, args.p, args.alpha, args.radius)
                .or_config("series")?
        }
        other => return Err(CliError::config(format!("--which must be 1 or 2, got {other}"))),
    };
    write_output(args.out.as_deref(), &csv(&["R", "partial_sum", "shell_ratio", "verdict"], &assumption_rows(&report)))
}

/// Rows `R, partial_sum, shell_ratio, verdict`; the ratio column is empty at
/// R = 0 and wherever the previous shell vanished.
pub fn assumption_rows(report: &AssumptionReport) -> Vec<Vec<String>> {
    let verdict = report.verdict.to_string();
    report
        .partial_sums
        .iter()
        .enumerate()
        .map(|(r, &sum)| {
            let ratio = if r == 0 || report.shell_terms[r - 1] == 0.0 {
                String::new()
            } else {
                num(report.shell_terms[r] / report.shell_terms[r - 1])
            };
            vec![r.to_string(), num(sum), ratio, verdict.clone()]
        })
        .collect()
}

// ---------------------------------------------------------------------------
// moments estimate / bounds verify

/// Flags shared by the single-pair estimator and the per-distance verifier.
#[derive(Debug, Args)]
pub struct MomentCommonArgs {
    /// Graph text file.
    #[arg(long)]
    pub graph: PathBuf,
    /// Disorder coupling strength.
    #[arg(long)]
    pub lambda: f64,
    /// Fractional moment order, in (0, 1). With --second the moment order is
    /// fixed at 2 and this only enters the decay constants.
    #[arg(long)]
    pub s: f64,
    /// Real part of the spectral point.
    #[arg(long = "z-re")]
    pub z_re: f64,
    /// Imaginary part of the spectral point; must be nonzero.
    #[arg(long = "z-im")]
    pub z_im: f64,
    /// Source vertex id.
    #[arg(long)]
    pub x: u32,
    /// Monte Carlo disorder realizations.
    #[arg(long)]
    pub trials: u64,
    /// Master seed; trials derive from it counter-style.
    #[arg(long)]
    pub seed: u64,
    /// Lower edge of the uniform disorder density.
    #[arg(long = "density-a", default_value_t = -0.5)]
    pub density_a: f64,
    /// Upper edge of the uniform disorder density.
    #[arg(long = "density-b", default_value_t = 0.5)]
    pub density_b: f64,
    /// One-sided confidence multiplier on the standard error.
    #[arg(long, default_value_t = 2.33)]
    pub confidence: f64,
    /// Verify the second-moment bound instead of the fractional one.
    #[arg(long)]
    pub second: bool,
    /// Worker threads; 0 uses all available cores.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MomentsEstimateArgs {
    #[command(flatten)]
    pub common: MomentCommonArgs,
    /// Target vertex id.
    #[arg(long)]
    pub y: u32,
}

#[derive(Debug, Args)]
pub struct BoundsVerifyArgs {
    #[command(flatten)]
    pub common: MomentCommonArgs,
    /// Verify one bound per distance d = 0..=d_max, each against the
    /// smallest-id vertex at that distance.
    #[arg(long = "d-max")]
    pub d_max: usize,
}

pub const MOMENT_CSV_HEADER: [&str; 16] = [
    "run_id", "x", "y", "d", "c_xd", "s", "lambda", "z_re", "z_im", "trials", "mean", "stderr",
    "C", "C_prime", "bound", "passed",
];

pub fn moments_estimate(args: &MomentsEstimateArgs) -> Result<(), CliError> {
    let g = load_graph(&args.common.graph)?;
    let x = vertex(&g, args.common.x)?;
    let y = vertex(&g, args.y)?;
    let run_id = moment_run_id("moments estimate", &args.common, &[("y", args.y.to_string())]);
    let reports = moment_reports(&g, &args.common, x, &[y])?;
    let rows = moment_csv_rows(&run_id, &args.common, &reports);
    write_output(args.common.out.as_deref(), &csv(&MOMENT_CSV_HEADER, &rows))
}

pub fn bounds_verify(args: &BoundsVerifyArgs) -> Result<(), CliError> {
    let g = load_graph(&args.common.graph)?;
    let x = vertex(&g, args.common.x)?;
    let ys = targets_by_distance(&g, x, args.d_max)?;
    let run_id = moment_run_id("bounds verify", &args.common, &[("d_max", args.d_max.to_string())]);
    let reports = moment_reports(&g, &args.common, x, &ys)?;
    let rows = moment_csv_rows(&run_id, &args.common, &reports);
    write_output(args.common.out.as_deref(), &csv(&MOMENT_CSV_HEADER, &rows))
}

/// Smallest-id vertex at each distance `0..=d_max` from `x`.
pub fn targets_by_distance(g: &Graph, x: VertexId, d_max: usize) -> Result<Vec<VertexId>, CliError> {
    let dist = g.distances_from(x);
    (0..=d_max)
        .map(|d| {
            g.vertices()
                .find(|v| dist[v.index()] as usize == d && dist[v.index()] != u32::MAX)
                .ok_or_else(|| {
                    CliError::config(format!(
                        "no vertex at distance {d} from vertex {}; reduce the distance cap",
                        x.0
                    ))
                })
        })
        .collect()
}

fn moment_run_id(command: &str, c: &MomentCommonArgs, extra: &[(&str, String)]) -> String {
    let mut pairs = vec![
        ("command", command.to_string()),
        ("graph", c.graph.display().to_string()),
        ("lambda", num(c.lambda)),
        ("s", num(c.s)),
        ("z_re", num(c.z_re)),
        ("z_im", num(c.z_im)),
        ("x", c.x.to_string()),
        ("trials", c.trials.to_string()),
        ("seed", c.seed.to_string()),
        ("density_a", num(c.density_a)),
        ("density_b", num(c.density_b)),
        ("confidence", num(c.confidence)),
        ("second", c.second.to_string()),
    ];
    pairs.extend(extra.iter().map(|(k, v)| (*k, v.clone())));
    make_run_id(unix_now(), &sha256_hex(&flags_text(&pairs)))
}

/// Estimates one moment per target and checks each against its combinatorial
/// bound; shared by `moments estimate` (one target), `bounds verify`, and the
/// config-driven runner.
pub fn moment_reports(
    g: &Graph,
    c: &MomentCommonArgs,
    x: VertexId,
    ys: &[VertexId],
) -> Result<Vec<BoundReport>, CliError> {
    if c.trials < MIN_MC_TRIALS {
        return Err(CliError::config(format!(
            "--trials must be at least {MIN_MC_TRIALS}, got {}",
            c.trials
        )));
    }
    let density = density_from(c.density_a, c.density_b)?;
    let model = DisorderModel::new(c.lambda, density, c.seed).or_config("disorder model")?;
    let params = SpectralParams::new(Complex64::new(c.z_re, c.z_im), c.s).or_config("spectral point")?;
    let constants = BoundConstants::new(c.s, c.lambda, density.sup_norm()).or_config("bound constants")?;
    let volume = FiniteVolume::whole(g);
    let parallelism = Parallelism::from_degree(c.threads);

    let estimates = if c.second {
        second_moments_mc(g, &volume, &model, params.z(), x, ys, c.trials, parallelism)
            .or_numeric("second-moment sampling")?
    } else {
        fractional_moments_mc(g, &volume, &model, params, x, ys, c.trials, parallelism)
            .or_numeric("fractional-moment sampling")?
    };

    let d_max = estimates.iter().map(|e| e.distance).max().unwrap_or(0);
    let table = count_saws_with(g, x, d_max, DEFAULT_EXTENSION_BUDGET, parallelism)
        .or_numeric("walk count")?;

    Ok(estimates
        .iter()
        .map(|&est| {
            let c_xd = table.count(est.distance);
            if c.second {
                verify_second_moment_bound(est, &constants, c_xd, c.confidence)
            } else {
                verify_fractional_bound(est, &constants, c_xd, c.confidence)
            }
        })
        .collect())
}

pub fn moment_csv_rows(
    run_id: &str,
    c: &MomentCommonArgs,
    reports: &[BoundReport],
) -> Vec<Vec<String>> {
    reports
        .iter()
        .map(|r| {
            vec![
                run_id.to_string(),
                r.estimate.x.0.to_string(),
                r.estimate.y.0.to_string(),
                r.d.to_string(),
                r.c_xd.to_string(),
                num(c.s),
                num(c.lambda),
                num(r.estimate.z.re),
                num(r.estimate.z.im),
                r.estimate.trials.to_string(),
                num(r.estimate.mean),
                num(r.estimate.stderr),
                num(r.c),
                num(r.c_prime),
                num(r.bound),
                r.passed.to_string(),
            ]
        })
        .collect()
}

// ---------------------------------------------------------------------------
// dynamics scan

#[derive(Debug, Args)]
pub struct DynamicsScanArgs {
    /// Graph text file.
    #[arg(long)]
    pub graph: PathBuf,
    /// Disorder coupling strength.
    #[arg(long)]
    pub lambda: f64,
    /// Energy window (a, b) the evolution is filtered to.
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    pub interval: Vec<f64>,
    /// Moment exponent of the position observable.
    #[arg(long)]
    pub p: f64,
    /// Vertex id carrying the initial state (and centering the moment).
    #[arg(long)]
    pub origin: u32,
    /// Largest evolution time on the logarithmic grid.
    #[arg(long)]
    pub tmax: f64,
    /// Smallest evolution time on the logarithmic grid.
    #[arg(long, default_value_t = 0.1)]
    pub tmin: f64,
    /// Number of grid points.
    #[arg(long, default_value_t = 48)]
    pub points: usize,
    /// Disorder realizations to scan.
    #[arg(long)]
    pub trials: u64,
    /// Master seed.
    #[arg(long)]
    pub seed: u64,
    /// Lower edge of the uniform disorder density.
    #[arg(long = "density-a", default_value_t = -0.5)]
    pub density_a: f64,
    /// Upper edge of the uniform disorder density.
    #[arg(long = "density-b", default_value_t = 0.5)]
    pub density_b: f64,
    /// Worker threads; 0 uses all available cores.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Write the per-time CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a JSON summary of the grid suprema here.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

pub fn dynamics_scan(args: &DynamicsScanArgs) -> Result<(), CliError> {
    let g = load_graph(&args.graph)?;
    let origin = vertex(&g, args.origin)?;
    let density = density_from(args.density_a, args.density_b)?;
    let model = DisorderModel::new(args.lambda, density, args.seed).or_config("disorder model")?;
    let times = log_time_grid(args.tmin, args.tmax, args.points).or_config("time grid")?;
    let volume = FiniteVolume::whole(&g);
    let mut psi = vec![0.0; volume.len()];
    psi[volume.position(origin).expect("origin validated")] = 1.0;
    let (a, b) = (args.interval[0], args.interval[1]);

    let reports = dynamical_scan(
        &g,
        &volume,
        &model,
        (a, b),
        origin,
        args.p,
        &psi,
        &times,
        args.trials,
        Parallelism::from_degree(args.threads),
    )
    .or_numeric("dynamical scan")?;

    let rows = scan_rows(&reports);
    write_output(args.out.as_deref(), &csv(&["trial", "t", "moment"], &rows))?;

    if let Some(summary_path) = &args.summary {
        let value = scan_summary_json(&reports, (a, b), args.p);
        let mut text = serde_json::to_string_pretty(&value)
            .map_err(|e| CliError::config(format!("cannot serialize summary: {e}")))?;
        text.push('\n');
        crate::record::write_atomic(summary_path, &text)?;
    }
    Ok(())
}

pub fn scan_rows(reports: &[DynamicsReport]) -> Vec<Vec<String>> {
    reports
        .iter()
        .flat_map(|r| {
            r.times
                .iter()
                .zip(&r.moments)
                .map(|(&t, &m)| vec![r.trial.to_string(), num(t), num(m)])
                .collect::<Vec<_>>()
        })
        .collect()
}

pub fn scan_summary_json(
    reports: &[DynamicsReport],
    interval: (f64, f64),
    exponent: f64,
) -> serde_json::Value {
    let per_trial: Vec<serde_json::Value> = reports
        .iter()
        .map(|r| {
            serde_json::json!({
                "trial": r.trial,
                "supremum": r.supremum,
                "boundary_flagged": r.boundary_flagged,
            })
        })
        .collect();
    match summarize_scan(reports) {
        Some(s) => serde_json::json!({
            "interval": [interval.0, interval.1],
            "exponent": exponent,
            "trials": reports.len(),
            "median_supremum": s.median_supremum,
            "min_supremum": s.min_supremum,
            "max_supremum": s.max_supremum,
            "flagged_trials": s.flagged_trials,
            "per_trial": per_trial,
        }),
        None => serde_json::json!({
            "interval": [interval.0, interval.1],
            "exponent": exponent,
            "trials": 0,
            "per_trial": per_trial,
        }),
    }
}

// ---------------------------------------------------------------------------
// lemmas check

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Lemma {
    /// Arctan kernel against a step function: smoothed values converge to the
    /// half-sum of one-sided limits.
    Approx,
    /// Smoothed spectral projection with half-weight endpoints against the
    /// exact eigenbasis value.
    Stone,
    /// Time-averaged mass on distant sites against the spectrally filtered
    /// energy integral plus a certified truncation term.
    Graf,
}

#[derive(Debug, Args)]
pub struct LemmasCheckArgs {
    /// Which limit statement to check numerically.
    #[arg(long, value_enum)]
    pub which: Lemma,
    /// Smoothing widths, tried in the order given.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.01,0.001")]
    pub epsilons: Vec<f64>,
    /// approx: evaluation point of the smoothed step function.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub at: f64,
    /// approx: the step function jumps from 0 to 1 here.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub threshold: f64,
    /// stone/graf: graph text file.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// stone/graf: disorder coupling strength.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// stone/graf: master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// stone/graf: disorder realization index.
    #[arg(long, default_value_t = 0)]
    pub trial: u64,
    /// stone/graf: vertex id carrying the initial state.
    #[arg(long)]
    pub origin: Option<u32>,
    /// stone/graf: energy window (a, b).
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    pub interval: Option<Vec<f64>>,
    /// stone/graf: quadrature tolerance.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// graf: keep sites at distance >= this from the origin.
    #[arg(long = "keep-beyond", default_value_t = 1)]
    pub keep_beyond: u32,
    /// graf: time horizon of the averaged evolution.
    #[arg(long, default_value_t = 200.0)]
    pub horizon: f64,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn lemmas_check(args: &LemmasCheckArgs) -> Result<(), CliError> {
    match args.which {
        Lemma::Approx => lemma_approx(args),
        Lemma::Stone => lemma_stone(args),
        Lemma::Graf => lemma_graf(args),
    }
}

fn lemma_approx(args: &LemmasCheckArgs) -> Result<(), CliError> {
    let f = StepFunction::indicator_from(args.threshold).or_config("step function")?;
    let report = approx_identity_check(&f, args.at, &args.epsilons).or_config("smoothing check")?;
    let rows: Vec<Vec<String>> = report
        .samples
        .iter()
        .map(|&(eps, value)| {
            vec![num(eps), num(value), num(report.limit), num((value - report.limit).abs())]
        })
        .collect();
    write_output(args.out.as_deref(), &csv(&["epsilon", "value", "limit", "abs_error"], &rows))
}

/// Graph, interval, origin and eigendecomposition shared by stone and graf.
fn spectral_setup(
    args: &LemmasCheckArgs,
) -> Result<(Graph, FiniteVolume, EigenDecomposition, VertexId, (f64, f64)), CliError> {
    let path = args
        .graph
        .as_ref()
        .ok_or_else(|| CliError::config("--graph is required for this check"))?;
    let g = load_graph(path)?;
    let origin_id =
        args.origin.ok_or_else(|| CliError::config("--origin is required for this check"))?;
    let origin = vertex(&g, origin_id)?;
    let interval = args
        .interval
        .as_ref()
        .ok_or_else(|| CliError::config("--interval A B is required for this check"))?;
    let (a, b) = (interval[0], interval[1]);
    if g.vertex_count() > MAX_EIGEN_DIM {
        return Err(CliError::config(format!(
            "graph has {} vertices; dense eigensolves stop at {MAX_EIGEN_DIM}",
            g.vertex_count()
        )));
    }
    let density = UniformDensity::symmetric_unit();
    let model = DisorderModel::new(args.lambda, density, args.seed).or_config("disorder model")?;
    let volume = FiniteVolume::whole(&g);
    let h = HamiltonianMatrix::assemble(&g, &model, args.trial, &volume).or_config("operator")?;
    let ed = EigenDecomposition::new(&h).or_numeric("eigendecomposition")?;
    Ok((g, volume, ed, origin, (a, b)))
}

fn delta_state(volume: &FiniteVolume, origin: VertexId) -> Vec<f64> {
    let mut psi = vec![0.0; volume.len()];
    psi[volume.position(origin).expect("origin validated")] = 1.0;
    psi
}

fn lemma_stone(args: &LemmasCheckArgs) -> Result<(), CliError> {
    let (_g, volume, ed, origin, (a, b)) = spectral_setup(args)?;
    let psi = delta_state(&volume, origin);
    let report = stone_variant_check(&ed, |_| 1.0, a, b, &psi, &args.epsilons, args.tol)
        .or_numeric("smoothed projection")?;
    let rows: Vec<Vec<String>> = report
        .samples
        .iter()
        .map(|s| vec![num(s.epsilon), num(s.lhs), num(report.target), num(s.error)])
        .collect();
    write_output(args.out.as_deref(), &csv(&["epsilon", "lhs", "target", "error"], &rows))
}

fn lemma_graf(args: &LemmasCheckArgs) -> Result<(), CliError> {
    let (g, volume, ed, origin, (a, b)) = spectral_setup(args)?;
    let psi = delta_state(&volume, origin);
    let dist = g.distances_from(origin);
    let sites: Vec<VertexId> = g
        .vertices()
        .filter(|v| dist[v.index()] != u32::MAX && dist[v.index()] >= args.keep_beyond)
        .collect();
    if sites.is_empty() {
        return Err(CliError::config(format!(
            "no vertex lies at distance >= {} from vertex {}; lower --keep-beyond",
            args.keep_beyond, origin.0
        )));
    }
    let samples =
        graf_inequality_check(&ed, &sites, a, b, &psi, &args.epsilons, args.horizon, args.tol)
            .or_numeric("time-average comparison")?;
    let rows: Vec<Vec<String>> = samples
        .iter()
        .map(|s| {
            vec![num(s.epsilon), num(s.lhs), num(s.rhs), num(s.truncation_bound), num(s.lhs - s.rhs)]
        })
        .collect();
    write_output(
        args.out.as_deref(),
        &csv(&["epsilon", "lhs", "rhs", "truncation_bound", "gap"], &rows),
    )
}
