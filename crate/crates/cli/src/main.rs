//! Batch front end for the estimation pipeline: estimate a density from a
//! sample file, run the Monte-Carlo study, draw reproducible samples, check
//! sparsity-class membership, and tabulate densities for plotting.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use osde::{
    build_estimator, check_membership_theta, check_regularity, compute_lambda, design_density,
    draw, estimate_coefficients, integrate, minimal_tail_constant, p_algorithm, run_simulation,
    select, uniform_density, BasisId, CutoffRounding, Error, QuadratureRule, RegularityCheck,
    Result, Sample, SamplerConfig, SeriesDensity, SimulationConfig, SimulationResult,
    SparsityParams, DEFAULT_MAX_ITER,
};

/// Adaptive orthogonal-series density estimation on [0,1].
///
/// Numeric defaults across commands: J = 200 candidate coefficients,
/// B = 100 replications (1000 with --full-scale), e* = 1e-6 projection
/// tolerance, 4096 quadrature panels, threshold multiplier 1, seed 0.
#[derive(Parser)]
#[command(name = "osde", version, about, long_about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a density to a sample file and report the fit as JSON.
    Estimate(EstimateArgs),
    /// Run the Monte-Carlo MISE study and write a summary CSV.
    Simulate(SimulateArgs),
    /// Draw a reproducible sample from a density, one value per line.
    Sample(SampleArgs),
    /// Check decay and tail conditions for an approximate-sparsity class.
    CheckClass(CheckClassArgs),
    /// Tabulate a density on a uniform grid as CSV.
    EmitDensity(EmitDensityArgs),
}

#[derive(Args)]
struct EstimateArgs {
    /// Sample file: one real number in [0,1] per line.
    input: PathBuf,
    /// Highest candidate basis index J [default: 200].
    #[arg(long, default_value_t = 200)]
    j: usize,
    /// Threshold multiplier applied to the penalty [default: 1].
    #[arg(long, default_value_t = 1.0)]
    multiplier: f64,
    /// Projection stopping tolerance e* [default: 1e-6].
    #[arg(long, default_value_t = 1e-6)]
    e_star: f64,
    /// Simpson panel count (even, >= 2) [default: 4096].
    #[arg(long, default_value_t = 4096)]
    quad_panels: usize,
    /// Smoothness k used in the regularity report [default: 2].
    #[arg(long, default_value_t = 2.0)]
    sparsity_k: f64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also tabulate the fitted density to this CSV file.
    #[arg(long)]
    grid_out: Option<PathBuf>,
    /// Grid size for --grid-out [default: 1001].
    #[arg(long, default_value_t = 1001)]
    grid_points: usize,
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON run configuration; explicit flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Truth density [default: design].
    #[arg(long, value_enum)]
    truth: Option<TruthArg>,
    /// Comma-separated sample sizes [default: 5000,10000,15000,20000].
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Replications B per (estimator, size) [default: 100].
    #[arg(long)]
    replications: Option<usize>,
    /// Adaptive candidate cutoff J [default: 200].
    #[arg(long)]
    j: Option<usize>,
    /// Rounding of the comparison cutoff N^(1/4) [default: floor].
    #[arg(long, value_enum)]
    rounding: Option<RoundingArg>,
    /// Base seed for the replication streams [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Projection stopping tolerance e* [default: 1e-6].
    #[arg(long)]
    e_star: Option<f64>,
    /// Simpson panel count (even, >= 2) [default: 4096].
    #[arg(long)]
    quad_panels: Option<usize>,
    /// Threshold multiplier [default: 1].
    #[arg(long)]
    multiplier: Option<f64>,
    /// Use the large replication count (B = 1000); --replications still wins.
    #[arg(long)]
    full_scale: bool,
    /// Write the summary CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write one row per replication (estimator,n,replication,ise).
    #[arg(long, value_name = "PATH")]
    emit_plotdata: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    /// Built-in density to draw from [default: design].
    #[arg(long, value_enum, conflicts_with = "density_config")]
    truth: Option<TruthArg>,
    /// JSON file with a custom series density {"basis":"cosine","theta":[..]}.
    #[arg(long)]
    density_config: Option<PathBuf>,
    /// Number of draws [default: 1000].
    #[arg(short, long, default_value_t = 1000)]
    n: usize,
    /// Generator seed [default: 0].
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write draws here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckClassArgs {
    /// Built-in coefficient list to check [default: design].
    #[arg(long, value_enum, conflicts_with = "density_config")]
    truth: Option<TruthArg>,
    /// JSON file with a custom series density {"basis":"cosine","theta":[..]}.
    #[arg(long)]
    density_config: Option<PathBuf>,
    /// Decay amplitude A of the class.
    #[arg(long)]
    a: f64,
    /// Decay exponent k of the class (> 1/2).
    #[arg(long)]
    k: f64,
    /// Tail constant C of the class.
    #[arg(long)]
    c: f64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmitDensityArgs {
    /// Built-in density to tabulate [default: design].
    #[arg(long, value_enum, conflicts_with = "density_config")]
    truth: Option<TruthArg>,
    /// JSON file with a custom series density {"basis":"cosine","theta":[..]}.
    #[arg(long)]
    density_config: Option<PathBuf>,
    /// Number of grid points over [0,1] [default: 1001].
    #[arg(long, default_value_t = 1001)]
    points: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TruthArg {
    Design,
    Uniform,
}

#[derive(Clone, Copy, ValueEnum)]
enum RoundingArg {
    Floor,
    Ceil,
    Nearest,
}

impl From<RoundingArg> for CutoffRounding {
    fn from(r: RoundingArg) -> CutoffRounding {
        match r {
            RoundingArg::Floor => CutoffRounding::Floor,
            RoundingArg::Ceil => CutoffRounding::Ceil,
            RoundingArg::Nearest => CutoffRounding::Nearest,
        }
    }
}

/// Truth entry of a simulation config file: a built-in name or an inline
/// series density.
#[derive(Deserialize)]
#[serde(untagged)]
enum TruthSpec {
    Named(String),
    Inline(SeriesDensity),
}

/// Simulation config file; every field optional, flags take precedence.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct SimFileConfig {
    truth: Option<TruthSpec>,
    sizes: Option<Vec<usize>>,
    replications: Option<usize>,
    j_adaptive: Option<usize>,
    rounding: Option<CutoffRounding>,
    seed: Option<u64>,
    e_star: Option<f64>,
    quad_panels: Option<usize>,
    multiplier: Option<f64>,
}

#[derive(Serialize)]
struct SparseCoefficient {
    index: usize,
    value: f64,
}

#[derive(Serialize)]
struct EstimateReport {
    n: usize,
    j: usize,
    basis: BasisId,
    lambda: f64,
    multiplier: f64,
    selected: Vec<usize>,
    forced_constant: bool,
    theta_tilde: Vec<SparseCoefficient>,
    shift: f64,
    iterations: usize,
    integral: f64,
    regularity: RegularityCheck,
}

#[derive(Serialize)]
struct ClassReport {
    a: f64,
    k: f64,
    c: f64,
    ordered_ok: bool,
    tail_ok: bool,
    in_class: bool,
    first_violation: Option<usize>,
    minimal_tail_constant: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Estimate(args) => cmd_estimate(&args),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Sample(args) => cmd_sample(&args),
        Command::CheckClass(args) => cmd_check_class(&args),
        Command::EmitDensity(args) => cmd_emit_density(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::ProjectionDiverged { .. } | Error::RootSearch { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn cmd_estimate(args: &EstimateArgs) -> Result<()> {
    let rule = quadrature(args.quad_panels)?;
    if args.grid_points < 2 {
        return Err(Error::InvalidConfig {
            reason: format!("grid needs at least 2 points, got {}", args.grid_points),
        });
    }
    let file = File::open(&args.input)?;
    let sample = Sample::from_reader(BufReader::new(file))?;
    let basis = BasisId::Cosine;
    let est = estimate_coefficients(&sample, basis, args.j);
    let lambda = compute_lambda(&est)?;
    let report = select(&est, lambda, args.multiplier);
    let raw = build_estimator(&report, basis);
    let projected = p_algorithm(&raw, rule, args.e_star, DEFAULT_MAX_ITER)?;
    let regularity = check_regularity(
        sample.len(),
        args.j,
        basis.sup_bound(args.j),
        args.sparsity_k,
    );
    let theta_tilde = report
        .selected
        .iter()
        .map(|&index| SparseCoefficient {
            index,
            value: report.theta_tilde[index - 1],
        })
        .collect();
    let out = EstimateReport {
        n: sample.len(),
        j: args.j,
        basis,
        lambda,
        multiplier: args.multiplier,
        selected: report.selected,
        forced_constant: report.forced_constant,
        theta_tilde,
        shift: projected.shift(),
        iterations: projected.iterations(),
        integral: integrate(|x| projected.eval(x), rule),
        regularity,
    };
    write_text(args.out.as_deref(), &to_json(&out)?)?;
    if let Some(grid_path) = &args.grid_out {
        let mut csv = String::from("x,density\n");
        let denom = (args.grid_points - 1) as f64;
        for i in 0..args.grid_points {
            let x = i as f64 / denom;
            csv.push_str(&format!("{},{}\n", fmt17(x), fmt17(projected.eval(x))));
        }
        write_text(Some(grid_path), &csv)?;
    }
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let file_cfg = match &args.config {
        Some(path) => parse_json_file::<SimFileConfig>(path)?,
        None => SimFileConfig::default(),
    };
    let truth = match &args.truth {
        Some(arg) => builtin_truth(*arg),
        None => match file_cfg.truth {
            Some(TruthSpec::Named(name)) => named_truth(&name)?,
            Some(TruthSpec::Inline(density)) => density,
            None => design_density(),
        },
    };
    let replications = args
        .replications
        .or_else(|| args.full_scale.then_some(1000))
        .or(file_cfg.replications)
        .unwrap_or(100);
    let panels = args
        .quad_panels
        .or(file_cfg.quad_panels)
        .unwrap_or(osde::DEFAULT_PANELS);
    let cfg = SimulationConfig {
        truth,
        sizes: args
            .sizes
            .clone()
            .or(file_cfg.sizes)
            .unwrap_or_else(|| vec![5000, 10_000, 15_000, 20_000]),
        replications,
        j_adaptive: args.j.or(file_cfg.j_adaptive).unwrap_or(200),
        comparison_rounding: args
            .rounding
            .map(CutoffRounding::from)
            .or(file_cfg.rounding)
            .unwrap_or_default(),
        seed: args.seed.or(file_cfg.seed).unwrap_or(0),
        e_star: args.e_star.or(file_cfg.e_star).unwrap_or(1e-6),
        quad: quadrature(panels)?,
        multiplier: args.multiplier.or(file_cfg.multiplier).unwrap_or(1.0),
    };
    let result = run_simulation(&cfg)?;
    for cell in result.cells.iter().filter(|c| c.failures > 0) {
        eprintln!(
            "warning: {} replications failed to converge for {} at N = {}",
            cell.failures, cell.estimator, cell.n
        );
    }
    write_text(args.out.as_deref(), &summary_csv(&result))?;
    if let Some(path) = &args.emit_plotdata {
        write_text(Some(path), &plotdata_csv(&result))?;
    }
    Ok(())
}

fn cmd_sample(args: &SampleArgs) -> Result<()> {
    let density = resolve_density(args.truth, args.density_config.as_deref())?;
    let sample = draw(&density, args.n, &SamplerConfig::new(args.seed))?;
    let mut text = Vec::new();
    sample.write_to(&mut text)?;
    write_text(
        args.out.as_deref(),
        std::str::from_utf8(&text).expect("sample text is ascii"),
    )
}

fn cmd_check_class(args: &CheckClassArgs) -> Result<()> {
    let density = resolve_density(args.truth, args.density_config.as_deref())?;
    let params = SparsityParams::new(args.a, args.k, args.c)?;
    let membership = check_membership_theta(&density.theta, params);
    let report = ClassReport {
        a: args.a,
        k: args.k,
        c: args.c,
        ordered_ok: membership.ordered_ok,
        tail_ok: membership.tail_ok,
        in_class: membership.ordered_ok && membership.tail_ok,
        first_violation: membership.first_violation,
        minimal_tail_constant: minimal_tail_constant(&density.theta, args.k),
    };
    write_text(args.out.as_deref(), &to_json(&report)?)
}

fn cmd_emit_density(args: &EmitDensityArgs) -> Result<()> {
    if args.points < 2 {
        return Err(Error::InvalidConfig {
            reason: format!("grid needs at least 2 points, got {}", args.points),
        });
    }
    let density = resolve_density(args.truth, args.density_config.as_deref())?;
    let mut csv = String::from("x,density\n");
    let denom = (args.points - 1) as f64;
    for i in 0..args.points {
        let x = i as f64 / denom;
        csv.push_str(&format!("{},{}\n", fmt17(x), fmt17(density.eval(x))));
    }
    write_text(args.out.as_deref(), &csv)
}

fn builtin_truth(arg: TruthArg) -> SeriesDensity {
    match arg {
        TruthArg::Design => design_density(),
        TruthArg::Uniform => uniform_density(),
    }
}

fn named_truth(name: &str) -> Result<SeriesDensity> {
    match name {
        "design" => Ok(design_density()),
        "uniform" => Ok(uniform_density()),
        other => Err(Error::InvalidConfig {
            reason: format!("unknown truth {other:?} (expected \"design\" or \"uniform\")"),
        }),
    }
}

fn resolve_density(truth: Option<TruthArg>, config: Option<&Path>) -> Result<SeriesDensity> {
    match (truth, config) {
        (_, Some(path)) => parse_json_file::<SeriesDensity>(path),
        (Some(arg), None) => Ok(builtin_truth(arg)),
        (None, None) => Ok(design_density()),
    }
}

fn parse_json_file<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path)?;
    serde_json::from_reader(BufReader::new(file)).map_err(|err| Error::InvalidConfig {
        reason: format!("{}: {err}", path.display()),
    })
}

fn quadrature(panels: usize) -> Result<QuadratureRule> {
    if panels < 2 || !panels.is_multiple_of(2) {
        return Err(Error::InvalidConfig {
            reason: format!("quad panels must be even and >= 2, got {panels}"),
        });
    }
    Ok(QuadratureRule::composite_simpson(panels))
}

fn summary_csv(result: &SimulationResult) -> String {
    let mut out = String::from("estimator,N,B,mise_hat,std_error,mean_selected_count,seed\n");
    for cell in &result.cells {
        let selected = cell
            .mean_selected_count
            .map(fmt17)
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            cell.estimator,
            cell.n,
            cell.b_effective,
            fmt17(cell.mise_hat),
            fmt17(cell.std_error),
            selected,
            result.seed,
        ));
    }
    out
}

fn plotdata_csv(result: &SimulationResult) -> String {
    let mut out = String::from("estimator,n,replication,ise\n");
    for record in &result.records {
        out.push_str(&format!(
            "{},{},{},{}\n",
            record.estimator,
            record.n,
            record.replication,
            fmt17(record.ise),
        ));
    }
    out
}

/// 17 significant decimal digits: enough to reproduce any f64 exactly.
fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value).map_err(|err| Error::InvalidConfig {
        reason: format!("serialization failed: {err}"),
    })?;
    text.push('\n');
    Ok(text)
}

fn write_text(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(path) => {
            let mut file = File::create(path)?;
            file.write_all(content.as_bytes())?;
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}
