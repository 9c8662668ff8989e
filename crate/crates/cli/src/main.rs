//! Batch front-end: parse operator specs, run profiles, verdicts, and
//! counterexamples, emit machine-auditable reports.
//!
//! Exit status: 0 on success, 2 when an `analyze` run returns the verdict
//! `NOT_GH_EVIDENCE` (so scripts can branch on it), 1 on any error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use ghyp::analyzer::{
    build_counterexample, build_counterexample_bundle, fit_and_judge, profile_bundle,
    profile_group, profile_homogeneous, profile_to_csv, AnalysisReport, AnalyzerOptions, Profile,
    Verdict,
};
use ghyp::bundles::{bundle_symbol, BundleSpec, BundleSymbol};
use ghyp::dual::enumerate_dual;
use ghyp::fourier::{
    export_csv, forward, import_csv, plancherel_norm, random_coefficients, synthesize,
};
use ghyp::quadrature::build_grid;
use ghyp::symbols::{builtin_symbol, parse_group, xi_to_json, InvariantSymbol, OperatorSpec};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "ghyp",
    version,
    about = "Fourier-side hypoellipticity diagnostics on compact groups"
)]
struct Cli {
    /// Bound on parallel per-frequency workers.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Profile a symbol, fit a growth certificate, and emit a verdict.
    Analyze(AnalyzeArgs),
    /// Write a per-frequency profile CSV without judging it.
    Profile(ProfileArgs),
    /// Construct the certified counterexample distribution of a failing
    /// symbol.
    Counterexample(CounterexampleArgs),
    /// Round-trip a grid-function CSV through the Fourier transform and
    /// report the Plancherel residual.
    Transform(TransformArgs),
    /// Run the acceptance battery and print one pass/fail line per
    /// criterion.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Operator spec (JSON; scalar symbol or bundle blocks).
    #[arg(long)]
    spec: PathBuf,
    /// Truncation: analyze all frequencies with `<xi> <= cutoff`.
    #[arg(long)]
    cutoff: f64,
    /// Report JSON path (stdout summary only if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Profile CSV path (defaults to the report path with extension
    /// `.csv` when `--out` is given).
    #[arg(long)]
    profile_out: Option<PathBuf>,
    /// Which diagnostic to run; `auto` picks `group` for scalar specs and
    /// `bundle` for block specs.
    #[arg(long, value_enum, default_value_t = AnalysisKind::Auto)]
    analysis: AnalysisKind,
    /// Exceptional-set budget.
    #[arg(long, default_value_t = 3)]
    budget: usize,
    /// Zero threshold override (default: 1e-9 x median nonzero value).
    #[arg(long)]
    zero_tol: Option<f64>,
    /// Fraction of the largest-eigenvalue entries used by the slope fit.
    #[arg(long, default_value_t = 0.5)]
    tail: f64,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    cutoff: f64,
    /// Profile CSV path.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = AnalysisKind::Auto)]
    analysis: AnalysisKind,
}

#[derive(Args)]
struct CounterexampleArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Search for bad frequencies up to this eigenvalue cutoff.
    #[arg(long)]
    cutoff: f64,
    /// Number of certified bad frequencies to plant.
    #[arg(long, default_value_t = 5)]
    count: usize,
    /// Output JSON (coefficients + certificate).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TransformArgs {
    /// Group: "su2" or "torus:d".
    #[arg(long)]
    group: String,
    /// Grid band limit (eigenvalue cutoff the grid integrates exactly).
    #[arg(long)]
    band_limit: f64,
    /// Input samples CSV (see README for the column layout).
    #[arg(long, conflicts_with = "random")]
    input: Option<PathBuf>,
    /// Generate a random band-limited input at this eigenvalue cutoff
    /// instead of reading a file.
    #[arg(long)]
    random: Option<f64>,
    /// Seed for `--random`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write the reconstructed samples CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    /// Seed for the battery's randomized corpora.
    #[arg(long, default_value_t = 0xACCE97)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AnalysisKind {
    Auto,
    Group,
    Homogeneous,
    Bundle,
}

/// Either kind of spec file.
#[derive(Deserialize)]
#[serde(untagged)]
enum SpecFile {
    Operator(OperatorSpec),
    Bundle(BundleSpec),
}

enum LoadedSymbol {
    Scalar(InvariantSymbol),
    Bundle(BundleSymbol),
}

fn load_spec(path: &Path) -> Result<(LoadedSymbol, String)> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading spec {}", path.display()))?;
    let parsed: SpecFile = serde_json::from_str(&text).with_context(|| {
        format!("parsing {} (expected an operator or bundle spec)", path.display())
    })?;
    Ok(match parsed {
        SpecFile::Operator(spec) => {
            let sym = builtin_symbol(&spec)?;
            let name = sym.name.clone();
            (LoadedSymbol::Scalar(sym), name)
        }
        SpecFile::Bundle(spec) => {
            let sym = bundle_symbol(&spec)?;
            let name = sym.name.clone();
            (LoadedSymbol::Bundle(sym), name)
        }
    })
}

/// Echo of everything that shaped a report, for reproducibility audits.
#[derive(Serialize)]
struct OptionsEcho {
    cutoff: f64,
    analysis: String,
    exceptional_budget: usize,
    zero_tol: Option<f64>,
    tail_fraction: f64,
    jobs: Option<usize>,
}

#[derive(Serialize)]
struct ReportFile {
    schema: u32,
    tool: &'static str,
    version: &'static str,
    symbol: String,
    options: OptionsEcho,
    report: AnalysisReport,
}

fn main() {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // the global pool bounds all per-frequency parallelism
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("warning: could not set thread pool size: {e}");
        }
    }
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Analyze(args) => analyze(args, cli.jobs),
        Command::Profile(args) => profile_cmd(args),
        Command::Counterexample(args) => counterexample(args),
        Command::Transform(args) => transform(args),
        Command::Selftest(args) => selftest(args),
    }
}

fn resolve_profile(
    symbol: &LoadedSymbol,
    analysis: AnalysisKind,
    cutoff: f64,
) -> Result<(Profile, String)> {
    match (symbol, analysis) {
        (LoadedSymbol::Scalar(sym), AnalysisKind::Auto | AnalysisKind::Group) => {
            Ok((profile_group(sym, cutoff)?, "group".into()))
        }
        (LoadedSymbol::Scalar(sym), AnalysisKind::Homogeneous) => {
            Ok((profile_homogeneous(sym, cutoff)?, "homogeneous".into()))
        }
        (LoadedSymbol::Bundle(sym), AnalysisKind::Auto | AnalysisKind::Bundle) => {
            Ok((profile_bundle(sym, cutoff)?, "bundle".into()))
        }
        (LoadedSymbol::Scalar(_), AnalysisKind::Bundle) => {
            bail!("--analysis bundle needs a bundle spec (with d_tau/d_omega blocks)")
        }
        (LoadedSymbol::Bundle(_), _) => {
            bail!("bundle specs support only the bundle analysis")
        }
    }
}

fn analyze(args: AnalyzeArgs, jobs: Option<usize>) -> Result<i32> {
    if args.cutoff < 1.0 {
        bail!("--cutoff must be >= 1");
    }
    let (symbol, name) = load_spec(&args.spec)?;
    let (profile, analysis) = resolve_profile(&symbol, args.analysis, args.cutoff)?;
    let opts = AnalyzerOptions {
        exceptional_budget: args.budget,
        zero_tol: args.zero_tol,
        tail_fraction: args.tail,
    };
    let report = fit_and_judge(&profile, &opts)?;

    println!(
        "{name}: {} frequencies <= {:.6}, verdict {:?}",
        profile.entries.len(),
        args.cutoff,
        report.verdict
    );
    if let (Some(c), Some(k)) = (report.fitted_c, report.fitted_k) {
        println!("certificate: value >= {c:.6e} * <xi>^{k:.4} outside {:?}", report.exceptional);
    }
    println!(
        "zero-count trend: {}",
        report
            .zero_count_trend
            .iter()
            .map(|(c, n)| format!("{n} below tol at <xi> <= {c:.2}"))
            .collect::<Vec<_>>()
            .join("; ")
    );

    if let Some(out) = &args.out {
        let file = ReportFile {
            schema: SCHEMA_VERSION,
            tool: "ghyp",
            version: env!("CARGO_PKG_VERSION"),
            symbol: name,
            options: OptionsEcho {
                cutoff: args.cutoff,
                analysis: analysis.clone(),
                exceptional_budget: opts.exceptional_budget,
                zero_tol: opts.zero_tol,
                tail_fraction: opts.tail_fraction,
                jobs,
            },
            report: report.clone(),
        };
        let mut bytes = serde_json::to_vec_pretty(&file)?;
        bytes.push(b'\n');
        fs::write(out, bytes).with_context(|| format!("writing {}", out.display()))?;
        let profile_path =
            args.profile_out.clone().unwrap_or_else(|| out.with_extension("csv"));
        write_profile(&profile, &profile_path)?;
        println!("report: {} profile: {}", out.display(), profile_path.display());
    } else if let Some(profile_path) = &args.profile_out {
        write_profile(&profile, profile_path)?;
        println!("profile: {}", profile_path.display());
    }

    Ok(if report.verdict == Verdict::NotGhEvidence { 2 } else { 0 })
}

fn write_profile(profile: &Profile, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    profile_to_csv(profile, &mut buf)?;
    fs::write(path, buf).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn profile_cmd(args: ProfileArgs) -> Result<i32> {
    if args.cutoff < 1.0 {
        bail!("--cutoff must be >= 1");
    }
    let (symbol, name) = load_spec(&args.spec)?;
    let (profile, _) = resolve_profile(&symbol, args.analysis, args.cutoff)?;
    write_profile(&profile, &args.out)?;
    println!("{name}: wrote {} rows to {}", profile.entries.len(), args.out.display());
    Ok(0)
}

#[derive(Serialize)]
struct CounterexampleFile {
    schema: u32,
    tool: &'static str,
    version: &'static str,
    symbol: String,
    search_cutoff: f64,
    certificate: ghyp::analyzer::CounterexampleCertificate,
    /// Planted Fourier coefficients: one map per fiber component.
    coefficients: Vec<Vec<CoefficientEntry>>,
}

#[derive(Serialize)]
struct CoefficientEntry {
    xi: serde_json::Value,
    matrix: Vec<Vec<[f64; 2]>>,
}

fn coefficients_json(c: &ghyp::fourier::FourierCoefficients) -> Vec<CoefficientEntry> {
    c.coeffs
        .iter()
        .map(|(xi, m)| CoefficientEntry {
            xi: xi_to_json(xi),
            matrix: ghyp::linalg::mat_to_rows(m),
        })
        .collect()
}

fn counterexample(args: CounterexampleArgs) -> Result<i32> {
    if args.cutoff < 1.0 {
        bail!("--cutoff must be >= 1");
    }
    if args.count == 0 {
        bail!("--count must be >= 1");
    }
    let (symbol, name) = load_spec(&args.spec)?;
    let (certificate, coefficients) = match &symbol {
        LoadedSymbol::Scalar(sym) => {
            let (u, cert) = build_counterexample(sym, args.count, args.cutoff)?;
            (cert, vec![coefficients_json(&u)])
        }
        LoadedSymbol::Bundle(sym) => {
            let (us, cert) = build_counterexample_bundle(sym, args.count, args.cutoff)?;
            (cert, us.iter().map(coefficients_json).collect())
        }
    };
    for e in &certificate.entries {
        println!(
            "k={} xi={} lambda={:.6e} bound={:.6e} coeff_hs={:.12}",
            e.k, e.xi_display, e.lambda, e.bound, e.coeff_hs_norm
        );
    }
    if let Some(out) = &args.out {
        let file = CounterexampleFile {
            schema: SCHEMA_VERSION,
            tool: "ghyp",
            version: env!("CARGO_PKG_VERSION"),
            symbol: name,
            search_cutoff: args.cutoff,
            certificate,
            coefficients,
        };
        let mut bytes = serde_json::to_vec_pretty(&file)?;
        bytes.push(b'\n');
        fs::write(out, bytes).with_context(|| format!("writing {}", out.display()))?;
        println!("counterexample: {}", out.display());
    }
    Ok(0)
}

fn transform(args: TransformArgs) -> Result<i32> {
    if args.band_limit < 1.0 {
        bail!("--band-limit must be >= 1");
    }
    let group = parse_group(&args.group)?;
    let grid = Arc::new(build_grid(group, args.band_limit));
    let f = match (&args.input, args.random) {
        (Some(path), None) => {
            let file =
                fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
            import_csv(grid.clone(), std::io::BufReader::new(file))?
        }
        (None, Some(limit)) => {
            if limit > args.band_limit {
                bail!("--random cutoff exceeds the grid band limit");
            }
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed);
            let duals = enumerate_dual(group, limit);
            let coeffs = random_coefficients(&duals, &mut rng);
            synthesize(&coeffs, &grid)?
        }
        _ => bail!("exactly one of --input or --random is required"),
    };

    let duals = enumerate_dual(group, args.band_limit);
    let coeffs = forward(&f, &duals)?;
    let reconstructed = synthesize(&coeffs, &grid)?;
    let plancherel_residual = (f.l2_norm() - plancherel_norm(&coeffs)).abs();
    let round_trip = f
        .values
        .iter()
        .zip(&reconstructed.values)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0f64, f64::max);
    println!("nodes: {}", grid.len());
    println!("plancherel residual: {plancherel_residual:.6e}");
    println!("round-trip max error: {round_trip:.6e}");
    if let Some(out) = &args.out {
        let mut file =
            fs::File::create(out).with_context(|| format!("creating {}", out.display()))?;
        export_csv(&reconstructed, &mut file)?;
        file.flush()?;
        println!("reconstructed: {}", out.display());
    }
    Ok(0)
}

fn selftest(args: SelftestArgs) -> Result<i32> {
    let outcomes = ghyp::selftest::run_all(args.seed);
    let mut stdout = std::io::stdout().lock();
    let all = ghyp::selftest::print_outcomes(&outcomes, &mut stdout)?;
    Ok(if all { 0 } else { 1 })
}
