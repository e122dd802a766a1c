//! Batch command-line front end: matrix generation, leverage inspection,
//! bound evaluation, Monte-Carlo experiment runs, batch execution and plot
//! re-rendering from CSV.
//!
//! Exit codes: 0 success, 1 configuration error, 2 runtime error,
//! 3 partial batch failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kappa_sq::batch::{run_batch, run_single};
use kappa_sq::bounds::{BoundId, BoundQuery};
use kappa_sq::config::{parse_config, ParsedConfig};
use kappa_sq::csvio;
use kappa_sq::error::Error;
use kappa_sq::experiment::run_experiment_serial;
use kappa_sq::givens::generate_from_leverage;
use kappa_sq::linalg;
use kappa_sq::plot::{self, PlotStyle};
use kappa_sq::profile::{dist_many_big, dist_one_big};

#[derive(Parser)]
#[command(
    name = "kappa-sq",
    version,
    about = "Randomized row sampling of matrices with orthonormal columns: \
             test-matrix generation, kappa(SQ) experiments, probabilistic bounds."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a matrix with orthonormal columns and a prescribed
    /// leverage-score profile, written as CSV.
    GenMatrix(GenMatrixArgs),
    /// Print or save the leverage scores and coherence of a matrix.
    Leverage(LeverageArgs),
    /// Evaluate one probabilistic kappa(SQ) bound at a single point.
    Bound(BoundArgs),
    /// Run one experiment described by a JSON config.
    Run(RunArgs),
    /// Run a batch (JSON array of configs) serially.
    Batch(BatchArgs),
    /// Re-render plots from previously written CSV files.
    Plot(PlotArgs),
}

#[derive(Args)]
struct GenMatrixArgs {
    /// Number of rows.
    #[arg(long)]
    m: usize,
    /// Number of columns.
    #[arg(long)]
    n: usize,
    /// Leverage distribution: one-big or many-big.
    #[arg(long, default_value = "one-big")]
    leverage: String,
    /// Coherence (largest leverage score), in [n/m, 1].
    #[arg(long)]
    mu: f64,
    /// Output CSV path for the matrix.
    #[arg(long, short)]
    output: PathBuf,
    /// Also write the realized leverage scores here (CSV, one per line).
    #[arg(long)]
    profile_output: Option<PathBuf>,
}

#[derive(Args)]
struct LeverageArgs {
    /// Matrix CSV (must have orthonormal columns).
    matrix: PathBuf,
    /// Write the scores here instead of printing them.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    /// Bound name (b1-chernoff .. b6-weak-bernoulli, or b1 .. b6).
    #[arg(long)]
    bound: String,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    /// Coherence.
    #[arg(long)]
    mu: f64,
    /// Projected leverage norm (required for b2).
    #[arg(long)]
    lambda: Option<f64>,
    /// Number of sampled rows.
    #[arg(long)]
    c: usize,
    /// Failure probability budget, in (0, 1).
    #[arg(long)]
    delta: f64,
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config.
    config: PathBuf,
    /// RNG seed; mandatory so runs are reproducible on purpose.
    #[arg(long)]
    seed: u64,
    /// Output stem; files are written as <stem>_trials.csv,
    /// <stem>_bounds.csv, <stem>_kappa.svg, <stem>_failure.svg.
    /// Defaults to the config path without its extension.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Run trials serially instead of in parallel (same results).
    #[arg(long)]
    serial: bool,
}

#[derive(Args)]
struct BatchArgs {
    /// JSON batch file (array of configs).
    batch: PathBuf,
    /// Base RNG seed; entry k uses seed + k - 1. Entries without their own
    /// seed require this.
    #[arg(long)]
    seed: Option<u64>,
    /// Output stem; defaults to the batch path without its extension.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// Trials CSV written by `run` or `batch`.
    #[arg(long)]
    trials: Option<PathBuf>,
    /// Bounds CSV written by `run` or `batch`.
    #[arg(long)]
    bounds: Option<PathBuf>,
    /// Output stem for <stem>_kappa.svg and <stem>_failure.svg.
    #[arg(long, short)]
    output: PathBuf,
    /// X-axis label.
    #[arg(long, default_value = "c (rows sampled)")]
    x_label: String,
    /// Optional JSON file holding a plot-style object.
    #[arg(long)]
    style: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Parse { .. } => 1,
        _ => 2,
    }
}

fn dispatch(command: Command) -> kappa_sq::Result<ExitCode> {
    match command {
        Command::GenMatrix(args) => gen_matrix(args),
        Command::Leverage(args) => leverage(args),
        Command::Bound(args) => bound(args),
        Command::Run(args) => run(args),
        Command::Batch(args) => batch(args),
        Command::Plot(args) => plot_cmd(args),
    }
}

fn gen_matrix(args: GenMatrixArgs) -> kappa_sq::Result<ExitCode> {
    let profile = match args.leverage.as_str() {
        "one-big" => dist_one_big(args.m, args.n, args.mu),
        "many-big" => dist_many_big(args.m, args.n, args.mu),
        other => Err(Error::Config(format!(
            "unknown leverage distribution \"{other}\" (expected one-big or many-big)"
        ))),
    }?;
    let (q, trace) = generate_from_leverage(&profile)?;
    csvio::write_matrix_csv(&q, &args.output)?;
    if let Some(path) = &args.profile_output {
        let realized = linalg::leverage_scores(&q)?;
        csvio::write_profile_csv(realized.scores(), path)?;
    }
    println!(
        "wrote {} ({}x{}, coherence {}, orthonormality defect {:.3e})",
        args.output.display(),
        args.m,
        args.n,
        profile.coherence(),
        trace.final_defect
    );
    Ok(ExitCode::SUCCESS)
}

fn leverage(args: LeverageArgs) -> kappa_sq::Result<ExitCode> {
    let q = csvio::read_matrix_csv(&args.matrix)?;
    let profile = linalg::leverage_scores(&q)?;
    if let Some(path) = &args.output {
        csvio::write_profile_csv(profile.scores(), path)?;
        println!("wrote {}", path.display());
    } else {
        for s in profile.scores() {
            println!("{s}");
        }
    }
    println!("coherence: {}", profile.coherence());
    Ok(ExitCode::SUCCESS)
}

fn bound(args: BoundArgs) -> kappa_sq::Result<ExitCode> {
    let bound = BoundId::from_name(&args.bound)
        .ok_or_else(|| Error::Config(format!("unknown bound \"{}\"", args.bound)))?;
    let query = BoundQuery {
        bound,
        m: args.m,
        n: args.n,
        mu: args.mu,
        lambda: args.lambda,
        c: args.c,
        delta: args.delta,
        gamma: Some(args.c as f64 / args.m as f64),
    };
    match kappa_sq::bounds::evaluate(&query)? {
        kappa_sq::bounds::BoundPoint::Applicable {
            epsilon,
            kappa_bound,
        } => {
            println!("{}: epsilon = {epsilon}, kappa_bound = {kappa_bound}", bound.name());
        }
        kappa_sq::bounds::BoundPoint::NotApplicable => {
            println!("{}: not applicable at these parameters", bound.name());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn stem_for(explicit: &Option<PathBuf>, input: &Path) -> PathBuf {
    explicit
        .clone()
        .unwrap_or_else(|| input.with_extension(""))
}

fn read_config_text(path: &Path) -> kappa_sq::Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn run(args: RunArgs) -> kappa_sq::Result<ExitCode> {
    let text = read_config_text(&args.config)?;
    let entry = match parse_config(&text)? {
        ParsedConfig::Single(entry) => entry,
        ParsedConfig::Batch(_) => {
            return Err(Error::Config(
                "this is a batch file; use the `batch` subcommand".into(),
            ))
        }
    };
    let base_dir = args.config.parent().unwrap_or(Path::new(".")).to_path_buf();
    let stem = stem_for(&args.output, &args.config);
    let files = if args.serial {
        // same pipeline, serial engine: resolve, run, serialize, plot
        let config = entry.resolve(&base_dir, Some(args.seed))?;
        let result = run_experiment_serial(&config)?;
        let paths = csvio::OutputPaths::from_stem(&stem);
        csvio::write_trials_csv(&csvio::trial_rows(&result), &paths.trials)?;
        csvio::write_bounds_csv(&csvio::bound_rows(&result), &paths.bounds)?;
        let mut files = vec![paths.trials, paths.bounds];
        files.extend(plot::render_plots(&result, &entry.plot, &stem)?);
        files
    } else {
        run_single(&entry, &base_dir, &stem, Some(args.seed))?
    };
    for f in &files {
        println!("wrote {}", f.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn batch(args: BatchArgs) -> kappa_sq::Result<ExitCode> {
    let text = read_config_text(&args.batch)?;
    let entries = match parse_config(&text)? {
        ParsedConfig::Batch(entries) => entries,
        ParsedConfig::Single(_) => {
            return Err(Error::Config(
                "this is a single experiment; use the `run` subcommand".into(),
            ))
        }
    };
    let base_dir = args.batch.parent().unwrap_or(Path::new(".")).to_path_buf();
    let stem = stem_for(&args.output, &args.batch);
    let summary = run_batch(&entries, &base_dir, &stem, args.seed);
    for e in &summary.entries {
        match &e.error {
            None => println!("entry {} ({}): ok, {} files", e.index, e.name, e.files.len()),
            Some(err) => println!("entry {} ({}): FAILED: {err}", e.index, e.name),
        }
    }
    if summary.all_succeeded() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "{} of {} batch entries failed",
            summary.failed_count(),
            summary.entries.len()
        );
        Ok(ExitCode::from(3))
    }
}

fn plot_cmd(args: PlotArgs) -> kappa_sq::Result<ExitCode> {
    let trials = match &args.trials {
        Some(path) => csvio::read_trials_csv(path)?,
        None => Vec::new(),
    };
    let bounds = match &args.bounds {
        Some(path) => csvio::read_bounds_csv(path)?,
        None => Vec::new(),
    };
    if trials.is_empty() && bounds.is_empty() {
        return Err(Error::Config(
            "nothing to plot: pass --trials and/or --bounds".into(),
        ));
    }
    let style = match &args.style {
        Some(path) => {
            let text = read_config_text(path)?;
            serde_json::from_str::<PlotStyle>(&text)
                .map_err(|e| Error::Config(format!("invalid plot style: {e}")))?
        }
        None => PlotStyle::default(),
    };
    style.validate()?;
    let paths = csvio::OutputPaths::from_stem(&args.output);
    let kappa = plot::render_kappa_panel(&trials, &bounds, &style, &args.x_label)?;
    std::fs::write(&paths.kappa_svg, kappa.to_svg()).map_err(|e| Error::Io {
        path: paths.kappa_svg.clone(),
        source: e,
    })?;
    println!("wrote {}", paths.kappa_svg.display());
    if !trials.is_empty() {
        let failure = plot::render_failure_panel(&trials, &style, &args.x_label)?;
        std::fs::write(&paths.failure_svg, failure.to_svg()).map_err(|e| Error::Io {
            path: paths.failure_svg.clone(),
            source: e,
        })?;
        println!("wrote {}", paths.failure_svg.display());
    }
    Ok(ExitCode::SUCCESS)
}
