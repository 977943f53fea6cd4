use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ghcert::acceptance;
use ghcert::io::{self, CertificateFile};
use ghcert::sweep::sweep_parallel;
use ghcert_core::bounds::{best_bounds, BoundOptions};
use ghcert_core::exact::{gh_exact, SearchOptions, DEFAULT_MAX_POINTS, DEFAULT_NODE_BUDGET};
use ghcert_core::metric::DEFAULT_METRIC_TOL;
use ghcert_core::model::{circle_space, whisker_graph, LineGrid};
use ghcert_core::nonlinearity::{c_exact, c_heuristic, ExactOptions, DEFAULT_EXACT_LIMIT, DEFAULT_LIP_TOL};
use ghcert_core::segment_circle::{certificate, Grids};
use ghcert_core::{Correspondence, Error as CoreError, FiniteMetricSpace, Involution, Metric};

/// Gromov-Hausdorff distances, bounds and certificates for finite metric
/// spaces and for the segment-circle family.
#[derive(Parser)]
#[command(name = "ghcert", version)]
struct Cli {
    /// Worker threads for parallel subcommands (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a model space and write it as JSON or CSV.
    MakeSpace(MakeSpace),
    /// Distortion of a correspondence, or of a PL relation.
    Distortion(DistortionArgs),
    /// All applicable lower and upper bounds, one JSON record per line.
    Bounds(BoundsArgs),
    /// Exact distance by branch and bound.
    Exact(ExactArgs),
    /// Nonlinearity degree witness.
    Cx(CxArgs),
    /// Certificate for the segment of length lambda against the circle.
    Certify(CertifyArgs),
    /// Closed form, bounds and regime over a range of lambda, as CSV.
    Sweep(SweepArgs),
    /// Run the acceptance suite and print a pass/fail table.
    VerifyAll(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceKind {
    Segment,
    Circle,
    Whisker,
    Graph,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhiskerPart {
    /// Every vertex of the graph.
    All,
    /// The circle vertices.
    Y,
    /// The whiskers and the lower semicircle.
    Z,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct MakeSpace {
    #[arg(long, value_enum)]
    kind: SpaceKind,
    /// Segment length, or lambda for the whisker graph.
    #[arg(long)]
    lambda: Option<f64>,
    /// Intervals on the segment grid.
    #[arg(long, default_value_t = 720)]
    m_grid: usize,
    #[arg(long, default_value_t = 720)]
    n_circle: usize,
    /// Edges per whisker (default: spacing matched to the circle).
    #[arg(long)]
    n_whisker: Option<usize>,
    #[arg(long, value_enum, default_value_t = WhiskerPart::All)]
    part: WhiskerPart,
    /// Graph file for `--kind graph`.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Output format (default: from the extension of --out, else JSON).
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DistortionArgs {
    #[arg(long, requires_all = ["y", "pairs"], conflicts_with = "pl")]
    x: Option<PathBuf>,
    #[arg(long)]
    y: Option<PathBuf>,
    /// Correspondence file.
    #[arg(long)]
    pairs: Option<PathBuf>,
    /// PL relation file.
    #[arg(long, required_unless_present = "x")]
    pl: Option<PathBuf>,
    /// Sampling step for --pl.
    #[arg(long, default_value_t = std::f64::consts::PI / 720.0)]
    step: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum InvolutionMode {
    /// Detect an antipodal involution on either space.
    Auto,
    None,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    x: PathBuf,
    #[arg(long)]
    y: PathBuf,
    #[arg(long, value_enum, default_value_t = InvolutionMode::Auto)]
    involution: InvolutionMode,
    /// Nonlinearity witness for the space without the involution.
    #[arg(long)]
    c_witness: Option<PathBuf>,
    /// Slack reported on the involution bound (default: the mesh of the
    /// space carrying the involution).
    #[arg(long)]
    involution_slack: Option<f64>,
    /// Also run the exact solver when both spaces are small enough.
    #[arg(long)]
    exact: bool,
}

#[derive(Args)]
struct ExactArgs {
    #[arg(long)]
    x: PathBuf,
    #[arg(long)]
    y: PathBuf,
    /// Node budget; the result is marked "upper" when it runs out.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_POINTS)]
    max_points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CxArgs {
    #[arg(long)]
    x: PathBuf,
    /// Exact value by order enumeration (small spaces only).
    #[arg(long)]
    exact: bool,
    /// Largest space accepted by --exact.
    #[arg(long, default_value_t = DEFAULT_EXACT_LIMIT)]
    max_points: usize,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Copy)]
struct GridArgs {
    #[arg(long, default_value_t = 720)]
    n_circle: usize,
    #[arg(long, default_value_t = 720)]
    m_grid: usize,
    #[arg(long, default_value_t = std::f64::consts::PI / 720.0)]
    pl_step: f64,
    #[arg(long)]
    n_whisker: Option<usize>,
}

impl GridArgs {
    fn grids(self) -> Grids {
        Grids { n_circle: self.n_circle, m_grid: self.m_grid, pl_step: self.pl_step, n_whisker: self.n_whisker }
    }
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long, required_unless_present = "check")]
    lambda: Option<f64>,
    #[command(flatten)]
    grids: GridArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replay an existing certificate instead of building one.
    #[arg(long, conflicts_with = "lambda")]
    check: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 0.0)]
    from: f64,
    #[arg(long, default_value_t = 3.0 * std::f64::consts::PI)]
    to: f64,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    #[command(flatten)]
    grids: GridArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run only these criteria.
    #[arg(long, value_delimiter = ',')]
    only: Vec<usize>,
}

enum Failure {
    Input(anyhow::Error),
    Verification(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

impl From<io::FormatError> for Failure {
    fn from(e: io::FormatError) -> Self {
        Failure::Input(e.into())
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::StaleCertificate { .. }
            | CoreError::NotLipschitz { .. }
            | CoreError::CertificateFailed { .. }
            | CoreError::InconsistentBounds { .. } => Failure::Verification(e.to_string()),
            other => Failure::Input(other.into()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn out_path(out: &Option<PathBuf>) -> Option<&Path> {
    out.as_deref()
}

fn make_space(args: MakeSpace) -> Outcome {
    let need_lambda = || args.lambda.ok_or_else(|| anyhow!("--lambda is required for this kind"));
    let space: FiniteMetricSpace = match args.kind {
        SpaceKind::Segment => LineGrid::uniform(need_lambda()?, args.m_grid + 1)?.to_space(),
        SpaceKind::Circle => circle_space(args.n_circle)?,
        SpaceKind::Whisker => {
            let lambda = need_lambda()?;
            let step = 2.0 * std::f64::consts::PI / args.n_circle as f64;
            let edges = match args.n_whisker {
                Some(k) => k,
                None => (((lambda - std::f64::consts::PI) / 2.0) / step).ceil().max(1.0) as usize,
            };
            let w = whisker_graph(lambda, args.n_circle, edges)?;
            match args.part {
                WhiskerPart::All => w.space.clone(),
                WhiskerPart::Y => w.space.subspace(&w.y)?,
                WhiskerPart::Z => w.space.subspace(&w.z)?,
            }
        }
        SpaceKind::Graph => {
            let path = args.graph.as_ref().ok_or_else(|| anyhow!("--graph is required for --kind graph"))?;
            io::read_graph(path)?.shortest_path_metric()?
        }
    };
    let format = args.format.unwrap_or_else(|| match &args.out {
        Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) => Format::Csv,
        _ => Format::Json,
    });
    let text = match format {
        Format::Json => io::space_to_json(&space),
        Format::Csv => io::space_to_csv(&space),
    };
    io::emit(out_path(&args.out), &text)?;
    Ok(())
}

fn distortion(args: DistortionArgs) -> Outcome {
    let line = if let Some(pl) = &args.pl {
        let relation = io::read_pl(pl)?;
        let d = relation.distortion(args.step)?;
        serde_json::json!({
            "distortion": io::sig12(d.value),
            "error_bound": io::sig12(d.error_bound),
            "samples": d.samples,
        })
    } else {
        let (Some(x), Some(y), Some(pairs)) = (&args.x, &args.y, &args.pairs) else {
            return Err(anyhow!("--x, --y and --pairs are required without --pl").into());
        };
        let x = io::read_space(x)?;
        let y = io::read_space(y)?;
        let r = Correspondence::new(io::read_pairs(pairs)?, x.len(), y.len())?;
        let d = r.distortion(&x, &y)?;
        serde_json::json!({ "distortion": io::sig12(d), "half": io::sig12(d / 2.0) })
    };
    println!("{line}");
    Ok(())
}

fn bounds(args: BoundsArgs) -> Outcome {
    let x = io::read_space(&args.x)?;
    let y = io::read_space(&args.y)?;
    let mut opts = BoundOptions::default();
    if let InvolutionMode::Auto = args.involution {
        if let Some(alpha) = Involution::detect(&x, DEFAULT_METRIC_TOL) {
            opts.involution = Some(alpha);
        } else if let Some(alpha) = Involution::detect(&y, DEFAULT_METRIC_TOL) {
            opts.involution = Some(alpha);
            opts.involution_on_y = true;
        }
    }
    let carrier = if opts.involution_on_y { &y } else { &x };
    opts.involution_slack = args.involution_slack.unwrap_or_else(|| carrier.mesh());
    if let Some(path) = &args.c_witness {
        let witness = io::read_witness(path)?;
        let other = if opts.involution_on_y { &x } else { &y };
        witness.verify(other, DEFAULT_LIP_TOL)?;
        opts.c_witness = Some(witness);
    }
    if args.exact {
        opts.exact = Some(SearchOptions::default());
    }
    for record in best_bounds(&x, &y, &opts)? {
        println!("{}", io::bound_record_json(&record));
    }
    Ok(())
}

fn exact(args: ExactArgs) -> Outcome {
    let x = io::read_space(&args.x)?;
    let y = io::read_space(&args.y)?;
    let opts = SearchOptions { max_points: args.max_points, node_budget: args.budget, initial_upper: None };
    let solution = gh_exact(&x, &y, &opts)?;
    io::emit(out_path(&args.out), &io::exact_to_json(&solution))?;
    Ok(())
}

fn cx(args: CxArgs) -> Outcome {
    let x = io::read_space(&args.x)?;
    let witness = if args.exact {
        c_exact(&x, ExactOptions { max_points: args.max_points, ..ExactOptions::default() })?
    } else {
        c_heuristic(&x, args.restarts, args.seed)
    };
    witness.verify(&x, DEFAULT_LIP_TOL)?;
    io::emit(out_path(&args.out), &io::witness_to_json(&witness))?;
    Ok(())
}

fn certify(args: CertifyArgs) -> Outcome {
    if let Some(path) = &args.check {
        let file = io::read_certificate(path)?;
        let check = file.check()?;
        println!(
            "{}",
            serde_json::json!({
                "lambda": file.lambda,
                "replayed": io::sig12(check.replayed),
                "half_distortion": io::sig12(check.replayed / 2.0),
                "formula": io::sig12(check.formula),
                "slack": file.slack,
                "passed": check.passed(),
            })
        );
        return if check.passed() {
            Ok(())
        } else {
            Err(Failure::Verification(format!("certificate {} does not replay within slack", path.display())))
        };
    }
    let lambda = args.lambda.ok_or_else(|| anyhow!("--lambda is required"))?;
    let cert = certificate(lambda, &args.grids.grids())?;
    io::emit(out_path(&args.out), &CertificateFile::from_certificate(&cert).to_json())?;
    Ok(())
}

fn sweep(args: SweepArgs) -> Outcome {
    let reports = sweep_parallel(args.from, args.to, args.steps, &args.grids.grids())?;
    io::emit(out_path(&args.out), &io::sweep_to_csv(&reports))?;
    if let Some(bad) = reports.iter().find(|r| !r.consistent()) {
        return Err(Failure::Verification(format!("row lambda = {} violates lower <= formula <= upper", bad.lambda)));
    }
    Ok(())
}

fn verify_all(args: VerifyArgs) -> Outcome {
    let ids: Vec<usize> = if args.only.is_empty() { (1..=acceptance::CRITERIA).collect() } else { args.only };
    let mut failed = 0;
    for id in ids {
        let result = acceptance::run(id);
        println!("{}", result.line());
        if !result.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        Err(Failure::Verification(format!("{failed} criteria failed")))
    } else {
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors are input errors; --help and --version succeed.
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(threads) = cli.threads {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
        if let Err(e) = pool.context("configuring worker threads") {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    }
    let outcome = match cli.command {
        Command::MakeSpace(a) => make_space(a),
        Command::Distortion(a) => distortion(a),
        Command::Bounds(a) => bounds(a),
        Command::Exact(a) => exact(a),
        Command::Cx(a) => cx(a),
        Command::Certify(a) => certify(a),
        Command::Sweep(a) => sweep(a),
        Command::VerifyAll(a) => verify_all(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(message)) => {
            eprintln!("verification failed: {message}");
            ExitCode::from(2)
        }
    }
}
