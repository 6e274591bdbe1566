use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use probe_core::evaluation::{self, ReportFormat, RobustnessMethod};
use probe_core::inference::{DecodeSettings, InferenceRecord, Mode, ModelEndpoint, SyntheticProfile};
use probe_core::io::{read_jsonl, write_jsonl_atomic};
use probe_core::ordering::SearchMode;
use probe_core::pipeline::{self, BackendSpec, InstructionRecord, RunConfig, DEFAULT_TARGETS};
use probe_core::synthesis::{load_seeds, ProbeInstance, Sampler};
use probe_core::verifier::Verifier;
use probe_core::{ConflictMatrix, ConstraintInstance, DifficultyTable, EvaluationReport, RawImportanceMatrix, Taxonomy};
use rand::SeedableRng;

#[derive(Parser)]
#[command(name = "probe", version, about = "Constraint-order position-bias probing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample constraint combinations for every seed instruction.
    Synthesize(SynthesizeArgs),
    /// Run instructions at random orders and estimate per-kind difficulty.
    Calibrate(CalibrateArgs),
    /// Build one probe per instruction and CDDI target.
    Reorder(ReorderArgs),
    /// Run probes against an endpoint or the synthetic model.
    Infer(InferArgs),
    /// Score records and write accuracy reports.
    Evaluate(EvaluateArgs),
    /// Normalize importance matrices and aggregate them per constraint.
    AttributeAggregate(AttributeArgs),
    /// Same-CDDI robustness test across evaluation runs.
    Robustness(RobustnessArgs),
    /// Run every phase from one configuration file.
    Pipeline(PipelineArgs),
    /// Check one response against one constraint.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SynthesizeArgs {
    #[arg(long)]
    seeds: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    n_cc: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    taxonomy: Option<PathBuf>,
    #[arg(long)]
    conflicts: Option<PathBuf>,
}

#[derive(Args)]
struct BackendArgs {
    /// Chat-completion endpoint file (TOML or JSON).
    #[arg(long, conflicts_with = "synthetic_profile")]
    endpoint_config: Option<PathBuf>,
    /// Synthetic model profile (TOML or JSON).
    #[arg(long)]
    synthetic_profile: Option<PathBuf>,
    #[arg(long, default_value_t = 2048)]
    max_tokens: u32,
}

impl BackendArgs {
    fn spec(&self) -> Result<BackendSpec> {
        match (&self.endpoint_config, &self.synthetic_profile) {
            (Some(p), _) => Ok(BackendSpec::Endpoint(ModelEndpoint::from_path(p)?)),
            (None, Some(p)) => Ok(BackendSpec::Synthetic(SyntheticProfile::from_path(p)?)),
            (None, None) => bail!("one of --endpoint-config or --synthetic-profile is required"),
        }
    }

    fn decode(&self) -> DecodeSettings {
        DecodeSettings {
            greedy: true,
            max_tokens: self.max_tokens,
        }
    }
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long)]
    instructions: PathBuf,
    /// Difficulty table to write.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    rounds: usize,
    #[arg(long, default_value = "single")]
    mode: Mode,
    /// Calibration records; defaults to a sibling of --out.
    #[arg(long)]
    records: Option<PathBuf>,
    #[command(flatten)]
    backend: BackendArgs,
}

#[derive(Args)]
struct ReorderArgs {
    #[arg(long)]
    instructions: PathBuf,
    #[arg(long)]
    difficulty: PathBuf,
    /// Comma-separated CDDI targets; defaults to the twelve-value grid.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    targets: Vec<f64>,
    #[arg(long, default_value = "constructive")]
    search: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InferArgs {
    #[arg(long)]
    mode: Mode,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    backend: BackendArgs,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    records: Vec<PathBuf>,
    #[arg(long)]
    probes: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "csv")]
    format: ReportFormat,
    /// Orders the group columns hardest first.
    #[arg(long)]
    difficulty: Option<PathBuf>,
}

#[derive(Args)]
struct AttributeArgs {
    #[arg(long)]
    matrices: PathBuf,
    #[arg(long)]
    probes: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = probe_core::importance::DEFAULT_SCALE)]
    scale: f64,
    #[arg(long)]
    floor: Option<f64>,
}

#[derive(Args)]
struct RobustnessArgs {
    /// reports.json files, one per run.
    #[arg(long, num_args = 2.., required = true)]
    reports: Vec<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    cddi: f64,
    #[arg(long, default_value = "single")]
    mode: Mode,
    /// Shuffle rounds for a permutation test instead of ANOVA.
    #[arg(long)]
    permutations: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Constraint instance as JSON, or @path to read it from a file.
    #[arg(long)]
    constraint: String,
    /// Response file, or - for stdin.
    #[arg(long)]
    response: PathBuf,
}

fn load_instructions(path: &Path) -> Result<Vec<InstructionRecord>> {
    read_jsonl(path).with_context(|| format!("reading instructions from {}", path.display()))
}

fn load_probes(path: &Path) -> Result<Vec<ProbeInstance>> {
    read_jsonl(path).with_context(|| format!("reading probes from {}", path.display()))
}

fn synthesize(args: SynthesizeArgs) -> Result<()> {
    let taxonomy = match &args.taxonomy {
        Some(p) => Taxonomy::from_path(p)?,
        None => Taxonomy::builtin().clone(),
    };
    let conflicts = match &args.conflicts {
        Some(p) => ConflictMatrix::from_path(p)?,
        None => ConflictMatrix::builtin().clone(),
    };
    let seeds = load_seeds(&args.seeds)?;
    let mut rng = pipeline::phase_rng(args.seed, 1);
    let out = pipeline::synthesize_instructions(&seeds, &Sampler::new(&taxonomy, &conflicts), args.n, args.n_cc, &mut rng)?;
    write_jsonl_atomic(&args.out, &out)?;
    println!("{} instructions -> {}", out.len(), args.out.display());
    Ok(())
}

async fn calibrate(args: CalibrateArgs) -> Result<()> {
    let instructions = load_instructions(&args.instructions)?;
    let mut rng = pipeline::phase_rng(args.seed, 2);
    let probes = pipeline::calibration_probes(&instructions, args.rounds, &mut rng)?;
    let records = args
        .records
        .clone()
        .unwrap_or_else(|| args.out.with_file_name("calibration_records.jsonl"));
    let spec = args.backend.spec()?;
    let summary = pipeline::infer(&spec, &probes, args.mode, args.backend.decode(), &records).await?;
    tracing::info!(?summary, "calibration inference done");
    let recs = pipeline::load_records(&records, &probes)?;
    let scored = evaluation::score_all(&recs, &probes, &Verifier::default())?;
    let table = pipeline::difficulty_from_scored(&scored, &pipeline::kinds_in_scope(&instructions))?;
    table.write(&args.out)?;
    println!("{} kinds -> {}", table.entries().len(), args.out.display());
    Ok(())
}

fn reorder(args: ReorderArgs) -> Result<()> {
    let instructions = load_instructions(&args.instructions)?;
    let table = DifficultyTable::read(&args.difficulty)?;
    let targets = if args.targets.is_empty() {
        DEFAULT_TARGETS.to_vec()
    } else {
        args.targets
    };
    let search = match args.search.as_str() {
        "constructive" => SearchMode::Constructive,
        "exhaustive" => SearchMode::Exhaustive,
        other => bail!("unknown search mode `{other}`"),
    };
    let probes = pipeline::reorder(&instructions, &table, &targets, search)?;
    write_jsonl_atomic(&args.out, &probes)?;
    println!("{} probes -> {}", probes.len(), args.out.display());
    Ok(())
}

async fn infer(args: InferArgs) -> Result<()> {
    let probes = load_probes(&args.input)?;
    let spec = args.backend.spec()?;
    let summary = pipeline::infer(&spec, &probes, args.mode, args.backend.decode(), &args.out).await?;
    println!("{}", serde_json::to_string(&summary)?);
    if summary.failed > 0 {
        tracing::warn!(failed = summary.failed, "some probes ended with an error record");
    }
    Ok(())
}

fn evaluate(args: EvaluateArgs) -> Result<()> {
    if args.records.is_empty() {
        bail!("--records is required");
    }
    let probes = load_probes(&args.probes)?;
    let mut records: Vec<InferenceRecord> = Vec::new();
    for path in &args.records {
        records.extend(read_jsonl::<InferenceRecord>(path).with_context(|| format!("reading {}", path.display()))?);
    }
    let table = args.difficulty.as_deref().map(DifficultyTable::read).transpose()?;
    let out = pipeline::evaluate(&records, &probes, &Verifier::default(), table.as_ref(), args.format, &args.out)?;
    for f in &out.files {
        println!("{}", f.display());
    }
    Ok(())
}

fn attribute(args: AttributeArgs) -> Result<()> {
    let probes = load_probes(&args.probes)?;
    let matrices: Vec<RawImportanceMatrix> = read_jsonl(&args.matrices)?;
    let set = pipeline::write_importance(&matrices, &probes, args.scale, args.floor, &args.out)?;
    println!(
        "{} profiles from {} matrices ({} skipped) -> {}",
        set.profiles.len(),
        matrices.len(),
        set.skipped.len(),
        args.out.display()
    );
    Ok(())
}

fn robustness(args: RobustnessArgs) -> Result<()> {
    let groups = probe_core::ConstraintGroup::ALL;
    let mut runs = Vec::new();
    for path in &args.reports {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let reports: Vec<EvaluationReport> = serde_json::from_str(&text)?;
        let report = reports
            .iter()
            .find(|r| r.mode == args.mode && r.cddi.is_some_and(|c| (c - args.cddi).abs() < 1e-9))
            .with_context(|| format!("{} has no {} bucket at CDDI {}", path.display(), args.mode.name(), args.cddi))?;
        runs.push(evaluation::report_columns(report, &groups)?);
    }
    let method = match args.permutations {
        Some(rounds) => RobustnessMethod::Permutation { rounds },
        None => RobustnessMethod::Anova,
    };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed);
    let p = evaluation::robustness_test(&runs, method, &mut rng)?;
    println!("p_value {p}");
    Ok(())
}

async fn run_pipeline(args: PipelineArgs) -> Result<()> {
    let mut config = RunConfig::from_path(&args.config)?;
    config.seed = args.seed;
    if let Some(dir) = args.out_dir {
        config.out_dir = dir;
    }
    let summary = pipeline::run_pipeline(&config).await?;
    println!(
        "{} instructions, {} probes, {} report rows -> {}",
        summary.instructions,
        summary.probes,
        summary.reports.len(),
        config.out_dir.display()
    );
    Ok(())
}

fn verify(args: VerifyArgs) -> Result<()> {
    let json = match args.constraint.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?,
        None => args.constraint,
    };
    let instance: ConstraintInstance = serde_json::from_str(&json).context("parsing constraint")?;
    let response = if args.response.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin())?
    } else {
        std::fs::read_to_string(&args.response).with_context(|| format!("reading {}", args.response.display()))?
    };
    let verdict = Verifier::default().verify(&response, &instance)?;
    println!("{}", serde_json::to_string(&verdict)?);
    if !verdict.satisfied {
        std::process::exit(1);
    }
    Ok(())
}

#[tokio::main]
async fn main() -> Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    match Cli::parse().command {
        Command::Synthesize(a) => synthesize(a),
        Command::Calibrate(a) => calibrate(a).await,
        Command::Reorder(a) => reorder(a),
        Command::Infer(a) => infer(a).await,
        Command::Evaluate(a) => evaluate(a),
        Command::AttributeAggregate(a) => attribute(a),
        Command::Robustness(a) => robustness(a),
        Command::Pipeline(a) => run_pipeline(a).await,
        Command::Verify(a) => verify(a),
    }
}
