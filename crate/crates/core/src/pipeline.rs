//! End-to-end protocol driver: synthesize, calibrate, reorder, infer,
//! evaluate and aggregate importance.
//!
//! Every phase writes plain line-delimited artifacts into the output
//! directory. A rerun skips phases whose artifacts already exist, and
//! inference resumes from the probes already recorded.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constraints::{ConflictMatrix, ConstraintKind, Taxonomy};
use crate::error::{Error, Result};
use crate::evaluation::{self, EvaluationReport, ReportFormat, ScoredRecord};
use crate::importance::{self, RawImportanceMatrix};
use crate::inference::http::HttpBackend;
use crate::inference::runner::{RetryPolicy, RunSummary, Runner};
use crate::inference::synthetic::{SyntheticModel, SyntheticProfile};
use crate::inference::{ChatBackend, DecodeSettings, InferenceRecord, Mode, ModelEndpoint};
use crate::io::{read_jsonl, write_atomic, write_jsonl_atomic};
use crate::ordering::{orders_for_targets, DifficultyTable, SearchMode};
use crate::plot::{bar_chart, line_chart, Series};
use crate::synthesis::{compose, load_seeds, ConstraintCombination, ProbeInstance, Sampler, SeedInstruction};
use crate::verifier::{Verifier, VerifierConfig};

/// The twelve default CDDI targets.
pub const DEFAULT_TARGETS: [f64; 12] = [1.0, 0.8, 0.6, 0.4, 0.2, 0.05, -0.05, -0.2, -0.4, -0.6, -0.8, -1.0];

// Independent RNG streams derived from the run seed.
const STREAM_SYNTHESIZE: u64 = 1;
const STREAM_CALIBRATE: u64 = 2;

pub fn phase_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationConfig {
    /// Randomly ordered passes over the instruction set.
    #[serde(default = "one")]
    pub rounds: usize,
    #[serde(default = "single_round")]
    pub mode: Mode,
    /// A ready difficulty table; skips calibration inference.
    #[serde(default)]
    pub difficulty: Option<PathBuf>,
}

fn one() -> usize {
    1
}

fn single_round() -> Mode {
    Mode::SingleRound
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        CalibrationConfig {
            rounds: 1,
            mode: Mode::SingleRound,
            difficulty: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImportanceConfig {
    pub matrices: PathBuf,
    #[serde(default = "default_scale")]
    pub scale: f64,
    #[serde(default)]
    pub floor: Option<f64>,
}

fn default_scale() -> f64 {
    importance::DEFAULT_SCALE
}

/// One configuration file drives the whole run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Constraints per instruction.
    pub n: usize,
    /// Constraint combinations per seed instruction.
    pub n_cc: usize,
    #[serde(default = "default_targets")]
    pub targets: Vec<f64>,
    pub seeds: PathBuf,
    pub out_dir: PathBuf,
    #[serde(default = "default_modes")]
    pub modes: Vec<Mode>,
    #[serde(default)]
    pub search: SearchMode,
    #[serde(default)]
    pub endpoint: Option<ModelEndpoint>,
    #[serde(default)]
    pub synthetic: Option<SyntheticProfile>,
    #[serde(default)]
    pub decode: DecodeSettings,
    #[serde(default)]
    pub calibration: CalibrationConfig,
    #[serde(default)]
    pub verifier: VerifierConfig,
    #[serde(default)]
    pub taxonomy: Option<PathBuf>,
    #[serde(default)]
    pub conflicts: Option<PathBuf>,
    #[serde(default)]
    pub report_format: ReportFormat,
    #[serde(default)]
    pub importance: Option<ImportanceConfig>,
}

fn default_targets() -> Vec<f64> {
    DEFAULT_TARGETS.to_vec()
}

fn default_modes() -> Vec<Mode> {
    vec![Mode::SingleRound]
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!("n must be at least 2, got {}", self.n)));
        }
        if self.n_cc < 1 {
            return Err(Error::Config("n_cc must be at least 1".into()));
        }
        if self.targets.is_empty() {
            return Err(Error::Config("targets is empty".into()));
        }
        if let Some(t) = self.targets.iter().find(|t| !(-1.0..=1.0).contains(*t)) {
            return Err(Error::Config(format!("target {t} outside [-1, 1]")));
        }
        if self.modes.is_empty() {
            return Err(Error::Config("modes is empty".into()));
        }
        if self.calibration.rounds == 0 && self.calibration.difficulty.is_none() {
            return Err(Error::Config("calibration.rounds must be at least 1".into()));
        }
        match (&self.endpoint, &self.synthetic) {
            (Some(e), None) => e.validate()?,
            (None, Some(p)) => p.validate()?,
            (Some(_), Some(_)) => return Err(Error::Config("set either [endpoint] or [synthetic], not both".into())),
            (None, None) => return Err(Error::Config("one of [endpoint] or [synthetic] is required".into())),
        }
        Ok(())
    }

    /// Reads a TOML or JSON config, chosen by extension. Relative paths are
    /// resolved against the config file's directory.
    pub fn from_path(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config: RunConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text)?
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        };
        let base = path.parent().unwrap_or(Path::new(""));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut config.seeds);
        fix(&mut config.out_dir);
        config.taxonomy.as_mut().map(fix);
        config.conflicts.as_mut().map(fix);
        config.calibration.difficulty.as_mut().map(fix);
        if let Some(imp) = config.importance.as_mut() {
            fix(&mut imp.matrices);
        }
        Ok(config)
    }

    pub fn load_taxonomy(&self) -> Result<Taxonomy> {
        match &self.taxonomy {
            Some(p) => Taxonomy::from_path(p),
            None => Ok(Taxonomy::builtin().clone()),
        }
    }

    pub fn load_conflicts(&self) -> Result<ConflictMatrix> {
        match &self.conflicts {
            Some(p) => ConflictMatrix::from_path(p),
            None => Ok(ConflictMatrix::builtin().clone()),
        }
    }
}

/// A seed paired with one of its sampled combinations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstructionRecord {
    pub seed: SeedInstruction,
    pub combination: ConstraintCombination,
}

impl InstructionRecord {
    pub fn id(&self) -> String {
        format!("{}/{}", self.seed.id, self.combination.id)
    }
}

/// `n_cc` combinations for every seed, drawn in seed order from one stream.
pub fn synthesize_instructions(
    seeds: &[SeedInstruction],
    sampler: &Sampler<'_>,
    n: usize,
    n_cc: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<InstructionRecord>> {
    let mut out = Vec::with_capacity(seeds.len() * n_cc);
    for seed in seeds {
        for combination in sampler.sample_combinations(n, n_cc, rng)? {
            out.push(InstructionRecord {
                seed: seed.clone(),
                combination,
            });
        }
    }
    Ok(out)
}

/// Each instruction once per round, in a uniformly random order. Ids are
/// `seed/combination/cal{round}`.
pub fn calibration_probes(instructions: &[InstructionRecord], rounds: usize, rng: &mut ChaCha8Rng) -> Result<Vec<ProbeInstance>> {
    let mut out = Vec::with_capacity(instructions.len() * rounds);
    for round in 0..rounds {
        for inst in instructions {
            let mut order = inst.combination.kinds();
            order.shuffle(rng);
            let composed = compose(&inst.seed, &inst.combination, &order)?;
            out.push(ProbeInstance::new(
                format!("{}/cal{round}", inst.id()),
                &inst.seed,
                composed,
                None,
                None,
            ));
        }
    }
    Ok(out)
}

/// Kinds used by any instruction, in kind order.
pub fn kinds_in_scope(instructions: &[InstructionRecord]) -> Vec<ConstraintKind> {
    let set: BTreeSet<ConstraintKind> = instructions.iter().flat_map(|i| i.combination.kinds()).collect();
    set.into_iter().collect()
}

/// Difficulty from scored calibration records; errored records are left out.
pub fn difficulty_from_scored(scored: &[ScoredRecord], scope: &[ConstraintKind]) -> Result<DifficultyTable<f64>> {
    let flagged = scored.iter().filter(|s| s.flagged.is_some()).count();
    if flagged > 0 {
        tracing::warn!(flagged, "calibration records with inference errors are excluded");
    }
    let pairs = scored
        .iter()
        .filter(|s| s.flagged.is_none())
        .flat_map(|s| s.order.iter().copied().zip(s.verdicts.iter().copied()));
    DifficultyTable::estimate(pairs, scope)
}

/// One probe per instruction and target, id `seed/combination/t{k}`.
pub fn reorder(
    instructions: &[InstructionRecord],
    table: &DifficultyTable<f64>,
    targets: &[f64],
    search: SearchMode,
) -> Result<Vec<ProbeInstance>> {
    let mut out = Vec::with_capacity(instructions.len() * targets.len());
    for inst in instructions {
        let orders = orders_for_targets(&inst.combination.kinds(), table, targets, search)?;
        for (k, o) in orders.into_iter().enumerate() {
            let composed = compose(&inst.seed, &inst.combination, &o.order)?;
            out.push(ProbeInstance::new(
                format!("{}/t{k}", inst.id()),
                &inst.seed,
                composed,
                Some(o.target_cddi),
                Some(o.realized_cddi),
            ));
        }
    }
    Ok(out)
}

/// Where requests go: a chat-completion endpoint or the synthetic model.
#[derive(Debug, Clone)]
pub enum BackendSpec {
    Endpoint(ModelEndpoint),
    Synthetic(SyntheticProfile),
}

impl BackendSpec {
    pub fn from_config(config: &RunConfig) -> Result<BackendSpec> {
        match (&config.endpoint, &config.synthetic) {
            (Some(e), _) => Ok(BackendSpec::Endpoint(e.clone())),
            (None, Some(p)) => Ok(BackendSpec::Synthetic(p.clone())),
            (None, None) => Err(Error::Config("no backend configured".into())),
        }
    }

    /// A runner for `probes`; the synthetic model indexes their constraint texts.
    pub fn runner(&self, probes: &[ProbeInstance], decode: DecodeSettings) -> Result<Runner<dyn ChatBackend>> {
        let (backend, parallel, retries): (Arc<dyn ChatBackend>, usize, u32) = match self {
            BackendSpec::Endpoint(e) => (Arc::new(HttpBackend::new(e)?), e.max_parallel, e.max_retries),
            BackendSpec::Synthetic(p) => (Arc::new(SyntheticModel::new(p.clone(), probes)?), 1, 0),
        };
        Ok(Runner::new(backend)
            .with_decode(decode)
            .with_max_parallel(parallel)
            .with_retry(RetryPolicy {
                max_retries: retries,
                ..RetryPolicy::default()
            }))
    }
}

pub async fn infer(spec: &BackendSpec, probes: &[ProbeInstance], mode: Mode, decode: DecodeSettings, out: &Path) -> Result<RunSummary> {
    spec.runner(probes, decode)?.run_all(probes, mode, out).await
}

/// Records for `probes` read back from `path`, dropping any for other probes.
pub fn load_records(path: &Path, probes: &[ProbeInstance]) -> Result<Vec<InferenceRecord>> {
    let wanted: BTreeSet<&str> = probes.iter().map(|p| p.probe_id.as_str()).collect();
    let records: Vec<InferenceRecord> = read_jsonl(path)?;
    Ok(records
        .into_iter()
        .filter(|r| wanted.contains(r.probe_id.as_str()))
        .collect())
}

/// Artifacts written by [`write_evaluation`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationOutput {
    pub reports: Vec<EvaluationReport<f64>>,
    pub files: Vec<PathBuf>,
}

/// Writes the report table, per-kind rows, JSON reports and plots into `dir`.
pub fn write_evaluation(
    scored: &[ScoredRecord],
    table: Option<&DifficultyTable<f64>>,
    format: ReportFormat,
    dir: &Path,
) -> Result<EvaluationOutput> {
    let reports = evaluation::aggregate::<f64>(scored)?;
    let groups = evaluation::group_order(table);
    let mut files = Vec::new();
    let mut put = |name: &str, bytes: &[u8]| -> Result<()> {
        let path = dir.join(name);
        write_atomic(&path, bytes)?;
        files.push(path);
        Ok(())
    };
    let report_name = match format {
        ReportFormat::Csv => "report.csv",
        ReportFormat::Table => "report.txt",
    };
    put(report_name, evaluation::emit_report(&reports, &groups, format)?.as_bytes())?;
    put("per_kind.csv", evaluation::per_kind_rows(&reports)?.as_bytes())?;
    put("reports.json", &serde_json::to_vec_pretty(&reports)?)?;

    let mut by_mode: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    for r in &reports {
        if let Some(c) = r.cddi {
            by_mode.entry(r.mode.name()).or_default().push((c, r.acc_cons * 100.0));
        }
    }
    let series: Vec<Series> = by_mode
        .into_iter()
        .map(|(name, points)| Series {
            name: name.to_string(),
            points,
        })
        .collect();
    if !series.is_empty() {
        put(
            "accuracy_vs_cddi.svg",
            line_chart(&series, "Constraint-level accuracy by CDDI", "CDDI", "C_level (%)").as_bytes(),
        )?;
    }

    let mut positions: BTreeMap<&str, Vec<(usize, usize)>> = BTreeMap::new();
    for s in scored {
        let slots = positions.entry(s.mode.name()).or_default();
        if slots.len() < s.verdicts.len() {
            slots.resize(s.verdicts.len(), (0, 0));
        }
        for (j, &v) in s.verdicts.iter().enumerate() {
            slots[j].0 += v as usize;
            slots[j].1 += 1;
        }
    }
    let series: Vec<Series> = positions
        .into_iter()
        .map(|(name, slots)| Series {
            name: name.to_string(),
            points: slots
                .iter()
                .enumerate()
                .map(|(j, &(hits, total))| ((j + 1) as f64, hits as f64 / total as f64 * 100.0))
                .collect(),
        })
        .collect();
    put(
        "accuracy_by_position.svg",
        line_chart(&series, "Accuracy by constraint position", "position", "accuracy (%)").as_bytes(),
    )?;
    Ok(EvaluationOutput { reports, files })
}

/// Scores `records` against `probes` and writes the scored records and the
/// evaluation artifacts for them.
pub fn evaluate(
    records: &[InferenceRecord],
    probes: &[ProbeInstance],
    verifier: &Verifier,
    table: Option<&DifficultyTable<f64>>,
    format: ReportFormat,
    dir: &Path,
) -> Result<EvaluationOutput> {
    let scored = evaluation::score_all(records, probes, verifier)?;
    let mut out = write_evaluation(&scored, table, format, dir)?;
    let path = dir.join("scored.jsonl");
    write_jsonl_atomic(&path, &scored)?;
    out.files.push(path);
    Ok(out)
}

/// Position, group and total importance tables plus a position plot.
pub fn write_importance(
    matrices: &[RawImportanceMatrix<f64>],
    probes: &[ProbeInstance],
    scale: f64,
    floor: Option<f64>,
    dir: &Path,
) -> Result<importance::ProfileSet<f64>> {
    let set = importance::build_profiles(matrices, probes, scale, floor);
    if set.profiles.is_empty() {
        return Err(Error::Data(format!(
            "no usable importance matrices ({} skipped)",
            set.skipped.len()
        )));
    }
    let cddi = |c: Option<f64>| c.map(|c| c.to_string()).unwrap_or_default();
    let mut positions = csv::Writer::from_writer(Vec::new());
    let mut groups = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Data(format!("csv: {e}"));
    positions.write_record(["cddi", "instances", "position", "weight"]).map_err(csv_err)?;
    groups.write_record(["cddi", "instances", "group", "weight"]).map_err(csv_err)?;
    for p in &set.profiles {
        for (j, w) in p.positions.iter().enumerate() {
            positions
                .write_record([cddi(p.cddi), p.instances.to_string(), (j + 1).to_string(), w.to_string()])
                .map_err(csv_err)?;
        }
        for (g, w) in &p.groups {
            groups
                .write_record([cddi(p.cddi), p.instances.to_string(), g.name().to_string(), w.to_string()])
                .map_err(csv_err)?;
        }
    }
    let bytes = |w: csv::Writer<Vec<u8>>| w.into_inner().map_err(|e| Error::Data(format!("csv: {e}")));
    write_atomic(&dir.join("importance_positions.csv"), &bytes(positions)?)?;
    write_atomic(&dir.join("importance_groups.csv"), &bytes(groups)?)?;
    write_atomic(&dir.join("importance.json"), &serde_json::to_vec_pretty(&set)?)?;
    let series: Vec<Series> = set
        .profiles
        .iter()
        .map(|p| Series {
            name: format!("CDDI {}", cddi(p.cddi)),
            points: p.positions.iter().enumerate().map(|(j, &w)| ((j + 1) as f64, w)).collect(),
        })
        .collect();
    write_atomic(
        &dir.join("importance_by_position.svg"),
        line_chart(&series, "Constraint importance by position", "position", "S").as_bytes(),
    )?;
    let labels: Vec<String> = set.profiles.iter().map(|p| cddi(p.cddi)).collect();
    let totals: Vec<f64> = set.profiles.iter().map(|p| p.total).collect();
    write_atomic(
        &dir.join("importance_totals.svg"),
        bar_chart(&labels, &totals, "Total constraint importance by CDDI", "S").as_bytes(),
    )?;
    Ok(set)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineSummary {
    pub instructions: usize,
    pub calibration_probes: usize,
    pub probes: usize,
    pub runs: BTreeMap<String, RunSummary>,
    pub reports: Vec<EvaluationReport<f64>>,
    pub importance_profiles: usize,
}

pub mod artifacts {
    pub const CONFIG: &str = "run_config.json";
    pub const INSTRUCTIONS: &str = "instructions.jsonl";
    pub const CALIBRATION_PROBES: &str = "calibration_probes.jsonl";
    pub const CALIBRATION_RECORDS: &str = "calibration_records.jsonl";
    pub const DIFFICULTY: &str = "difficulty.jsonl";
    pub const PROBES: &str = "probes.jsonl";
    pub const SUMMARY: &str = "summary.json";

    pub fn records(mode: crate::inference::Mode) -> String {
        format!("records_{}.jsonl", mode.name())
    }
}

fn check_config_unchanged(config: &RunConfig, path: &Path) -> Result<()> {
    let current = serde_json::to_value(config)?;
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let previous: serde_json::Value = serde_json::from_str(&text)?;
        if previous != current {
            return Err(Error::Config(format!(
                "{} holds artifacts from a different configuration",
                path.parent().unwrap_or(Path::new(".")).display()
            )));
        }
        return Ok(());
    }
    write_atomic(path, &serde_json::to_vec_pretty(&current)?)
}

/// Runs every phase, reusing artifacts left by an earlier run with the same
/// configuration.
pub async fn run_pipeline(config: &RunConfig) -> Result<PipelineSummary> {
    config.validate()?;
    let dir = &config.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    check_config_unchanged(config, &dir.join(artifacts::CONFIG))?;
    let verifier = Verifier::new(config.verifier.clone());
    let spec = BackendSpec::from_config(config)?;

    let path = dir.join(artifacts::INSTRUCTIONS);
    let instructions: Vec<InstructionRecord> = if path.exists() {
        read_jsonl(&path)?
    } else {
        let taxonomy = config.load_taxonomy()?;
        let conflicts = config.load_conflicts()?;
        let seeds = load_seeds(&config.seeds)?;
        if seeds.is_empty() {
            return Err(Error::Data(format!("{} has no seeds", config.seeds.display())));
        }
        let sampler = Sampler::new(&taxonomy, &conflicts);
        let mut rng = phase_rng(config.seed, STREAM_SYNTHESIZE);
        let out = synthesize_instructions(&seeds, &sampler, config.n, config.n_cc, &mut rng)?;
        write_jsonl_atomic(&path, &out)?;
        out
    };
    tracing::info!(count = instructions.len(), "instructions ready");

    let mut calibration_count = 0;
    let path = dir.join(artifacts::DIFFICULTY);
    let table = if path.exists() {
        DifficultyTable::read(&path)?
    } else if let Some(given) = &config.calibration.difficulty {
        let table = DifficultyTable::read(given)?;
        table.write(&path)?;
        table
    } else {
        let probes_path = dir.join(artifacts::CALIBRATION_PROBES);
        let probes: Vec<ProbeInstance> = if probes_path.exists() {
            read_jsonl(&probes_path)?
        } else {
            let mut rng = phase_rng(config.seed, STREAM_CALIBRATE);
            let probes = calibration_probes(&instructions, config.calibration.rounds, &mut rng)?;
            write_jsonl_atomic(&probes_path, &probes)?;
            probes
        };
        calibration_count = probes.len();
        let records_path = dir.join(artifacts::CALIBRATION_RECORDS);
        let summary = infer(&spec, &probes, config.calibration.mode, config.decode, &records_path).await?;
        tracing::info!(?summary, "calibration inference done");
        let records = load_records(&records_path, &probes)?;
        let scored = evaluation::score_all(&records, &probes, &verifier)?;
        let table = difficulty_from_scored(&scored, &kinds_in_scope(&instructions))?;
        table.write(&path)?;
        table
    };

    let path = dir.join(artifacts::PROBES);
    let probes: Vec<ProbeInstance> = if path.exists() {
        read_jsonl(&path)?
    } else {
        let probes = reorder(&instructions, &table, &config.targets, config.search)?;
        write_jsonl_atomic(&path, &probes)?;
        probes
    };
    tracing::info!(count = probes.len(), "probes ready");

    let mut runs = BTreeMap::new();
    let mut records = Vec::new();
    for &mode in &config.modes {
        let path = dir.join(artifacts::records(mode));
        let summary = infer(&spec, &probes, mode, config.decode, &path).await?;
        tracing::info!(mode = mode.name(), ?summary, "inference done");
        runs.insert(mode.name().to_string(), summary);
        records.extend(load_records(&path, &probes)?);
    }
    let evaluated = evaluate(&records, &probes, &verifier, Some(&table), config.report_format, dir)?;

    let importance_profiles = match &config.importance {
        Some(imp) => {
            let matrices: Vec<RawImportanceMatrix<f64>> = read_jsonl(&imp.matrices)?;
            write_importance(&matrices, &probes, imp.scale, imp.floor, dir)?.profiles.len()
        }
        None => 0,
    };

    let summary = PipelineSummary {
        instructions: instructions.len(),
        calibration_probes: calibration_count,
        probes: probes.len(),
        runs,
        reports: evaluated.reports,
        importance_profiles,
    };
    write_atomic(&dir.join(artifacts::SUMMARY), &serde_json::to_vec_pretty(&summary)?)?;
    Ok(summary)
}
