mod common;

use std::collections::HashSet;

use num_rational::Ratio;
use probe_core::inference::{InferenceRecord, Mode, SyntheticProfile};
use probe_core::io::read_jsonl;
use probe_core::ordering::{achievable, SearchMode};
use probe_core::pipeline::{self, artifacts, run_pipeline, RunConfig, DEFAULT_TARGETS};
use probe_core::synthesis::Sampler;
use probe_core::{ConflictMatrix, ConstraintKind, DifficultyTable, ProbeInstance, Taxonomy};
use rand::Rng;

fn random_table(seed: u64) -> DifficultyTable {
    let mut rng = pipeline::phase_rng(seed, 99);
    DifficultyTable::from_accuracies(ConstraintKind::ALL.iter().map(|&k| (k, 10, rng.random::<f64>())).collect()).unwrap()
}

fn corpus(n_seed: usize, n: usize, n_cc: usize, targets: &[f64]) -> Vec<ProbeInstance> {
    let seeds = common::seeds(n_seed);
    let sampler = Sampler::new(Taxonomy::builtin(), ConflictMatrix::builtin());
    let mut rng = pipeline::phase_rng(3, 1);
    let instructions = pipeline::synthesize_instructions(&seeds, &sampler, n, n_cc, &mut rng).unwrap();
    pipeline::reorder(&instructions, &random_table(1), targets, SearchMode::Constructive).unwrap()
}

#[test]
fn probe_count_is_seeds_times_combinations_times_targets() {
    let full = corpus(200, 7, 10, &DEFAULT_TARGETS);
    assert_eq!(full.len(), 24_000);
    let ids: HashSet<&str> = full.iter().map(|p| p.probe_id.as_str()).collect();
    assert_eq!(ids.len(), 24_000);
    let desk = corpus(5, 7, 2, &[1.0, -0.05, -1.0]);
    assert_eq!(desk.len(), 30);
}

#[tokio::test]
async fn nine_constraints_run_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = common::synthetic_config(dir.path(), 6, 9, 1, SyntheticProfile::spread(0.2, 0.9, -0.1, -0.8, 2));
    config.modes = vec![Mode::SingleRound, Mode::MultiRound];
    let summary = run_pipeline(&config).await.unwrap();
    assert_eq!(summary.probes, 72);
    let allowed: Vec<f64> = achievable(9).into_iter().map(|r: Ratio<i64>| *r.numer() as f64 / *r.denom() as f64).collect();
    assert_eq!(allowed.len(), 37, "N_pair = 36");
    let probes: Vec<ProbeInstance> = read_jsonl(&common::out_file(&config, artifacts::PROBES)).unwrap();
    for p in &probes {
        let c = p.realized_cddi.unwrap();
        assert!(allowed.iter().any(|a| (a - c).abs() < 1e-12), "{c}");
        assert_eq!(p.order.len(), 9);
    }
    let multi: Vec<InferenceRecord> = read_jsonl(&common::out_file(&config, &artifacts::records(Mode::MultiRound))).unwrap();
    assert!(multi.iter().all(|r| r.user_turns() == 10 && r.error.is_none()));
    assert_eq!(summary.reports.len(), 24);
    for name in ["report.csv", "per_kind.csv", "reports.json", "scored.jsonl", "accuracy_vs_cddi.svg", "summary.json"] {
        assert!(common::out_file(&config, name).exists(), "{name}");
    }
}

#[tokio::test]
async fn same_config_and_seed_give_byte_identical_probes() {
    let profile = SyntheticProfile::spread(0.2, 0.9, -0.1, -0.8, 4);
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ca = common::synthetic_config(a.path(), 8, 5, 2, profile.clone());
    let cb = common::synthetic_config(b.path(), 8, 5, 2, profile);
    run_pipeline(&ca).await.unwrap();
    run_pipeline(&cb).await.unwrap();
    for name in [artifacts::INSTRUCTIONS, artifacts::CALIBRATION_PROBES, artifacts::DIFFICULTY, artifacts::PROBES] {
        let x = std::fs::read(common::out_file(&ca, name)).unwrap();
        let y = std::fs::read(common::out_file(&cb, name)).unwrap();
        assert!(x == y, "{name} differs");
    }
}

#[tokio::test]
async fn rerun_after_a_kill_completes_without_duplicates() {
    let dir = tempfile::tempdir().unwrap();
    let config = common::synthetic_config(dir.path(), 5, 4, 2, SyntheticProfile::uniform(0.6, -0.2, 1));
    let first = run_pipeline(&config).await.unwrap();
    let records_path = common::out_file(&config, &artifacts::records(Mode::SingleRound));
    let text = std::fs::read_to_string(&records_path).unwrap();
    let keep: Vec<&str> = text.lines().take(17).collect();
    std::fs::write(&records_path, format!("{}\n{}", keep.join("\n"), &text.lines().nth(17).unwrap()[..25])).unwrap();
    std::fs::remove_file(common::out_file(&config, artifacts::SUMMARY)).unwrap();

    let second = run_pipeline(&config).await.unwrap();
    let run = &second.runs[Mode::SingleRound.name()];
    assert_eq!((run.skipped, run.launched), (17, first.probes - 17));
    let records: Vec<InferenceRecord> = read_jsonl(&records_path).unwrap();
    let ids: HashSet<&str> = records.iter().map(|r| r.probe_id.as_str()).collect();
    assert_eq!(records.len(), first.probes);
    assert_eq!(ids.len(), first.probes);
    assert_eq!(second.reports, first.reports, "deterministic synthetic run gives the same report");
}

#[tokio::test]
async fn a_supplied_difficulty_table_skips_calibration() {
    let dir = tempfile::tempdir().unwrap();
    let table_path = dir.path().join("given.jsonl");
    random_table(8).write(&table_path).unwrap();
    let mut config = common::synthetic_config(dir.path(), 4, 3, 1, SyntheticProfile::uniform(0.5, 0.0, 1));
    config.calibration.difficulty = Some(table_path.clone());
    let summary = run_pipeline(&config).await.unwrap();
    assert_eq!(summary.calibration_probes, 0);
    assert!(!common::out_file(&config, artifacts::CALIBRATION_RECORDS).exists());
    assert_eq!(
        std::fs::read(common::out_file(&config, artifacts::DIFFICULTY)).unwrap(),
        std::fs::read(&table_path).unwrap()
    );
}

#[test]
fn config_file_paths_resolve_against_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(
        &path,
        "seed = 1\nn = 7\nn_cc = 10\nseeds = \"data/seeds.jsonl\"\nout_dir = \"/tmp/abs\"\nsearch = \"exhaustive\"\nreport_format = \"table\"\n\n[endpoint]\nbase_url = \"http://localhost:8000/v1\"\nmodel_id = \"m\"\ntoken_env = \"TOKEN\"\n",
    )
    .unwrap();
    let config = RunConfig::from_path(&path).unwrap();
    assert_eq!(config.seeds, dir.path().join("data/seeds.jsonl"));
    assert_eq!(config.out_dir, std::path::PathBuf::from("/tmp/abs"));
    assert_eq!(config.search, SearchMode::Exhaustive);
    config.validate().unwrap();
    std::fs::write(&path, "seed = 1\nn = 7\nn_cc = 1\nseeds = \"s\"\nout_dir = \"o\"\nbogus = 3\n").unwrap();
    assert!(RunConfig::from_path(&path).is_err(), "unknown keys are rejected");
}
