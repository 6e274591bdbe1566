#![allow(dead_code)]

use std::path::{Path, PathBuf};

use probe_core::inference::SyntheticProfile;
use probe_core::pipeline::RunConfig;
use probe_core::synthesis::{SeedInstruction, SeedSource};

const TASKS: [&str; 6] = [
    "Write a blog post about {}.",
    "Explain {} to a new student.",
    "Draft a short speech on {}.",
    "Describe the history of {}.",
    "Give advice to someone interested in {}.",
    "Write a product review related to {}.",
];

const TOPICS: [&str; 40] = [
    "urban gardening", "deep sea fishing", "the printing press", "solar power", "chess openings",
    "bread baking", "mountain hiking", "public libraries", "jazz music", "bird migration",
    "electric cars", "ancient Rome", "coffee roasting", "remote work", "volcanoes",
    "origami", "marathon training", "space telescopes", "honey bees", "street photography",
    "board games", "rainforests", "the stock market", "knitting", "wind turbines",
    "classical ballet", "tea ceremonies", "coral reefs", "early aviation", "podcasting",
    "vegetable soup", "city planning", "sailing", "glass blowing", "desert ecology",
    "video game design", "lighthouses", "beekeeping", "the violin", "recycling",
];

pub fn seeds(count: usize) -> Vec<SeedInstruction> {
    assert!(count <= TASKS.len() * TOPICS.len());
    (0..count)
        .map(|i| SeedInstruction {
            id: format!("s{i:03}"),
            text: TASKS[i % TASKS.len()].replace("{}", TOPICS[i / TASKS.len()]),
            source: SeedSource::Custom,
        })
        .collect()
}

pub fn write_seeds(path: &Path, count: usize) {
    let lines: Vec<String> = seeds(count).iter().map(|s| serde_json::to_string(s).unwrap()).collect();
    std::fs::write(path, lines.join("\n") + "\n").unwrap();
}

/// Synthetic-backend config over `n_seed` generated seeds written into `dir`.
pub fn synthetic_config(dir: &Path, n_seed: usize, n: usize, n_cc: usize, profile: SyntheticProfile) -> RunConfig {
    let seeds = dir.join("seeds.jsonl");
    write_seeds(&seeds, n_seed);
    let text = format!(
        "seed = 11\nn = {n}\nn_cc = {n_cc}\nseeds = {seeds:?}\nout_dir = {out:?}\n",
        out = dir.join("run")
    );
    let mut config: RunConfig = toml::from_str(&text).unwrap();
    config.synthetic = Some(profile);
    config
}

pub fn out_file(config: &RunConfig, name: &str) -> PathBuf {
    config.out_dir.join(name)
}

/// `count` probes of `n` constraints each, one combination per generated seed,
/// in sampled order.
pub fn probes(n: usize, count: usize, seed: u64) -> Vec<probe_core::ProbeInstance> {
    use rand::SeedableRng;
    let sampler = probe_core::synthesis::Sampler::new(probe_core::Taxonomy::builtin(), probe_core::ConflictMatrix::builtin());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut seeds = self::seeds(240);
    seeds.truncate(count.min(240));
    (0..count)
        .map(|i| {
            let s = &seeds[i % seeds.len()];
            let mut combo = sampler.sample_combinations(n, 1, &mut rng).unwrap().remove(0);
            combo.id = format!("c{}", i / seeds.len());
            let composed = probe_core::synthesis::compose(s, &combo, &combo.kinds()).unwrap();
            probe_core::ProbeInstance::new(format!("p{i:05}"), s, composed, None, None)
        })
        .collect()
}
