//! Deterministic offline chat backend with position-dependent satisfaction.

mod compose;
mod vocab;

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use async_trait::async_trait;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use compose::compose_response;

use super::{BackendError, ChatBackend, ChatRequest, Role};
use crate::constraints::{ConstraintInstance, ConstraintKind};
use crate::error::{Error, Result};
use crate::synthesis::ProbeInstance;

/// Per-kind satisfaction probabilities with a linear position effect.
///
/// At 0-based position `i` of `n` (`x = i/(n-1)`, or 0.5 when `n = 1`) a
/// constraint of base probability `p` is satisfied with probability
/// `clamp(p + (beta + gamma*(1-p)) * (x - 0.5), 0, 1)`. Negative slopes favour
/// early positions; `gamma` makes hard kinds more position-sensitive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticProfile {
    pub seed: u64,
    #[serde(default)]
    pub beta: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default = "half")]
    pub default_p: f64,
    #[serde(default)]
    pub p: BTreeMap<ConstraintKind, f64>,
}

fn half() -> f64 {
    0.5
}

impl SyntheticProfile {
    pub fn uniform(p: f64, beta: f64, seed: u64) -> SyntheticProfile {
        SyntheticProfile {
            seed,
            beta,
            gamma: 0.0,
            default_p: p,
            p: BTreeMap::new(),
        }
    }

    /// Base probabilities evenly spaced over `[lo, hi]`, assigned to kinds in
    /// a seed-shuffled order.
    pub fn spread(lo: f64, hi: f64, beta: f64, gamma: f64, seed: u64) -> SyntheticProfile {
        let mut kinds = ConstraintKind::ALL.to_vec();
        kinds.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let last = (kinds.len() - 1) as f64;
        let p = kinds
            .into_iter()
            .enumerate()
            .map(|(i, k)| (k, lo + (hi - lo) * i as f64 / last))
            .collect();
        SyntheticProfile {
            seed,
            beta,
            gamma,
            default_p: 0.5,
            p,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let probs = self.p.values().chain(std::iter::once(&self.default_p));
        for &p in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("probability {p} outside [0, 1]")));
            }
        }
        if !self.beta.is_finite() || !self.gamma.is_finite() {
            return Err(Error::Config("beta and gamma must be finite".into()));
        }
        Ok(())
    }

    /// Reads a TOML or JSON profile, chosen by extension.
    pub fn from_path(path: &Path) -> Result<SyntheticProfile> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let profile: SyntheticProfile = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text)?
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn base(&self, kind: ConstraintKind) -> f64 {
        self.p.get(&kind).copied().unwrap_or(self.default_p)
    }

    pub fn probability(&self, kind: ConstraintKind, position: usize, n: usize) -> f64 {
        let x = if n <= 1 {
            0.5
        } else {
            position as f64 / (n - 1) as f64
        };
        let p = self.base(kind);
        (p + (self.beta + self.gamma * (1.0 - p)) * (x - 0.5)).clamp(0.0, 1.0)
    }

    /// Expected constraint-level accuracy of one ordered instruction.
    pub fn expected_accuracy(&self, order: &[ConstraintKind]) -> f64 {
        if order.is_empty() {
            return 0.0;
        }
        let n = order.len();
        order
            .iter()
            .enumerate()
            .map(|(i, &k)| self.probability(k, i, n))
            .sum::<f64>()
            / n as f64
    }

    /// Latent uniform draw shared by every ordering of one instruction.
    pub fn draw(&self, instruction_id: &str, kind: ConstraintKind) -> f64 {
        let h = stable_hash(&[&self.seed.to_le_bytes(), instruction_id.as_bytes(), kind.name().as_bytes()]);
        (h >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Which constraints of an ordered list the model satisfies.
    pub fn outcomes(&self, instruction_id: &str, order: &[ConstraintKind]) -> Vec<bool> {
        let n = order.len();
        order
            .iter()
            .enumerate()
            .map(|(i, &k)| self.draw(instruction_id, k) < self.probability(k, i, n))
            .collect()
    }
}

/// FNV-1a over length-prefixed parts, finished with a splitmix64 mix.
fn stable_hash(parts: &[&[u8]]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut feed = |b: u8| {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    };
    for part in parts {
        for b in (part.len() as u64).to_le_bytes() {
            feed(b);
        }
        for &b in *part {
            feed(b);
        }
    }
    let mut z = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Recognizes constraint lines by their rendered text and answers with a
/// composed response.
pub struct SyntheticModel {
    profile: SyntheticProfile,
    catalog: HashMap<String, ConstraintInstance>,
    model_id: String,
}

impl SyntheticModel {
    pub fn new(profile: SyntheticProfile, probes: &[ProbeInstance]) -> Result<SyntheticModel> {
        profile.validate()?;
        let mut catalog: HashMap<String, ConstraintInstance> = HashMap::new();
        for c in probes.iter().flat_map(|p| &p.constraints) {
            match catalog.get(&c.rendered_text) {
                Some(existing) if existing.kind != c.kind || existing.params != c.params => {
                    return Err(Error::Data(format!(
                        "two different constraints render as `{}`",
                        c.rendered_text
                    )))
                }
                Some(_) => {}
                None => {
                    catalog.insert(c.rendered_text.clone(), c.clone());
                }
            }
        }
        Ok(SyntheticModel {
            model_id: format!("synthetic-{}", profile.seed),
            profile,
            catalog,
        })
    }

    pub fn profile(&self) -> &SyntheticProfile {
        &self.profile
    }

    /// Constraints in the order their lines appear across the user turns.
    fn constraints_in(&self, request: &ChatRequest) -> Vec<&ConstraintInstance> {
        let mut out: Vec<&ConstraintInstance> = Vec::new();
        let user_lines = request
            .messages
            .iter()
            .filter(|m| m.role == Role::User)
            .flat_map(|m| m.content.lines());
        for line in user_lines {
            if let Some(c) = self.catalog.get(line.trim()) {
                if !out.iter().any(|o| o.kind == c.kind) {
                    out.push(c);
                }
            }
        }
        out
    }

    pub fn respond(&self, request: &ChatRequest) -> Result<String> {
        let constraints: Vec<ConstraintInstance> = self.constraints_in(request).into_iter().cloned().collect();
        let order: Vec<ConstraintKind> = constraints.iter().map(|c| c.kind).collect();
        let wanted = self.profile.outcomes(&request.instruction_id, &order);
        let seed = stable_hash(&[
            &self.profile.seed.to_le_bytes(),
            request.probe_id.as_bytes(),
            &(request.turn as u64).to_le_bytes(),
        ]);
        compose_response(&constraints, &wanted, seed)
    }
}

#[async_trait]
impl ChatBackend for SyntheticModel {
    fn model_id(&self) -> &str {
        &self.model_id
    }

    async fn complete(&self, request: &ChatRequest) -> std::result::Result<String, BackendError> {
        self.respond(request).map_err(|e| BackendError::Invalid(e.to_string()))
    }
}
