//! Seed ingestion, conflict-free combination sampling and instruction
//! composition (`I_c = I_s ⊕ C_1 ⊕ ... ⊕ C_n`).

use std::collections::{BTreeSet, HashSet};
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::constraints::{ConflictMatrix, ConstraintInstance, ConstraintKind, Taxonomy};
use crate::error::{Error, Result};

/// Attempts per combination before sampling gives up.
pub const RETRY_CAP: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedSource {
    NaturalInstructions,
    SelfInstruct,
    OpenAssistant,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedInstruction {
    pub id: String,
    pub text: String,
    pub source: SeedSource,
}

/// Reads line-delimited seed records `{id, text, source}`. Blank lines are
/// ignored; ids must be unique.
pub fn load_seeds(path: &Path) -> Result<Vec<SeedInstruction>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut seeds = Vec::new();
    let mut ids = HashSet::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            message,
        };
        let seed: SeedInstruction =
            serde_json::from_str(&line).map_err(|e| parse_err(e.to_string()))?;
        if seed.text.trim().is_empty() {
            return Err(parse_err("seed text is empty".into()));
        }
        if seed.id.trim().is_empty() {
            return Err(parse_err("seed id is empty".into()));
        }
        if !ids.insert(seed.id.clone()) {
            return Err(Error::Data(format!(
                "{}:{}: duplicate seed id `{}`",
                path.display(),
                idx + 1,
                seed.id
            )));
        }
        seeds.push(seed);
    }
    Ok(seeds)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintCombination {
    pub id: String,
    pub members: Vec<ConstraintInstance>,
}

impl ConstraintCombination {
    pub fn kinds(&self) -> Vec<ConstraintKind> {
        self.members.iter().map(|m| m.kind).collect()
    }

    pub fn member(&self, kind: ConstraintKind) -> Option<&ConstraintInstance> {
        self.members.iter().find(|m| m.kind == kind)
    }
}

/// Draws combinations of `n` pairwise compatible constraints.
#[derive(Debug, Clone, Copy)]
pub struct Sampler<'a> {
    pub taxonomy: &'a Taxonomy,
    pub conflicts: &'a ConflictMatrix,
}

impl<'a> Sampler<'a> {
    pub fn new(taxonomy: &'a Taxonomy, conflicts: &'a ConflictMatrix) -> Self {
        Sampler {
            taxonomy,
            conflicts,
        }
    }

    /// Returns `n_cc` combinations with ids `c0..`, distinct as kind-sets.
    /// Kinds are drawn uniformly and the whole draw is rejected on any
    /// conflict; keyword parameters are disjoint within a combination.
    pub fn sample_combinations<R: Rng + ?Sized>(
        &self,
        n: usize,
        n_cc: usize,
        rng: &mut R,
    ) -> Result<Vec<ConstraintCombination>> {
        if n == 0 || n > ConstraintKind::ALL.len() {
            return Err(Error::Argument(format!(
                "constraint count must be in 1..={}, got {n}",
                ConstraintKind::ALL.len()
            )));
        }
        if n_cc == 0 {
            return Err(Error::Argument("n_cc must be at least 1".into()));
        }
        let mut out = Vec::with_capacity(n_cc);
        let mut seen: HashSet<BTreeSet<ConstraintKind>> = HashSet::new();
        for idx in 0..n_cc {
            let members = self.sample_one(n, rng, &mut seen)?;
            out.push(ConstraintCombination {
                id: format!("c{idx}"),
                members,
            });
        }
        Ok(out)
    }

    fn sample_one<R: Rng + ?Sized>(
        &self,
        n: usize,
        rng: &mut R,
        seen: &mut HashSet<BTreeSet<ConstraintKind>>,
    ) -> Result<Vec<ConstraintInstance>> {
        let mut last: Vec<ConstraintKind> = Vec::new();
        let mut reason = String::new();
        for _ in 0..RETRY_CAP {
            let kinds: Vec<ConstraintKind> =
                ConstraintKind::ALL.choose_multiple(rng, n).copied().collect();
            last = kinds.clone();
            if let Some((a, b)) = first_conflict(&kinds, self.conflicts) {
                reason = format!("{a} conflicts with {b}");
                continue;
            }
            let set: BTreeSet<ConstraintKind> = kinds.iter().copied().collect();
            if seen.contains(&set) {
                reason = "kind-set already drawn".into();
                continue;
            }
            let mut taken = BTreeSet::new();
            let mut members = Vec::with_capacity(n);
            for &kind in &kinds {
                let m = self.taxonomy.instantiate_avoiding(kind, rng, &taken)?;
                taken.extend(m.lexical_words().into_iter().map(str::to_string));
                members.push(m);
            }
            let clash = members.iter().enumerate().find_map(|(i, a)| {
                members[i + 1..]
                    .iter()
                    .find(|b| self.conflicts.instances_conflict(a, b))
                    .map(|b| (a.kind, b.kind))
            });
            if let Some((a, b)) = clash {
                reason = format!("{a} conflicts with {b} for the drawn parameters");
                continue;
            }
            seen.insert(set);
            return Ok(members);
        }
        Err(Error::Sampling {
            attempts: RETRY_CAP,
            reason,
            partial: last.iter().map(|k| k.name().to_string()).collect(),
        })
    }
}

fn first_conflict(
    kinds: &[ConstraintKind],
    conflicts: &ConflictMatrix,
) -> Option<(ConstraintKind, ConstraintKind)> {
    kinds.iter().enumerate().find_map(|(i, &a)| {
        kinds[i + 1..]
            .iter()
            .find(|&&b| conflicts.conflicts(a, b))
            .map(|&b| (a, b))
    })
}

/// Half-open span in Unicode scalar values (code points).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharSpan {
    pub char_start: usize,
    pub char_end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComposedInstruction {
    pub seed_id: String,
    pub combination_id: String,
    pub order: Vec<ConstraintKind>,
    /// Members of the combination, in `order`.
    pub constraints: Vec<ConstraintInstance>,
    pub text: String,
    /// Location of each rendered constraint inside `text`, aligned with `order`.
    pub constraint_spans: Vec<CharSpan>,
}

/// Joins the seed text and the rendered constraints in `order` with single
/// newlines.
pub fn compose(
    seed: &SeedInstruction,
    combination: &ConstraintCombination,
    order: &[ConstraintKind],
) -> Result<ComposedInstruction> {
    let kinds: BTreeSet<ConstraintKind> = combination.kinds().into_iter().collect();
    let ordered: BTreeSet<ConstraintKind> = order.iter().copied().collect();
    if kinds.len() != combination.members.len() {
        return Err(Error::Argument(format!(
            "combination {} repeats a constraint kind",
            combination.id
        )));
    }
    if order.len() != combination.members.len() || ordered != kinds {
        return Err(Error::Argument(format!(
            "order {:?} is not a permutation of combination {}",
            order.iter().map(|k| k.name()).collect::<Vec<_>>(),
            combination.id
        )));
    }
    let mut text = seed.text.clone();
    let mut cursor = text.chars().count();
    let mut constraints = Vec::with_capacity(order.len());
    let mut spans = Vec::with_capacity(order.len());
    for &kind in order {
        let member = combination.member(kind).expect("checked above").clone();
        text.push('\n');
        cursor += 1;
        let len = member.rendered_text.chars().count();
        text.push_str(&member.rendered_text);
        spans.push(CharSpan {
            char_start: cursor,
            char_end: cursor + len,
        });
        cursor += len;
        constraints.push(member);
    }
    Ok(ComposedInstruction {
        seed_id: seed.id.clone(),
        combination_id: combination.id.clone(),
        order: order.to_vec(),
        constraints,
        text,
        constraint_spans: spans,
    })
}

/// A composed instruction with its ordering metadata; one line of a probes file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeInstance {
    pub probe_id: String,
    pub seed_id: String,
    /// Identifies the instruction (seed + combination) shared by all its orderings.
    pub combination_id: String,
    pub seed_text: String,
    pub order: Vec<ConstraintKind>,
    pub constraints: Vec<ConstraintInstance>,
    pub target_cddi: Option<f64>,
    pub realized_cddi: Option<f64>,
    pub text: String,
    pub constraint_spans: Vec<CharSpan>,
}

impl ProbeInstance {
    pub fn new(
        probe_id: String,
        seed: &SeedInstruction,
        composed: ComposedInstruction,
        target_cddi: Option<f64>,
        realized_cddi: Option<f64>,
    ) -> ProbeInstance {
        ProbeInstance {
            probe_id,
            seed_id: composed.seed_id,
            combination_id: composed.combination_id,
            seed_text: seed.text.clone(),
            order: composed.order,
            constraints: composed.constraints,
            target_cddi,
            realized_cddi,
            text: composed.text,
            constraint_spans: composed.constraint_spans,
        }
    }

    pub fn seed(&self) -> SeedInstruction {
        SeedInstruction {
            id: self.seed_id.clone(),
            text: self.seed_text.clone(),
            source: SeedSource::Custom,
        }
    }

    pub fn combination(&self) -> ConstraintCombination {
        ConstraintCombination {
            id: self.combination_id.clone(),
            members: self.constraints.clone(),
        }
    }
}
