use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{ConstraintInstance, ConstraintKind, ParamValue};
use crate::error::{Error, Result};

const CONFLICTS_JSON: &str = include_str!("../../data/conflicts.json");

/// Instance-level condition under which a rule applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConflictCondition {
    /// Applies when a `ResponseLanguage` member asks for anything but English.
    NonEnglish,
}

/// Why a pair is excluded. Only `Unsatisfiable` pairs are claimed to have no
/// jointly satisfying response under the shipped checkers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConflictRationale {
    Unsatisfiable,
    /// Satisfiable only in a degenerate way (e.g. every word becomes a capital word).
    Degenerate,
    /// Satisfiable, but the two formats fight over the same structure.
    Format,
    Semantic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictRule {
    pub a: ConstraintKind,
    pub b: ConstraintKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub when: Option<ConflictCondition>,
    pub rationale: ConflictRationale,
}

impl ConflictRule {
    fn pairs(&self, a: ConstraintKind, b: ConstraintKind) -> bool {
        (self.a == a && self.b == b) || (self.a == b && self.b == a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictMatrix {
    version: u32,
    /// Every kind conflicts with itself, so no combination repeats a kind.
    pub self_conflict: bool,
    pub rules: Vec<ConflictRule>,
}

impl ConflictMatrix {
    pub fn builtin() -> &'static ConflictMatrix {
        static M: OnceLock<ConflictMatrix> = OnceLock::new();
        M.get_or_init(|| ConflictMatrix::from_json(CONFLICTS_JSON).expect("packaged conflicts are valid"))
    }

    pub fn from_json(json: &str) -> Result<ConflictMatrix> {
        let m: ConflictMatrix = serde_json::from_str(json)
            .map_err(|e| Error::Config(format!("conflict file: {e}")))?;
        if m.version != 1 {
            return Err(Error::Config(format!("unsupported conflict file version {}", m.version)));
        }
        for r in &m.rules {
            if r.when == Some(ConflictCondition::NonEnglish)
                && r.a != ConstraintKind::ResponseLanguage
                && r.b != ConstraintKind::ResponseLanguage
            {
                return Err(Error::Config(format!(
                    "rule {}/{}: non_english condition needs a ResponseLanguage member",
                    r.a, r.b
                )));
            }
        }
        Ok(m)
    }

    pub fn from_path(path: &Path) -> Result<ConflictMatrix> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ConflictMatrix::from_json(&text)
    }

    /// Kind-level relation: unconditional rules plus the self-conflict policy.
    pub fn conflicts(&self, a: ConstraintKind, b: ConstraintKind) -> bool {
        (a == b && self.self_conflict)
            || self.rules.iter().any(|r| r.when.is_none() && r.pairs(a, b))
    }

    /// Instance-level relation: additionally evaluates conditional rules.
    pub fn instances_conflict(&self, a: &ConstraintInstance, b: &ConstraintInstance) -> bool {
        if self.conflicts(a.kind, b.kind) {
            return true;
        }
        self.rules.iter().any(|r| {
            r.pairs(a.kind, b.kind)
                && match r.when {
                    None => true,
                    Some(ConflictCondition::NonEnglish) => [a, b].iter().any(|c| {
                        c.kind == ConstraintKind::ResponseLanguage
                            && c.params.get("language").and_then(ParamValue::as_text) != Some("en")
                    }),
                }
        })
    }

    pub fn rationale(&self, a: ConstraintKind, b: ConstraintKind) -> Option<ConflictRationale> {
        self.rules.iter().find(|r| r.pairs(a, b)).map(|r| r.rationale)
    }
}
