//! Normalization and aggregation of per-token importance matrices.
//!
//! Raw matrices arrive as JSON lines with instruction tokens (and their
//! character offsets) as rows and response tokens as columns.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::constraints::{ConstraintGroup, ConstraintKind};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::synthesis::{CharSpan, ProbeInstance};

pub const DEFAULT_SCALE: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstructionToken {
    pub text: String,
    pub char_start: usize,
    pub char_end: usize,
}

/// Half-open token range `[token_start, token_end)` of one constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSpan {
    pub kind: ConstraintKind,
    pub token_start: usize,
    pub token_end: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RawImportanceMatrix<T> {
    pub probe_id: String,
    pub instruction_tokens: Vec<InstructionToken>,
    pub constraint_spans: Vec<TokenSpan>,
    pub response_token_count: usize,
    /// Row-major, one row per instruction token.
    pub matrix: Vec<T>,
}

impl<T: Scalar> RawImportanceMatrix<T> {
    pub fn rows(&self) -> usize {
        self.instruction_tokens.len()
    }

    pub fn cols(&self) -> usize {
        self.response_token_count
    }

    pub fn get(&self, tx: usize, ty: usize) -> T {
        self.matrix[tx * self.cols() + ty]
    }

    pub fn validate(&self) -> Result<()> {
        let id = &self.probe_id;
        if self.rows() == 0 || self.cols() == 0 {
            return Err(Error::Data(format!("{id}: empty importance matrix")));
        }
        if self.matrix.len() != self.rows() * self.cols() {
            return Err(Error::Data(format!(
                "{id}: {} values for a {}x{} matrix",
                self.matrix.len(),
                self.rows(),
                self.cols()
            )));
        }
        if self.matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data(format!("{id}: non-finite importance value")));
        }
        check_spans(&self.constraint_spans, self.rows()).map_err(|e| Error::Data(format!("{id}: {e}")))
    }
}

fn check_spans(spans: &[TokenSpan], rows: usize) -> std::result::Result<(), String> {
    let mut sorted: Vec<&TokenSpan> = spans.iter().collect();
    sorted.sort_by_key(|s| s.token_start);
    for s in &sorted {
        if s.token_start >= s.token_end || s.token_end > rows {
            return Err(format!(
                "span {}..{} of {} outside {rows} tokens",
                s.token_start, s.token_end, s.kind
            ));
        }
    }
    for pair in sorted.windows(2) {
        if pair[1].token_start < pair[0].token_end {
            return Err(format!("spans of {} and {} overlap", pair[0].kind, pair[1].kind));
        }
    }
    Ok(())
}

/// Column-normalized importances; skipped (all-zero) columns are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct StandardizedMatrix<T> {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<T>,
    pub skipped_columns: Vec<usize>,
}

impl<T: Scalar> StandardizedMatrix<T> {
    pub fn get(&self, tx: usize, ty: usize) -> T {
        self.values[tx * self.cols + ty]
    }
}

/// `S[tx, ty] = L * |I[tx, ty]| / max_i |I[i, ty]|` per response token.
///
/// Signs are dropped before scaling. Values below `floor` (after scaling)
/// become zero when a floor is given.
pub fn normalize<T: Scalar>(raw: &RawImportanceMatrix<T>, scale: T, floor: Option<T>) -> Result<StandardizedMatrix<T>> {
    raw.validate()?;
    if !(scale.is_finite() && scale > T::zero()) {
        return Err(Error::Argument(format!("scale must be positive, got {scale}")));
    }
    let (rows, cols) = (raw.rows(), raw.cols());
    let mut values = vec![T::zero(); rows * cols];
    let mut skipped_columns = Vec::new();
    for ty in 0..cols {
        let max = (0..rows).map(|tx| raw.get(tx, ty).abs()).fold(T::zero(), T::max);
        if max == T::zero() {
            skipped_columns.push(ty);
            continue;
        }
        for tx in 0..rows {
            let mut s = scale * raw.get(tx, ty).abs() / max;
            if floor.is_some_and(|f| s < f) {
                s = T::zero();
            }
            values[tx * cols + ty] = s;
        }
    }
    if !skipped_columns.is_empty() {
        tracing::warn!(
            probe = %raw.probe_id,
            "skipping {} all-zero response columns",
            skipped_columns.len()
        );
    }
    // The maximum is exactly `scale`: force it against rounding in `scale * max / max`.
    for ty in 0..cols {
        if skipped_columns.contains(&ty) {
            continue;
        }
        let arg = (0..rows)
            .max_by(|&a, &b| raw.get(a, ty).abs().partial_cmp(&raw.get(b, ty).abs()).expect("finite"))
            .expect("rows");
        values[arg * cols + ty] = scale;
    }
    Ok(StandardizedMatrix {
        rows,
        cols,
        values,
        skipped_columns,
    })
}

/// `(1 / N_Y) * Σ_ty Σ_{tx in span} S[tx, ty]`.
pub fn constraint_weight<T: Scalar>(s: &StandardizedMatrix<T>, token_start: usize, token_end: usize) -> Result<T> {
    if token_start >= token_end {
        return Err(Error::Argument(format!("empty token span {token_start}..{token_end}")));
    }
    if token_end > s.rows {
        return Err(Error::Argument(format!(
            "token span {token_start}..{token_end} outside {} rows",
            s.rows
        )));
    }
    let mut total = T::zero();
    for tx in token_start..token_end {
        for ty in 0..s.cols {
            total = total + s.get(tx, ty);
        }
    }
    Ok(total / T::of_usize(s.cols))
}

/// Tokens overlapping each character span, in span order.
pub fn token_spans(tokens: &[InstructionToken], chars: &[CharSpan], kinds: &[ConstraintKind]) -> Result<Vec<TokenSpan>> {
    chars
        .iter()
        .zip(kinds)
        .map(|(span, &kind)| {
            let hits: Vec<usize> = tokens
                .iter()
                .enumerate()
                .filter(|(_, t)| t.char_start < span.char_end && span.char_start < t.char_end)
                .map(|(i, _)| i)
                .collect();
            match (hits.first(), hits.last()) {
                (Some(&a), Some(&b)) => Ok(TokenSpan {
                    kind,
                    token_start: a,
                    token_end: b + 1,
                }),
                _ => Err(Error::Data(format!("no instruction token covers the {kind} span"))),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ImportanceProfile<T> {
    pub cddi: Option<f64>,
    pub instances: usize,
    /// Mean weight at each 0-based constraint position.
    pub positions: Vec<T>,
    pub groups: BTreeMap<ConstraintGroup, T>,
    /// Mean over instances of the summed constraint weights.
    pub total: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ProfileSet<T> {
    pub profiles: Vec<ImportanceProfile<T>>,
    /// Probe ids of matrices that could not be used, with the reason.
    pub skipped: Vec<(String, String)>,
}

#[derive(Default)]
struct Mean<T> {
    sum: T,
    n: usize,
}

impl<T: Scalar> Mean<T> {
    fn add(&mut self, v: T) {
        self.sum = self.sum + v;
        self.n += 1;
    }

    fn value(&self) -> T {
        self.sum / T::of_usize(self.n)
    }
}

/// Constraint weights of one matrix, aligned with the probe's order. Spans
/// come from the probe's character offsets.
pub fn probe_weights<T: Scalar>(
    raw: &RawImportanceMatrix<T>,
    probe: &ProbeInstance,
    scale: T,
    floor: Option<T>,
) -> Result<Vec<T>> {
    let s = normalize(raw, scale, floor)?;
    let spans = token_spans(&raw.instruction_tokens, &probe.constraint_spans, &probe.order)?;
    if !raw.constraint_spans.is_empty() && raw.constraint_spans != spans {
        tracing::warn!(probe = %probe.probe_id, "matrix constraint spans differ from character offsets; using offsets");
    }
    spans
        .iter()
        .map(|sp| constraint_weight(&s, sp.token_start, sp.token_end))
        .collect()
}

/// Per-CDDI position, group and total profiles over joinable matrices.
pub fn build_profiles<T: Scalar>(
    matrices: &[RawImportanceMatrix<T>],
    probes: &[ProbeInstance],
    scale: T,
    floor: Option<T>,
) -> ProfileSet<T> {
    let by_id: HashMap<&str, &ProbeInstance> = probes.iter().map(|p| (p.probe_id.as_str(), p)).collect();
    struct Bucket<T> {
        cddi: Option<f64>,
        instances: usize,
        positions: Vec<Mean<T>>,
        groups: BTreeMap<ConstraintGroup, Mean<T>>,
        total: Mean<T>,
    }
    let mut buckets: BTreeMap<Option<i64>, Bucket<T>> = BTreeMap::new();
    let mut skipped = Vec::new();
    for raw in matrices {
        let Some(probe) = by_id.get(raw.probe_id.as_str()) else {
            tracing::warn!(probe = %raw.probe_id, "no probe for importance matrix");
            skipped.push((raw.probe_id.clone(), "no matching probe".to_string()));
            continue;
        };
        let weights = match probe_weights(raw, probe, scale, floor) {
            Ok(w) => w,
            Err(e) => {
                tracing::warn!(probe = %raw.probe_id, "skipping matrix: {e}");
                skipped.push((raw.probe_id.clone(), e.to_string()));
                continue;
            }
        };
        // Sort key keeps buckets in CDDI order; exact values are kept separately.
        let key = probe.realized_cddi.map(|c| (c * 1e12).round() as i64);
        let bucket = buckets.entry(key).or_insert_with(|| Bucket {
            cddi: probe.realized_cddi,
            instances: 0,
            positions: Vec::new(),
            groups: BTreeMap::new(),
            total: Mean { sum: T::zero(), n: 0 },
        });
        bucket.instances += 1;
        let mut total = T::zero();
        for (j, (&w, kind)) in weights.iter().zip(&probe.order).enumerate() {
            if bucket.positions.len() <= j {
                bucket.positions.resize_with(j + 1, || Mean { sum: T::zero(), n: 0 });
            }
            bucket.positions[j].add(w);
            bucket
                .groups
                .entry(kind.group())
                .or_insert(Mean { sum: T::zero(), n: 0 })
                .add(w);
            total = total + w;
        }
        bucket.total.add(total);
    }
    let profiles = buckets
        .into_values()
        .map(|b| ImportanceProfile {
            cddi: b.cddi,
            instances: b.instances,
            positions: b.positions.iter().map(Mean::value).collect(),
            groups: b.groups.iter().map(|(g, m)| (*g, m.value())).collect(),
            total: b.total.value(),
        })
        .collect();
    ProfileSet { profiles, skipped }
}
