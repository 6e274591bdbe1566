//! Scoring records and aggregating accuracies by CDDI bucket.

mod report;
mod robustness;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

pub use report::{emit_report, group_order, per_kind_rows, ReportFormat};
pub use robustness::{one_way_anova, permutation_test, robustness_test, report_columns, Anova, RobustnessMethod};

use crate::constraints::{ConstraintGroup, ConstraintKind};
use crate::error::{Error, Result};
use crate::inference::{InferenceRecord, Mode};
use crate::scalar::Scalar;
use crate::synthesis::ProbeInstance;
use crate::verifier::Verifier;

/// Verdicts of one record, aligned with its probe's constraint order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredRecord {
    pub probe_id: String,
    pub mode: Mode,
    pub realized_cddi: Option<f64>,
    pub order: Vec<ConstraintKind>,
    pub verdicts: Vec<bool>,
    /// Set when the record carried an inference error; verdicts are then all false.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flagged: Option<String>,
}

/// `c_i^j = verify(final_response, C_j)` for each constraint of the probe.
pub fn score(record: &InferenceRecord, probe: &ProbeInstance, verifier: &Verifier) -> Result<ScoredRecord> {
    if record.probe_id != probe.probe_id {
        return Err(Error::Join(format!(
            "record {} scored against probe {}",
            record.probe_id, probe.probe_id
        )));
    }
    let (verdicts, flagged) = match &record.error {
        Some(e) => (vec![false; probe.constraints.len()], Some(e.clone())),
        None => {
            let verdicts = verifier
                .verify_all(&record.final_response, &probe.constraints)?
                .into_iter()
                .map(|v| v.satisfied)
                .collect();
            (verdicts, None)
        }
    };
    Ok(ScoredRecord {
        probe_id: probe.probe_id.clone(),
        mode: record.mode,
        realized_cddi: probe.realized_cddi,
        order: probe.order.clone(),
        verdicts,
        flagged,
    })
}

/// Scores every record against the probe with the same id.
pub fn score_all(records: &[InferenceRecord], probes: &[ProbeInstance], verifier: &Verifier) -> Result<Vec<ScoredRecord>> {
    let by_id: HashMap<&str, &ProbeInstance> = probes.iter().map(|p| (p.probe_id.as_str(), p)).collect();
    records
        .iter()
        .map(|r| {
            let probe = by_id
                .get(r.probe_id.as_str())
                .ok_or_else(|| Error::Join(format!("no probe with id {}", r.probe_id)))?;
            score(r, probe, verifier)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Tally<T> {
    pub accuracy: T,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct EvaluationReport<T> {
    pub mode: Mode,
    /// Realized CDDI shared by every record in the bucket.
    pub cddi: Option<f64>,
    /// Number of records.
    pub m: usize,
    /// Constraints per record (the largest, if they differ).
    pub n: usize,
    pub acc_cons: T,
    pub acc_inst: T,
    pub groups: BTreeMap<ConstraintGroup, Tally<T>>,
    pub kinds: BTreeMap<ConstraintKind, Tally<T>>,
    /// Accuracy at each 0-based position.
    pub positions: Vec<Tally<T>>,
    pub flagged: usize,
}

#[derive(Default)]
struct Counter {
    hits: usize,
    total: usize,
}

impl Counter {
    fn add(&mut self, hit: bool) {
        self.hits += hit as usize;
        self.total += 1;
    }

    fn tally<T: Scalar>(&self) -> Tally<T> {
        Tally {
            accuracy: T::of_usize(self.hits) / T::of_usize(self.total),
            count: self.total,
        }
    }
}

fn bucket_key(s: &ScoredRecord) -> (Mode, Option<u64>) {
    // -0.0 and 0.0 are the same bucket.
    (s.mode, s.realized_cddi.map(|c| if c == 0.0 { 0 } else { c.to_bits() }))
}

/// One report per (mode, realized CDDI), ordered by mode then CDDI.
pub fn aggregate<T: Scalar>(scored: &[ScoredRecord]) -> Result<Vec<EvaluationReport<T>>> {
    if scored.is_empty() {
        return Err(Error::Argument("nothing to aggregate".into()));
    }
    let mut buckets: HashMap<(Mode, Option<u64>), Vec<&ScoredRecord>> = HashMap::new();
    for s in scored {
        if s.verdicts.len() != s.order.len() {
            return Err(Error::Data(format!(
                "{}: {} verdicts for {} constraints",
                s.probe_id,
                s.verdicts.len(),
                s.order.len()
            )));
        }
        buckets.entry(bucket_key(s)).or_default().push(s);
    }
    let mut reports: Vec<EvaluationReport<T>> = buckets.into_values().map(|rs| bucket_report(&rs)).collect();
    reports.sort_by(|a, b| {
        (a.mode.name(), a.cddi.unwrap_or(f64::NEG_INFINITY))
            .partial_cmp(&(b.mode.name(), b.cddi.unwrap_or(f64::NEG_INFINITY)))
            .expect("finite CDDI")
    });
    Ok(reports)
}

fn bucket_report<T: Scalar>(records: &[&ScoredRecord]) -> EvaluationReport<T> {
    let mut all = Counter::default();
    let mut inst = Counter::default();
    let mut groups: BTreeMap<ConstraintGroup, Counter> = BTreeMap::new();
    let mut kinds: BTreeMap<ConstraintKind, Counter> = BTreeMap::new();
    let mut positions: Vec<Counter> = Vec::new();
    for r in records {
        inst.add(r.verdicts.iter().all(|&v| v));
        for (j, (&kind, &v)) in r.order.iter().zip(&r.verdicts).enumerate() {
            all.add(v);
            groups.entry(kind.group()).or_default().add(v);
            kinds.entry(kind).or_default().add(v);
            if positions.len() <= j {
                positions.resize_with(j + 1, Counter::default);
            }
            positions[j].add(v);
        }
    }
    let first = records[0];
    EvaluationReport {
        mode: first.mode,
        cddi: first.realized_cddi.map(|c| if c == 0.0 { 0.0 } else { c }),
        m: records.len(),
        n: records.iter().map(|r| r.order.len()).max().unwrap_or(0),
        acc_cons: if all.total == 0 { T::zero() } else { all.tally().accuracy },
        acc_inst: inst.tally().accuracy,
        groups: groups.iter().map(|(g, c)| (*g, c.tally())).collect(),
        kinds: kinds.iter().map(|(k, c)| (*k, c.tally())).collect(),
        positions: positions.iter().map(Counter::tally).collect(),
        flagged: records.iter().filter(|r| r.flagged.is_some()).count(),
    }
}
