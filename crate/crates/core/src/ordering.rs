//! Constraint difficulty, the Constraint Difficulty Distribution Index (CDDI)
//! and orders that realize target CDDI values.
//!
//! The anchor order sorts kinds hardest-first by difficulty, ties broken by
//! kind name. For an order of `n` kinds, a pair is concordant when the two
//! kinds appear in the same relative order as in the anchor, and
//! `CDDI = 2 (N_con - N_dis) / (n (n - 1))`. With `N = n (n - 1) / 2` pairs
//! and `d` discordant pairs this is `(N - 2d) / N`.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::constraints::ConstraintKind;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::Cddi;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct DifficultyEntry<T> {
    pub kind: ConstraintKind,
    #[serde(rename = "N_x")]
    pub n_x: usize,
    #[serde(rename = "Acc")]
    pub acc: T,
    #[serde(rename = "Dff")]
    pub dff: T,
}

impl<T: Scalar> DifficultyEntry<T> {
    pub fn hardness(&self) -> T {
        T::one() - self.acc
    }
}

/// Per-kind accuracy and softmax difficulty over the kinds in scope.
#[derive(Debug, Clone, PartialEq)]
pub struct DifficultyTable<T> {
    entries: Vec<DifficultyEntry<T>>,
}

impl<T: Scalar> DifficultyTable<T> {
    /// `Acc_x = (1 / N_x) Σ c_x^i` per kind, then `Dff = softmax(1 - Acc)`
    /// over `scope`. Records of kinds outside `scope` are ignored.
    pub fn estimate<I>(records: I, scope: &[ConstraintKind]) -> Result<Self>
    where
        I: IntoIterator<Item = (ConstraintKind, bool)>,
    {
        let mut tally: HashMap<ConstraintKind, (usize, usize)> = HashMap::new();
        for (kind, followed) in records {
            let e = tally.entry(kind).or_default();
            e.0 += 1;
            e.1 += followed as usize;
        }
        let missing: Vec<String> = scope
            .iter()
            .filter(|k| tally.get(k).map_or(0, |t| t.0) == 0)
            .map(|k| k.name().to_string())
            .collect();
        if !missing.is_empty() {
            return Err(Error::Coverage(missing));
        }
        let accs = scope
            .iter()
            .map(|k| {
                let (n, hits) = tally[k];
                (*k, n, T::of_usize(hits) / T::of_usize(n))
            })
            .collect();
        Self::from_accuracies(accs)
    }

    /// Builds a table from `(kind, N_x, Acc)` triples.
    pub fn from_accuracies(accs: Vec<(ConstraintKind, usize, T)>) -> Result<Self> {
        if accs.is_empty() {
            return Err(Error::Argument("difficulty table needs at least one kind".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for (k, _, acc) in &accs {
            if !seen.insert(*k) {
                return Err(Error::Argument(format!("{k} listed twice")));
            }
            if !(*acc >= T::zero() && *acc <= T::one()) {
                return Err(Error::Argument(format!("{k}: accuracy {acc} outside [0, 1]")));
            }
        }
        let hardness: Vec<T> = accs.iter().map(|(_, _, a)| T::one() - *a).collect();
        let dff = softmax(&hardness);
        let entries = accs
            .into_iter()
            .zip(dff)
            .map(|((kind, n_x, acc), dff)| DifficultyEntry { kind, n_x, acc, dff })
            .collect();
        Ok(DifficultyTable { entries })
    }

    pub fn from_entries(entries: Vec<DifficultyEntry<T>>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for e in &entries {
            if !seen.insert(e.kind) {
                return Err(Error::Data(format!("{} listed twice in difficulty table", e.kind)));
            }
        }
        if entries.is_empty() {
            return Err(Error::Data("difficulty table is empty".into()));
        }
        Ok(DifficultyTable { entries })
    }

    pub fn entries(&self) -> &[DifficultyEntry<T>] {
        &self.entries
    }

    pub fn get(&self, kind: ConstraintKind) -> Option<&DifficultyEntry<T>> {
        self.entries.iter().find(|e| e.kind == kind)
    }

    pub fn kinds(&self) -> Vec<ConstraintKind> {
        self.entries.iter().map(|e| e.kind).collect()
    }

    /// Hardest-first order of `kinds` (ties by kind name).
    pub fn anchor(&self, kinds: &[ConstraintKind]) -> Result<Vec<ConstraintKind>> {
        check_distinct(kinds)?;
        let mut keyed = Vec::with_capacity(kinds.len());
        for &k in kinds {
            let e = self
                .get(k)
                .ok_or_else(|| Error::Argument(format!("{k} is not in the difficulty table")))?;
            keyed.push((k, e.dff));
        }
        keyed.sort_by(|(ka, da), (kb, db)| {
            db.partial_cmp(da)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| ka.cmp(kb))
        });
        let tied = keyed.windows(2).any(|w| w[0].1 == w[1].1);
        if tied {
            tracing::warn!("difficulty ties among {:?}; broken by kind name", kinds);
        }
        Ok(keyed.into_iter().map(|(k, _)| k).collect())
    }

    /// Hardest-first order of every kind in the table.
    pub fn full_anchor(&self) -> Vec<ConstraintKind> {
        self.anchor(&self.kinds()).expect("table kinds are distinct")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        crate::io::write_jsonl_atomic(path, &self.entries)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_entries(crate::io::read_jsonl(path)?)
    }
}

/// Numerically stable softmax.
pub fn softmax<T: Scalar>(xs: &[T]) -> Vec<T> {
    let max = xs.iter().copied().fold(T::neg_infinity(), T::max);
    let exps: Vec<T> = xs.iter().map(|&x| (x - max).exp()).collect();
    let total: T = exps.iter().copied().sum();
    exps.into_iter().map(|e| e / total).collect()
}

fn check_distinct(kinds: &[ConstraintKind]) -> Result<()> {
    let set: std::collections::HashSet<_> = kinds.iter().collect();
    if set.len() != kinds.len() {
        return Err(Error::Argument("order repeats a constraint kind".into()));
    }
    Ok(())
}

/// Concordant and discordant pair counts of `order` against `anchor`.
pub fn pair_counts(order: &[ConstraintKind], anchor: &[ConstraintKind]) -> Result<(usize, usize)> {
    check_distinct(order)?;
    let rank: HashMap<ConstraintKind, usize> =
        anchor.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    let ranks: Vec<usize> = order
        .iter()
        .map(|k| {
            rank.get(k)
                .copied()
                .ok_or_else(|| Error::Argument(format!("{k} is not in the anchor")))
        })
        .collect::<Result<_>>()?;
    let (mut con, mut dis) = (0, 0);
    for i in 0..ranks.len() {
        for j in i + 1..ranks.len() {
            if ranks[i] < ranks[j] {
                con += 1;
            } else {
                dis += 1;
            }
        }
    }
    Ok((con, dis))
}

/// Exact CDDI of `order`.
pub fn cddi_exact<T: Scalar>(order: &[ConstraintKind], table: &DifficultyTable<T>) -> Result<Cddi> {
    let n = order.len();
    if n < 2 {
        return Err(Error::Argument(format!("CDDI needs at least 2 constraints, got {n}")));
    }
    let anchor = table.anchor(order)?;
    let (con, dis) = pair_counts(order, &anchor)?;
    Ok(Ratio::new(
        2 * (con as i64 - dis as i64),
        (n * (n - 1)) as i64,
    ))
}

pub fn cddi<T: Scalar>(order: &[ConstraintKind], table: &DifficultyTable<T>) -> Result<T> {
    Ok(ratio_to_scalar(cddi_exact(order, table)?))
}

pub fn ratio_to_scalar<T: Scalar>(r: Cddi) -> T {
    T::of(*r.numer() as f64 / *r.denom() as f64)
}

/// The achievable CDDI values for `n` constraints, `(N - 2d) / N` for `d = 0..=N`.
pub fn achievable(n: usize) -> Vec<Cddi> {
    let pairs = (n * n.saturating_sub(1) / 2) as i64;
    if pairs == 0 {
        return Vec::new();
    }
    (0..=pairs).map(|d| Ratio::new(pairs - 2 * d, pairs)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    /// Builds the answer directly from the discordant-pair count.
    #[default]
    Constructive,
    /// Scans every permutation; practical up to about n = 9.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct OrderWithIndex<T> {
    pub order: Vec<ConstraintKind>,
    pub target_cddi: T,
    pub realized_cddi: T,
    pub discordant_pairs: usize,
}

/// For each target, the order whose CDDI is nearest the target; among equally
/// near orders, the lexicographically smallest by kind name.
pub fn orders_for_targets<T: Scalar>(
    kinds: &[ConstraintKind],
    table: &DifficultyTable<T>,
    targets: &[T],
    mode: SearchMode,
) -> Result<Vec<OrderWithIndex<T>>> {
    let n = kinds.len();
    if n < 2 {
        return Err(Error::Argument(format!("ordering needs at least 2 constraints, got {n}")));
    }
    for t in targets {
        if !(*t >= -T::one() && *t <= T::one()) {
            return Err(Error::Argument(format!("target CDDI {t} outside [-1, 1]")));
        }
    }
    let anchor = table.anchor(kinds)?;
    let pairs = n * (n - 1) / 2;
    let exhaustive = match mode {
        SearchMode::Exhaustive => Some(lex_smallest_by_discordance(&anchor)),
        SearchMode::Constructive => None,
    };
    targets
        .iter()
        .map(|&target| {
            let candidates = nearest_discordance(pairs, target.as_f64());
            let best = candidates
                .into_iter()
                .map(|d| {
                    let order = match &exhaustive {
                        Some(table) => table[d].clone(),
                        None => lex_smallest_with_discordance(&anchor, d),
                    };
                    (order, d)
                })
                .min_by(|a, b| a.0.cmp(&b.0))
                .expect("at least one candidate");
            let (order, d) = best;
            Ok(OrderWithIndex {
                order,
                target_cddi: target,
                realized_cddi: ratio_to_scalar(Ratio::new(pairs as i64 - 2 * d as i64, pairs as i64)),
                discordant_pairs: d,
            })
        })
        .collect()
}

/// Discordant-pair counts whose CDDI is nearest `target`, compared exactly.
fn nearest_discordance(pairs: usize, target: f64) -> Vec<usize> {
    let t = BigRational::from_float(target).expect("finite target");
    let p = BigInt::from(pairs);
    let dist = |d: usize| {
        let v = BigRational::new(p.clone() - BigInt::from(2 * d), p.clone());
        (v - &t).abs()
    };
    let mut best: Vec<usize> = Vec::new();
    let mut best_dist: Option<BigRational> = None;
    for d in 0..=pairs {
        let dd = dist(d);
        match &best_dist {
            Some(b) if dd > *b => {}
            Some(b) if dd == *b => best.push(d),
            _ => {
                best = vec![d];
                best_dist = Some(dd);
            }
        }
    }
    best
}

/// Lexicographically smallest (by kind name) permutation of `anchor` with
/// exactly `d` pairs out of anchor order.
///
/// Placing element `c` first makes it discordant with every remaining element
/// that precedes it in the anchor; any count between 0 and `m (m - 1) / 2`
/// is reachable with the `m` elements left, so the greedy choice is exact.
pub fn lex_smallest_with_discordance(anchor: &[ConstraintKind], d: usize) -> Vec<ConstraintKind> {
    let mut remaining: Vec<ConstraintKind> = anchor.to_vec();
    let mut left = d;
    let mut out = Vec::with_capacity(anchor.len());
    while !remaining.is_empty() {
        let m = remaining.len();
        let rest_max = (m - 1) * m.saturating_sub(2) / 2;
        let mut by_name: Vec<(usize, ConstraintKind)> = remaining.iter().copied().enumerate().collect();
        by_name.sort_by(|a, b| a.1.cmp(&b.1));
        let (pos, kind) = by_name
            .into_iter()
            .find(|(pos, _)| *pos <= left && left - *pos <= rest_max)
            .expect("discordance within range");
        out.push(kind);
        left -= pos;
        remaining.remove(pos);
    }
    out
}

/// Exhaustive scan: for every discordance count, the lexicographically
/// smallest permutation realizing it.
pub fn lex_smallest_by_discordance(anchor: &[ConstraintKind]) -> Vec<Vec<ConstraintKind>> {
    let n = anchor.len();
    let pairs = n * n.saturating_sub(1) / 2;
    let mut best: Vec<Option<Vec<ConstraintKind>>> = vec![None; pairs + 1];
    let mut sorted = anchor.to_vec();
    sorted.sort();
    let rank: HashMap<ConstraintKind, usize> =
        anchor.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    // Permutations are visited in lexicographic order, so the first hit wins.
    let mut perm = sorted;
    loop {
        let mut d = 0;
        for i in 0..n {
            for j in i + 1..n {
                if rank[&perm[i]] > rank[&perm[j]] {
                    d += 1;
                }
            }
        }
        if best[d].is_none() {
            best[d] = Some(perm.clone());
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.into_iter().map(|o| o.expect("every count is reachable")).collect()
}

pub(crate) fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Per-kind mean difficulty grouped by an arbitrary key, used to order report columns.
pub fn mean_by<T: Scalar, K: Ord + Clone>(
    table: &DifficultyTable<T>,
    key: impl Fn(ConstraintKind) -> K,
) -> BTreeMap<K, T> {
    let mut acc: BTreeMap<K, (T, usize)> = BTreeMap::new();
    for e in table.entries() {
        let slot = acc.entry(key(e.kind)).or_insert((T::zero(), 0));
        slot.0 = slot.0 + e.dff;
        slot.1 += 1;
    }
    acc.into_iter()
        .map(|(k, (sum, n))| (k, sum / T::of_usize(n)))
        .collect()
}
