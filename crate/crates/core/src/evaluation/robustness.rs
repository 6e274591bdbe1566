//! Same-CDDI robustness test across runs with different orders.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use super::EvaluationReport;
use crate::constraints::ConstraintGroup;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RobustnessMethod {
    Anova,
    /// Label-shuffling test on the ANOVA F statistic.
    Permutation { rounds: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anova {
    pub f: f64,
    pub p_value: f64,
    pub df_between: usize,
    pub df_within: usize,
}

fn check_runs<T: Scalar>(runs: &[Vec<T>]) -> Result<()> {
    if runs.len() < 2 {
        return Err(Error::Argument(format!("need at least 2 runs, got {}", runs.len())));
    }
    let width = runs[0].len();
    if width == 0 || runs.iter().any(|r| r.len() != width) {
        return Err(Error::Argument("runs must share the same non-empty metric columns".into()));
    }
    if runs.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Argument("metric values must be finite".into()));
    }
    Ok(())
}

fn f_statistic(runs: &[Vec<f64>]) -> (f64, f64, f64) {
    let total: usize = runs.iter().map(Vec::len).sum();
    let grand = runs.iter().flatten().sum::<f64>() / total as f64;
    let mut between = 0.0;
    let mut within = 0.0;
    for run in runs {
        let mean = run.iter().sum::<f64>() / run.len() as f64;
        between += run.len() as f64 * (mean - grand).powi(2);
        within += run.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    }
    let df_b = (runs.len() - 1) as f64;
    let df_w = (total - runs.len()) as f64;
    let f = if between == 0.0 {
        0.0
    } else if within == 0.0 {
        f64::INFINITY
    } else {
        (between / df_b) / (within / df_w)
    };
    (f, df_b, df_w)
}

/// One-way ANOVA with each run as a group and its metric columns as observations.
pub fn one_way_anova<T: Scalar>(runs: &[Vec<T>]) -> Result<Anova> {
    check_runs(runs)?;
    let runs: Vec<Vec<f64>> = runs.iter().map(|r| r.iter().map(|v| v.as_f64()).collect()).collect();
    let (f, df_b, df_w) = f_statistic(&runs);
    if df_w == 0.0 {
        return Err(Error::Argument("one column per run leaves no within-run degrees of freedom".into()));
    }
    let p_value = if f == 0.0 {
        1.0
    } else if f.is_infinite() {
        0.0
    } else {
        FisherSnedecor::new(df_b, df_w)
            .map_err(|e| Error::Argument(e.to_string()))?
            .sf(f)
    };
    Ok(Anova {
        f,
        p_value,
        df_between: df_b as usize,
        df_within: df_w as usize,
    })
}

/// Fraction of label shuffles whose F is at least the observed F, with the
/// observed assignment counted once.
pub fn permutation_test<T: Scalar, R: Rng + ?Sized>(runs: &[Vec<T>], rounds: usize, rng: &mut R) -> Result<f64> {
    check_runs(runs)?;
    let runs: Vec<Vec<f64>> = runs.iter().map(|r| r.iter().map(|v| v.as_f64()).collect()).collect();
    let (observed, _, _) = f_statistic(&runs);
    let width = runs[0].len();
    let mut pool: Vec<f64> = runs.concat();
    let mut extreme = 1usize;
    for _ in 0..rounds {
        pool.shuffle(rng);
        let shuffled: Vec<Vec<f64>> = pool.chunks(width).map(<[f64]>::to_vec).collect();
        let (f, _, _) = f_statistic(&shuffled);
        // Relative slack absorbs summation-order noise on ties.
        if f >= observed * (1.0 - 1e-12) {
            extreme += 1;
        }
    }
    Ok(extreme as f64 / (rounds + 1) as f64)
}

pub fn robustness_test<T: Scalar, R: Rng + ?Sized>(runs: &[Vec<T>], method: RobustnessMethod, rng: &mut R) -> Result<f64> {
    match method {
        RobustnessMethod::Anova => Ok(one_way_anova(runs)?.p_value),
        RobustnessMethod::Permutation { rounds } => permutation_test(runs, rounds, rng),
    }
}

/// Group accuracies in `groups` order followed by Acc_cons and Acc_inst.
pub fn report_columns<T: Scalar>(report: &EvaluationReport<T>, groups: &[ConstraintGroup]) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(groups.len() + 2);
    for g in groups {
        let tally = report
            .groups
            .get(g)
            .ok_or_else(|| Error::Argument(format!("report has no {} accuracy", g.name())))?;
        out.push(tally.accuracy);
    }
    out.push(report.acc_cons);
    out.push(report.acc_inst);
    Ok(out)
}
