//! Regret summaries.

use super::run::RunRecord;
use super::HarnessError;

/// Regret at the last evaluation.
pub fn simple_regret(record: &RunRecord) -> Result<f64, HarnessError> {
    record
        .rows
        .last()
        .and_then(|r| r.regret)
        .ok_or(HarnessError::MissingOptimum)
}

/// Sum of the per-iteration regrets over the optimization steps (initial
/// design rows excluded).
pub fn regret_auc(record: &RunRecord) -> Result<f64, HarnessError> {
    auc(record
        .rows
        .iter()
        .filter(|r| r.iteration > 0)
        .map(|r| r.regret))
}

pub(crate) fn auc(regrets: impl Iterator<Item = Option<f64>>) -> Result<f64, HarnessError> {
    let mut total = 0.0;
    for r in regrets {
        total += r.ok_or(HarnessError::MissingOptimum)?;
    }
    Ok(total)
}

/// Mean and sample standard deviation (zero for a single value).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
