use super::{IterationReport, SplitError};
use crate::assembly::MaterialParams;

/// Contraction factor L / (1/β + L) of the pressure increments.
pub fn theoretical_rate(params: &MaterialParams, l: f64) -> f64 {
    if l == 0.0 {
        return 0.0;
    }
    l / (params.storage() + l)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObservedRate {
    Ratio(f64),
    /// the previous increment was already zero
    AlreadyConverged,
}

/// Ratio of the pressure increment norms of sweeps `i` and `i − 1`.
pub fn observed_rate(report: &IterationReport, i: usize) -> Result<ObservedRate, SplitError> {
    if i < 2 || i > report.sweeps.len() {
        return Err(SplitError::NoSuchIteration(i));
    }
    let prev = report.sweeps[i - 2].pressure_increment;
    if prev == 0.0 {
        return Ok(ObservedRate::AlreadyConverged);
    }
    Ok(ObservedRate::Ratio(report.sweeps[i - 1].pressure_increment / prev))
}

/// Σ_n τ ‖(δp^n − δp^{n−1}) / τ‖² with δp^0 = 0.
pub(crate) fn pressure_increment_norm(dp: &[Vec<f64>], tau: f64) -> f64 {
    let mut sum = 0.0;
    for n in 1..dp.len() {
        let s: f64 = if n == 1 {
            dp[n].iter().map(|v| v * v).sum()
        } else {
            dp[n].iter().zip(&dp[n - 1]).map(|(a, b)| (a - b) * (a - b)).sum()
        };
        sum += s / tau;
    }
    sum
}
