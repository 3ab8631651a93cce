//! Empirical order of convergence from a least-squares fit of
//! `ln e_n = C + ρ ln e_{n-1}`.

use thiserror::Error;

/// Errors at or below this are dropped from the tail before taking logs.
pub const ERROR_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RateError {
    #[error("need at least three errors above the floor, got {0}")]
    InsufficientData(usize),
}

/// Fitted `(ρ, C)`.
pub fn estimate_rate(errors: &[f64]) -> Result<(f64, f64), RateError> {
    let usable = errors.iter().rposition(|e| *e > ERROR_FLOOR).map_or(0, |i| i + 1);
    let errors = &errors[..usable];
    if errors.len() < 3 || errors.iter().any(|e| !e.is_finite() || *e <= 0.0) {
        return Err(RateError::InsufficientData(errors.len()));
    }
    let logs: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let xs = &logs[..logs.len() - 1];
    let ys = &logs[1..];
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= f64::EPSILON * m * (1.0 + mx * mx) {
        return Err(RateError::InsufficientData(errors.len()));
    }
    let rho = sxy / sxx;
    Ok((rho, my - rho * mx))
}
