use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::sampler::RngStream;

pub const BOOTSTRAP_RESAMPLES: usize = 10_000;
const BOOTSTRAP_SEED: u64 = 0xb007_5eed;

/// Power law `mean ≈ exp(intercept) · T^exponent` fitted in log-log space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub exponent: f64,
    pub intercept: f64,
    /// Bootstrap 95% percentile interval for the exponent.
    pub ci_low: f64,
    pub ci_high: f64,
    /// `(ln T, ln mean)` for each group.
    pub points: Vec<(f64, f64)>,
}

fn ols(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Fits `ln(mean) = intercept + exponent · ln T` over groups of replicate
/// means, one group per `T`. The confidence interval resamples replicates
/// within each group ([`BOOTSTRAP_RESAMPLES`] times, fixed seed).
pub fn scaling_fit(groups: &[(f64, Vec<f64>)]) -> Result<ScalingFit> {
    scaling_fit_with(
        groups,
        BOOTSTRAP_RESAMPLES,
        &mut RngStream::new(BOOTSTRAP_SEED, 0),
    )
}

pub fn scaling_fit_with(
    groups: &[(f64, Vec<f64>)],
    resamples: usize,
    rng: &mut RngStream,
) -> Result<ScalingFit> {
    let mut ts: Vec<f64> = groups.iter().map(|g| g.0).collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    if ts.len() < 3 || ts.len() != groups.len() {
        return Err(invalid(format!(
            "scaling fit needs at least 3 distinct T values, one group each (got {} groups, {} distinct)",
            groups.len(),
            ts.len()
        )));
    }
    for (t, vals) in groups {
        if !(*t > 0.0) {
            return Err(invalid(format!("T must be positive, got {t}")));
        }
        if vals.is_empty() {
            return Err(invalid(format!("no replicate means for T = {t}")));
        }
        if let Some(v) = vals.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(invalid(format!(
                "mean {v} at T = {t} is not positive; log undefined"
            )));
        }
    }
    let points: Vec<(f64, f64)> = groups.iter().map(|(t, v)| (t.ln(), mean(v).ln())).collect();
    let (exponent, intercept) = ols(&points);

    let mut slopes = Vec::with_capacity(resamples);
    let mut boot = points.clone();
    let mut buf = Vec::new();
    for _ in 0..resamples {
        for (k, (_, vals)) in groups.iter().enumerate() {
            buf.clear();
            buf.extend((0..vals.len()).map(|_| vals[rng.index(vals.len())]));
            boot[k].1 = mean(&buf).ln();
        }
        slopes.push(ols(&boot).0);
    }
    let (mut ci_low, mut ci_high) = (exponent, exponent);
    if !slopes.is_empty() {
        slopes.sort_by(f64::total_cmp);
        let q = |p: f64| {
            slopes[((p * (slopes.len() - 1) as f64).round() as usize).min(slopes.len() - 1)]
        };
        // The percentile interval can miss the point estimate for skewed
        // bootstrap laws; widen it so it always contains the estimate.
        ci_low = q(0.025).min(exponent);
        ci_high = q(0.975).max(exponent);
    }
    Ok(ScalingFit {
        exponent,
        intercept,
        ci_low,
        ci_high,
        points,
    })
}
