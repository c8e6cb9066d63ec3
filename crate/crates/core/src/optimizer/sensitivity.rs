use serde::Serialize;

use super::search::best_of;
use super::surface::SurfacePoint;
use super::OptimizerError;

/// Spread of parameters and metrics among near-optimal configurations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityReport {
    pub r: f64,
    pub max_fitness: f64,
    pub threshold: f64,
    pub selected: usize,
    /// `None` when no selected configuration has the parameter.
    pub std_k: Option<f64>,
    pub std_p: Option<f64>,
    pub std_r: f64,
    pub std_w: f64,
    /// Only one configuration qualified; all deviations are reported as 0.
    pub singleton: bool,
}

/// Unbiased sample standard deviation; zero for fewer than two values.
pub fn sample_std(values: &[f64]) -> f64 {
    let m = values.len();
    if m < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / m as f64;
    (values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1) as f64).sqrt()
}

/// Standard deviations of `k`, `p`, `R` and `W` over configurations whose
/// fitness at weight `r` is at least `fraction` of the best.
pub fn sensitivity(points: &[SurfacePoint], r: f64, fraction: f64) -> Result<SensitivityReport, OptimizerError> {
    let best = best_of(points, r).ok_or(OptimizerError::EmptySurface)?;
    let max_fitness = best.fitness_at(r);
    let threshold = fraction * max_fitness;
    let near: Vec<&SurfacePoint> = points.iter().filter(|p| p.fitness_at(r) >= threshold).collect();
    let ks: Vec<f64> = near.iter().filter_map(|p| p.config.k).map(|k| k as f64).collect();
    let ps: Vec<f64> = near.iter().filter_map(|p| p.config.p).collect();
    let rs: Vec<f64> = near.iter().map(|p| p.r_mean).collect();
    let ws: Vec<f64> = near.iter().map(|p| p.w_mean).collect();
    Ok(SensitivityReport {
        r,
        max_fitness,
        threshold,
        selected: near.len(),
        std_k: (!ks.is_empty()).then(|| sample_std(&ks)),
        std_p: (!ps.is_empty()).then(|| sample_std(&ps)),
        std_r: sample_std(&rs),
        std_w: sample_std(&ws),
        singleton: near.len() == 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_sample_std() {
        assert!((sample_std(&[10.0, 12.0]) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(sample_std(&[3.0]), 0.0);
        assert_eq!(sample_std(&[4.0, 4.0, 4.0]), 0.0);
    }
}
