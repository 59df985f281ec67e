//! Quantitative diagnostics computed from solver outputs or closed-form
//! fields: quasi-convexity margins, oscillation moduli, Gaussian energy
//! series, free-boundary extraction, density, blow-ups and exponent fits.

pub mod blowup;
pub mod eigenvalue;
pub mod freeboundary;
pub mod modulus;
pub mod monotonicity;

use serde::{Deserialize, Serialize};

pub use blowup::{fit_blowup_profile, hyperbolic_blowup, nondegeneracy_l, BlowupFit, NondegeneracyReport};
pub use eigenvalue::{estimate_halfspace_eigenvalue, SlitConstraint};
pub use freeboundary::{extract_free_boundary, holder_exponent_gradient, parabolic_density, DensityReport, FreeBoundarySnapshot, GradientExponentReport};
pub use modulus::{quasiconvexity_check, time_derivative_modulus, ModulusReport, QuasiconvexityReport};
pub use monotonicity::{monotonicity_functional, PhiSeries};

/// Least-squares fit of log(y) against log(x).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LogLogFit {
    pub exponent: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub points: usize,
}

/// Fits log y = a log x + b, skipping nonpositive entries.
/// At least 4 usable points are required for a trustworthy exponent.
pub fn fit_loglog(pairs: &[(f64, f64)]) -> Option<LogLogFit> {
    let pts: Vec<(f64, f64)> = pairs
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 4 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return None;
    }
    let a = (n * sxy - sx * sy) / denom;
    let b = (sy - a * sx) / n;
    let rss: f64 = pts
        .iter()
        .map(|&(x, y)| {
            let e = y - (a * x + b);
            e * e
        })
        .sum();
    Some(LogLogFit {
        exponent: a,
        intercept: b,
        residual: (rss / n).sqrt(),
        points: pts.len(),
    })
}

/// Everything the diagnostics can report about one run, serialized as the
/// run's regularity report. Absent entries were not applicable.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RegularityReport {
    pub utt_min: Option<f64>,
    pub utt_bound: Option<f64>,
    pub pass_margin: Option<f64>,
    pub modulus_table: Option<Vec<(f64, f64)>>,
    pub holder_fit: Option<LogLogFit>,
    pub phi_series: Option<Vec<(f64, f64)>>,
    pub lambda_hat: Option<f64>,
    pub density_series: Option<Vec<(f64, f64)>>,
    pub c_hat: Option<f64>,
    pub l_hat: Option<f64>,
    pub growth_exponent: Option<LogLogFit>,
    pub omega_hat: Option<f64>,
    pub rotation_hat: Option<f64>,
    pub blowup_error: Option<f64>,
    pub gradient_fit: Option<LogLogFit>,
    pub interface_count: Option<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loglog_fit_recovers_power_law() {
        let pairs: Vec<(f64, f64)> = (1..=8)
            .map(|i| {
                let x = 0.1 * i as f64;
                (x, 3.0 * x.powf(1.5))
            })
            .collect();
        let fit = fit_loglog(&pairs).unwrap();
        assert!((fit.exponent - 1.5).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn loglog_fit_needs_four_points() {
        let pairs = vec![(0.1, 1.0), (0.2, 2.0), (0.3, 3.0)];
        assert!(fit_loglog(&pairs).is_none());
    }
}
