//! Quasi-convexity margin and oscillation modulus of the time-difference
//! field over backward parabolic windows.

use serde::{Deserialize, Serialize};

use crate::diagnostics::{fit_loglog, LogLogFit};
use crate::error::{Error, Result};
use crate::grid::SampledData;
use crate::solvers::SolveResult;

/// Outcome of the second-time-quotient scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuasiconvexityReport {
    /// min over interior space-time nodes of the discrete u_tt.
    pub utt_min: f64,
    /// max(|psi_tt|_inf, |bilap phi0|_inf), from the analytic data.
    pub utt_bound: f64,
    /// utt_min + utt_bound; nonnegative up to discretization.
    pub pass_margin: f64,
    /// Smallest u_tt over the parabolic-boundary band (first interior level
    /// and nodes adjacent to the lateral boundary).
    pub boundary_min: f64,
    /// Smallest u_tt over the remaining interior nodes.
    pub interior_min: f64,
}

/// Scans the discrete second time quotient of u against the bound carried by
/// the data. Needs the analytic bilaplacian of the initial slice.
pub fn quasiconvexity_check(
    result: &SolveResult,
    data: &SampledData,
) -> Result<QuasiconvexityReport> {
    let grid = &result.u.grid;
    let bilap = data
        .bilap_phi0
        .as_ref()
        .ok_or_else(|| Error::MissingDerivativeData("bilap_phi0".into()))?;
    let psi_tt_max = data.psi_tt.max_abs();
    let bilap_max = bilap.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let utt_bound = psi_tt_max.max(bilap_max);

    let sl = grid.space_len();
    let dt2 = grid.dt * grid.dt;
    let n = grid.n_space;
    let interior: Vec<usize> = match grid.dim {
        1 => (1..n - 1).collect(),
        _ => {
            let mut out = Vec::new();
            for j in 1..n - 1 {
                for i in 1..n - 1 {
                    out.push(j * n + i);
                }
            }
            out
        }
    };
    let near_lateral = |c: usize| -> bool {
        match grid.dim {
            1 => c == 1 || c == n - 2,
            _ => {
                let (i, j) = (c % n, c / n);
                i == 1 || i == n - 2 || j == 1 || j == n - 2
            }
        }
    };
    let mut utt_min = f64::INFINITY;
    let mut boundary_min = f64::INFINITY;
    let mut interior_min = f64::INFINITY;
    for k in 1..grid.n_time - 1 {
        for &c in &interior {
            let q = (result.u.values[(k + 1) * sl + c] + result.u.values[(k - 1) * sl + c]
                - 2.0 * result.u.values[k * sl + c])
                / dt2;
            utt_min = utt_min.min(q);
            if k == 1 || near_lateral(c) {
                boundary_min = boundary_min.min(q);
            } else {
                interior_min = interior_min.min(q);
            }
        }
    }
    Ok(QuasiconvexityReport {
        utt_min,
        utt_bound,
        pass_margin: utt_min + utt_bound,
        boundary_min,
        interior_min,
    })
}

/// Oscillation table of v (or v+) over backward parabolic windows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModulusReport {
    /// (radius, max over centers of the window oscillation).
    pub table: Vec<(f64, f64)>,
    pub fit: LogLogFit,
}

/// For each radius r, the oscillation of v over every backward window
/// {|x - x0| <= r, t0 - r^2 <= t <= t0}, maximized over window centers.
/// `positive_part` replaces v by max(v, 0) first.
pub fn time_derivative_modulus(
    result: &SolveResult,
    radii: &[f64],
    positive_part: bool,
) -> Result<ModulusReport> {
    let grid = &result.v.grid;
    let h = grid.h;
    for &r in radii {
        if r < 2.0 * h {
            return Err(Error::RadiiUnresolvable(format!(
                "radius {r} is under two cells (h = {h})"
            )));
        }
    }
    let sl = grid.space_len();
    let n = grid.n_space;
    let values: Vec<f64> = if positive_part {
        result.v.values.iter().map(|&v| v.max(0.0)).collect()
    } else {
        result.v.values.clone()
    };

    let mut table = Vec::with_capacity(radii.len());
    for &r in radii {
        let ir = (r / h).floor() as i64;
        let ir2 = if grid.dim == 2 {
            (r / grid.h2).floor() as i64
        } else {
            0
        };
        let back = ((r * r) / grid.dt).floor() as usize;
        let mut worst = 0.0f64;
        for k0 in 0..grid.n_time {
            let klo = k0.saturating_sub(back);
            for c0 in 0..sl {
                let (i0, j0) = if grid.dim == 1 {
                    (c0 as i64, 0i64)
                } else {
                    ((c0 % n) as i64, (c0 / n) as i64)
                };
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for k in klo..=k0 {
                    let base = k * sl;
                    if grid.dim == 1 {
                        let a = (i0 - ir).max(0) as usize;
                        let b = ((i0 + ir) as usize).min(n - 1);
                        for i in a..=b {
                            let v = values[base + i];
                            lo = lo.min(v);
                            hi = hi.max(v);
                        }
                    } else {
                        let ja = (j0 - ir2).max(0) as usize;
                        let jb = ((j0 + ir2) as usize).min(n - 1);
                        for j in ja..=jb {
                            let dy = (j as i64 - j0) as f64 * grid.h2;
                            let rem = r * r - dy * dy;
                            if rem < 0.0 {
                                continue;
                            }
                            let reach = (rem.sqrt() / h).floor() as i64;
                            let a = (i0 - reach).max(0) as usize;
                            let b = ((i0 + reach) as usize).min(n - 1);
                            for i in a..=b {
                                let v = values[base + j * n + i];
                                lo = lo.min(v);
                                hi = hi.max(v);
                            }
                        }
                    }
                }
                if hi > lo {
                    worst = worst.max(hi - lo);
                }
            }
        }
        table.push((r, worst));
    }
    let fit = fit_loglog(&table).unwrap_or(LogLogFit {
        exponent: 0.0,
        intercept: 0.0,
        residual: f64::INFINITY,
        points: 0,
    });
    Ok(ModulusReport { table, fit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, Geometry, ScalarField};
    use crate::solvers::SolveResult;

    fn wrap(v: ScalarField) -> SolveResult {
        let u = v.clone();
        SolveResult {
            u,
            v,
            per_step: vec![],
            eps_used: 1e-3,
        }
    }

    #[test]
    fn constant_field_has_zero_oscillation() {
        let g = make_grid(1, Geometry::Box, 65, 17, &[[0.0, 1.0]], 0.0, 0.25).unwrap();
        let mut v = ScalarField::zeros(&g, "v");
        for val in v.values.iter_mut() {
            *val = 0.7;
        }
        let rep = time_derivative_modulus(&wrap(v), &[0.05, 0.1, 0.2], false).unwrap();
        for (_, osc) in rep.table {
            assert_eq!(osc, 0.0);
        }
    }

    #[test]
    fn sqrt_profile_fits_half_exponent() {
        // |x - 1/2|^{1/2} has oscillation ~ r^{1/2} over small windows
        let g = make_grid(1, Geometry::Box, 513, 9, &[[0.0, 1.0]], 0.0, 0.25).unwrap();
        let v = ScalarField::sample(&g, "v", |_, x| (x[0] - 0.5).abs().sqrt());
        let radii = [0.01, 0.02, 0.04, 0.08, 0.16];
        let rep = time_derivative_modulus(&wrap(v), &radii, false).unwrap();
        assert!(
            (rep.fit.exponent - 0.5).abs() < 0.05,
            "exponent {}",
            rep.fit.exponent
        );
    }

    #[test]
    fn oscillation_monotone_in_radius() {
        let g = make_grid(1, Geometry::Box, 129, 17, &[[0.0, 1.0]], 0.0, 0.25).unwrap();
        let v = ScalarField::sample(&g, "v", |t, x| (8.0 * x[0]).sin() * (1.0 + t));
        let radii = [0.05, 0.1, 0.2, 0.4];
        let rep = time_derivative_modulus(&wrap(v), &radii, false).unwrap();
        for w in rep.table.windows(2) {
            assert!(w[0].1 <= w[1].1 + 1e-14);
        }
    }

    #[test]
    fn affine_in_time_has_zero_quotient() {
        let g = make_grid(1, Geometry::Box, 33, 9, &[[0.0, 1.0]], 0.0, 0.5).unwrap();
        let u = ScalarField::sample(&g, "u", |t, x| 2.0 * t + x[0]);
        let data = crate::builtin::zero_data(&g, Some(vec![0.0; g.space_len()]));
        let result = SolveResult {
            v: u.clone(),
            u,
            per_step: vec![],
            eps_used: 1e-3,
        };
        let rep = quasiconvexity_check(&result, &data).unwrap();
        assert!(rep.utt_min.abs() < 1e-10);
    }

    #[test]
    fn missing_bilaplacian_is_reported() {
        let g = make_grid(1, Geometry::Box, 33, 9, &[[0.0, 1.0]], 0.0, 0.5).unwrap();
        let u = ScalarField::zeros(&g, "u");
        let data = crate::builtin::zero_data(&g, None);
        let result = SolveResult {
            v: u.clone(),
            u,
            per_step: vec![],
            eps_used: 1e-3,
        };
        assert!(matches!(
            quasiconvexity_check(&result, &data),
            Err(Error::MissingDerivativeData(_))
        ));
    }
}
