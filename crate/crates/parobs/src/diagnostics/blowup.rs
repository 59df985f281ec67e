//! Hyperbolic rescaling u(r x, r t)/r^{3/2} around a free boundary point,
//! profile fitting, and the non-degeneracy growth constant.

use serde::{Deserialize, Serialize};

use crate::diagnostics::{fit_loglog, LogLogFit};
use crate::error::{Error, Result};
use crate::grid::{make_grid, Geometry, Grid, ScalarField};
use crate::reference::signorini_profile;

/// Reference lattice resolution of the rescaled window: x1 in [-1,1] with
/// `LATTICE_N` nodes, x2 in [0,1], t in [-1,1] with `LATTICE_NT` levels.
pub const LATTICE_N: usize = 41;
pub const LATTICE_NT: usize = 21;

fn reference_lattice(dim: usize) -> Grid {
    match dim {
        1 => make_grid(
            1,
            Geometry::Box,
            LATTICE_N,
            LATTICE_NT,
            &[[-1.0, 1.0]],
            -1.0,
            2.0,
        )
        .unwrap(),
        _ => make_grid(
            2,
            Geometry::HalfBoxWithGamma,
            LATTICE_N,
            LATTICE_NT,
            &[[-1.0, 1.0], [0.0, 1.0]],
            -1.0,
            2.0,
        )
        .unwrap(),
    }
}

/// Bilinear (space) and linear (time) interpolation of a field at a physical
/// point. The caller guarantees the point is inside the grid.
fn interpolate(field: &ScalarField, x: &[f64], t: f64) -> f64 {
    let g = &field.grid;
    let tf = ((t - g.t0) / g.dt).clamp(0.0, (g.n_time - 1) as f64);
    let k0 = (tf.floor() as usize).min(g.n_time - 2);
    let wt = tf - k0 as f64;
    let sample_level = |k: usize| -> f64 {
        match g.dim {
            1 => {
                let xf = ((x[0] - g.extent[0][0]) / g.h).clamp(0.0, (g.n_space - 1) as f64);
                let i0 = (xf.floor() as usize).min(g.n_space - 2);
                let wx = xf - i0 as f64;
                field.at(k, i0) * (1.0 - wx) + field.at(k, i0 + 1) * wx
            }
            _ => {
                let xf = ((x[0] - g.extent[0][0]) / g.h).clamp(0.0, (g.n_space - 1) as f64);
                let yf = ((x[1] - g.extent[1][0]) / g.h2).clamp(0.0, (g.n_space - 1) as f64);
                let i0 = (xf.floor() as usize).min(g.n_space - 2);
                let j0 = (yf.floor() as usize).min(g.n_space - 2);
                let wx = xf - i0 as f64;
                let wy = yf - j0 as f64;
                field.at(k, g.idx2(i0, j0)) * (1.0 - wx) * (1.0 - wy)
                    + field.at(k, g.idx2(i0 + 1, j0)) * wx * (1.0 - wy)
                    + field.at(k, g.idx2(i0, j0 + 1)) * (1.0 - wx) * wy
                    + field.at(k, g.idx2(i0 + 1, j0 + 1)) * wx * wy
            }
        }
    };
    sample_level(k0) * (1.0 - wt) + sample_level(k0 + 1) * wt
}

/// Rescales u about `point` = (x0, t0): values u(x0 + r x, t0 + r t)/r^{3/2}
/// on the fixed reference lattice.
pub fn hyperbolic_blowup(u: &ScalarField, point: ([f64; 2], f64), r: f64) -> Result<ScalarField> {
    let g = &u.grid;
    let (x0, t0) = point;
    // the mapped window must stay inside the source grid
    let inside = |x: f64, axis: usize| {
        x >= g.extent[axis][0] - 1e-12 && x <= g.extent[axis][1] + 1e-12
    };
    let t_end = g.t0 + (g.n_time - 1) as f64 * g.dt;
    let x2_max = if g.dim == 2 { r } else { 0.0 };
    let corners_ok = inside(x0[0] - r, 0)
        && inside(x0[0] + r, 0)
        && (g.dim == 1 || (inside(x0[1], 1) && inside(x0[1] + x2_max, 1)))
        && t0 - r >= g.t0 - 1e-12
        && t0 + r <= t_end + 1e-12;
    if !corners_ok {
        return Err(Error::WindowOutsideGrid { r });
    }
    let lattice = reference_lattice(g.dim);
    let scale = r.powf(1.5);
    let mut out = ScalarField::zeros(&lattice, &format!("{}_rescaled", u.label));
    for k in 0..lattice.n_time {
        let t = t0 + r * lattice.time(k);
        for node in 0..lattice.space_len() {
            let val = match g.dim {
                1 => {
                    let x = x0[0] + r * lattice.coord(0, node);
                    interpolate(u, &[x], t)
                }
                _ => {
                    let (i, j) = (node % lattice.n_space, node / lattice.n_space);
                    let x = [
                        x0[0] + r * lattice.coord(0, i),
                        x0[1] + r * lattice.coord(1, j),
                    ];
                    interpolate(u, &x, t)
                }
            };
            out.level_mut(k)[node] = val / scale;
        }
    }
    Ok(out)
}

/// Best traveling-profile parameters for a rescaled field.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BlowupFit {
    pub omega_hat: f64,
    pub rotation_hat: f64,
    pub linf_error: f64,
}

/// Max-norm distance between the rescaled field and the profile with the
/// given parameters, restricted to the contact-adjacent half of the lattice
/// (x2 <= 1/2); the outer region is dominated by far-field data.
fn profile_distance(rescaled: &ScalarField, omega: f64, rotation: f64) -> f64 {
    let g = &rescaled.grid;
    let mut worst = 0.0f64;
    for k in 0..g.n_time {
        let t = g.time(k);
        for node in 0..g.space_len() {
            let (x1, x2) = match g.dim {
                1 => (g.coord(0, node), 0.0),
                _ => (
                    g.coord(0, node % g.n_space),
                    g.coord(1, node / g.n_space),
                ),
            };
            if x2 > 0.5 {
                continue;
            }
            let p = signorini_profile(&[x1, x2], t, omega, rotation);
            worst = worst.max((rescaled.at(k, node) - p).abs());
        }
    }
    worst
}

fn golden_section(mut lo: f64, mut hi: f64, f: &dyn Fn(f64) -> f64) -> (f64, f64) {
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - phi * (hi - lo);
    let mut b = lo + phi * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    for _ in 0..40 {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = f(b);
        }
    }
    let m = 0.5 * (lo + hi);
    (m, f(m))
}

/// Two-parameter fit of the rescaled field against the traveling profile:
/// a joint coarse scan locates the basin, a fine speed scan at step 0.01
/// narrows it, and golden-section passes refine both parameters.
pub fn fit_blowup_profile(rescaled: &ScalarField) -> BlowupFit {
    let rot_range = std::f64::consts::FRAC_PI_4;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    let mut omega = -2.0;
    while omega <= 2.0 + 1e-12 {
        let mut rot = -rot_range;
        while rot <= rot_range + 1e-12 {
            let err = profile_distance(rescaled, omega, rot);
            if err < best.0 {
                best = (err, omega, rot);
            }
            rot += 0.05;
        }
        omega += 0.05;
    }
    let (_, mut omega0, mut rot0) = best;
    let mut w = (omega0 - 0.05).max(-2.0);
    let mut fine = (f64::INFINITY, omega0);
    while w <= (omega0 + 0.05).min(2.0) + 1e-12 {
        let err = profile_distance(rescaled, w, rot0);
        if err < fine.0 {
            fine = (err, w);
        }
        w += 0.01;
    }
    omega0 = fine.1;
    for _ in 0..2 {
        let (o, _) = golden_section((omega0 - 0.02).max(-2.0), (omega0 + 0.02).min(2.0), &|w| {
            profile_distance(rescaled, w, rot0)
        });
        omega0 = o;
        let (r, _) = golden_section(
            (rot0 - 0.06).max(-rot_range),
            (rot0 + 0.06).min(rot_range),
            &|r| profile_distance(rescaled, omega0, r),
        );
        rot0 = r;
    }
    let linf_error = profile_distance(rescaled, omega0, rot0);
    BlowupFit {
        omega_hat: omega0,
        rotation_hat: rot0,
        linf_error,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NondegeneracyReport {
    /// Geometric mean of S(r)/r^{3/2} over the smallest four radii.
    pub l_hat: f64,
    /// Fitted growth exponent of S(r) = sup over the space-time ball.
    pub growth: LogLogFit,
    pub degenerate: bool,
    pub table: Vec<(f64, f64)>,
}

/// Growth constant l = limsup |u| / r^{3/2} over space-time Euclidean balls.
pub fn nondegeneracy_l(
    u: &ScalarField,
    point: ([f64; 2], f64),
    radii: &[f64],
) -> Result<NondegeneracyReport> {
    let g = &u.grid;
    let (x0, t0) = point;
    let mut table = Vec::with_capacity(radii.len());
    for &r in radii {
        if r < 2.0 * g.h {
            return Err(Error::RadiiUnresolvable(format!(
                "growth radius {r} under two cells"
            )));
        }
        let mut sup = 0.0f64;
        let mut any = false;
        for k in 0..g.n_time {
            let dt = g.time(k) - t0;
            if dt.abs() > r {
                continue;
            }
            let rem2 = r * r - dt * dt;
            for node in 0..g.space_len() {
                let (x1, x2) = match g.dim {
                    1 => (g.coord(0, node), 0.0),
                    _ => (
                        g.coord(0, node % g.n_space),
                        g.coord(1, node / g.n_space),
                    ),
                };
                let dx = x1 - x0[0];
                let dy = x2 - x0[1];
                if dx * dx + dy * dy <= rem2 {
                    sup = sup.max(u.at(k, node).abs());
                    any = true;
                }
            }
        }
        if !any {
            return Err(Error::RadiiUnresolvable(format!(
                "ball of radius {r} contains no nodes"
            )));
        }
        table.push((r, sup));
    }
    let mut sorted = table.clone();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let smallest: Vec<&(f64, f64)> = sorted.iter().take(4).collect();
    let l_hat = if smallest.iter().any(|(_, s)| *s <= 0.0) {
        0.0
    } else {
        let log_mean: f64 = smallest
            .iter()
            .map(|&&(r, s)| (s / r.powf(1.5)).ln())
            .sum::<f64>()
            / smallest.len() as f64;
        log_mean.exp()
    };
    let growth = fit_loglog(&table).unwrap_or(LogLogFit {
        exponent: f64::NAN,
        intercept: 0.0,
        residual: f64::INFINITY,
        points: 0,
    });
    let degenerate = l_hat < 1e-10 || !growth.exponent.is_finite() || growth.exponent > 1.75;
    Ok(NondegeneracyReport {
        l_hat,
        growth,
        degenerate,
        table,
    })
}
