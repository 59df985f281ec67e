//! Coincidence-set extraction, parabolic density of the contact set, and
//! gradient growth exponents near the interface.

use serde::{Deserialize, Serialize};

use crate::diagnostics::{fit_loglog, LogLogFit};
use crate::error::{Error, Result};
use crate::grid::{Geometry, Grid, ScalarField};

/// One time level of the coincidence set: mask over the contact nodes plus
/// sub-cell interface locations found by linear interpolation of u - psi.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FreeBoundarySnapshot {
    pub level: usize,
    pub t: f64,
    /// Indexed like `Grid::contact_nodes()`.
    pub coincidence_mask: Vec<bool>,
    /// Physical positions; the second coordinate is 0 on contact lines.
    pub interface_points: Vec<[f64; 2]>,
}

/// Masks contact nodes with u - psi <= gap_tol per level and locates the
/// crossings of u - psi = gap_tol between masked and unmasked neighbors.
pub fn extract_free_boundary(
    u: &ScalarField,
    psi: &ScalarField,
    gap_tol: f64,
) -> Vec<FreeBoundarySnapshot> {
    let grid = &u.grid;
    let contact = grid.contact_nodes();
    let mut out = Vec::with_capacity(grid.n_time);
    for k in 0..grid.n_time {
        let gap = |c: usize| u.at(k, c) - psi.at(k, c) - gap_tol;
        let mask: Vec<bool> = contact.iter().map(|&c| gap(c) <= 0.0).collect();
        let mut pts = Vec::new();
        let mut cross = |ca: usize, cb: usize, xa: [f64; 2], xb: [f64; 2]| {
            let ga = gap(ca);
            let gb = gap(cb);
            if (ga <= 0.0) != (gb <= 0.0) {
                let s = ga / (ga - gb);
                pts.push([xa[0] + s * (xb[0] - xa[0]), xa[1] + s * (xb[1] - xa[1])]);
            }
        };
        match (grid.dim, grid.geometry) {
            (1, _) => {
                let n = grid.n_space;
                let last = if grid.is_periodic() { n } else { n - 1 };
                for i in 0..last {
                    let inext = (i + 1) % n;
                    let xa = [grid.coord(0, i), 0.0];
                    // unwrap the periodic seam so interpolation stays local
                    let xb = if inext == 0 {
                        [grid.coord(0, i) + grid.h, 0.0]
                    } else {
                        [grid.coord(0, inext), 0.0]
                    };
                    cross(i, inext, xa, xb);
                }
            }
            (2, Geometry::HalfBoxWithGamma) => {
                for i in 0..grid.n_space - 1 {
                    let ca = grid.idx2(i, 0);
                    let cb = grid.idx2(i + 1, 0);
                    cross(ca, cb, [grid.coord(0, i), 0.0], [grid.coord(0, i + 1), 0.0]);
                }
            }
            (2, _) => {
                let n = grid.n_space;
                for j in 0..n {
                    for i in 0..n - 1 {
                        cross(
                            grid.idx2(i, j),
                            grid.idx2(i + 1, j),
                            [grid.coord(0, i), grid.coord(1, j)],
                            [grid.coord(0, i + 1), grid.coord(1, j)],
                        );
                    }
                }
                for i in 0..n {
                    for j in 0..n - 1 {
                        cross(
                            grid.idx2(i, j),
                            grid.idx2(i, j + 1),
                            [grid.coord(0, i), grid.coord(1, j)],
                            [grid.coord(0, i), grid.coord(1, j + 1)],
                        );
                    }
                }
            }
            _ => unreachable!(),
        }
        out.push(FreeBoundarySnapshot {
            level: k,
            t: grid.time(k),
            coincidence_mask: mask,
            interface_points: pts,
        });
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityReport {
    /// (radius, coincidence fraction of the backward contact cylinder).
    pub series: Vec<(f64, f64)>,
    /// min over radii.
    pub c_hat: f64,
}

/// Fraction of the backward contact cylinder {|x' - x0'| <= r} x (t0 - r^2, t0]
/// covered by the coincidence mask.
pub fn parabolic_density(
    snapshots: &[FreeBoundarySnapshot],
    grid: &Grid,
    point: [f64; 2],
    t0: f64,
    radii: &[f64],
) -> Result<DensityReport> {
    let contact = grid.contact_nodes();
    let coords: Vec<[f64; 2]> = contact
        .iter()
        .map(|&c| match (grid.dim, grid.geometry) {
            (1, _) => [grid.coord(0, c), 0.0],
            (2, Geometry::HalfBoxWithGamma) => [grid.coord(0, c % grid.n_space), 0.0],
            (2, _) => [
                grid.coord(0, c % grid.n_space),
                grid.coord(1, c / grid.n_space),
            ],
            _ => unreachable!(),
        })
        .collect();
    let mut series = Vec::with_capacity(radii.len());
    for &r in radii {
        if r < 2.0 * grid.h {
            return Err(Error::RadiiUnresolvable(format!(
                "density radius {r} under two cells"
            )));
        }
        let mut masked = 0usize;
        let mut total = 0usize;
        for snap in snapshots {
            if snap.t > t0 + 1e-12 || snap.t <= t0 - r * r - 1e-12 {
                continue;
            }
            for (m, xy) in snap.coincidence_mask.iter().zip(&coords) {
                let dx = xy[0] - point[0];
                let dy = xy[1] - point[1];
                if dx * dx + dy * dy <= r * r + 1e-14 {
                    total += 1;
                    if *m {
                        masked += 1;
                    }
                }
            }
        }
        if total == 0 {
            return Err(Error::RadiiUnresolvable(format!(
                "empty cylinder at radius {r}"
            )));
        }
        series.push((r, masked as f64 / total as f64));
    }
    let c_hat = series.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    Ok(DensityReport { series, c_hat })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GradientExponentReport {
    /// Growth of sup |grad_h (u - psi)| with parabolic distance to the
    /// interface.
    pub gradient_fit: LogLogFit,
    /// Growth of |d(u - psi)/dx2| on the contact line (half-box only).
    pub normal_fit: Option<LogLogFit>,
    /// (distance, sup |grad|) samples behind gradient_fit.
    pub table: Vec<(f64, f64)>,
}

/// Discrete gradient magnitude of one slice (centered interior, one-sided at
/// edges).
fn gradient_magnitude(slice: &[f64], grid: &Grid) -> Vec<f64> {
    let n = grid.n_space;
    let mut out = vec![0.0; slice.len()];
    match grid.dim {
        1 => {
            for i in 0..n {
                let d = if i == 0 {
                    (slice[1] - slice[0]) / grid.h
                } else if i == n - 1 {
                    (slice[n - 1] - slice[n - 2]) / grid.h
                } else {
                    (slice[i + 1] - slice[i - 1]) / (2.0 * grid.h)
                };
                out[i] = d.abs();
            }
        }
        2 => {
            for j in 0..n {
                for i in 0..n {
                    let c = grid.idx2(i, j);
                    let dx = if i == 0 {
                        (slice[c + 1] - slice[c]) / grid.h
                    } else if i == n - 1 {
                        (slice[c] - slice[c - 1]) / grid.h
                    } else {
                        (slice[c + 1] - slice[c - 1]) / (2.0 * grid.h)
                    };
                    let dy = if j == 0 {
                        (slice[grid.idx2(i, 1)] - slice[c]) / grid.h2
                    } else if j == n - 1 {
                        (slice[c] - slice[grid.idx2(i, n - 2)]) / grid.h2
                    } else {
                        (slice[grid.idx2(i, j + 1)] - slice[grid.idx2(i, j - 1)])
                            / (2.0 * grid.h2)
                    };
                    out[c] = dx.hypot(dy);
                }
            }
        }
        _ => unreachable!(),
    }
    out
}

/// Fits the growth exponent of the gradient of u - psi with parabolic
/// distance d((x,t), interface) = sqrt(|x - p|^2 + |t - s|), sampled as the
/// sup over multiplicative distance bands around each requested radius.
pub fn holder_exponent_gradient(
    u: &ScalarField,
    psi: &ScalarField,
    snapshots: &[FreeBoundarySnapshot],
    radii: &[f64],
) -> Result<GradientExponentReport> {
    let grid = &u.grid;
    let pts: Vec<([f64; 2], f64)> = snapshots
        .iter()
        .flat_map(|s| s.interface_points.iter().map(move |p| (*p, s.t)))
        .collect();
    if pts.is_empty() {
        return Err(Error::EmptyFreeBoundary);
    }
    let sl = grid.space_len();
    let n = grid.n_space;

    // subtracted field and its gradient per level
    let mut grads: Vec<Vec<f64>> = Vec::with_capacity(grid.n_time);
    for k in 0..grid.n_time {
        let sub: Vec<f64> = (0..sl).map(|c| u.at(k, c) - psi.at(k, c)).collect();
        grads.push(gradient_magnitude(&sub, grid));
    }

    let node_xy = |c: usize| -> [f64; 2] {
        match grid.dim {
            1 => [grid.coord(0, c), 0.0],
            _ => [grid.coord(0, c % n), grid.coord(1, c / n)],
        }
    };
    let parabolic_distance = |xy: [f64; 2], t: f64| -> f64 {
        pts.iter()
            .map(|&(p, s)| {
                let dx = xy[0] - p[0];
                let dy = xy[1] - p[1];
                (dx * dx + dy * dy + (t - s).abs()).sqrt()
            })
            .fold(f64::INFINITY, f64::min)
    };

    let band = 1.4_f64;
    let mut table = Vec::with_capacity(radii.len());
    let mut gamma_table = Vec::with_capacity(radii.len());
    let is_halfbox = grid.geometry == Geometry::HalfBoxWithGamma;
    for &d in radii {
        let mut sup = 0.0f64;
        let mut sup_gamma = 0.0f64;
        for k in 0..grid.n_time {
            let t = grid.time(k);
            for c in 0..sl {
                let dist = parabolic_distance(node_xy(c), t);
                if dist >= d / band && dist <= d * band {
                    sup = sup.max(grads[k][c]);
                }
            }
            if is_halfbox {
                for i in 0..n {
                    let c0 = grid.idx2(i, 0);
                    let xy = node_xy(c0);
                    let dist = parabolic_distance(xy, t);
                    if dist >= d / band && dist <= d * band {
                        let w = (-3.0 * (u.at(k, c0) - psi.at(k, c0))
                            + 4.0 * (u.at(k, grid.idx2(i, 1)) - psi.at(k, grid.idx2(i, 1)))
                            - (u.at(k, grid.idx2(i, 2)) - psi.at(k, grid.idx2(i, 2))))
                            / (2.0 * grid.h2);
                        sup_gamma = sup_gamma.max(w.abs());
                    }
                }
            }
        }
        table.push((d, sup));
        gamma_table.push((d, sup_gamma));
    }
    let gradient_fit = fit_loglog(&table).ok_or_else(|| {
        Error::RadiiUnresolvable("fewer than 4 usable gradient samples".into())
    })?;
    let normal_fit = if is_halfbox { fit_loglog(&gamma_table) } else { None };
    Ok(GradientExponentReport {
        gradient_fit,
        normal_fit,
        table,
    })
}
