//! IMEX step for the fractional prototype on the periodic line.
//!
//! The linear part is the Fourier multiplier |k|^{2s}; each step solves
//!   (u_next - u_prev)/dt = -L^s u_next - beta(u_star - psi) - f
//! by Picard iteration on the penalty term, with the implicit linear part
//! inverted exactly per mode.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{Geometry, Grid};
use crate::penalty::beta_and_prime;
use crate::solvers::{NewtonInfo, ProblemSpec};

pub(crate) const PICARD_MAX_ITERS: usize = 200;
const PICARD_TOL: f64 = 1e-10;

/// Spectral workspace for one (grid, s) pair.
pub struct SpectralLine {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// |k|^{2s} per mode, frequencies 2 pi j / L with j in [-n/2, n/2).
    pub multipliers: Vec<f64>,
}

impl SpectralLine {
    pub fn new(grid: &Grid, s: f64) -> Result<Self> {
        if grid.geometry != Geometry::PeriodicLine {
            return Err(Error::GeometryMismatch(
                "spectral line requires periodic geometry".into(),
            ));
        }
        let n = grid.n_space;
        let length = grid.extent[0][1] - grid.extent[0][0];
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let multipliers = (0..n)
            .map(|k| {
                let j = if k <= n / 2 { k as i64 } else { k as i64 - n as i64 };
                let kappa = 2.0 * std::f64::consts::PI * j as f64 / length;
                kappa.abs().powf(2.0 * s)
            })
            .collect();
        Ok(SpectralLine {
            n,
            fwd,
            inv,
            multipliers,
        })
    }

    fn to_modes(&self, x: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fwd.process(&mut buf);
        buf
    }

    fn to_values(&self, mut modes: Vec<Complex64>) -> Vec<f64> {
        self.inv.process(&mut modes);
        let scale = 1.0 / self.n as f64;
        modes.iter().map(|c| c.re * scale).collect()
    }

    /// Applies the fractional Laplacian L^s.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut modes = self.to_modes(x);
        for (m, &lam) in modes.iter_mut().zip(&self.multipliers) {
            *m *= lam;
        }
        self.to_values(modes)
    }

    /// Solves (I/dt + L^s) z = rhs exactly per mode.
    pub fn solve_implicit(&self, rhs: &[f64], dt: f64) -> Vec<f64> {
        let mut modes = self.to_modes(rhs);
        for (m, &lam) in modes.iter_mut().zip(&self.multipliers) {
            *m /= 1.0 / dt + lam;
        }
        self.to_values(modes)
    }

    /// Dense symmetric matrix of L^s, built from the circulant cosine sum so
    /// the reference route shares no transform code with the fast path.
    pub fn dense_matrix(grid: &Grid, s: f64) -> Vec<Vec<f64>> {
        let n = grid.n_space;
        let length = grid.extent[0][1] - grid.extent[0][0];
        let lam = |k: usize| {
            let j = if k <= n / 2 { k as i64 } else { k as i64 - n as i64 };
            let kappa = 2.0 * std::f64::consts::PI * j as f64 / length;
            kappa.abs().powf(2.0 * s)
        };
        // first row of the circulant; A[i][j] = row[(i - j) mod n]
        let mut row = vec![0.0; n];
        for (d, r) in row.iter_mut().enumerate() {
            let mut sum = 0.0;
            for k in 0..n {
                sum += lam(k) * (2.0 * std::f64::consts::PI * (k * d) as f64 / n as f64).cos();
            }
            *r = sum / n as f64;
        }
        (0..n)
            .map(|i| (0..n).map(|j| row[(n + i - j) % n]).collect())
            .collect()
    }
}

/// One IMEX step. Reports the residual evaluated with the final iterate
/// inside the penalty.
pub fn step_fractional(
    u_prev: &[f64],
    spec: &ProblemSpec,
    grid: &Grid,
    level_next: usize,
    line: &SpectralLine,
) -> Result<(Vec<f64>, NewtonInfo)> {
    let n = grid.n_space;
    if u_prev.len() != n {
        return Err(Error::ShapeMismatch {
            expected: n,
            got: u_prev.len(),
        });
    }
    let psi = spec.data.psi.level(level_next);
    let f = spec.data.f.level(level_next);
    let dt = grid.dt;
    let mut u_star = u_prev.to_vec();
    let mut iters = 0;
    let u_next = loop {
        iters += 1;
        let rhs: Vec<f64> = (0..n)
            .map(|i| {
                let (b, _) = beta_and_prime(spec.eps, u_star[i] - psi[i]);
                u_prev[i] / dt - b - f[i]
            })
            .collect();
        let u_new = line.solve_implicit(&rhs, dt);
        let update = u_new
            .iter()
            .zip(&u_star)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if update <= PICARD_TOL {
            break u_new;
        }
        if iters >= PICARD_MAX_ITERS {
            return Err(Error::PicardStalled {
                level: level_next,
                update,
                iters,
            });
        }
        u_star = u_new;
    };
    // residual with u_next in the penalty
    let lsu = line.apply(&u_next);
    let residual = (0..n).fold(0.0f64, |m, i| {
        let (b, _) = beta_and_prime(spec.eps, u_next[i] - psi[i]);
        m.max(((u_next[i] - u_prev[i]) / dt + lsu[i] + b + f[i]).abs())
    });
    Ok((
        u_next,
        NewtonInfo {
            iters,
            residual,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    fn periodic_grid(n: usize) -> Grid {
        make_grid(
            1,
            Geometry::PeriodicLine,
            n,
            9,
            &[[0.0, 2.0 * std::f64::consts::PI]],
            0.0,
            0.08,
        )
        .unwrap()
    }

    #[test]
    fn multiplier_on_cosine_mode() {
        // (-lap)^s cos(kx) = |k|^{2s} cos(kx); s = 0.5, k = 2 gives factor 2
        let g = periodic_grid(64);
        let line = SpectralLine::new(&g, 0.5).unwrap();
        let x: Vec<f64> = (0..64).map(|i| (2.0 * g.coord(0, i)).cos()).collect();
        let y = line.apply(&x);
        for i in 0..64 {
            assert!((y[i] - 2.0 * x[i]).abs() < 1e-12, "node {i}");
        }
    }

    #[test]
    fn dense_matrix_matches_fast_apply() {
        let g = periodic_grid(32);
        for &s in &[0.25, 0.5, 0.75, 1.0] {
            let line = SpectralLine::new(&g, s).unwrap();
            let dense = SpectralLine::dense_matrix(&g, s);
            let x: Vec<f64> = (0..32).map(|i| ((i * i) as f64 * 0.13).sin()).collect();
            let fast = line.apply(&x);
            for i in 0..32 {
                let slow: f64 = dense[i].iter().zip(&x).map(|(a, b)| a * b).sum();
                assert!((fast[i] - slow).abs() < 1e-9, "s={s} node {i}");
            }
        }
    }
}
