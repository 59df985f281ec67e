//! Backward-Euler step for the thick obstacle prototype: the whole slice is
//! penalized and Dirichlet data is imposed exactly on the lateral boundary.
//!
//! Each step solves
//!   (u - u_prev)/dt = lap_h u - beta(u - psi(t_next)) - f(t_next)
//! by damped Newton; the Jacobian is an M-matrix (beta' >= 0), solved by a
//! tridiagonal sweep in 1D and preconditioned CG in 2D.

use crate::error::{Error, Result};
use crate::grid::{Geometry, Grid};
use crate::penalty::{beta_and_prime, PenaltyParams};
use crate::solvers::linalg::{conjugate_gradient, solve_tridiagonal, SpdOperator};
use crate::solvers::{NewtonInfo, ProblemSpec};

pub(crate) const NEWTON_MAX_ITERS: usize = 50;
pub(crate) const NEWTON_DAMPING_FLOOR: f64 = 1.0 / 1024.0;

/// Newton tolerance: max-norm residual <= 1e-10 * (1 + |u|_inf).
pub(crate) fn newton_tol(u: &[f64]) -> f64 {
    1e-10 * (1.0 + u.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

struct ThickSystem<'a> {
    grid: &'a Grid,
    eps: PenaltyParams,
    dt: f64,
    u_prev: &'a [f64],
    psi: &'a [f64],
    f: &'a [f64],
    free: Vec<bool>,
}

impl ThickSystem<'_> {
    /// Unscaled residual on free nodes (zero on Dirichlet nodes).
    fn residual(&self, u: &[f64]) -> Vec<f64> {
        let g = self.grid;
        let lap = crate::grid::fd_laplacian(u, g, None).expect("shape checked");
        let mut r = vec![0.0; u.len()];
        for c in 0..u.len() {
            if self.free[c] {
                let (b, _) = beta_and_prime(self.eps, u[c] - self.psi[c]);
                r[c] = (u[c] - self.u_prev[c]) / self.dt - lap[c] + b + self.f[c];
            }
        }
        r
    }

    fn beta_prime(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(self.psi)
            .map(|(&ui, &pi)| beta_and_prime(self.eps, ui - pi).1)
            .collect()
    }
}

struct ThickJacobian<'a> {
    grid: &'a Grid,
    dt: f64,
    bprime: &'a [f64],
    free: &'a [bool],
}

impl SpdOperator for ThickJacobian<'_> {
    fn len(&self) -> usize {
        self.grid.space_len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let g = self.grid;
        let n = g.n_space;
        let hx2 = g.h * g.h;
        match g.dim {
            1 => {
                for i in 0..n {
                    if !self.free[i] {
                        y[i] = x[i];
                        continue;
                    }
                    let left = if i > 0 && self.free[i - 1] { x[i - 1] } else { 0.0 };
                    let right = if i + 1 < n && self.free[i + 1] { x[i + 1] } else { 0.0 };
                    y[i] = (1.0 / self.dt + 2.0 / hx2 + self.bprime[i]) * x[i]
                        - (left + right) / hx2;
                }
            }
            2 => {
                let hy2 = g.h2 * g.h2;
                for j in 0..n {
                    for i in 0..n {
                        let c = g.idx2(i, j);
                        if !self.free[c] {
                            y[c] = x[c];
                            continue;
                        }
                        let pick = |cc: usize| if self.free[cc] { x[cc] } else { 0.0 };
                        let mut v =
                            (1.0 / self.dt + 2.0 / hx2 + 2.0 / hy2 + self.bprime[c]) * x[c];
                        v -= (pick(c - 1) + pick(c + 1)) / hx2;
                        v -= (pick(g.idx2(i, j - 1)) + pick(g.idx2(i, j + 1))) / hy2;
                        y[c] = v;
                    }
                }
            }
            _ => unreachable!(),
        }
    }

    fn diag(&self, d: &mut [f64]) {
        let g = self.grid;
        let hx2 = g.h * g.h;
        let lap_diag = match g.dim {
            1 => 2.0 / hx2,
            _ => 2.0 / hx2 + 2.0 / (g.h2 * g.h2),
        };
        for c in 0..g.space_len() {
            d[c] = if self.free[c] {
                1.0 / self.dt + lap_diag + self.bprime[c]
            } else {
                1.0
            };
        }
    }
}

/// One implicit step of the thick prototype. `level_next` indexes the data
/// fields and the lateral values at the target time.
pub fn step_thick(
    u_prev: &[f64],
    spec: &ProblemSpec,
    grid: &Grid,
    level_next: usize,
) -> Result<(Vec<f64>, NewtonInfo)> {
    if grid.geometry != Geometry::Box {
        return Err(Error::GeometryMismatch(
            "thick prototype runs on box geometry".into(),
        ));
    }
    let sl = grid.space_len();
    if u_prev.len() != sl {
        return Err(Error::ShapeMismatch {
            expected: sl,
            got: u_prev.len(),
        });
    }
    let lateral_nodes = grid.lateral_nodes();
    let mut free = vec![true; sl];
    for &nd in &lateral_nodes {
        free[nd] = false;
    }
    let psi = spec.data.psi.level(level_next);
    let f = spec.data.f.level(level_next);
    let sys = ThickSystem {
        grid,
        eps: spec.eps,
        dt: grid.dt,
        u_prev,
        psi,
        f,
        free,
    };

    let mut u = u_prev.to_vec();
    for (b, &nd) in lateral_nodes.iter().enumerate() {
        u[nd] = spec.data.lateral[level_next][b];
    }

    let max_abs = |r: &[f64]| r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut res = max_abs(&sys.residual(&u));
    let mut iters = 0;
    while res > newton_tol(&u) {
        if iters >= NEWTON_MAX_ITERS {
            return Err(Error::NewtonDiverged {
                level: level_next,
                residual: res,
                iters,
            });
        }
        iters += 1;
        let bprime = sys.beta_prime(&u);
        let r = sys.residual(&u);
        let delta = match grid.dim {
            1 => {
                // direct tridiagonal solve on the interior unknowns
                let n = grid.n_space;
                let hx2 = grid.h * grid.h;
                let m = n - 2;
                let mut lower = vec![-1.0 / hx2; m];
                let mut upper = vec![-1.0 / hx2; m];
                lower[0] = 0.0;
                upper[m - 1] = 0.0;
                let diag: Vec<f64> = (1..n - 1)
                    .map(|i| 1.0 / grid.dt + 2.0 / hx2 + bprime[i])
                    .collect();
                let rhs: Vec<f64> = (1..n - 1).map(|i| -r[i]).collect();
                let inner = solve_tridiagonal(&lower, &diag, &upper, &rhs);
                let mut d = vec![0.0; n];
                d[1..n - 1].copy_from_slice(&inner);
                d
            }
            _ => {
                let jac = ThickJacobian {
                    grid,
                    dt: grid.dt,
                    bprime: &bprime,
                    free: &sys.free,
                };
                let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
                conjugate_gradient(&jac, &rhs, 1e-13)
            }
        };
        // damp: halve until the residual decreases, floored at 2^-10
        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = u
                .iter()
                .zip(&delta)
                .map(|(&ui, &di)| ui + lambda * di)
                .collect();
            let trial_res = max_abs(&sys.residual(&trial));
            if trial_res < res || lambda <= NEWTON_DAMPING_FLOOR {
                u = trial;
                res = trial_res;
                break;
            }
            lambda *= 0.5;
        }
    }
    Ok((
        u,
        NewtonInfo {
            iters,
            residual: res,
        },
    ))
}
