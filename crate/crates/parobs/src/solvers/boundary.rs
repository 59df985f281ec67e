//! Backward-Euler steps for the boundary obstacle prototypes on the half-box.
//!
//! The marched variable is the subtracted field U = u - psi~ (obstacle zero
//! on Gamma), so the interior satisfies the heat equation with forcing -f and
//! the contact line carries the penalized flux condition through a ghost-node
//! closure:
//!
//!   nondynamic:  dU/dx2 = beta(U)
//!   dynamic:     dU/dx2 - alpha dU/dt = beta(U) + alpha psi~_t
//!
//! Eliminating the ghost value keeps the Newton matrix symmetric once the
//! Gamma rows are weighted by 1/2 (half cells).

use crate::error::{Error, Result};
use crate::grid::{Geometry, Grid};
use crate::penalty::{beta_and_prime, PenaltyParams};
use crate::solvers::linalg::{conjugate_gradient, SpdOperator};
use crate::solvers::thick::{newton_tol, NEWTON_DAMPING_FLOOR, NEWTON_MAX_ITERS};
use crate::solvers::{NewtonInfo, ProblemSpec, Prototype};

struct BoundarySystem<'a> {
    grid: &'a Grid,
    eps: PenaltyParams,
    dt: f64,
    /// Dynamic coefficient; zero for the nondynamic problem.
    alpha: f64,
    u_prev: &'a [f64],
    /// psi~_t restricted to Gamma (full slice, read at j = 0).
    psi_t: &'a [f64],
    f: &'a [f64],
    free: Vec<bool>,
}

impl BoundarySystem<'_> {
    /// Unscaled residual; zero at Dirichlet nodes.
    fn residual(&self, u: &[f64]) -> Vec<f64> {
        let g = self.grid;
        let n = g.n_space;
        let hx2 = g.h * g.h;
        let hy = g.h2;
        let hy2 = hy * hy;
        let mut r = vec![0.0; u.len()];
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                let c = g.idx2(i, j);
                let lap = (u[c - 1] - 2.0 * u[c] + u[c + 1]) / hx2
                    + (u[g.idx2(i, j - 1)] - 2.0 * u[c] + u[g.idx2(i, j + 1)]) / hy2;
                r[c] = (u[c] - self.u_prev[c]) / self.dt - lap + self.f[c];
            }
        }
        for i in 1..n - 1 {
            let c = g.idx2(i, 0);
            let up = g.idx2(i, 1);
            let (b, _) = beta_and_prime(self.eps, u[c]);
            // ghost value u(i,-1) = u(i,1) - 2 hy * (beta + alpha dU/dt + alpha psi_t)
            let flux = b + self.alpha * (u[c] - self.u_prev[c]) / self.dt
                + self.alpha * self.psi_t[c];
            let lap = (u[c - 1] - 2.0 * u[c] + u[c + 1]) / hx2
                + (2.0 * u[up] - 2.0 * u[c]) / hy2
                - 2.0 * flux / hy;
            r[c] = (u[c] - self.u_prev[c]) / self.dt - lap + self.f[c];
        }
        r
    }

    fn beta_prime_gamma(&self, u: &[f64]) -> Vec<f64> {
        let g = self.grid;
        (0..g.n_space)
            .map(|i| beta_and_prime(self.eps, u[g.idx2(i, 0)]).1)
            .collect()
    }
}

/// Newton matrix with Gamma rows scaled by 1/2. SPD on the free nodes.
struct BoundaryJacobian<'a> {
    grid: &'a Grid,
    dt: f64,
    alpha: f64,
    bprime_gamma: &'a [f64],
    free: &'a [bool],
}

impl SpdOperator for BoundaryJacobian<'_> {
    fn len(&self) -> usize {
        self.grid.space_len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let g = self.grid;
        let n = g.n_space;
        let hx2 = g.h * g.h;
        let hy = g.h2;
        let hy2 = hy * hy;
        let pick = |xx: &[f64], cc: usize| if self.free[cc] { xx[cc] } else { 0.0 };
        for j in 0..n {
            for i in 0..n {
                let c = g.idx2(i, j);
                if !self.free[c] {
                    y[c] = x[c];
                    continue;
                }
                if j == 0 {
                    let gamma_diag = 0.5 * (1.0 / self.dt + 2.0 / hx2 + 2.0 / hy2)
                        + (self.bprime_gamma[i] + self.alpha / self.dt) / hy;
                    y[c] = gamma_diag * x[c]
                        - 0.5 * (pick(x, c - 1) + pick(x, c + 1)) / hx2
                        - pick(x, g.idx2(i, 1)) / hy2;
                } else {
                    let mut v = (1.0 / self.dt + 2.0 / hx2 + 2.0 / hy2) * x[c];
                    v -= (pick(x, c - 1) + pick(x, c + 1)) / hx2;
                    v -= (pick(x, g.idx2(i, j - 1)) + pick(x, g.idx2(i, j + 1))) / hy2;
                    y[c] = v;
                }
            }
        }
    }

    fn diag(&self, d: &mut [f64]) {
        let g = self.grid;
        let n = g.n_space;
        let hx2 = g.h * g.h;
        let hy = g.h2;
        let hy2 = hy * hy;
        for j in 0..n {
            for i in 0..n {
                let c = g.idx2(i, j);
                d[c] = if !self.free[c] {
                    1.0
                } else if j == 0 {
                    0.5 * (1.0 / self.dt + 2.0 / hx2 + 2.0 / hy2)
                        + (self.bprime_gamma[i] + self.alpha / self.dt) / hy
                } else {
                    1.0 / self.dt + 2.0 / hx2 + 2.0 / hy2
                };
            }
        }
    }
}

fn step_boundary(
    u_prev: &[f64],
    spec: &ProblemSpec,
    grid: &Grid,
    level_next: usize,
    alpha: f64,
) -> Result<(Vec<f64>, NewtonInfo)> {
    if grid.geometry != Geometry::HalfBoxWithGamma {
        return Err(Error::GeometryMismatch(
            "boundary obstacle prototypes need the half-box geometry".into(),
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
    let sys = BoundarySystem {
        grid,
        eps: spec.eps,
        dt: grid.dt,
        alpha,
        u_prev,
        psi_t: spec.data.psi_t.level(level_next),
        f: spec.data.f.level(level_next),
        free,
    };
    let mut u = u_prev.to_vec();
    // lateral data is for the original field; subtract the extension
    let psi = spec.data.psi.level(level_next);
    for (b, &nd) in lateral_nodes.iter().enumerate() {
        u[nd] = spec.data.lateral[level_next][b] - psi[nd];
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
        let bprime_gamma = sys.beta_prime_gamma(&u);
        let r = sys.residual(&u);
        let jac = BoundaryJacobian {
            grid,
            dt: grid.dt,
            alpha,
            bprime_gamma: &bprime_gamma,
            free: &sys.free,
        };
        // Gamma rows of the right-hand side carry the same 1/2 weight
        let mut rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        for i in 0..grid.n_space {
            rhs[grid.idx2(i, 0)] *= 0.5;
        }
        let delta = conjugate_gradient(&jac, &rhs, 1e-13);
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

/// One step of the nondynamic (Signorini) boundary obstacle problem on the
/// subtracted field.
pub fn step_signorini(
    u_prev: &[f64],
    spec: &ProblemSpec,
    grid: &Grid,
    level_next: usize,
) -> Result<(Vec<f64>, NewtonInfo)> {
    step_boundary(u_prev, spec, grid, level_next, 0.0)
}

/// One step of the dynamic boundary obstacle problem on the subtracted field.
pub fn step_dynamic(
    u_prev: &[f64],
    spec: &ProblemSpec,
    grid: &Grid,
    level_next: usize,
) -> Result<(Vec<f64>, NewtonInfo)> {
    let alpha = match spec.prototype {
        Prototype::DynamicThin => spec.alpha.ok_or_else(|| Error::ConfigInvalid {
            path: "alpha".into(),
            reason: "dynamic prototype needs alpha".into(),
        })?,
        _ => {
            return Err(Error::GeometryMismatch(
                "step_dynamic requires the dynamic prototype".into(),
            ))
        }
    };
    step_boundary(u_prev, spec, grid, level_next, alpha)
}
