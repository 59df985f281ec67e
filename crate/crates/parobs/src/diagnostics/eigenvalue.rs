//! Smallest eigenvalue of the Gaussian-weighted Rayleigh quotient on the
//! half-plane,
//!
//!   lambda = inf  int |grad w|^2 e^{-|y|^2/4}  /  int w^2 e^{-|y|^2/4},
//!
//! over functions vanishing on a constraint set of the contact line. The
//! half-line slit reproduces the homogeneity-1/2 ground state (lambda = 1/4);
//! the full line gives lambda = 1/2 (eigenfunction y2); no constraint admits
//! constants (lambda = 0). Discretized with edge-midpoint weights and solved
//! by shifted inverse-power iteration with CG inner solves.

use crate::error::{Error, Result};
use crate::solvers::linalg::{conjugate_gradient, SpdOperator};

/// Dirichlet constraint imposed on the contact line {x2 = 0}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlitConstraint {
    /// No constraint: constants are admissible.
    None,
    /// w = 0 on {x2 = 0, x1 <= 0}.
    HalfLine,
    /// w = 0 on the whole contact line.
    FullLine,
}

struct WeightedForms {
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
    /// Edge weights e^{-|y_mid|^2/4} * cell volume for x- and y-edges.
    wx: Vec<f64>,
    wy: Vec<f64>,
    /// Nodal mass weights.
    mass: Vec<f64>,
    fixed: Vec<bool>,
}

impl WeightedForms {
    fn build(truncation: f64, resolution: usize, constraint: SlitConstraint) -> Self {
        let nx = resolution;
        let ny = resolution / 2 + 1;
        let hx = 2.0 * truncation / (nx - 1) as f64;
        let hy = truncation / (ny - 1) as f64;
        let x = |i: usize| -truncation + i as f64 * hx;
        let y = |j: usize| j as f64 * hy;
        let weight = |px: f64, py: f64| (-(px * px + py * py) / 4.0).exp();
        let idx = |i: usize, j: usize| j * nx + i;

        let mut wx = vec![0.0; nx * ny];
        for j in 0..ny {
            let row_vol = if j == 0 || j == ny - 1 { 0.5 } else { 1.0 };
            for i in 0..nx - 1 {
                wx[idx(i, j)] = weight(x(i) + 0.5 * hx, y(j)) * hx * hy * row_vol;
            }
        }
        let mut wy = vec![0.0; nx * ny];
        for j in 0..ny - 1 {
            for i in 0..nx {
                let col_vol = if i == 0 || i == nx - 1 { 0.5 } else { 1.0 };
                wy[idx(i, j)] = weight(x(i), y(j) + 0.5 * hy) * hx * hy * col_vol;
            }
        }
        let mut mass = vec![0.0; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let mut vol = hx * hy;
                if i == 0 || i == nx - 1 {
                    vol *= 0.5;
                }
                if j == 0 || j == ny - 1 {
                    vol *= 0.5;
                }
                mass[idx(i, j)] = weight(x(i), y(j)) * vol;
            }
        }
        let mut fixed = vec![false; nx * ny];
        for i in 0..nx {
            let constrain = match constraint {
                SlitConstraint::None => false,
                SlitConstraint::HalfLine => x(i) <= 0.0,
                SlitConstraint::FullLine => true,
            };
            if constrain {
                fixed[idx(i, 0)] = true;
            }
        }
        WeightedForms {
            nx,
            ny,
            hx,
            hy,
            wx,
            wy,
            mass,
            fixed,
        }
    }

    /// y = K x (weighted stiffness), with constrained nodes pinned.
    fn apply_stiffness(&self, x: &[f64], y: &mut [f64]) {
        let idx = |i: usize, j: usize| j * self.nx + i;
        for v in y.iter_mut() {
            *v = 0.0;
        }
        for j in 0..self.ny {
            for i in 0..self.nx - 1 {
                let a = idx(i, j);
                let b = idx(i + 1, j);
                let xa = if self.fixed[a] { 0.0 } else { x[a] };
                let xb = if self.fixed[b] { 0.0 } else { x[b] };
                let flux = self.wx[a] * (xb - xa) / (self.hx * self.hx);
                if !self.fixed[a] {
                    y[a] -= flux;
                }
                if !self.fixed[b] {
                    y[b] += flux;
                }
            }
        }
        for j in 0..self.ny - 1 {
            for i in 0..self.nx {
                let a = idx(i, j);
                let b = idx(i, j + 1);
                let xa = if self.fixed[a] { 0.0 } else { x[a] };
                let xb = if self.fixed[b] { 0.0 } else { x[b] };
                let flux = self.wy[a] * (xb - xa) / (self.hy * self.hy);
                if !self.fixed[a] {
                    y[a] -= flux;
                }
                if !self.fixed[b] {
                    y[b] += flux;
                }
            }
        }
        for c in 0..x.len() {
            if self.fixed[c] {
                y[c] = x[c];
            }
        }
    }

    fn rayleigh(&self, x: &[f64]) -> f64 {
        let mut kx = vec![0.0; x.len()];
        self.apply_stiffness(x, &mut kx);
        let num: f64 = x
            .iter()
            .zip(&kx)
            .enumerate()
            .filter(|(c, _)| !self.fixed[*c])
            .map(|(_, (a, b))| a * b)
            .sum();
        let den: f64 = x
            .iter()
            .zip(&self.mass)
            .enumerate()
            .filter(|(c, _)| !self.fixed[*c])
            .map(|(_, (a, m))| a * a * m)
            .sum();
        num / den
    }
}

struct ShiftedOperator<'a> {
    forms: &'a WeightedForms,
    shift: f64,
}

impl SpdOperator for ShiftedOperator<'_> {
    fn len(&self) -> usize {
        self.forms.mass.len()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.forms.apply_stiffness(x, y);
        for c in 0..x.len() {
            if !self.forms.fixed[c] {
                y[c] += self.shift * self.forms.mass[c] * x[c];
            }
        }
    }
    fn diag(&self, d: &mut [f64]) {
        let f = self.forms;
        let idx = |i: usize, j: usize| j * f.nx + i;
        for j in 0..f.ny {
            for i in 0..f.nx {
                let c = idx(i, j);
                if f.fixed[c] {
                    d[c] = 1.0;
                    continue;
                }
                let mut v = f.shiftless_diag(i, j);
                v += self.shift * f.mass[c];
                d[c] = v;
            }
        }
    }
}

impl WeightedForms {
    fn shiftless_diag(&self, i: usize, j: usize) -> f64 {
        let idx = |i: usize, j: usize| j * self.nx + i;
        let mut v = 0.0;
        if i > 0 {
            v += self.wx[idx(i - 1, j)] / (self.hx * self.hx);
        }
        if i + 1 < self.nx {
            v += self.wx[idx(i, j)] / (self.hx * self.hx);
        }
        if j > 0 {
            v += self.wy[idx(i, j - 1)] / (self.hy * self.hy);
        }
        if j + 1 < self.ny {
            v += self.wy[idx(i, j)] / (self.hy * self.hy);
        }
        v
    }
}

const POWER_MAX_ITERS: usize = 400;
const POWER_TOL: f64 = 1e-10;
const SHIFT: f64 = 0.05;

/// Estimates the smallest Rayleigh value on {x2 >= 0} within [-R, R]^2 at the
/// given resolution (nodes across the x1 axis; the x2 axis carries half).
pub fn estimate_halfspace_eigenvalue(
    truncation: f64,
    resolution: usize,
    constraint: SlitConstraint,
) -> Result<f64> {
    assert!(truncation >= 5.0, "truncation must cover the Gaussian mass");
    assert!(resolution >= 64, "resolution too coarse");
    let forms = WeightedForms::build(truncation, resolution, constraint);
    let n = forms.mass.len();
    // deterministic start with overlap on all candidate ground states
    let mut x: Vec<f64> = (0..n)
        .map(|c| {
            let i = c % forms.nx;
            let j = c / forms.nx;
            if forms.fixed[c] {
                0.0
            } else {
                1.0 + j as f64 * forms.hy + 0.1 * (i as f64 * 0.37).sin()
            }
        })
        .collect();
    let mut lambda_prev = f64::INFINITY;
    for iter in 0..POWER_MAX_ITERS {
        // rhs = M x
        let rhs: Vec<f64> = (0..n)
            .map(|c| if forms.fixed[c] { 0.0 } else { forms.mass[c] * x[c] })
            .collect();
        let op = ShiftedOperator {
            forms: &forms,
            shift: SHIFT,
        };
        let mut z = conjugate_gradient(&op, &rhs, 1e-12);
        for c in 0..n {
            if forms.fixed[c] {
                z[c] = 0.0;
            }
        }
        let norm: f64 = z
            .iter()
            .zip(&forms.mass)
            .enumerate()
            .filter(|(c, _)| !forms.fixed[*c])
            .map(|(_, (v, m))| v * v * m)
            .sum::<f64>()
            .sqrt();
        for v in z.iter_mut() {
            *v /= norm;
        }
        x = z;
        let lambda = forms.rayleigh(&x);
        if (lambda - lambda_prev).abs() <= POWER_TOL * (1.0 + lambda.abs()) {
            return Ok(lambda);
        }
        lambda_prev = lambda;
        let _ = iter;
    }
    Err(Error::IterationStalled {
        iters: POWER_MAX_ITERS,
        change: (forms.rayleigh(&x) - lambda_prev).abs(),
    })
}
