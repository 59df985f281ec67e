//! Independent reference solvers and closed forms used to validate the
//! penalized marches and the diagnostics: a projected-relaxation solver for
//! the discrete complementarity systems, a per-step obstacle-problem march
//! built on it, the traveling Signorini profile, and separable heat series.

use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField};
use crate::solvers::{assemble_result, ProblemSpec, Prototype, SolveResult, SpectralLine, StepRecord};

/// Matrix-free description of one symmetric positive-definite step system.
pub trait LcpOperator {
    fn len(&self) -> usize;
    /// Row i of A z with the current iterate.
    fn row_apply(&self, i: usize, z: &[f64]) -> f64;
    fn diag(&self, i: usize) -> f64;
    /// Dirichlet rows, set once and skipped by the sweeps.
    fn pinned(&self, _i: usize) -> bool {
        false
    }
}

/// One backward-Euler step posed as a linear complementarity problem.
pub struct LcpStepProblem<'a> {
    pub operator: &'a dyn LcpOperator,
    pub rhs: Vec<f64>,
    pub obstacle: Vec<f64>,
    /// Nodes where z >= obstacle is enforced.
    pub constrained: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepOrder {
    Forward,
    Reverse,
}

/// Outcome of a converged projected-relaxation solve.
pub struct PsorOutcome {
    pub z: Vec<f64>,
    pub sweeps: usize,
    pub defect: f64,
}

/// Projected SOR with the given sweep order. Converged when the residual
/// satisfies, nodewise: |r| <= tol on free nodes; r >= -tol, z >= obstacle
/// and complementarity min(z - obstacle, |r|) <= tol on constrained nodes
/// (the min map bounds the product once either factor is small, and stays
/// meaningful when a far-below surrogate obstacle makes the gap huge).
pub fn psor_solve_ordered(
    problem: &LcpStepProblem,
    relaxation: f64,
    tol: f64,
    max_iters: usize,
    order: SweepOrder,
) -> Result<PsorOutcome> {
    assert!(relaxation > 0.0 && relaxation < 2.0);
    let n = problem.operator.len();
    let mut z = vec![0.0; n];
    for i in 0..n {
        if problem.operator.pinned(i) {
            z[i] = problem.rhs[i] / problem.operator.diag(i);
        } else if problem.constrained[i] {
            z[i] = problem.obstacle[i].max(0.0);
        }
    }
    let indices: Vec<usize> = match order {
        SweepOrder::Forward => (0..n).collect(),
        SweepOrder::Reverse => (0..n).rev().collect(),
    };
    let mut defect = f64::INFINITY;
    for sweep in 1..=max_iters {
        for &i in &indices {
            if problem.operator.pinned(i) {
                continue;
            }
            let r = problem.rhs[i] - problem.operator.row_apply(i, &z);
            let mut zi = z[i] + relaxation * r / problem.operator.diag(i);
            if problem.constrained[i] {
                zi = zi.max(problem.obstacle[i]);
            }
            z[i] = zi;
        }
        defect = 0.0;
        for i in 0..n {
            if problem.operator.pinned(i) {
                continue;
            }
            let r = problem.operator.row_apply(i, &z) - problem.rhs[i];
            if problem.constrained[i] {
                defect = defect.max(-r);
                defect = defect.max((z[i] - problem.obstacle[i]).min(r.abs()));
                defect = defect.max(problem.obstacle[i] - z[i]);
            } else {
                defect = defect.max(r.abs());
            }
        }
        if defect <= tol {
            return Ok(PsorOutcome {
                z,
                sweeps: sweep,
                defect,
            });
        }
    }
    Err(Error::NotConverged {
        iters: max_iters,
        defect,
    })
}

/// Projected SOR with the default forward sweep.
pub fn psor_solve(
    problem: &LcpStepProblem,
    relaxation: f64,
    tol: f64,
    max_iters: usize,
) -> Result<Vec<f64>> {
    psor_solve_ordered(problem, relaxation, tol, max_iters, SweepOrder::Forward).map(|o| o.z)
}

/// Implicit heat step on a box: A = I/dt - lap_h with Dirichlet rows pinned.
pub struct BoxStepOperator<'a> {
    pub grid: &'a Grid,
    pub dirichlet: Vec<bool>,
}

impl<'a> BoxStepOperator<'a> {
    pub fn new(grid: &'a Grid) -> Self {
        let mut dirichlet = vec![false; grid.space_len()];
        for nd in grid.lateral_nodes() {
            dirichlet[nd] = true;
        }
        BoxStepOperator { grid, dirichlet }
    }
}

impl LcpOperator for BoxStepOperator<'_> {
    fn len(&self) -> usize {
        self.grid.space_len()
    }

    fn row_apply(&self, i: usize, z: &[f64]) -> f64 {
        let g = self.grid;
        if self.dirichlet[i] {
            return z[i];
        }
        let hx2 = g.h * g.h;
        match g.dim {
            1 => {
                (1.0 / g.dt + 2.0 / hx2) * z[i] - (z[i - 1] + z[i + 1]) / hx2
            }
            _ => {
                let n = g.n_space;
                let hy2 = g.h2 * g.h2;
                let (ix, jy) = (i % n, i / n);
                (1.0 / g.dt + 2.0 / hx2 + 2.0 / hy2) * z[i]
                    - (z[i - 1] + z[i + 1]) / hx2
                    - (z[g.idx2(ix, jy - 1)] + z[g.idx2(ix, jy + 1)]) / hy2
            }
        }
    }

    fn diag(&self, i: usize) -> f64 {
        let g = self.grid;
        if self.dirichlet[i] {
            return 1.0;
        }
        let hx2 = g.h * g.h;
        match g.dim {
            1 => 1.0 / g.dt + 2.0 / hx2,
            _ => 1.0 / g.dt + 2.0 / hx2 + 2.0 / (g.h2 * g.h2),
        }
    }

    fn pinned(&self, i: usize) -> bool {
        self.dirichlet[i]
    }
}

/// Implicit heat step on the half-box with ghost-closed Gamma rows scaled by
/// 1/2 so the system stays symmetric. The dynamic alpha enters the Gamma
/// diagonal; zero for the nondynamic problem.
pub struct HalfBoxStepOperator<'a> {
    pub grid: &'a Grid,
    pub alpha: f64,
    pub dirichlet: Vec<bool>,
}

impl<'a> HalfBoxStepOperator<'a> {
    pub fn new(grid: &'a Grid, alpha: f64) -> Self {
        let mut dirichlet = vec![false; grid.space_len()];
        for nd in grid.lateral_nodes() {
            dirichlet[nd] = true;
        }
        HalfBoxStepOperator {
            grid,
            alpha,
            dirichlet,
        }
    }
}

impl LcpOperator for HalfBoxStepOperator<'_> {
    fn len(&self) -> usize {
        self.grid.space_len()
    }

    fn row_apply(&self, i: usize, z: &[f64]) -> f64 {
        let g = self.grid;
        if self.dirichlet[i] {
            return z[i];
        }
        let n = g.n_space;
        let hx2 = g.h * g.h;
        let hy = g.h2;
        let hy2 = hy * hy;
        let (ix, jy) = (i % n, i / n);
        if jy == 0 {
            0.5 * ((1.0 / g.dt + 2.0 / hx2 + 2.0 / hy2 + 2.0 * self.alpha / (hy * g.dt)) * z[i]
                - (z[i - 1] + z[i + 1]) / hx2)
                - z[g.idx2(ix, 1)] / hy2
        } else {
            (1.0 / g.dt + 2.0 / hx2 + 2.0 / hy2) * z[i]
                - (z[i - 1] + z[i + 1]) / hx2
                - (z[g.idx2(ix, jy - 1)] + z[g.idx2(ix, jy + 1)]) / hy2
        }
    }

    fn diag(&self, i: usize) -> f64 {
        let g = self.grid;
        if self.dirichlet[i] {
            return 1.0;
        }
        let hx2 = g.h * g.h;
        let hy = g.h2;
        let hy2 = hy * hy;
        let jy = i / g.n_space;
        if jy == 0 {
            0.5 * (1.0 / g.dt + 2.0 / hx2 + 2.0 / hy2 + 2.0 * self.alpha / (hy * g.dt))
        } else {
            1.0 / g.dt + 2.0 / hx2 + 2.0 / hy2
        }
    }

    fn pinned(&self, i: usize) -> bool {
        self.dirichlet[i]
    }
}

/// Dense step operator for the fractional line: A = I/dt + L^s (circulant).
pub struct DenseLineOperator {
    pub dt: f64,
    pub matrix: Vec<Vec<f64>>,
}

impl LcpOperator for DenseLineOperator {
    fn len(&self) -> usize {
        self.matrix.len()
    }

    fn row_apply(&self, i: usize, z: &[f64]) -> f64 {
        let dot: f64 = self.matrix[i].iter().zip(z).map(|(a, b)| a * b).sum();
        z[i] / self.dt + dot
    }

    fn diag(&self, i: usize) -> f64 {
        1.0 / self.dt + self.matrix[i][i]
    }
}

const PSOR_TOL: f64 = 1e-9;
const PSOR_MAX_ITERS: usize = 500_000;
const PSOR_RELAXATION: f64 = 1.5;

/// Backward-Euler obstacle-problem march solved step by step with projected
/// relaxation. Covers the thick, Signorini and fractional prototypes; the
/// boundary prototypes march the subtracted field like the penalized solver.
pub fn solve_reference(spec: &ProblemSpec, grid: &Grid) -> Result<SolveResult> {
    spec.validate(grid)?;
    if spec.prototype == Prototype::DynamicThin {
        return Err(Error::ConfigInvalid {
            path: "prototype".into(),
            reason: "reference solver covers Thick, Signorini and Fractional".into(),
        });
    }
    let sl = grid.space_len();
    let subtracted = spec.prototype == Prototype::Signorini;

    let mut w = spec.data.phi0.clone();
    if subtracted {
        let psi0 = spec.data.psi.level(0);
        for (wi, &pi) in w.iter_mut().zip(psi0) {
            *wi -= pi;
        }
    }
    let mut marched = ScalarField::zeros(grid, "reference");
    marched.set_level(0, &w);
    let mut per_step = Vec::with_capacity(grid.n_time - 1);

    let dense = match spec.prototype {
        Prototype::Fractional => Some(DenseLineOperator {
            dt: grid.dt,
            matrix: SpectralLine::dense_matrix(grid, spec.s.unwrap()),
        }),
        _ => None,
    };

    for k in 1..grid.n_time {
        let psi_k = spec.data.psi.level(k);
        let f_k = spec.data.f.level(k);
        let lateral_nodes = grid.lateral_nodes();

        let outcome = match spec.prototype {
            Prototype::Thick => {
                let op = BoxStepOperator::new(grid);
                let mut rhs: Vec<f64> = (0..sl).map(|c| w[c] / grid.dt - f_k[c]).collect();
                for (b, &nd) in lateral_nodes.iter().enumerate() {
                    rhs[nd] = spec.data.lateral[k][b];
                }
                let mut constrained = vec![true; sl];
                for &nd in &lateral_nodes {
                    constrained[nd] = false;
                }
                let problem = LcpStepProblem {
                    operator: &op,
                    rhs,
                    obstacle: psi_k.to_vec(),
                    constrained,
                };
                psor_solve_ordered(&problem, PSOR_RELAXATION, PSOR_TOL, PSOR_MAX_ITERS, SweepOrder::Forward)
                    .map_err(|e| step_error(e, k))?
            }
            Prototype::Signorini => {
                let op = HalfBoxStepOperator::new(grid, 0.0);
                let mut rhs: Vec<f64> = (0..sl).map(|c| w[c] / grid.dt - f_k[c]).collect();
                // Gamma rows carry the 1/2 symmetry weight
                for i in 1..grid.n_space - 1 {
                    let c = grid.idx2(i, 0);
                    rhs[c] *= 0.5;
                }
                for (b, &nd) in lateral_nodes.iter().enumerate() {
                    rhs[nd] = spec.data.lateral[k][b] - psi_k[nd];
                }
                let mut constrained = vec![false; sl];
                for i in 1..grid.n_space - 1 {
                    constrained[grid.idx2(i, 0)] = true;
                }
                let problem = LcpStepProblem {
                    operator: &op,
                    rhs,
                    obstacle: vec![0.0; sl],
                    constrained,
                };
                psor_solve_ordered(&problem, PSOR_RELAXATION, PSOR_TOL, PSOR_MAX_ITERS, SweepOrder::Forward)
                    .map_err(|e| step_error(e, k))?
            }
            Prototype::Fractional => {
                let op = dense.as_ref().unwrap();
                let rhs: Vec<f64> = (0..sl).map(|c| w[c] / grid.dt - f_k[c]).collect();
                let problem = LcpStepProblem {
                    operator: op,
                    rhs,
                    obstacle: psi_k.to_vec(),
                    constrained: vec![true; sl],
                };
                psor_solve_ordered(&problem, PSOR_RELAXATION, PSOR_TOL, PSOR_MAX_ITERS, SweepOrder::Forward)
                    .map_err(|e| step_error(e, k))?
            }
            Prototype::DynamicThin => unreachable!(),
        };
        let sweeps = outcome.sweeps;
        let defect = outcome.defect;
        w = outcome.z;
        marched.set_level(k, &w);

        let mut min_gap = f64::INFINITY;
        for &c in &grid.contact_nodes() {
            let gap = if subtracted { w[c] } else { w[c] - psi_k[c] };
            min_gap = min_gap.min(gap);
        }
        per_step.push(StepRecord {
            level: k,
            newton_iters: sweeps,
            residual: defect,
            complementarity_defect: defect,
            min_gap,
        });
    }
    assemble_result(marched, spec, grid, per_step)
}

fn step_error(e: Error, level: usize) -> Error {
    match e {
        Error::NotConverged { iters, defect } => Error::ConfigInvalid {
            path: format!("reference step at level {level}"),
            reason: format!("projected relaxation stalled after {iters} sweeps, defect {defect:.3e}"),
        },
        other => other,
    }
}

/// Traveling Signorini profile (2/3) rho^{3/2} cos(3 theta / 2) with the
/// half-line zero set moving at speed omega; coordinates rotated by
/// `rotation` first, and even in x2.
pub fn signorini_profile(x: &[f64], t: f64, omega: f64, rotation: f64) -> f64 {
    let (c, s) = (rotation.cos(), rotation.sin());
    let y1 = c * x[0] + s * x[1];
    let y2 = -s * x[0] + c * x[1];
    let xi = y1 + omega * t;
    let a2 = y2.abs();
    if a2 == 0.0 && xi <= 0.0 {
        return 0.0;
    }
    let rho = (xi * xi + a2 * a2).sqrt();
    let theta = a2.atan2(xi);
    (2.0 / 3.0) * rho.powf(1.5) * (1.5 * theta).cos()
}

/// x2-derivative of the profile, -rho^{1/2} sin(theta/2) in rotated
/// coordinates (the normal derivative field whose Gaussian energy the
/// monotonicity diagnostics integrate).
pub fn signorini_profile_normal_derivative(x: &[f64], t: f64, omega: f64) -> f64 {
    let xi = x[0] + omega * t;
    let a2 = x[1].abs();
    if a2 == 0.0 && xi >= 0.0 {
        return 0.0;
    }
    let rho = (xi * xi + a2 * a2).sqrt();
    let theta = a2.atan2(xi);
    -rho.sqrt() * (0.5 * theta).sin()
}

/// Separable heat solutions used as manufactured references.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    /// sum a_k exp(-(pi k)^2 t) sin(pi k x) on the unit interval.
    DirichletUnit,
    /// sum a_k exp(-k^2 t) cos(k x) on [0, 2 pi].
    PeriodicCosine,
}

pub fn heat_series_solution(modes: &[(usize, f64)], x: f64, t: f64, kind: SeriesKind) -> f64 {
    let pi = std::f64::consts::PI;
    modes
        .iter()
        .map(|&(k, a)| match kind {
            SeriesKind::DirichletUnit => {
                a * (-(pi * k as f64).powi(2) * t).exp() * (pi * k as f64 * x).sin()
            }
            SeriesKind::PeriodicCosine => {
                a * (-((k * k) as f64) * t).exp() * (k as f64 * x).cos()
            }
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, Geometry};

    struct Diagonal(Vec<f64>);
    impl LcpOperator for Diagonal {
        fn len(&self) -> usize {
            self.0.len()
        }
        fn row_apply(&self, i: usize, z: &[f64]) -> f64 {
            self.0[i] * z[i]
        }
        fn diag(&self, i: usize) -> f64 {
            self.0[i]
        }
    }

    struct Dense2 {
        a: [[f64; 2]; 2],
    }
    impl LcpOperator for Dense2 {
        fn len(&self) -> usize {
            2
        }
        fn row_apply(&self, i: usize, z: &[f64]) -> f64 {
            self.a[i][0] * z[0] + self.a[i][1] * z[1]
        }
        fn diag(&self, i: usize) -> f64 {
            self.a[i][i]
        }
    }

    #[test]
    fn scalar_projection() {
        // a z = b with z >= c resolves to max(b/a, c)
        let op = Diagonal(vec![2.0]);
        for &(b, c) in &[(3.0, 0.0), (-3.0, 0.5), (1.0, 2.0)] {
            let problem = LcpStepProblem {
                operator: &op,
                rhs: vec![b],
                obstacle: vec![c],
                constrained: vec![true],
            };
            let z = psor_solve(&problem, 1.5, 1e-12, 10_000).unwrap();
            assert!((z[0] - (b / 2.0).max(c)).abs() < 1e-10);
        }
    }

    #[test]
    fn unconstrained_matches_linear_solve() {
        // obstacle far below: projection never active
        let op = Dense2 {
            a: [[3.0, 1.0], [1.0, 2.0]],
        };
        let problem = LcpStepProblem {
            operator: &op,
            rhs: vec![1.0, -1.0],
            obstacle: vec![-1e9, -1e9],
            constrained: vec![true, true],
        };
        let z = psor_solve(&problem, 1.5, 1e-12, 100_000).unwrap();
        // exact solve of the 2x2 system
        let det = 3.0 * 2.0 - 1.0;
        let exact = [(1.0 * 2.0 - (-1.0)) / det, (3.0 * (-1.0) - 1.0) / det];
        assert!((z[0] - exact[0]).abs() < 1e-9);
        assert!((z[1] - exact[1]).abs() < 1e-9);
    }

    #[test]
    fn two_node_matches_active_set_enumeration() {
        // brute-force oracle: try all four active sets, keep the feasible one
        let a = [[2.0, -1.0], [-1.0, 2.0]];
        let rhs = [-1.0, -2.0];
        let c = [0.0, 0.0];
        let op = Dense2 { a };
        let mut best: Option<[f64; 2]> = None;
        for mask in 0..4u8 {
            // active nodes take z = c, free ones solve the reduced system
            let active = [(mask & 1) != 0, (mask & 2) != 0];
            let mut z = [0.0f64; 2];
            match active {
                [true, true] => {
                    z = c;
                }
                [true, false] => {
                    z[0] = c[0];
                    z[1] = (rhs[1] - a[1][0] * c[0]) / a[1][1];
                }
                [false, true] => {
                    z[1] = c[1];
                    z[0] = (rhs[0] - a[0][1] * c[1]) / a[0][0];
                }
                [false, false] => {
                    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
                    z[0] = (rhs[0] * a[1][1] - a[0][1] * rhs[1]) / det;
                    z[1] = (a[0][0] * rhs[1] - rhs[0] * a[1][0]) / det;
                }
            }
            let feasible = (0..2).all(|i| z[i] >= c[i] - 1e-12)
                && (0..2).all(|i| {
                    let r = a[i][0] * z[0] + a[i][1] * z[1] - rhs[i];
                    r >= -1e-12 && (z[i] - c[i]) * r <= 1e-12
                });
            if feasible {
                best = Some(z);
            }
        }
        let oracle = best.expect("one active set must be feasible");
        let problem = LcpStepProblem {
            operator: &op,
            rhs: rhs.to_vec(),
            obstacle: c.to_vec(),
            constrained: vec![true, true],
        };
        let z = psor_solve(&problem, 1.5, 1e-12, 100_000).unwrap();
        assert!((z[0] - oracle[0]).abs() < 1e-9);
        assert!((z[1] - oracle[1]).abs() < 1e-9);
    }

    #[test]
    fn sweep_order_independent_up_to_tol() {
        let g = make_grid(1, Geometry::Box, 33, 5, &[[0.0, 1.0]], 0.0, 0.05).unwrap();
        let op = BoxStepOperator::new(&g);
        let rhs: Vec<f64> = (0..33)
            .map(|i| {
                let x = g.coord(0, i);
                (std::f64::consts::PI * x).sin() / g.dt
            })
            .collect();
        let obstacle: Vec<f64> = (0..33).map(|i| 0.4 - (g.coord(0, i) - 0.5).abs()).collect();
        let mut constrained = vec![true; 33];
        constrained[0] = false;
        constrained[32] = false;
        let mut rhs_pinned = rhs.clone();
        rhs_pinned[0] = 0.0;
        rhs_pinned[32] = 0.0;
        let problem = LcpStepProblem {
            operator: &op,
            rhs: rhs_pinned,
            obstacle,
            constrained,
        };
        let zf = psor_solve_ordered(&problem, 1.5, 1e-11, 200_000, SweepOrder::Forward)
            .unwrap()
            .z;
        let zr = psor_solve_ordered(&problem, 1.5, 1e-11, 200_000, SweepOrder::Reverse)
            .unwrap()
            .z;
        let diff = zf
            .iter()
            .zip(&zr)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(diff < 1e-8, "order dependence {diff}");
    }

    #[test]
    fn profile_closed_form_values() {
        // rho = 1, theta = 0 on the positive contact ray
        assert!((signorini_profile(&[1.0, 0.0], 0.0, 0.7, 0.0) - 2.0 / 3.0).abs() < 1e-15);
        // exact zero on the trailing half-line
        assert_eq!(signorini_profile(&[-1.0, 0.0], 0.0, 0.0, 0.0), 0.0);
        assert_eq!(signorini_profile(&[-0.4, 0.0], 1.0, 0.3, 0.0), 0.0);
        // nonnegative on the contact line
        for i in 0..100 {
            let x1 = -1.0 + 0.02 * i as f64;
            assert!(signorini_profile(&[x1, 0.0], 0.0, 0.0, 0.0) >= 0.0);
        }
    }

    #[test]
    fn profile_is_discretely_harmonic() {
        // 5-point residual at h = 1e-3 around (0.5, 0.5)
        let h = 1e-3;
        let p = |x1: f64, x2: f64| signorini_profile(&[x1, x2], 0.0, 0.0, 0.0);
        let (x1, x2) = (0.5, 0.5);
        let lap = (p(x1 + h, x2) + p(x1 - h, x2) + p(x1, x2 + h) + p(x1, x2 - h)
            - 4.0 * p(x1, x2))
            / (h * h);
        assert!(lap.abs() < 1e-4, "residual {lap}");
    }

    #[test]
    fn profile_signorini_conditions_on_contact_line() {
        // value >= 0, normal-derivative limit <= 0, product = 0
        for i in 0..1000 {
            let x1 = -2.0 + 4.0 * i as f64 / 999.0;
            let val = signorini_profile(&[x1, 0.0], 0.0, 0.0, 0.0);
            let wn = signorini_profile_normal_derivative(&[x1, 0.0], 0.0, 0.0);
            assert!(val >= 0.0);
            assert!(wn <= 1e-15);
            assert!((val * wn).abs() < 1e-12, "x1={x1}: val {val} wn {wn}");
        }
    }

    #[test]
    fn heat_series_basics() {
        let pi = std::f64::consts::PI;
        // single mode at t = 0 is the sine itself
        for i in 0..10 {
            let x = i as f64 / 9.0;
            let v = heat_series_solution(&[(1, 1.0)], x, 0.0, SeriesKind::DirichletUnit);
            assert!((v - (pi * x).sin()).abs() < 1e-15);
        }
        // large times decay to zero
        let v = heat_series_solution(&[(1, 1.0), (3, 0.5)], 0.3, 50.0, SeriesKind::DirichletUnit);
        assert!(v.abs() < 1e-200 || v.abs() < 1e-12);
        // two modes equal direct summation at sampled points
        let modes = [(1, 0.8), (4, -0.3)];
        let mut state = 0x243f6a8885a308d3u64;
        for _ in 0..10 {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let x = (state >> 11) as f64 / (1u64 << 53) as f64;
            let t = 0.07;
            let direct = 0.8 * (-(pi * pi) * t).exp() * (pi * x).sin()
                + (-0.3) * (-(16.0 * pi * pi) * t).exp() * (4.0 * pi * x).sin();
            let v = heat_series_solution(&modes, x, t, SeriesKind::DirichletUnit);
            assert!((v - direct).abs() < 1e-15);
        }
    }
}
