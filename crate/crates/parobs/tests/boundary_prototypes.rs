//! Oracle tests for the half-box prototypes: ghost-closure accuracy against
//! a separable Neumann mode, obstacle-level invariance when the penalty is
//! inactive, the stationary contact profile, the complementarity rate in
//! eps, and the dynamic coefficient limits.

use parobs::builtin::{builtin, zero_data, PROFILE_AMPLITUDE};
use parobs::diagnostics::extract_free_boundary;
use parobs::grid::{make_grid, Geometry, Grid, SampledData, ScalarField};
use parobs::penalty::{beta_and_prime, PenaltyParams};
use parobs::reference::{signorini_profile, solve_reference};
use parobs::solvers::{march, ProblemSpec, Prototype};

fn half_grid(n: usize, nt: usize, horizon: f64) -> Grid {
    make_grid(
        2,
        Geometry::HalfBoxWithGamma,
        n,
        nt,
        &[[-1.0, 1.0], [0.0, 1.0]],
        0.0,
        horizon,
    )
    .unwrap()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Data with a constant obstacle `level` and everything else sampled from a
/// caloric Neumann mode (normal derivative vanishing on Gamma).
fn neumann_mode_data(grid: &Grid, level: f64) -> SampledData {
    let pi = std::f64::consts::PI;
    let lambda = (pi / 2.0) * (pi / 2.0) + pi * pi;
    let mode = move |t: f64, x: &[f64]| {
        (-lambda * t).exp() * (pi * (x[0] + 1.0) / 2.0).sin() * (pi * x[1]).cos()
    };
    let mut data = zero_data(grid, None);
    data.psi = ScalarField::sample(grid, "psi", |_, _| level);
    data.phi0 = {
        let sl = grid.space_len();
        (0..sl)
            .map(|c| {
                mode(
                    0.0,
                    &[
                        grid.coord(0, c % grid.n_space),
                        grid.coord(1, c / grid.n_space),
                    ],
                )
            })
            .collect()
    };
    let nodes = grid.lateral_nodes();
    data.lateral = (0..grid.n_time)
        .map(|k| {
            let t = grid.time(k);
            nodes
                .iter()
                .map(|&nd| {
                    mode(
                        t,
                        &[
                            grid.coord(0, nd % grid.n_space),
                            grid.coord(1, nd / grid.n_space),
                        ],
                    )
                })
                .collect()
        })
        .collect();
    data
}

#[test]
fn signorini_ghost_closure_reproduces_neumann_mode() {
    // cos(pi x2) has zero normal derivative on Gamma, so with the obstacle
    // far below the march must follow the separable mode at second order
    let grid = half_grid(65, 65, 0.1);
    let data = neumann_mode_data(&grid, -10.0);
    let spec = ProblemSpec {
        prototype: Prototype::Signorini,
        data,
        alpha: None,
        s: None,
        eps: PenaltyParams::new(1e-2),
        horizon: 0.1,
    };
    let result = march(&spec, &grid).unwrap();
    let pi = std::f64::consts::PI;
    let lambda = (pi / 2.0) * (pi / 2.0) + pi * pi;
    let mut worst = 0.0f64;
    for k in 0..grid.n_time {
        let t = grid.time(k);
        for c in 0..grid.space_len() {
            let x = [
                grid.coord(0, c % grid.n_space),
                grid.coord(1, c / grid.n_space),
            ];
            let exact = (-lambda * t).exp() * (pi * (x[0] + 1.0) / 2.0).sin() * (pi * x[1]).cos();
            worst = worst.max((result.u.at(k, c) - exact).abs());
        }
    }
    let bound = 8.0 * (grid.h * grid.h + grid.h2 * grid.h2 + grid.dt);
    assert!(worst <= bound, "error {worst} vs bound {bound}");
}

#[test]
fn inactive_penalty_is_obstacle_level_independent() {
    // with the gap far above eps the penalty is exactly zero, so the
    // reconstructed solution cannot see the obstacle level
    let grid = half_grid(33, 17, 0.1);
    let mk = |level: f64| ProblemSpec {
        prototype: Prototype::Signorini,
        data: neumann_mode_data(&grid, level),
        alpha: None,
        s: None,
        eps: PenaltyParams::new(1e-2),
        horizon: 0.1,
    };
    let a = march(&mk(-10.0), &grid).unwrap();
    let b = march(&mk(-1000.0), &grid).unwrap();
    let diff = max_abs_diff(&a.u.values, &b.u.values);
    assert!(diff <= 1e-9, "obstacle level leaked: {diff}");
}

/// Stationary-profile data without the interior perturbation.
fn stationary_profile_spec(grid: &Grid, eps: f64) -> ProblemSpec {
    let a = PROFILE_AMPLITUDE;
    let sl = grid.space_len();
    let mut data = zero_data(grid, None);
    data.phi0 = (0..sl)
        .map(|c| {
            a * signorini_profile(
                &[
                    grid.coord(0, c % grid.n_space),
                    grid.coord(1, c / grid.n_space),
                ],
                0.0,
                0.0,
                0.0,
            )
        })
        .collect();
    let nodes = grid.lateral_nodes();
    data.lateral = vec![
        nodes
            .iter()
            .map(|&nd| {
                a * signorini_profile(
                    &[
                        grid.coord(0, nd % grid.n_space),
                        grid.coord(1, nd / grid.n_space),
                    ],
                    0.0,
                    0.0,
                    0.0,
                )
            })
            .collect();
        grid.n_time
    ];
    ProblemSpec {
        prototype: Prototype::Signorini,
        data,
        alpha: None,
        s: None,
        eps: PenaltyParams::new(eps),
        horizon: grid.dt * (grid.n_time - 1) as f64,
    }
}

#[test]
fn stationary_profile_is_discrete_steady_state() {
    // marching from the exact profile drifts only by discretization:
    // h^{1/2}-scale near the contact tip, h^2-scale away from it
    let eps = 1e-5;
    let mut errors = Vec::new();
    for &(n, nt) in &[(49usize, 33usize), (97, 65)] {
        let grid = half_grid(n, nt, 0.25);
        let spec = stationary_profile_spec(&grid, eps);
        let result = march(&spec, &grid).unwrap();
        let k = grid.n_time - 1;
        let mut near = 0.0f64;
        let mut far = 0.0f64;
        for c in 0..grid.space_len() {
            let x = [
                grid.coord(0, c % grid.n_space),
                grid.coord(1, c / grid.n_space),
            ];
            let rho = (x[0] * x[0] + x[1] * x[1]).sqrt();
            let exact = PROFILE_AMPLITUDE * signorini_profile(&x, 0.0, 0.0, 0.0);
            let err = (result.u.at(k, c) - exact).abs();
            if rho <= 0.25 {
                near = near.max(err);
            } else if rho >= 0.5 {
                far = far.max(err);
            }
        }
        errors.push((grid.h, near, far));
        // coincidence set on Gamma is {x1 <= 0} within one cell
        let snaps = extract_free_boundary(&result.u, &spec.data.psi, 3.0 * eps);
        let last = snaps.last().unwrap();
        assert_eq!(last.interface_points.len(), 1);
        assert!(
            last.interface_points[0][0].abs() <= grid.h + 1e-12,
            "interface at {}",
            last.interface_points[0][0]
        );
    }
    let (h0, near0, far0) = errors[0];
    let (h1, near1, far1) = errors[1];
    assert!(h1 < h0);
    // absolute sanity plus refinement of the right order
    assert!(near0 <= 0.3 * h0.sqrt(), "near error {near0} at h={h0}");
    assert!(near1 <= 0.3 * h1.sqrt(), "near error {near1} at h={h1}");
    assert!(far0 <= 30.0 * h0 * h0, "far error {far0} at h={h0}");
    assert!(far1 <= 30.0 * h1 * h1, "far error {far1} at h={h1}");
    assert!(near1 <= near0, "near error did not shrink");
    assert!(far1 <= far0 / 2.0, "far error refined slower than first order");
}

#[test]
fn signorini_complementarity_defect_scales_linearly_in_eps() {
    // max over Gamma of min(gap, ghost flux)^- decays like eps
    let mut points = Vec::new();
    for &eps in &[1e-1, 1e-2, 1e-3] {
        let grid = half_grid(49, 33, 0.25);
        let spec = stationary_profile_spec(&grid, eps);
        let result = march(&spec, &grid).unwrap();
        let p = PenaltyParams::new(eps);
        let mut worst = 0.0f64;
        for k in 1..grid.n_time {
            for i in 0..grid.n_space {
                let gap = result.u.at(k, grid.idx2(i, 0));
                // the ghost closure makes the discrete flux -beta(gap)
                let flux = -beta_and_prime(p, gap).0;
                let defect = (-gap.min(flux)).max(0.0);
                worst = worst.max(defect);
            }
        }
        points.push((eps, worst));
        assert!(worst <= 3.0 * eps, "eps {eps}: defect {worst}");
    }
    assert!(
        points.windows(2).all(|w| w[1].1 < w[0].1),
        "defect not decaying: {points:?}"
    );
    // log-log slope near 1 on the asymptotic pair (the largest eps has a
    // penalty layer wide enough to feel the pinned lateral corner)
    let slope = ((points[1].1 / points[2].1).ln()) / ((points[1].0 / points[2].0).ln());
    assert!(
        (0.8..=1.2).contains(&slope),
        "complementarity decay slope {slope}, table {points:?}"
    );
}

#[test]
fn dynamic_alpha_limit_matches_signorini() {
    let p = builtin("dynamic-caloric", 49, 33, 1e-2).unwrap();
    let mut tiny_alpha = p.spec.clone();
    tiny_alpha.alpha = Some(1e-6);
    let dynamic = march(&tiny_alpha, &p.grid).unwrap();
    let mut signorini = p.spec.clone();
    signorini.prototype = Prototype::Signorini;
    signorini.alpha = None;
    let nondynamic = march(&signorini, &p.grid).unwrap();
    let diff = max_abs_diff(&dynamic.u.values, &nondynamic.u.values);
    assert!(diff <= 1e-4, "alpha -> 0 limit broke: {diff}");
}

#[test]
fn dynamic_inactive_penalty_is_obstacle_level_independent() {
    let grid = half_grid(33, 17, 0.1);
    let mk = |level: f64| {
        let mut data = neumann_mode_data(&grid, level);
        // constant-in-time obstacle keeps the subtracted forcing at zero
        data.psi_t = ScalarField::zeros(&grid, "psi_t");
        ProblemSpec {
            prototype: Prototype::DynamicThin,
            data,
            alpha: Some(0.7),
            s: None,
            eps: PenaltyParams::new(1e-2),
            horizon: 0.1,
        }
    };
    let a = march(&mk(-10.0), &grid).unwrap();
    let b = march(&mk(-1000.0), &grid).unwrap();
    let diff = max_abs_diff(&a.u.values, &b.u.values);
    assert!(diff <= 1e-9, "obstacle level leaked: {diff}");
}

#[test]
fn dynamic_constant_data_is_invariant() {
    // constants solve the full dynamic system when the obstacle stays below
    let grid = half_grid(33, 17, 0.2);
    let c = 0.3;
    let mut data = zero_data(&grid, None);
    data.phi0 = vec![c; grid.space_len()];
    data.lateral = vec![vec![c; grid.lateral_nodes().len()]; grid.n_time];
    let spec = ProblemSpec {
        prototype: Prototype::DynamicThin,
        data,
        alpha: Some(0.5),
        s: None,
        eps: PenaltyParams::new(1e-2),
        horizon: 0.2,
    };
    let result = march(&spec, &grid).unwrap();
    for v in &result.u.values {
        assert!((v - c).abs() <= 1e-12, "constant drifted to {v}");
    }
}

#[test]
fn dynamic_march_reaches_contact_and_respects_gap() {
    let p = builtin("dynamic-caloric", 49, 49, 1e-3).unwrap();
    let result = march(&p.spec, &p.grid).unwrap();
    let min_gap = result
        .per_step
        .iter()
        .map(|s| s.min_gap)
        .fold(f64::INFINITY, f64::min);
    assert!(min_gap <= 3.0e-3, "obstacle never engaged: {min_gap}");
    assert!(min_gap >= -1e-3, "penetration too deep: {min_gap}");
}

#[test]
fn signorini_reference_matches_penalized_active_run() {
    let eps = 1e-3;
    let p = builtin("signorini-active", 33, 33, eps).unwrap();
    let penalized = march(&p.spec, &p.grid).unwrap();
    let reference = solve_reference(&p.spec, &p.grid).unwrap();
    let diff = max_abs_diff(&penalized.u.values, &reference.u.values);
    assert!(diff <= 3.0 * eps, "penalized vs reference {diff}");
}
