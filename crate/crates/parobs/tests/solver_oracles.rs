//! Oracle-backed tests of the thick-prototype march: manufactured heat
//! solutions, a scalar-equilibrium root oracle, the complementarity
//! reference, comparison and dissipation structure, and the second time
//! quotient's boundary minimum.

use parobs::builtin::{builtin, zero_data};
use parobs::diagnostics::{quasiconvexity_check, time_derivative_modulus};
use parobs::grid::{make_grid, second_incremental_quotient, Geometry, ScalarField};
use parobs::penalty::{beta_and_prime, PenaltyParams};
use parobs::reference::solve_reference;
use parobs::solvers::{eps_sweep, march, ProblemSpec, Prototype};

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn thick_march_reproduces_heat_decay() {
    // analytic oracle: exp(-pi^2 t) sin(pi x) with obstacle far below
    let p = builtin("unconstrained-heat", 101, 51, 1e-2).unwrap();
    let result = march(&p.spec, &p.grid).unwrap();
    let pi = std::f64::consts::PI;
    let g = &p.grid;
    let mut worst = 0.0f64;
    for k in 0..g.n_time {
        let t = g.time(k);
        for i in 0..g.n_space {
            let exact = (-pi * pi * t).exp() * (pi * g.coord(0, i)).sin();
            worst = worst.max((result.u.at(k, i) - exact).abs());
        }
    }
    let bound = 5.0 * (g.h * g.h + g.dt);
    assert!(worst <= bound, "error {worst} vs bound {bound}");
}

#[test]
fn zero_data_march_bounded_by_scalar_recursion() {
    // all-zero data: the discrete solution is pushed up by beta(0) < 0. At
    // the space maximum the discrete Laplacian is nonpositive, so the march
    // is dominated by the single-node implicit recursion
    //   (m_{k+1} - m_k)/dt = -beta(m_{k+1}),
    // root-found by bisection per step as an independent oracle.
    let eps = 1e-2;
    let horizon = 0.05;
    let grid = make_grid(1, Geometry::Box, 65, 11, &[[0.0, 1.0]], 0.0, horizon).unwrap();
    let data = zero_data(&grid, None);
    let spec = ProblemSpec {
        prototype: Prototype::Thick,
        data,
        alpha: None,
        s: None,
        eps: PenaltyParams::new(eps),
        horizon,
    };
    let result = march(&spec, &grid).unwrap();

    let p = PenaltyParams::new(eps);
    let mut m = 0.0f64;
    for _ in 1..grid.n_time {
        let prev = m;
        let g = |z: f64| (z - prev) / grid.dt + beta_and_prime(p, z).0;
        let (mut lo, mut hi) = (prev, prev + grid.dt);
        assert!(g(lo) <= 0.0 && g(hi) >= 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        m = 0.5 * (lo + hi);
    }

    let max = result.u.values.iter().cloned().fold(f64::MIN, f64::max);
    let min = result.u.values.iter().cloned().fold(f64::MAX, f64::min);
    assert!(min >= -1e-12, "solution dipped to {min}");
    assert!(
        max <= m + 1e-10,
        "solution max {max} above the scalar recursion cap {m}"
    );
    // the cap itself sits at penalty-layer scale
    assert!(m <= eps + grid.dt, "scalar cap {m} above eps + dt");
    assert!(max > 0.0, "penalty never lifted the solution");
}

#[test]
fn thick_active_tracks_complementarity_solution() {
    let eps = 1e-3;
    let p = builtin("thick-active", 129, 65, eps).unwrap();
    let penalized = march(&p.spec, &p.grid).unwrap();
    let reference = solve_reference(&p.spec, &p.grid).unwrap();
    let err = max_abs_diff(&penalized.u.values, &reference.u.values);
    assert!(err <= 3.0 * eps, "disagreement {err} vs 3 eps {}", 3.0 * eps);

    // coincidence set nonempty and penetration below one eps
    let min_gap = penalized
        .per_step
        .iter()
        .map(|s| s.min_gap)
        .fold(f64::INFINITY, f64::min);
    assert!(min_gap >= -eps, "min gap {min_gap}");
    let touched = penalized.per_step.iter().any(|s| s.min_gap <= 3.0 * eps);
    assert!(touched, "obstacle never active");
}

#[test]
fn unconstrained_march_is_bit_identical_to_linear_scheme() {
    // beta contributes exact zeros whenever the gap clears eps, so two far
    // obstacles at different depths run the same arithmetic on u
    let mut a = builtin("unconstrained-heat", 65, 17, 1e-2).unwrap();
    let ua = march(&a.spec, &a.grid).unwrap();
    a.spec.data.psi = ScalarField::sample(&a.grid, "psi", |_, _| -1.0e6);
    let ub = march(&a.spec, &a.grid).unwrap();
    assert_eq!(ua.u.values, ub.u.values);
}

#[test]
fn comparison_principle_for_ordered_data() {
    let p = builtin("thick-active", 65, 33, 1e-2).unwrap();
    let low = march(&p.spec, &p.grid).unwrap();
    let mut raised = p.spec.clone();
    for v in raised.data.psi.values.iter_mut() {
        *v += 0.01;
    }
    for v in raised.data.phi0.iter_mut() {
        *v += 0.02;
    }
    for row in raised.data.lateral.iter_mut() {
        for v in row.iter_mut() {
            *v += 0.02;
        }
    }
    let high = march(&raised, &p.grid).unwrap();
    for (a, b) in low.u.values.iter().zip(&high.u.values) {
        assert!(*a <= *b + 1e-10, "ordering violated: {a} vs {b}");
    }
}

#[test]
fn energy_dissipates_in_the_unconstrained_regime() {
    let p = builtin("unconstrained-heat", 101, 51, 1e-2).unwrap();
    let result = march(&p.spec, &p.grid).unwrap();
    let g = &p.grid;
    let mut prev = f64::INFINITY;
    for k in 0..g.n_time {
        let norm: f64 = (0..g.n_space)
            .map(|i| result.u.at(k, i) * result.u.at(k, i) * g.h)
            .sum::<f64>()
            .sqrt();
        assert!(norm <= prev + 1e-12, "L2 norm grew at level {k}");
        prev = norm;
    }
}

#[test]
fn quasiconvexity_on_heat_run_has_positive_quotient() {
    let p = builtin("unconstrained-heat", 101, 51, 1e-2).unwrap();
    let result = march(&p.spec, &p.grid).unwrap();
    let rep = quasiconvexity_check(&result, &p.spec.data).unwrap();
    let pi4 = std::f64::consts::PI.powi(4);
    assert!((rep.utt_bound - pi4).abs() < 1e-9);
    assert!(rep.utt_min >= -1e-6 * pi4, "utt_min {}", rep.utt_min);
}

#[test]
fn smooth_separated_data_obeys_quasiconvexity_bound() {
    let p = builtin("thick-smooth", 129, 65, 1e-3).unwrap();
    let result = march(&p.spec, &p.grid).unwrap();
    let rep = quasiconvexity_check(&result, &p.spec.data).unwrap();
    // tolerance scale h^2 + dt with a generous constant; the bound itself
    // is pi^4/10 from the initial data
    let tol = 5.0 * (p.grid.h * p.grid.h + p.grid.dt) * rep.utt_bound;
    assert!(
        rep.pass_margin >= -tol,
        "margin {} vs tol {tol}",
        rep.pass_margin
    );
    // contact actually happens on this run
    let min_gap = result
        .per_step
        .iter()
        .map(|s| s.min_gap)
        .fold(f64::INFINITY, f64::min);
    assert!(min_gap <= 3.0e-3, "no contact, min gap {min_gap}");
}

#[test]
fn second_quotient_minimum_sits_on_parabolic_boundary() {
    let p = builtin("thick-smooth", 65, 33, 1e-3).unwrap();
    let result = march(&p.spec, &p.grid).unwrap();
    let q = second_incremental_quotient(&result.u, &[p.grid.dt, 0.0], 1.0).unwrap();
    // exhaustive scan of the available nodes
    let g = &p.grid;
    let sl = g.space_len();
    let mut min_all = f64::INFINITY;
    let mut min_boundary = f64::INFINITY;
    for k in 1..g.n_time - 1 {
        for c in 0..sl {
            let idx = k * sl + c;
            if !q.available[idx] {
                continue;
            }
            let v = q.values[idx];
            min_all = min_all.min(v);
            if k == 1 || c <= 1 || c >= sl - 2 {
                min_boundary = min_boundary.min(v);
            }
        }
    }
    assert!(
        min_boundary <= min_all + 1e-9 * (1.0 + min_all.abs()),
        "interior minimum {min_all} undercuts the boundary {min_boundary}"
    );
}

#[test]
fn positive_time_difference_oscillation_stable_in_eps() {
    // window oscillation decays with radius and is monotone in eps up to 10%
    let radii = [0.05, 0.08, 0.12, 0.2];
    let mut tables = Vec::new();
    for &eps in &[1e-1, 1e-2, 1e-3] {
        let p = builtin("thick-active", 129, 65, eps).unwrap();
        let result = march(&p.spec, &p.grid).unwrap();
        let rep = time_derivative_modulus(&result, &radii, true).unwrap();
        for w in rep.table.windows(2) {
            assert!(w[1].1 >= w[0].1 - 1e-13, "oscillation not monotone in r");
        }
        tables.push(rep.table);
    }
    for i in 0..radii.len() {
        let (a, b, c) = (tables[0][i].1, tables[1][i].1, tables[2][i].1);
        let up = a <= b * 1.1 && b <= c * 1.1;
        let down = a >= b * 0.9 && b >= c * 0.9;
        assert!(
            up || down,
            "oscillation at r={} not monotone in eps within 10%: {a} {b} {c}",
            radii[i]
        );
    }
}

#[test]
fn eps_sweep_unconstrained_errors_are_floor_level() {
    let p = builtin("unconstrained-heat", 65, 17, 1e-2).unwrap();
    let reference = solve_reference(&p.spec, &p.grid).unwrap();
    let table = eps_sweep(&p.spec, &p.grid, &[1e-1, 1e-2, 1e-3], &reference.u, None).unwrap();
    for row in &table.rows {
        assert!(row.err_inf <= 1e-9, "eps {}: err {}", row.eps, row.err_inf);
    }
}

#[test]
fn eps_sweep_active_errors_decrease_and_gap_bounded() {
    let p = builtin("thick-active", 129, 65, 1e-1).unwrap();
    let reference = solve_reference(&p.spec, &p.grid).unwrap();
    let table = eps_sweep(&p.spec, &p.grid, &[1e-1, 1e-2, 1e-3], &reference.u, None).unwrap();
    for w in table.rows.windows(2) {
        assert!(w[1].err_inf < w[0].err_inf, "error column not decreasing");
    }
    for row in &table.rows {
        assert!(row.min_gap >= -row.eps, "eps {}: gap {}", row.eps, row.min_gap);
    }
}

#[test]
fn eps_sweep_validates_its_input() {
    let p = builtin("unconstrained-heat", 33, 9, 1e-2).unwrap();
    let reference = solve_reference(&p.spec, &p.grid).unwrap();
    assert!(eps_sweep(&p.spec, &p.grid, &[1e-1, 1e-2], &reference.u, None).is_err());
    assert!(eps_sweep(&p.spec, &p.grid, &[1e-3, 1e-2, 1e-1], &reference.u, None).is_err());
}
