//! Spectral-line prototype: exact single-mode decay, obstacle engagement
//! with bounded penetration, and agreement with the dense-matrix
//! complementarity reference.

use parobs::builtin::builtin;
use parobs::diagnostics::extract_free_boundary;
use parobs::grid::{make_grid, Geometry};
use parobs::reference::solve_reference;
use parobs::solvers::{march, SpectralLine};

#[test]
fn single_mode_decay_factor_is_exact_at_s_one() {
    let two_pi = 2.0 * std::f64::consts::PI;
    let grid = make_grid(1, Geometry::PeriodicLine, 128, 9, &[[0.0, two_pi]], 0.0, 0.08).unwrap();
    let line = SpectralLine::new(&grid, 1.0).unwrap();
    for k in [1usize, 2, 5] {
        let u0: Vec<f64> = (0..128)
            .map(|i| (k as f64 * grid.coord(0, i)).cos())
            .collect();
        let rhs: Vec<f64> = u0.iter().map(|v| v / grid.dt).collect();
        let u1 = line.solve_implicit(&rhs, grid.dt);
        let factor = 1.0 / (1.0 + grid.dt * (k * k) as f64);
        for (a, b) in u1.iter().zip(&u0) {
            assert!((a - b * factor).abs() <= 1e-12, "mode {k}");
        }
    }
}

#[test]
fn obstacle_active_run_respects_gap_and_reference() {
    let eps = 1e-3;
    let p = builtin("fractional-active", 256, 129, eps).unwrap();
    let penalized = march(&p.spec, &p.grid).unwrap();

    let min_gap = penalized
        .per_step
        .iter()
        .map(|s| s.min_gap)
        .fold(f64::INFINITY, f64::min);
    assert!(min_gap >= -eps, "penetration {min_gap}");

    // coincidence interval nonempty at the final time
    let snaps = extract_free_boundary(&penalized.u, &p.spec.data.psi, 3.0 * eps);
    let last = snaps.last().unwrap();
    let masked = last.coincidence_mask.iter().filter(|&&m| m).count();
    assert!(masked > 0, "empty coincidence set at the final level");

    let reference = solve_reference(&p.spec, &p.grid).unwrap();
    let err = penalized
        .u
        .values
        .iter()
        .zip(&reference.u.values)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(err <= 3.0 * eps, "disagreement {err}");
}

#[test]
fn periodic_interface_points_are_symmetric() {
    // the clipped-cap obstacle is symmetric about pi, so the coincidence
    // interval's two crossings must straddle pi symmetrically
    let eps = 1e-3;
    let p = builtin("fractional-active", 256, 65, eps).unwrap();
    let result = march(&p.spec, &p.grid).unwrap();
    let snaps = extract_free_boundary(&result.u, &p.spec.data.psi, 3.0 * eps);
    let pi = std::f64::consts::PI;
    let last = snaps.last().unwrap();
    assert_eq!(last.interface_points.len(), 2);
    let mid =
        0.5 * (last.interface_points[0][0] + last.interface_points[1][0]);
    assert!((mid - pi).abs() <= p.grid.h, "midpoint {mid}");
}
