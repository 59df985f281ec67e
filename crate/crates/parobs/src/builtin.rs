//! Built-in test problems with analytically supplied derivative data, so
//! solver runs and the acceptance suite need no external inputs.
//!
//! Obstacle reactions are kept below the penalty cap: the exponential
//! penalty is bounded by 1, so a penalized march can only track the
//! complementarity solution where |psi_t - lap psi| stays safely under 1.

use crate::error::{Error, Result};
use crate::grid::{make_grid, Geometry, Grid, SampledData, ScalarField};
use crate::penalty::PenaltyParams;
use crate::reference::signorini_profile;
use crate::solvers::{march, ProblemSpec, Prototype, SolveResult, StepRecord};

/// A fully materialized problem: grid, spec, and (for closed-form fixtures)
/// the analytic solution field that replaces a march.
pub struct BuiltinProblem {
    pub name: String,
    pub grid: Grid,
    pub spec: ProblemSpec,
    pub analytic: Option<ScalarField>,
}

pub const BUILTIN_NAMES: [&str; 8] = [
    "unconstrained-heat",
    "thick-active",
    "thick-smooth",
    "signorini-stationary",
    "signorini-active",
    "signorini-traveling",
    "fractional-active",
    "dynamic-caloric",
];

/// Amplitude of the stationary/traveling profile data; keeps the contact
/// flux |u_x2| <= 1/2 on Gamma, inside the penalty range.
pub const PROFILE_AMPLITUDE: f64 = 0.5;

/// Speed of the traveling built-in.
pub const TRAVELING_SPEED: f64 = 0.3;

/// Empty data set over a grid (zero obstacle far below is NOT implied; the
/// obstacle here is exactly zero). Used by tests that need a placeholder.
pub fn zero_data(grid: &Grid, bilap_phi0: Option<Vec<f64>>) -> SampledData {
    let zero = ScalarField::zeros(grid, "zero");
    let lateral_nodes = grid.lateral_nodes();
    SampledData {
        psi: zero.clone(),
        psi_t: zero.clone(),
        psi_tt: zero.clone(),
        lap_psi: zero.clone(),
        phi0: vec![0.0; grid.space_len()],
        lateral: vec![vec![0.0; lateral_nodes.len()]; grid.n_time],
        f: zero,
        bilap_phi0,
    }
}

/// Samples lateral values of `f(t, x)` in the canonical boundary order.
fn sample_lateral(grid: &Grid, f: impl Fn(f64, &[f64]) -> f64) -> Vec<Vec<f64>> {
    let nodes = grid.lateral_nodes();
    (0..grid.n_time)
        .map(|k| {
            let t = grid.time(k);
            nodes
                .iter()
                .map(|&nd| {
                    let x = match grid.dim {
                        1 => vec![grid.coord(0, nd)],
                        _ => vec![
                            grid.coord(0, nd % grid.n_space),
                            grid.coord(1, nd / grid.n_space),
                        ],
                    };
                    f(t, &x)
                })
                .collect()
        })
        .collect()
}

fn sample_slice(grid: &Grid, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let sl = grid.space_len();
    (0..sl)
        .map(|c| match grid.dim {
            1 => f(&[grid.coord(0, c)]),
            _ => f(&[
                grid.coord(0, c % grid.n_space),
                grid.coord(1, c / grid.n_space),
            ]),
        })
        .collect()
}

/// Materializes a built-in problem on the requested grid resolution.
pub fn builtin(name: &str, n_space: usize, n_time: usize, eps: f64) -> Result<BuiltinProblem> {
    let eps = PenaltyParams::new(eps);
    match name {
        "unconstrained-heat" => {
            let horizon = 0.1;
            let grid = make_grid(1, Geometry::Box, n_space, n_time, &[[0.0, 1.0]], 0.0, horizon)?;
            let pi = std::f64::consts::PI;
            let mut data = zero_data(&grid, None);
            data.psi = ScalarField::sample(&grid, "psi", |_, _| -10.0);
            data.phi0 = sample_slice(&grid, |x| (pi * x[0]).sin());
            data.bilap_phi0 = Some(sample_slice(&grid, |x| pi.powi(4) * (pi * x[0]).sin()));
            Ok(BuiltinProblem {
                name: name.into(),
                grid,
                spec: ProblemSpec {
                    prototype: Prototype::Thick,
                    data,
                    alpha: None,
                    s: None,
                    eps,
                    horizon,
                },
                analytic: None,
            })
        }
        "thick-active" => {
            // translating cap: the coincidence set follows the obstacle, the
            // trailing free boundary recedes at speed ~0.1 and v+ ramps up
            // behind it; reaction psi_t - lap psi stays in [0.38, 0.42] < 1
            let horizon = 0.8;
            let speed = 0.1;
            let grid = make_grid(1, Geometry::Box, n_space, n_time, &[[0.0, 1.0]], 0.0, horizon)?;
            let psi_fn = move |t: f64, x: f64| {
                let d = x - 0.5 - speed * t;
                0.03 - 0.2 * d * d
            };
            let mut data = zero_data(&grid, None);
            data.psi = ScalarField::sample(&grid, "psi", |t, x| psi_fn(t, x[0]));
            data.psi_t = ScalarField::sample(&grid, "psi_t", move |t, x| {
                0.4 * speed * (x[0] - 0.5 - speed * t)
            });
            data.psi_tt =
                ScalarField::sample(&grid, "psi_tt", move |_, _| -0.4 * speed * speed);
            data.lap_psi = ScalarField::sample(&grid, "lap_psi", |_, _| -0.4);
            data.phi0 = sample_slice(&grid, |x| psi_fn(0.0, x[0]).max(0.0));
            Ok(BuiltinProblem {
                name: name.into(),
                grid,
                spec: ProblemSpec {
                    prototype: Prototype::Thick,
                    data,
                    alpha: None,
                    s: None,
                    eps,
                    horizon,
                },
                analytic: None,
            })
        }
        "thick-smooth" => {
            // smooth data, strictly separated at t = 0, with contact later;
            // all derivative fields are exact
            let horizon = 0.6;
            let grid = make_grid(1, Geometry::Box, n_space, n_time, &[[0.0, 1.0]], 0.0, horizon)?;
            let pi = std::f64::consts::PI;
            let psi_fn =
                |t: f64, x: f64| 0.06 - 0.25 * (x - 0.5) * (x - 0.5) - 0.05 * (2.0 * t).cos();
            let mut data = zero_data(&grid, None);
            data.psi = ScalarField::sample(&grid, "psi", |t, x| psi_fn(t, x[0]));
            data.psi_t = ScalarField::sample(&grid, "psi_t", |t, _| 0.1 * (2.0 * t).sin());
            data.psi_tt = ScalarField::sample(&grid, "psi_tt", |t, _| 0.2 * (2.0 * t).cos());
            data.lap_psi = ScalarField::sample(&grid, "lap_psi", |_, _| -0.5);
            data.phi0 = sample_slice(&grid, |x| 0.1 * (pi * x[0]).sin());
            data.bilap_phi0 = Some(sample_slice(&grid, |x| 0.1 * pi.powi(4) * (pi * x[0]).sin()));
            Ok(BuiltinProblem {
                name: name.into(),
                grid,
                spec: ProblemSpec {
                    prototype: Prototype::Thick,
                    data,
                    alpha: None,
                    s: None,
                    eps,
                    horizon,
                },
                analytic: None,
            })
        }
        "signorini-stationary" => {
            // zero obstacle on Gamma, stationary profile lateral data and an
            // interior perturbation that relaxes during the march; the late
            // field approaches the scaled profile with contact {x1 <= 0}
            let horizon = 0.5;
            let grid = make_grid(
                2,
                Geometry::HalfBoxWithGamma,
                n_space,
                n_time,
                &[[-1.0, 1.0], [0.0, 1.0]],
                0.0,
                horizon,
            )?;
            let a = PROFILE_AMPLITUDE;
            let pi = std::f64::consts::PI;
            let profile = move |x: &[f64]| a * signorini_profile(x, 0.0, 0.0, 0.0);
            let mut data = zero_data(&grid, None);
            // the perturbation's gradient vanishes on Gamma so near-interface
            // gradient scans see only the contact singularity
            data.phi0 = sample_slice(&grid, |x| {
                let s2 = (pi * x[1]).sin();
                profile(x) - 0.05 * (pi * (x[0] + 1.0) / 2.0).sin() * s2 * s2
            });
            data.lateral = sample_lateral(&grid, |_, x| profile(x));
            Ok(BuiltinProblem {
                name: name.into(),
                grid,
                spec: ProblemSpec {
                    prototype: Prototype::Signorini,
                    data,
                    alpha: None,
                    s: None,
                    eps,
                    horizon,
                },
                analytic: None,
            })
        }
        "signorini-active" => {
            // obstacle pressing on Gamma then receding: contact forms near
            // t ~ 0.03, peaks at t = 0.25 and detaches before T = 0.5, so
            // the positive time difference lives at the moving contact line;
            // peak contact flux ~0.5 stays inside the penalty range
            let horizon = 0.5;
            let grid = make_grid(
                2,
                Geometry::HalfBoxWithGamma,
                n_space,
                n_time,
                &[[-1.0, 1.0], [0.0, 1.0]],
                0.0,
                horizon,
            )?;
            let q = |x1: f64| {
                let w = 1.0 - x1 * x1;
                w * w
            };
            let pulse = |t: f64| (2.0 * std::f64::consts::PI * t).sin();
            let psi_fn = move |t: f64, x1: f64| -0.03 + 0.3 * pulse(t) * q(x1);
            let two_pi = 2.0 * std::f64::consts::PI;
            let mut data = zero_data(&grid, None);
            data.psi = ScalarField::sample(&grid, "psi", |t, x| psi_fn(t, x[0]));
            data.psi_t = ScalarField::sample(&grid, "psi_t", move |t, x| {
                0.3 * two_pi * (two_pi * t).cos() * q(x[0])
            });
            data.psi_tt = ScalarField::sample(&grid, "psi_tt", move |t, x| {
                -0.3 * two_pi * two_pi * (two_pi * t).sin() * q(x[0])
            });
            let qxx = |x1: f64| 12.0 * x1 * x1 - 4.0;
            data.lap_psi = ScalarField::sample(&grid, "lap_psi", move |t, x| {
                0.3 * pulse(t) * qxx(x[0])
            });
            // f = psi_t - lap psi~ with the extension constant in x2
            data.f = ScalarField::sample(&grid, "f", move |t, x| {
                0.3 * two_pi * (two_pi * t).cos() * q(x[0]) - 0.3 * pulse(t) * qxx(x[0])
            });
            Ok(BuiltinProblem {
                name: name.into(),
                grid,
                spec: ProblemSpec {
                    prototype: Prototype::Signorini,
                    data,
                    alpha: None,
                    s: None,
                    eps,
                    horizon,
                },
                analytic: None,
            })
        }
        "signorini-traveling" => {
            // closed-form traveling profile on a space-time window around the
            // free boundary point (0, 0, t=0); not marched
            let grid = make_grid(
                2,
                Geometry::HalfBoxWithGamma,
                n_space,
                n_time,
                &[[-1.0, 1.0], [0.0, 1.0]],
                -0.5,
                1.0,
            )?;
            let omega = TRAVELING_SPEED;
            let field = ScalarField::sample(&grid, "traveling_profile", |t, x| {
                signorini_profile(x, t, omega, 0.0)
            });
            let mut data = zero_data(&grid, None);
            data.phi0 = field.level(0).to_vec();
            data.lateral = sample_lateral(&grid, |t, x| signorini_profile(x, t, omega, 0.0));
            Ok(BuiltinProblem {
                name: name.into(),
                grid,
                spec: ProblemSpec {
                    prototype: Prototype::Signorini,
                    data,
                    alpha: None,
                    s: None,
                    eps,
                    horizon: 1.0,
                },
                analytic: Some(field),
            })
        }
        "fractional-active" => {
            // clipped concave cap, support about 1/8 of the period; the cap
            // keeps the fractional reaction under the penalty bound
            let horizon = 0.1;
            let two_pi = 2.0 * std::f64::consts::PI;
            let grid = make_grid(
                1,
                Geometry::PeriodicLine,
                n_space,
                n_time,
                &[[0.0, two_pi]],
                0.0,
                horizon,
            )?;
            let psi_fn = |x: f64| {
                let d = x - std::f64::consts::PI;
                (0.03 - 0.2 * d * d).max(-0.5)
            };
            let mut data = zero_data(&grid, None);
            data.psi = ScalarField::sample(&grid, "psi", |_, x| psi_fn(x[0]));
            data.phi0 = sample_slice(&grid, |x| psi_fn(x[0]).max(0.0));
            Ok(BuiltinProblem {
                name: name.into(),
                grid,
                spec: ProblemSpec {
                    prototype: Prototype::Fractional,
                    data,
                    alpha: None,
                    s: Some(0.5),
                    eps,
                    horizon,
                },
                analytic: None,
            })
        }
        "dynamic-caloric" => {
            // obstacle linear in time so the subtracted forcing is constant
            // in time (the regime the dynamic stepper is specified for)
            let horizon = 0.5;
            let grid = make_grid(
                2,
                Geometry::HalfBoxWithGamma,
                n_space,
                n_time,
                &[[-1.0, 1.0], [0.0, 1.0]],
                0.0,
                horizon,
            )?;
            let g_fn = |x1: f64| -0.05 - 0.2 * x1 * x1;
            let rate = 0.25;
            let mut data = zero_data(&grid, None);
            data.psi = ScalarField::sample(&grid, "psi", |t, x| g_fn(x[0]) + rate * t);
            data.psi_t = ScalarField::sample(&grid, "psi_t", |_, _| rate);
            data.lap_psi = ScalarField::sample(&grid, "lap_psi", |_, _| -0.4);
            // f = psi_t - lap psi~ with the extension constant in x2
            data.f = ScalarField::sample(&grid, "f", |_, _| rate + 0.4);
            Ok(BuiltinProblem {
                name: name.into(),
                grid,
                spec: ProblemSpec {
                    prototype: Prototype::DynamicThin,
                    data,
                    alpha: Some(0.5),
                    s: None,
                    eps,
                    horizon,
                },
                analytic: None,
            })
        }
        other => Err(Error::ConfigInvalid {
            path: "test".into(),
            reason: format!(
                "unknown built-in `{other}`; available: {}",
                BUILTIN_NAMES.join(", ")
            ),
        }),
    }
}

/// Runs a built-in: marches the penalized problem, or materializes the
/// closed-form field with its differenced time derivative.
pub fn run_builtin(problem: &BuiltinProblem) -> Result<SolveResult> {
    match &problem.analytic {
        None => march(&problem.spec, &problem.grid),
        Some(field) => {
            let grid = &problem.grid;
            let sl = grid.space_len();
            let psi = &problem.spec.data.psi;
            let mut v = ScalarField::zeros(grid, "v");
            for k in 0..grid.n_time {
                let (hi, lo, denom) = if k == 0 {
                    (1, 0, grid.dt)
                } else if k == grid.n_time - 1 {
                    (grid.n_time - 1, grid.n_time - 2, grid.dt)
                } else {
                    (k + 1, k - 1, 2.0 * grid.dt)
                };
                for c in 0..sl {
                    v.level_mut(k)[c] = ((field.at(hi, c) - psi.at(hi, c))
                        - (field.at(lo, c) - psi.at(lo, c)))
                        / denom;
                }
            }
            let per_step = (1..grid.n_time)
                .map(|k| StepRecord {
                    level: k,
                    newton_iters: 0,
                    residual: 0.0,
                    complementarity_defect: 0.0,
                    min_gap: grid
                        .contact_nodes()
                        .iter()
                        .map(|&c| field.at(k, c) - psi.at(k, c))
                        .fold(f64::INFINITY, f64::min),
                })
                .collect();
            Ok(SolveResult {
                u: field.clone(),
                v,
                per_step,
                eps_used: problem.spec.eps.eps,
            })
        }
    }
}

/// Default grid sizes per built-in, tuned for the acceptance runtime budget.
pub fn default_resolution(name: &str) -> (usize, usize) {
    match name {
        "unconstrained-heat" => (101, 51),
        "thick-active" => (257, 129),
        "thick-smooth" => (129, 65),
        "signorini-stationary" => (65, 65),
        "signorini-active" => (49, 49),
        "signorini-traveling" => (257, 41),
        "fractional-active" => (256, 129),
        "dynamic-caloric" => (65, 65),
        _ => (65, 33),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_builtins_materialize_and_validate() {
        for name in BUILTIN_NAMES {
            let (nx, nt) = (33, 9);
            let p = builtin(name, nx, nt, 1e-2).unwrap_or_else(|e| panic!("{name}: {e}"));
            p.spec
                .validate(&p.grid)
                .unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn unknown_name_is_config_error() {
        assert!(matches!(
            builtin("no-such-problem", 33, 9, 1e-2),
            Err(Error::ConfigInvalid { .. })
        ));
    }
}
