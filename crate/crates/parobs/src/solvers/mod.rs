//! Time-marching penalized solvers for the four obstacle prototypes and the
//! derived time-difference field used by the regularity diagnostics.

pub mod boundary;
pub mod fractional;
pub mod linalg;
pub mod thick;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Geometry, Grid, SampledData, ScalarField};
use crate::penalty::{beta_and_prime, PenaltyParams};

pub use boundary::{step_dynamic, step_signorini};
pub use fractional::{step_fractional, SpectralLine};
pub use thick::step_thick;

/// Which obstacle prototype a problem uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Prototype {
    /// Constraint throughout the domain, heat operator.
    Thick,
    /// Constraint on the contact face Gamma, zero dynamic coefficient.
    Signorini,
    /// Constraint on Gamma with alpha u_t + u_nu >= 0.
    DynamicThin,
    /// Constraint on the periodic line, fractional Laplacian evolution.
    Fractional,
}

/// Fully specified problem: prototype, sampled data and parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub prototype: Prototype,
    pub data: SampledData,
    /// Dynamic coefficient in (0, 1]; present iff prototype is DynamicThin.
    pub alpha: Option<f64>,
    /// Fractional order in (0, 1); present iff prototype is Fractional.
    pub s: Option<f64>,
    pub eps: PenaltyParams,
    /// Time horizon, equal to (n_time - 1) * dt of the grid.
    pub horizon: f64,
}

impl ProblemSpec {
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        self.data.validate(grid)?;
        match self.prototype {
            Prototype::DynamicThin => {
                let a = self.alpha.ok_or_else(|| Error::ConfigInvalid {
                    path: "alpha".into(),
                    reason: "dynamic prototype needs alpha".into(),
                })?;
                if !(0.0 < a && a <= 1.0) {
                    return Err(Error::ConfigInvalid {
                        path: "alpha".into(),
                        reason: format!("alpha must lie in (0, 1], got {a}"),
                    });
                }
            }
            Prototype::Fractional => {
                let s = self.s.ok_or_else(|| Error::ConfigInvalid {
                    path: "s".into(),
                    reason: "fractional prototype needs the order s".into(),
                })?;
                if !(0.0 < s && s <= 1.0) {
                    return Err(Error::ConfigInvalid {
                        path: "s".into(),
                        reason: format!("s must lie in (0, 1], got {s}"),
                    });
                }
            }
            _ => {
                if self.alpha.is_some() {
                    return Err(Error::ConfigInvalid {
                        path: "alpha".into(),
                        reason: "alpha only applies to the dynamic prototype".into(),
                    });
                }
                if self.s.is_some() {
                    return Err(Error::ConfigInvalid {
                        path: "s".into(),
                        reason: "s only applies to the fractional prototype".into(),
                    });
                }
            }
        }
        let expect_geometry = match self.prototype {
            Prototype::Thick => Geometry::Box,
            Prototype::Signorini | Prototype::DynamicThin => Geometry::HalfBoxWithGamma,
            Prototype::Fractional => Geometry::PeriodicLine,
        };
        if grid.geometry != expect_geometry {
            return Err(Error::GeometryMismatch(format!(
                "{:?} prototype expects {:?} geometry, grid has {:?}",
                self.prototype, expect_geometry, grid.geometry
            )));
        }
        // initial separation on the contact set
        let psi0 = self.data.psi.level(0);
        let mut min_sep = f64::INFINITY;
        for &c in &grid.contact_nodes() {
            min_sep = min_sep.min(self.data.phi0[c] - psi0[c]);
        }
        if min_sep < -1e-12 {
            return Err(Error::ConfigInvalid {
                path: "data.phi0".into(),
                reason: format!("initial data dips below the obstacle by {:.3e}", -min_sep),
            });
        }
        // the half-box extension is constant in x2, and so is f
        if grid.geometry == Geometry::HalfBoxWithGamma {
            for (name, field) in [("psi", &self.data.psi), ("f", &self.data.f)] {
                for k in 0..grid.n_time {
                    let lv = field.level(k);
                    for j in 1..grid.n_space {
                        for i in 0..grid.n_space {
                            let a = lv[grid.idx2(i, j)];
                            let b = lv[grid.idx2(i, 0)];
                            if (a - b).abs() > 1e-9 * (1.0 + b.abs()) {
                                return Err(Error::ConfigInvalid {
                                    path: format!("data.{name}"),
                                    reason: "must be constant along x2 on the half-box".into(),
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Initial separation margin, min over the contact set of phi0 - psi(t0).
    pub fn initial_separation(&self, grid: &Grid) -> f64 {
        let psi0 = self.data.psi.level(0);
        grid.contact_nodes()
            .iter()
            .map(|&c| self.data.phi0[c] - psi0[c])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Final Newton/Picard state of one accepted step.
#[derive(Debug, Clone, Copy)]
pub struct NewtonInfo {
    pub iters: usize,
    pub residual: f64,
}

/// Per-step diagnostics recorded by `march`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepRecord {
    pub level: usize,
    pub newton_iters: usize,
    pub residual: f64,
    /// max over contact nodes of |(u - psi) * beta(u - psi)|.
    pub complementarity_defect: f64,
    /// min over contact nodes of u - psi.
    pub min_gap: f64,
}

/// Solution of a full march plus its derived time-difference field.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveResult {
    /// The solution in original variables.
    pub u: ScalarField,
    /// Discrete (u - psi~)_t: centered in time, one-sided at the endpoints.
    pub v: ScalarField,
    pub per_step: Vec<StepRecord>,
    pub eps_used: f64,
}

/// Whether the prototype marches the subtracted field u - psi~.
fn marches_subtracted(p: Prototype) -> bool {
    matches!(p, Prototype::Signorini | Prototype::DynamicThin)
}

/// Runs the prototype's stepper over all time levels.
pub fn march(spec: &ProblemSpec, grid: &Grid) -> Result<SolveResult> {
    spec.validate(grid)?;
    let subtracted = marches_subtracted(spec.prototype);
    let line = match spec.prototype {
        Prototype::Fractional => Some(SpectralLine::new(grid, spec.s.unwrap())?),
        _ => None,
    };

    // marched variable at level 0
    let mut w = spec.data.phi0.clone();
    if subtracted {
        let psi0 = spec.data.psi.level(0);
        for (wi, &pi) in w.iter_mut().zip(psi0) {
            *wi -= pi;
        }
    }

    let mut marched = ScalarField::zeros(grid, "marched");
    marched.set_level(0, &w);
    let mut per_step = Vec::with_capacity(grid.n_time - 1);
    for k in 1..grid.n_time {
        let (w_next, info) = match spec.prototype {
            Prototype::Thick => step_thick(&w, spec, grid, k)?,
            Prototype::Signorini => step_signorini(&w, spec, grid, k)?,
            Prototype::DynamicThin => step_dynamic(&w, spec, grid, k)?,
            Prototype::Fractional => {
                step_fractional(&w, spec, grid, k, line.as_ref().unwrap())?
            }
        };
        w = w_next;
        marched.set_level(k, &w);

        // gap and complementarity on the contact set
        let psi_k = spec.data.psi.level(k);
        let mut min_gap = f64::INFINITY;
        let mut defect = 0.0f64;
        for &c in &grid.contact_nodes() {
            let gap = if subtracted { w[c] } else { w[c] - psi_k[c] };
            let (b, _) = beta_and_prime(spec.eps, gap);
            min_gap = min_gap.min(gap);
            defect = defect.max((gap * b).abs());
        }
        per_step.push(StepRecord {
            level: k,
            newton_iters: info.iters,
            residual: info.residual,
            complementarity_defect: defect,
            min_gap,
        });
    }

    assemble_result(marched, spec, grid, per_step)
}

/// Builds the SolveResult from the marched variable: reconstructs the
/// original field when the subtracted one was marched and fills v by time
/// differences of u - psi~ (centered inside, one-sided at the endpoints).
pub(crate) fn assemble_result(
    marched: ScalarField,
    spec: &ProblemSpec,
    grid: &Grid,
    per_step: Vec<StepRecord>,
) -> Result<SolveResult> {
    let sl = grid.space_len();
    let subtracted = marches_subtracted(spec.prototype);
    let mut u = ScalarField::zeros(grid, "u");
    let mut sub = ScalarField::zeros(grid, "u_minus_obstacle");
    for k in 0..grid.n_time {
        let psi_k = spec.data.psi.level(k);
        let m = marched.level(k);
        let u_lv = u.level_mut(k);
        for c in 0..sl {
            u_lv[c] = if subtracted { m[c] + psi_k[c] } else { m[c] };
        }
        let s_lv = sub.level_mut(k);
        for c in 0..sl {
            s_lv[c] = if subtracted { m[c] } else { m[c] - psi_k[c] };
        }
    }

    let mut v = ScalarField::zeros(grid, "v");
    let nt = grid.n_time;
    for k in 0..nt {
        let (hi, lo, denom) = if k == 0 {
            (1, 0, grid.dt)
        } else if k == nt - 1 {
            (nt - 1, nt - 2, grid.dt)
        } else {
            (k + 1, k - 1, 2.0 * grid.dt)
        };
        for c in 0..sl {
            let val = (sub.at(hi, c) - sub.at(lo, c)) / denom;
            v.level_mut(k)[c] = val;
        }
    }
    u.assert_finite("march")?;
    v.assert_finite("march")?;
    Ok(SolveResult {
        u,
        v,
        per_step,
        eps_used: spec.eps.eps,
    })
}

/// One row of the penalization-parameter sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub eps: f64,
    /// max-norm distance to the reference solution.
    pub err_inf: f64,
    pub min_gap: f64,
    pub complementarity_defect: f64,
    /// (radius, max window oscillation of v+) pairs when radii were requested.
    pub modulus_table: Option<Vec<(f64, f64)>>,
    /// log-log slope of the modulus table.
    pub modulus_fit: Option<f64>,
}

/// Convergence table of a sweep, smallest eps last.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

/// Runs `march` per eps against a fixed reference solution.
///
/// `reference` is the complementarity solution on the same grid (from the
/// reference module); `modulus_radii`, when given, adds the v+ oscillation
/// table and its fitted exponent per row.
pub fn eps_sweep(
    spec: &ProblemSpec,
    grid: &Grid,
    eps_list: &[f64],
    reference: &ScalarField,
    modulus_radii: Option<&[f64]>,
) -> Result<SweepTable> {
    if eps_list.len() < 3 {
        return Err(Error::ConfigInvalid {
            path: "eps_list".into(),
            reason: format!("need at least 3 entries, got {}", eps_list.len()),
        });
    }
    if !eps_list.windows(2).all(|w| w[0] > w[1]) {
        return Err(Error::ConfigInvalid {
            path: "eps_list".into(),
            reason: "entries must be strictly decreasing".into(),
        });
    }
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let mut spec_eps = spec.clone();
        spec_eps.eps = PenaltyParams::new(eps);
        let result = march(&spec_eps, grid)?;
        let err_inf = result
            .u
            .values
            .iter()
            .zip(&reference.values)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let min_gap = result
            .per_step
            .iter()
            .map(|r| r.min_gap)
            .fold(f64::INFINITY, f64::min);
        let defect = result
            .per_step
            .iter()
            .map(|r| r.complementarity_defect)
            .fold(0.0f64, f64::max);
        let (modulus_table, modulus_fit) = match modulus_radii {
            Some(radii) => {
                let m = crate::diagnostics::time_derivative_modulus(&result, radii, true)?;
                (Some(m.table.clone()), Some(m.fit.exponent))
            }
            None => (None, None),
        };
        rows.push(SweepRow {
            eps,
            err_inf,
            min_gap,
            complementarity_defect: defect,
            modulus_table,
            modulus_fit,
        });
    }
    Ok(SweepTable { rows })
}
