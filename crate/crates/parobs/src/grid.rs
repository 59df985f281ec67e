//! Uniform space-time lattices, sampled fields, finite-difference stencils,
//! the Gauss-Weierstrass kernel, and cutoff functions shared by every solver
//! and diagnostic.
//!
//! Geometry is restricted to tensor-product boxes: a 1D/2D box with Dirichlet
//! sides, a 2D half-box whose bottom face carries the contact condition, and a
//! periodic line. All claims checked downstream are local, so a box suffices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Domain geometry of a [`Grid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Geometry {
    /// Dirichlet box in 1 or 2 dimensions.
    Box,
    /// 2D box whose bottom face {x2 = 0} is the contact line Gamma.
    HalfBoxWithGamma,
    /// 1D periodic interval (used by the spectral solver).
    PeriodicLine,
}

/// Uniform space-time lattice.
///
/// Spatial axes share the node count `n_space`; spacing is `h` on the first
/// axis and `h2` on the second (they differ only when the extents differ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    pub geometry: Geometry,
    pub n_space: usize,
    pub n_time: usize,
    /// Spacing along the first spatial axis.
    pub h: f64,
    /// Spacing along the second spatial axis (equals `h` for square extents).
    pub h2: f64,
    pub dt: f64,
    pub t0: f64,
    /// Physical interval per axis, `extent[axis] = [lo, hi]`.
    pub extent: Vec<[f64; 2]>,
}

impl Grid {
    /// Number of nodes in one spatial slice.
    pub fn space_len(&self) -> usize {
        match self.dim {
            1 => self.n_space,
            2 => self.n_space * self.n_space,
            _ => unreachable!("dim is validated at construction"),
        }
    }

    /// Flat index of the 2D node (i, j) with i along x1 and j along x2.
    #[inline]
    pub fn idx2(&self, i: usize, j: usize) -> usize {
        j * self.n_space + i
    }

    /// Physical coordinate of node `i` on axis `axis`.
    #[inline]
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        let lo = self.extent[axis][0];
        let h = if axis == 0 { self.h } else { self.h2 };
        lo + i as f64 * h
    }

    /// Physical time of level `k`.
    #[inline]
    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn is_periodic(&self) -> bool {
        self.geometry == Geometry::PeriodicLine
    }

    /// Indices of the Dirichlet (lateral) boundary nodes of one slice, in a
    /// fixed canonical order. For the half-box the bottom face is excluded
    /// except for its two corners, which are pinned with the lateral data.
    pub fn lateral_nodes(&self) -> Vec<usize> {
        match (self.dim, self.geometry) {
            (1, Geometry::Box) => vec![0, self.n_space - 1],
            (1, Geometry::PeriodicLine) => vec![],
            (2, Geometry::Box) => {
                let n = self.n_space;
                let mut out = Vec::new();
                for j in 0..n {
                    for i in 0..n {
                        if i == 0 || i == n - 1 || j == 0 || j == n - 1 {
                            out.push(self.idx2(i, j));
                        }
                    }
                }
                out
            }
            (2, Geometry::HalfBoxWithGamma) => {
                let n = self.n_space;
                let mut out = Vec::new();
                for j in 0..n {
                    for i in 0..n {
                        let on_gamma_interior = j == 0 && i > 0 && i < n - 1;
                        if (i == 0 || i == n - 1 || j == n - 1) && !on_gamma_interior {
                            out.push(self.idx2(i, j));
                        }
                    }
                }
                out
            }
            _ => unreachable!(),
        }
    }

    /// Contact-set node indices: all nodes for thick/fractional geometries,
    /// the Gamma line for the half-box.
    pub fn contact_nodes(&self) -> Vec<usize> {
        match self.geometry {
            Geometry::HalfBoxWithGamma => (0..self.n_space).map(|i| self.idx2(i, 0)).collect(),
            _ => (0..self.space_len()).collect(),
        }
    }
}

/// Build a grid. `extent` holds one interval per spatial axis and `horizon`
/// is the length of the time interval starting at `t0`.
pub fn make_grid(
    dim: usize,
    geometry: Geometry,
    n_space: usize,
    n_time: usize,
    extent: &[[f64; 2]],
    t0: f64,
    horizon: f64,
) -> Result<Grid> {
    if dim == 0 || dim > 2 {
        return Err(Error::InvalidGeometry(format!("dim must be 1 or 2, got {dim}")));
    }
    if geometry == Geometry::HalfBoxWithGamma && dim != 2 {
        return Err(Error::InvalidGeometry(
            "half-box with contact face requires dim = 2".into(),
        ));
    }
    if geometry == Geometry::PeriodicLine && dim != 1 {
        return Err(Error::InvalidGeometry("periodic line requires dim = 1".into()));
    }
    if n_space < 3 {
        return Err(Error::DegenerateGrid(format!("n_space = {n_space} < 3")));
    }
    if n_time < 3 {
        return Err(Error::DegenerateGrid(format!(
            "n_time = {n_time} < 3 (second time quotients need three levels)"
        )));
    }
    if extent.len() != dim {
        return Err(Error::InvalidGeometry(format!(
            "extent has {} axes, dim = {dim}",
            extent.len()
        )));
    }
    if horizon <= 0.0 {
        return Err(Error::DegenerateGrid("horizon must be positive".into()));
    }
    let lengths: Vec<f64> = extent.iter().map(|e| e[1] - e[0]).collect();
    if lengths.iter().any(|&l| l <= 0.0) {
        return Err(Error::InvalidGeometry("extent intervals must be increasing".into()));
    }
    let divisor = if geometry == Geometry::PeriodicLine {
        n_space as f64
    } else {
        (n_space - 1) as f64
    };
    let h = lengths[0] / divisor;
    let h2 = if dim == 2 { lengths[1] / (n_space - 1) as f64 } else { h };
    Ok(Grid {
        dim,
        geometry,
        n_space,
        n_time,
        h,
        h2,
        dt: horizon / (n_time - 1) as f64,
        t0,
        extent: extent.to_vec(),
    })
}

/// Sampled scalar field over a grid: `values[level * space_len + node]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub label: String,
}

impl ScalarField {
    pub fn zeros(grid: &Grid, label: &str) -> Self {
        ScalarField {
            grid: grid.clone(),
            values: vec![0.0; grid.n_time * grid.space_len()],
            label: label.to_string(),
        }
    }

    /// Sample `f(t, x)` at every node; `x` has one entry per spatial axis.
    pub fn sample(grid: &Grid, label: &str, f: impl Fn(f64, &[f64]) -> f64) -> Self {
        let sl = grid.space_len();
        let mut values = vec![0.0; grid.n_time * sl];
        for k in 0..grid.n_time {
            let t = grid.time(k);
            match grid.dim {
                1 => {
                    for i in 0..grid.n_space {
                        values[k * sl + i] = f(t, &[grid.coord(0, i)]);
                    }
                }
                2 => {
                    for j in 0..grid.n_space {
                        for i in 0..grid.n_space {
                            values[k * sl + grid.idx2(i, j)] =
                                f(t, &[grid.coord(0, i), grid.coord(1, j)]);
                        }
                    }
                }
                _ => unreachable!(),
            }
        }
        ScalarField {
            grid: grid.clone(),
            values,
            label: label.to_string(),
        }
    }

    #[inline]
    pub fn at(&self, level: usize, node: usize) -> f64 {
        self.values[level * self.grid.space_len() + node]
    }

    pub fn level(&self, k: usize) -> &[f64] {
        let sl = self.grid.space_len();
        &self.values[k * sl..(k + 1) * sl]
    }

    pub fn level_mut(&mut self, k: usize) -> &mut [f64] {
        let sl = self.grid.space_len();
        &mut self.values[k * sl..(k + 1) * sl]
    }

    pub fn set_level(&mut self, k: usize, slice: &[f64]) {
        self.level_mut(k).copy_from_slice(slice);
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn assert_finite(&self, who: &str) -> Result<()> {
        if self.values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite(format!("{who} ({})", self.label)))
        }
    }
}

/// Obstacle, data, and their analytically supplied derivatives for one
/// problem. Derivative fields come from the test-problem generators, never
/// from re-differencing, so bounds built from them are exact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampledData {
    /// Obstacle. On the half-box this is the extension, constant in x2.
    pub psi: ScalarField,
    /// Time derivative of the extended obstacle.
    pub psi_t: ScalarField,
    /// Second time derivative of the extended obstacle.
    pub psi_tt: ScalarField,
    /// Spatial Laplacian of the extended obstacle.
    pub lap_psi: ScalarField,
    /// Initial slice.
    pub phi0: Vec<f64>,
    /// Dirichlet values per time level, ordered like `Grid::lateral_nodes`.
    pub lateral: Vec<Vec<f64>>,
    /// Forcing, -(lap(psi~) - psi~_t) for subtracted formulations, or any
    /// manufactured right-hand side.
    pub f: ScalarField,
    /// Analytic bilaplacian of the initial slice, when the generator knows it.
    pub bilap_phi0: Option<Vec<f64>>,
}

impl SampledData {
    /// Checks shapes and the initial/lateral compatibility condition.
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        let sl = grid.space_len();
        for (name, field) in [
            ("psi", &self.psi),
            ("psi_t", &self.psi_t),
            ("psi_tt", &self.psi_tt),
            ("lap_psi", &self.lap_psi),
            ("f", &self.f),
        ] {
            if field.values.len() != grid.n_time * sl {
                return Err(Error::ShapeMismatch {
                    expected: grid.n_time * sl,
                    got: field.values.len(),
                });
            }
            field.assert_finite(name)?;
        }
        if self.phi0.len() != sl {
            return Err(Error::ShapeMismatch {
                expected: sl,
                got: self.phi0.len(),
            });
        }
        let lateral_nodes = grid.lateral_nodes();
        if self.lateral.len() != grid.n_time {
            return Err(Error::ShapeMismatch {
                expected: grid.n_time,
                got: self.lateral.len(),
            });
        }
        for row in &self.lateral {
            if row.len() != lateral_nodes.len() {
                return Err(Error::ShapeMismatch {
                    expected: lateral_nodes.len(),
                    got: row.len(),
                });
            }
        }
        // lateral data must match phi0 where they share nodes
        if !lateral_nodes.is_empty() {
            for (b, &node) in lateral_nodes.iter().enumerate() {
                let diff = (self.lateral[0][b] - self.phi0[node]).abs();
                let scale = 1.0 + self.phi0[node].abs();
                if diff > 1e-10 * scale {
                    return Err(Error::ConfigInvalid {
                        path: format!("data.lateral[0][{b}]"),
                        reason: format!(
                            "incompatible with phi0 at node {node}: lateral {} vs phi0 {}",
                            self.lateral[0][b], self.phi0[node]
                        ),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Gauss-Weierstrass kernel in n dimensions, zero for t <= 0.
pub fn heat_kernel(x: &[f64], t: f64, n: usize) -> f64 {
    debug_assert!((1..=3).contains(&n));
    if t <= 0.0 {
        return 0.0;
    }
    let r2: f64 = x.iter().map(|v| v * v).sum();
    (4.0 * std::f64::consts::PI * t).powf(-(n as f64) / 2.0) * (-r2 / (4.0 * t)).exp()
}

/// Centered discrete Laplacian of one spatial slice.
///
/// Interior nodes use the 3-point (1D) / 5-point (2D) stencil. On the
/// half-box, Gamma nodes use the caller-supplied ghost layer (values at
/// x2 = -h2); other boundary nodes are left at zero since they carry
/// Dirichlet data. The periodic line wraps.
pub fn fd_laplacian(slice: &[f64], grid: &Grid, ghost: Option<&[f64]>) -> Result<Vec<f64>> {
    let sl = grid.space_len();
    if slice.len() != sl {
        return Err(Error::ShapeMismatch {
            expected: sl,
            got: slice.len(),
        });
    }
    let n = grid.n_space;
    let mut out = vec![0.0; sl];
    match (grid.dim, grid.geometry) {
        (1, Geometry::Box) => {
            let h2 = grid.h * grid.h;
            for i in 1..n - 1 {
                out[i] = (slice[i - 1] - 2.0 * slice[i] + slice[i + 1]) / h2;
            }
        }
        (1, Geometry::PeriodicLine) => {
            let h2 = grid.h * grid.h;
            for i in 0..n {
                let l = if i == 0 { n - 1 } else { i - 1 };
                let r = if i == n - 1 { 0 } else { i + 1 };
                out[i] = (slice[l] - 2.0 * slice[i] + slice[r]) / h2;
            }
        }
        (2, Geometry::Box) | (2, Geometry::HalfBoxWithGamma) => {
            let hx2 = grid.h * grid.h;
            let hy2 = grid.h2 * grid.h2;
            for j in 1..n - 1 {
                for i in 1..n - 1 {
                    let c = grid.idx2(i, j);
                    out[c] = (slice[c - 1] - 2.0 * slice[c] + slice[c + 1]) / hx2
                        + (slice[grid.idx2(i, j - 1)] - 2.0 * slice[c] + slice[grid.idx2(i, j + 1)])
                            / hy2;
                }
            }
            if grid.geometry == Geometry::HalfBoxWithGamma {
                if let Some(g) = ghost {
                    if g.len() != n {
                        return Err(Error::ShapeMismatch {
                            expected: n,
                            got: g.len(),
                        });
                    }
                    for i in 1..n - 1 {
                        let c = grid.idx2(i, 0);
                        out[c] = (slice[c - 1] - 2.0 * slice[c] + slice[c + 1]) / hx2
                            + (g[i] - 2.0 * slice[c] + slice[grid.idx2(i, 1)]) / hy2;
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    Ok(out)
}

/// Second incremental quotient of a field along a space-time offset.
///
/// `direction` is the physical offset (t, x1[, x2]) and `step` scales it;
/// the product must align with the lattice. Returns the quotient values and
/// an availability mask (nodes whose both neighbors exist).
pub struct QuotientField {
    pub values: Vec<f64>,
    pub available: Vec<bool>,
    pub grid: Grid,
}

pub fn second_incremental_quotient(
    field: &ScalarField,
    direction: &[f64],
    step: f64,
) -> Result<QuotientField> {
    let grid = &field.grid;
    if direction.len() != grid.dim + 1 {
        return Err(Error::ShapeMismatch {
            expected: grid.dim + 1,
            got: direction.len(),
        });
    }
    let offset_t = direction[0] * step;
    let offset_x: Vec<f64> = direction[1..].iter().map(|d| d * step).collect();
    let snap = |value: f64, spacing: f64, what: &str| -> Result<i64> {
        let ratio = value / spacing;
        let k = ratio.round();
        if (ratio - k).abs() > 1e-9 * (1.0 + k.abs()) {
            return Err(Error::InvalidGeometry(format!(
                "offset {value} along {what} is not a lattice multiple of {spacing}"
            )));
        }
        Ok(k as i64)
    };
    let kt = snap(offset_t, grid.dt, "time")?;
    let mut kx = vec![0i64; grid.dim];
    for a in 0..grid.dim {
        let spacing = if a == 0 { grid.h } else { grid.h2 };
        kx[a] = snap(offset_x[a], spacing, "space")?;
    }
    let w2: f64 = offset_t * offset_t + offset_x.iter().map(|v| v * v).sum::<f64>();
    if w2 == 0.0 {
        return Err(Error::InvalidGeometry("zero offset".into()));
    }
    let sl = grid.space_len();
    let n = grid.n_space as i64;
    let nt = grid.n_time as i64;
    let periodic = grid.is_periodic();
    let mut values = vec![0.0; grid.n_time * sl];
    let mut available = vec![false; grid.n_time * sl];
    let mut any = false;
    for k in 0..nt {
        if k - kt < 0 || k + kt >= nt {
            continue;
        }
        for node in 0..sl {
            let (i, j) = if grid.dim == 1 {
                (node as i64, 0i64)
            } else {
                ((node % grid.n_space) as i64, (node / grid.n_space) as i64)
            };
            let neighbor = |sign: i64| -> Option<usize> {
                let mut ii = i + sign * kx[0];
                let jj = if grid.dim == 2 { j + sign * kx[1] } else { 0 };
                if periodic {
                    ii = ii.rem_euclid(n);
                } else if ii < 0 || ii >= n {
                    return None;
                }
                if grid.dim == 2 && (jj < 0 || jj >= n) {
                    return None;
                }
                Some(if grid.dim == 1 {
                    ii as usize
                } else {
                    (jj * n + ii) as usize
                })
            };
            if let (Some(p), Some(m)) = (neighbor(1), neighbor(-1)) {
                let kp = (k + kt) as usize;
                let km = (k - kt) as usize;
                let idx = k as usize * sl + node;
                values[idx] =
                    (field.at(kp, p) + field.at(km, m) - 2.0 * field.at(k as usize, node)) / w2;
                available[idx] = true;
                any = true;
            }
        }
    }
    if !any {
        return Err(Error::StepTooLarge);
    }
    Ok(QuotientField {
        values,
        available,
        grid: grid.clone(),
    })
}

/// Quintic taper: 1 for rho <= r_half, 0 for rho >= r_outer, C^2 in between.
pub fn cutoff_taper(rho: f64, r_half: f64, r_outer: f64) -> f64 {
    if rho <= r_half {
        1.0
    } else if rho >= r_outer {
        0.0
    } else {
        let s = (rho - r_half) / (r_outer - r_half);
        1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s))
    }
}
