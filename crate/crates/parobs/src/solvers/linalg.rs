//! Small deterministic linear solvers for the implicit steps: a tridiagonal
//! direct solve for 1D systems and Jacobi-preconditioned conjugate gradients
//! for the symmetric 2D systems.

/// Solves a tridiagonal system in place. `lower[i]` couples row i to i-1,
/// `upper[i]` couples row i to i+1 (lower[0] and upper[n-1] unused).
pub fn solve_tridiagonal(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &[f64],
) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i] * c[i - 1];
        c[i] = if i + 1 < n { upper[i] / m } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// Matrix-free symmetric positive definite operator.
pub trait SpdOperator {
    fn len(&self) -> usize;
    /// y = A x
    fn apply(&self, x: &[f64], y: &mut [f64]);
    /// Diagonal of A, used as the Jacobi preconditioner.
    fn diag(&self, d: &mut [f64]);
}

/// Jacobi-preconditioned CG. Returns the solution; panics are avoided by
/// bounding iterations at 10 n, which is far beyond need for these systems.
pub fn conjugate_gradient<A: SpdOperator>(op: &A, rhs: &[f64], rel_tol: f64) -> Vec<f64> {
    let n = op.len();
    let mut x = vec![0.0; n];
    let mut r = rhs.to_vec();
    let mut diag = vec![0.0; n];
    op.diag(&mut diag);
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let rhs_norm = dot(rhs, rhs).sqrt();
    if rhs_norm == 0.0 {
        return x;
    }
    let mut rz = dot(&r, &z);
    let tol = rel_tol * rhs_norm;
    for _ in 0..10 * n {
        op.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if dot(&r, &r).sqrt() <= tol {
            break;
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_solves_poisson_row() {
        let n = 50;
        let lower = vec![-1.0; n];
        let diag = vec![2.5; n];
        let upper = vec![-1.0; n];
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            rhs[i] = 2.5 * x_true[i];
            if i > 0 {
                rhs[i] -= x_true[i - 1];
            }
            if i + 1 < n {
                rhs[i] -= x_true[i + 1];
            }
        }
        let x = solve_tridiagonal(&lower, &diag, &upper, &rhs);
        for i in 0..n {
            assert!((x[i] - x_true[i]).abs() < 1e-12);
        }
    }

    struct Dense(Vec<Vec<f64>>);
    impl SpdOperator for Dense {
        fn len(&self) -> usize {
            self.0.len()
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            for (i, row) in self.0.iter().enumerate() {
                y[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
            }
        }
        fn diag(&self, d: &mut [f64]) {
            for i in 0..self.0.len() {
                d[i] = self.0[i][i];
            }
        }
    }

    #[test]
    fn cg_solves_spd_system() {
        let a = Dense(vec![
            vec![4.0, 1.0, 0.0],
            vec![1.0, 3.0, -1.0],
            vec![0.0, -1.0, 5.0],
        ]);
        let rhs = vec![1.0, -2.0, 3.0];
        let x = conjugate_gradient(&a, &rhs, 1e-14);
        let mut ax = vec![0.0; 3];
        a.apply(&x, &mut ax);
        for i in 0..3 {
            assert!((ax[i] - rhs[i]).abs() < 1e-10);
        }
    }
}
