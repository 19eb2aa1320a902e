//! Small direct linear solvers: periodic (cyclic) tridiagonal systems and
//! dense systems with partial pivoting.

use crate::error::{Error, Result};

/// Relative pivot size below which a system is reported as singular.
const PIVOT_TOL: f64 = 1e-13;

/// A cyclic tridiagonal matrix: row `k` reads
/// `lower[k] x[k-1] + diag[k] x[k] + upper[k] x[k+1]` with indices mod `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicTridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl CyclicTridiagonal {
    pub fn new(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if lower.len() != n || upper.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: lower.len().min(upper.len()),
            });
        }
        if n < 3 {
            return Err(Error::ResolutionTooSmall { got: n, min: 3 });
        }
        Ok(Self { lower, diag, upper })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|k| {
                self.lower[k] * x[(k + n - 1) % n] + self.diag[k] * x[k] + self.upper[k] * x[(k + 1) % n]
            })
            .collect()
    }

    /// Dense copy, mostly for tests and diagnostics.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut a = vec![vec![0.0; n]; n];
        for k in 0..n {
            a[k][(k + n - 1) % n] += self.lower[k];
            a[k][k] += self.diag[k];
            a[k][(k + 1) % n] += self.upper[k];
        }
        a
    }

    /// Solves `A x = r` in O(n) with the Sherman-Morrison correction of a
    /// Thomas sweep.
    pub fn solve(&self, r: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if r.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: r.len(),
            });
        }
        let scale = self
            .diag
            .iter()
            .chain(&self.lower)
            .chain(&self.upper)
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::SingularJacobian { row: 0, pivot: 0.0 });
        }
        // A = T + u v^T with u = (γ, 0, …, 0, c_{n-1}), v = (1, 0, …, 0, a_0/γ)
        let gamma = -self.diag[0];
        let alpha = self.upper[n - 1]; // corner A[n-1][0]
        let beta = self.lower[0]; // corner A[0][n-1]
        let mut diag = self.diag.clone();
        diag[0] -= gamma;
        diag[n - 1] -= alpha * beta / gamma;

        let y = thomas(&self.lower, &diag, &self.upper, r, scale)?;
        let mut u = vec![0.0; n];
        u[0] = gamma;
        u[n - 1] = alpha;
        let z = thomas(&self.lower, &diag, &self.upper, &u, scale)?;
        let vy = y[0] + beta * y[n - 1] / gamma;
        let vz = z[0] + beta * z[n - 1] / gamma;
        let denom = 1.0 + vz;
        if denom.abs() < PIVOT_TOL || !denom.is_finite() {
            return Err(Error::SingularJacobian {
                row: n - 1,
                pivot: denom,
            });
        }
        let f = vy / denom;
        let x: Vec<f64> = y.iter().zip(&z).map(|(yi, zi)| yi - f * zi).collect();
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularJacobian { row: 0, pivot: denom });
        }
        Ok(x)
    }
}

/// Thomas sweep on the non-periodic part (`lower[0]`, `upper[n-1]` ignored).
fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], r: &[f64], scale: f64) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut gam = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut bet = diag[0];
    if bet.abs() < PIVOT_TOL * scale {
        return Err(Error::SingularJacobian { row: 0, pivot: bet });
    }
    x[0] = r[0] / bet;
    for k in 1..n {
        gam[k] = upper[k - 1] / bet;
        bet = diag[k] - lower[k] * gam[k];
        if bet.abs() < PIVOT_TOL * scale || !bet.is_finite() {
            return Err(Error::SingularJacobian { row: k, pivot: bet });
        }
        x[k] = (r[k] - lower[k] * x[k - 1]) / bet;
    }
    for k in (0..n - 1).rev() {
        x[k] -= gam[k + 1] * x[k + 1];
    }
    Ok(x)
}

/// Solves a dense square system by Gaussian elimination with partial
/// pivoting.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    if a.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: a.len(),
        });
    }
    let scale = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty range");
        if !(a[piv][col].abs() > PIVOT_TOL * scale) {
            return Err(Error::SingularJacobian {
                row: col,
                pivot: a[piv][col],
            });
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Ok(x)
}
