//! Small dense complex linear algebra on top of `nalgebra`, plus the
//! finite-difference Newton solver shared by the chart inversions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Singular values in descending order.
pub fn singular_values(rows: usize, cols: usize, entries: &[Complex64]) -> Vec<f64> {
    if rows == 0 || cols == 0 {
        return Vec::new();
    }
    let m = DMatrix::from_row_slice(rows, cols, entries);
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub(crate) fn condition_number(m: &DMatrix<Complex64>) -> f64 {
    let sv = m.singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub(crate) fn solve(a: DMatrix<Complex64>, b: DVector<Complex64>) -> Option<DVector<Complex64>> {
    a.lu().solve(&b)
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Central finite-difference Jacobian of a holomorphic system, with step
/// `1e-6 * (1 + |x_i|)` along the real axis of each unknown.
pub(crate) fn fd_jacobian(
    x: &[Complex64],
    residual: &impl Fn(&[Complex64]) -> Result<Vec<Complex64>>,
) -> Result<DMatrix<Complex64>> {
    let n = x.len();
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut probe = x.to_vec();
    for i in 0..n {
        let h = 1e-6 * (1.0 + x[i].norm());
        probe[i] = x[i] + h;
        let plus = residual(&probe)?;
        probe[i] = x[i] - h;
        let minus = residual(&probe)?;
        probe[i] = x[i];
        cols.push(plus.iter().zip(&minus).map(|(p, m)| (p - m) / (2.0 * h)).collect());
    }
    let rows = cols.first().map_or(0, |c| c.len());
    Ok(DMatrix::from_fn(rows, n, |r, c| cols[c][r]))
}

pub(crate) struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub max_condition: f64,
}

/// Solves `residual(x) = 0` by Newton's method with a finite-difference
/// Jacobian and step halving. Converged when `max |residual| <= tol`.
pub(crate) fn newton_fd(
    x0: Vec<Complex64>,
    residual: impl Fn(&[Complex64]) -> Result<Vec<Complex64>>,
    opts: &NewtonOptions,
) -> Result<Vec<Complex64>> {
    let mut x = x0;
    let mut r = residual(&x)?;
    let mut norm = max_norm(&r);
    for iter in 0..opts.max_iter {
        if norm <= opts.tol {
            return Ok(x);
        }
        let jac = fd_jacobian(&x, &residual)?;
        if iter == 0 {
            let cond = condition_number(&jac);
            if !(cond < opts.max_condition) {
                return Err(Error::SingularJacobian(cond));
            }
        }
        let rhs = DVector::from_iterator(r.len(), r.iter().map(|c| -c));
        let dx = solve(jac.clone(), rhs).ok_or_else(|| Error::SingularJacobian(condition_number(&jac)))?;
        let mut lambda = 1.0;
        loop {
            let trial: Vec<Complex64> = x.iter().zip(dx.iter()).map(|(a, d)| a + d * lambda).collect();
            let trial_r = residual(&trial);
            if let Ok(tr) = trial_r {
                let tn = max_norm(&tr);
                if tn.is_finite() && (tn < norm || lambda < 1e-3) {
                    x = trial;
                    r = tr;
                    norm = tn;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < 1e-4 {
                return Err(Error::NewtonDivergence {
                    iterations: iter + 1,
                    residual: norm,
                });
            }
        }
    }
    if norm <= opts.tol {
        Ok(x)
    } else {
        Err(Error::NewtonDivergence {
            iterations: opts.max_iter,
            residual: norm,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_solves_a_complex_system() {
        // z^2 = 2i, w = z + 1
        let residual = |x: &[Complex64]| -> Result<Vec<Complex64>> {
            Ok(vec![x[0] * x[0] - Complex64::new(0.0, 2.0), x[1] - x[0] - 1.0])
        };
        let opts = NewtonOptions {
            tol: 1e-13,
            max_iter: 50,
            max_condition: 1e12,
        };
        let x = newton_fd(
            vec![Complex64::new(0.8, 0.9), Complex64::new(0.0, 0.0)],
            residual,
            &opts,
        )
        .unwrap();
        assert!((x[0] - Complex64::new(1.0, 1.0)).norm() < 1e-12);
        assert!((x[1] - Complex64::new(2.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn singular_values_of_diagonal() {
        let e = [
            Complex64::new(3.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -4.0),
        ];
        let sv = singular_values(2, 2, &e);
        assert!((sv[0] - 4.0).abs() < 1e-14 && (sv[1] - 3.0).abs() < 1e-14);
    }
}
