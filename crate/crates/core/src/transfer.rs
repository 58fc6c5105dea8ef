//! The transfer operator `T psi(z) = sum over f(w) = z of psi(w) / f'(w)^2`,
//! numerically by preimage summation and exactly on pole sums.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bfunc::{PoleSum, PoleTerm};
use crate::error::{Error, Result};
use crate::linalg::solve;
use crate::series::Series;
use crate::spaces::{CriticalValue, MapPoint, ValueGroup};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Preimages with `|f'(w)|` below this are refused.
pub const MIN_DERIVATIVE: f64 = 1e-8;
/// Relative size below which orbit poles of `psi - T psi` count as cancelled.
pub const CANCELLATION_TOL: f64 = 1e-9;
/// Largest accepted relative residual of the partial-fraction fit.
pub const FIT_TOL: f64 = 1e-9;

/// `T psi(z)` by summing over the `d` preimages of `z`.
pub fn transfer_eval(f: &MapPoint, psi: &PoleSum, z: Complex64) -> Result<Complex64> {
    if psi.is_empty() {
        return Ok(ZERO);
    }
    let scale = f.scale().max(z.norm());
    for v in f.crit_values() {
        if let CriticalValue::Finite(v) = v {
            if (v - z).norm() <= 1e-8 * scale {
                return Err(Error::AtCriticalValue(z));
            }
        }
    }
    let roots = f.preimage_poly(z).roots()?;
    let mut sum = ZERO;
    for root in roots {
        if root.multiplicity > 1 {
            return Err(Error::AtCriticalValue(z));
        }
        let mut w = root.value;
        // Two Newton steps on f(w) = z tighten the root-finder output.
        for _ in 0..2 {
            let jet = f.jet(w, 1);
            let step = (jet[0] - z) / jet[1];
            if step.is_finite() {
                w -= step;
            }
        }
        let df = f.jet(w, 1)[1];
        if df.norm() < MIN_DERIVATIVE {
            return Err(Error::IllConditionedPreimage(w, df.norm()));
        }
        sum += psi.eval(w)? / (df * df);
    }
    Ok(sum)
}

/// `T psi` as a pole sum, by residue calculus.
///
/// A pole `b` of `psi` with `a2, a1` is sent to `f(b)` with coefficients
/// `a2` and `a1/f'(b) - a2 f''(b)/f'(b)^2`. Each critical point `c` of
/// multiplicity `m` with finite value `v` adds `R/(z - v)` where `R` is the
/// `t^(m-1)` Taylor coefficient of `psi(c+t) t^m / f'(c+t)`. Poles of `psi`
/// at poles of `f` contribute nothing.
pub fn transfer_closed_form(f: &MapPoint, psi: &PoleSum) -> Result<PoleSum> {
    if psi.is_empty() {
        return Ok(PoleSum::zero());
    }
    let scale = f.scale().max(psi.scale());
    let crit = f.crit_points();
    for t in psi.terms() {
        if crit.iter().any(|&c| (c - t.pole).norm() <= 1e-9 * scale) {
            return Err(Error::PoleAtCriticalPoint(t.pole));
        }
    }
    let mut out: Vec<PoleTerm> = Vec::new();
    for t in psi.terms() {
        if f.poles().iter().any(|&p| (p - t.pole).norm() <= 1e-10 * scale) {
            continue;
        }
        let jet = f.jet(t.pole, 2);
        let (fb, f1, f2) = (jet[0], jet[1], jet[2]);
        out.push(PoleTerm {
            pole: fb,
            a2: t.a2,
            a1: t.a1 / f1 - t.a2 * f2 / (f1 * f1),
        });
    }
    for ((&c, &m), v) in crit.iter().zip(f.multiplicities()).zip(f.crit_values()) {
        let CriticalValue::Finite(v) = v else { continue };
        let len = m;
        // f'(c+t) = t^m Q(c+t)
        let taylor = f.taylor(c, 2 * m + 2);
        let deriv = Series((1..taylor.len()).map(|k| taylor.0[k] * k as f64).collect());
        let q = deriv.shift_down(m);
        let q = Series(q.0[..len].to_vec());
        let mut psi_series = Series::zeros(len);
        for t in psi.terms() {
            psi_series = psi_series
                .add(&Series::of_pole(t.pole, c, 2, len).scale(t.a2))
                .add(&Series::of_pole(t.pole, c, 1, len).scale(t.a1));
        }
        let ratio = psi_series.div(&q);
        out.push(PoleTerm {
            pole: v,
            a2: ZERO,
            a1: ratio.0[m - 1],
        });
    }
    Ok(PoleSum::from_terms(out))
}

/// How the coefficients of `psi - T psi` were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityMethod {
    ClosedForm,
    NumericFit,
}

/// Coefficient of `psi - T psi` at one distinct critical value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueCoefficient {
    pub value: Complex64,
    pub members: Vec<usize>,
    pub coefficient: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCoefficients {
    pub coefficients: Vec<ValueCoefficient>,
    pub method: IdentityMethod,
    /// Largest orbit-pole coefficient (closed form) or relative fit
    /// residual (numeric fit).
    pub residual: f64,
}

impl IdentityCoefficients {
    pub fn at(&self, value: Complex64, tol: f64) -> Option<Complex64> {
        self.coefficients
            .iter()
            .find(|c| (c.value - value).norm() <= tol * value.norm().max(1.0))
            .map(|c| c.coefficient)
    }

    /// Coefficient of the group containing critical point `j`.
    pub fn for_critical_point(&self, j: usize) -> Option<Complex64> {
        self.coefficients
            .iter()
            .find(|c| c.members.contains(&j))
            .map(|c| c.coefficient)
    }
}

/// Extracts the simple-pole coefficients of `psi - T psi` at the distinct
/// critical values, after checking that all other poles cancel.
///
/// `psi` must be `B`, `A` or `B^` of an orbit of `f`. When a pole of `psi`
/// sits on a critical point the closed form is unavailable and the
/// coefficients are fitted to samples of `psi - T psi` instead.
pub fn identity_coefficients(f: &MapPoint, psi: &PoleSum) -> Result<IdentityCoefficients> {
    let groups = f.value_groups();
    match transfer_closed_form(f, psi) {
        Ok(t_psi) => closed_form_coefficients(f, psi, &t_psi, &groups),
        Err(Error::PoleAtCriticalPoint(_)) => fitted_coefficients(f, psi, &groups),
        Err(e) => Err(e),
    }
}

fn closed_form_coefficients(
    f: &MapPoint,
    psi: &PoleSum,
    t_psi: &PoleSum,
    groups: &[ValueGroup],
) -> Result<IdentityCoefficients> {
    let diff = psi.sub(t_psi);
    let coeff_scale = psi.coeff_scale().max(1.0);
    let scale = f.scale().max(psi.scale());
    let near_value = |z: Complex64| groups.iter().any(|g| (g.value - z).norm() <= 1e-9 * scale);
    let mut worst = 0.0f64;
    for t in diff.terms() {
        let size = if near_value(t.pole) {
            t.a2.norm()
        } else {
            t.a2.norm().max(t.a1.norm())
        };
        worst = worst.max(size);
        if size > CANCELLATION_TOL * coeff_scale {
            return Err(Error::NonCancellation {
                pole: t.pole,
                magnitude: size,
            });
        }
    }
    let coefficients = groups
        .iter()
        .map(|g| ValueCoefficient {
            value: g.value,
            members: g.members.clone(),
            coefficient: diff
                .terms()
                .iter()
                .filter(|t| (t.pole - g.value).norm() <= 1e-9 * scale)
                .map(|t| t.a1)
                .sum(),
        })
        .collect();
    Ok(IdentityCoefficients {
        coefficients,
        method: IdentityMethod::ClosedForm,
        residual: worst / coeff_scale,
    })
}

/// Deterministic sample points on a circle of radius twice the scale of
/// the map and of `psi`, avoiding images of the poles of `psi`.
pub fn sample_points(f: &MapPoint, psi: &PoleSum, count: usize) -> Vec<Complex64> {
    let scale = f.scale().max(psi.scale());
    let images: Vec<Complex64> = psi.poles().map(|b| f.eval(b)).filter(|z| z.is_finite()).collect();
    let radius = 2.0 * scale;
    let mut out = Vec::with_capacity(count);
    let mut k = 0usize;
    let slots = count * 4;
    while out.len() < count && k < slots {
        // Offset by a quarter step so real maps are not sampled on the axis.
        let theta = std::f64::consts::TAU * (k as f64 + 0.25) / count as f64;
        let z = Complex64::from_polar(radius, theta + 0.1 * (k / count) as f64);
        if images.iter().all(|w| (w - z).norm() > 1e-3 * radius) {
            out.push(z);
        }
        k += 1;
    }
    out
}

fn fitted_coefficients(f: &MapPoint, psi: &PoleSum, groups: &[ValueGroup]) -> Result<IdentityCoefficients> {
    let q = groups.len();
    let samples = sample_points(f, psi, (4 * q).max(16));
    let mut values = Vec::with_capacity(samples.len());
    for &z in &samples {
        values.push(psi.eval(z)? - transfer_eval(f, psi, z)?);
    }
    // Least squares for R(z) = sum L_k/(z - V_k) via the normal equations.
    let rows = samples.len();
    let basis = |i: usize, k: usize| (samples[i] - groups[k].value).inv();
    let a = nalgebra::DMatrix::from_fn(rows, q, basis);
    let b = nalgebra::DVector::from_column_slice(&values);
    let ah = a.adjoint();
    let coeffs = solve(&ah * &a, &ah * &b).ok_or(Error::SingularJacobian(f64::INFINITY))?;
    let fit = &a * &coeffs;
    let size = values
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let residual = values
        .iter()
        .zip(fit.iter())
        .map(|(v, w)| (v - w).norm())
        .fold(0.0, f64::max)
        / size;
    if residual > FIT_TOL {
        return Err(Error::FitResidual(residual));
    }
    Ok(IdentityCoefficients {
        coefficients: groups
            .iter()
            .zip(coeffs.iter())
            .map(|(g, &c)| ValueCoefficient {
                value: g.value,
                members: g.members.clone(),
                coefficient: c,
            })
            .collect(),
        method: IdentityMethod::NumericFit,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bfunc::{b_function, b_hat};
    use crate::orbits::orbit_data;
    use crate::spaces::PolySpacePoint;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn quadratic(v: f64) -> MapPoint {
        PolySpacePoint::build(c(v, 0.0), &[ZERO], &[1]).unwrap().into()
    }

    fn simple(pole: Complex64, a1: f64) -> PoleSum {
        PoleSum::from_terms([PoleTerm {
            pole,
            a2: ZERO,
            a1: c(a1, 0.0),
        }])
    }

    #[test]
    fn preimage_pairs_cancel() {
        let psi = simple(ZERO, 2.0);
        for z in [c(0.3, 0.4), c(-2.0, 1.0), c(5.0, -0.1)] {
            assert!(transfer_eval(&quadratic(0.0), &psi, z).unwrap().norm() < 1e-14);
        }
        assert_eq!(
            transfer_eval(&quadratic(0.0), &PoleSum::zero(), c(0.3, 0.0)).unwrap(),
            ZERO
        );
    }

    #[test]
    fn basilica_transfer_at_one() {
        let f = quadratic(-1.0);
        let o = orbit_data(&f, &[ZERO, c(-1.0, 0.0)]).unwrap();
        let b = b_function(&o).unwrap();
        assert!((transfer_eval(&f, &b, c(1.0, 0.0)).unwrap() + 2.0).norm() < 1e-12);
    }

    #[test]
    fn near_critical_value_is_refused() {
        let f = quadratic(-1.0);
        assert!(matches!(
            transfer_eval(&f, &simple(c(1.0, 0.0), 1.0), c(-1.0, 0.0)),
            Err(Error::AtCriticalValue(_))
        ));
    }

    #[test]
    fn closed_form_examples() {
        let t = transfer_closed_form(&quadratic(-1.0), &simple(c(1.0, 0.0), 1.0)).unwrap();
        assert_eq!(t.terms().len(), 2);
        assert!((t.term_near(ZERO, 1e-12).unwrap().a1 - 0.5).norm() < 1e-15);
        assert!((t.term_near(c(-1.0, 0.0), 1e-12).unwrap().a1 + 0.5).norm() < 1e-15);

        let t = transfer_closed_form(&quadratic(0.25), &simple(c(0.5, 0.0), 2.0)).unwrap();
        assert!((t.term_near(c(0.5, 0.0), 1e-12).unwrap().a1 - 2.0).norm() < 1e-14);
        assert!((t.term_near(c(0.25, 0.0), 1e-12).unwrap().a1 + 2.0).norm() < 1e-14);

        assert!(transfer_closed_form(&quadratic(0.25), &PoleSum::zero())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn closed_form_matches_preimage_sum_at_multiple_critical_point() {
        // z^4 + 0.3: one critical point of multiplicity 3.
        let f: MapPoint = PolySpacePoint::build(c(0.3, 0.1), &[ZERO], &[3]).unwrap().into();
        let psi = PoleSum::from_terms([
            PoleTerm {
                pole: c(0.7, 0.2),
                a2: c(0.4, -0.3),
                a1: c(1.0, 0.5),
            },
            PoleTerm {
                pole: c(-0.2, 0.9),
                a2: ZERO,
                a1: c(-0.6, 0.0),
            },
        ]);
        let closed = transfer_closed_form(&f, &psi).unwrap();
        for z in sample_points(&f, &psi, 32) {
            let a = closed.eval(z).unwrap();
            let b = transfer_eval(&f, &psi, z).unwrap();
            assert!((a - b).norm() <= 1e-9 * b.norm().max(1e-3));
        }
    }

    #[test]
    fn identity_examples() {
        let f = quadratic(-0.5);
        let search = crate::orbits::find_orbits(&f, 1, 1e-12).unwrap();
        let o = search.orbits.iter().find(|o| o.multiplier.norm() < 1.0).unwrap();
        let id = identity_coefficients(&f, &b_function(o).unwrap()).unwrap();
        assert_eq!(id.method, IdentityMethod::ClosedForm);
        assert!((id.at(c(-0.5, 0.0), 1e-9).unwrap() - 2.0 / 3f64.sqrt()).norm() < 1e-12);

        let f = quadratic(-1.0);
        let o = orbit_data(&f, &[c(-1.0, 0.0), ZERO]).unwrap();
        let id = identity_coefficients(&f, &b_function(&o).unwrap()).unwrap();
        assert_eq!(id.method, IdentityMethod::NumericFit);
        assert!((id.at(c(-1.0, 0.0), 1e-9).unwrap() - 4.0).norm() < 1e-9);

        let f = quadratic(0.25);
        let o = orbit_data(&f, &[c(0.5, 0.0)]).unwrap();
        let id = identity_coefficients(&f, &b_hat(&o).unwrap()).unwrap();
        assert!((id.at(c(0.25, 0.0), 1e-9).unwrap() - 2.0).norm() < 1e-12);
    }
}
