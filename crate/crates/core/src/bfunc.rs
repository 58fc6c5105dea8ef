//! Pole sums `sum a2/(z-b)^2 + a1/(z-b)` and the orbit functions built
//! from them: `B`, `A = B/rho` and the cusp function `B^`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cpoly::lex_cmp;
use crate::error::{Error, Result};
use crate::orbits::{PeriodicOrbit, PARABOLIC_TOL};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative distance below which two poles are merged.
pub const POLE_MERGE_TOL: f64 = 1e-10;
/// Relative magnitude below which a coefficient is pruned.
pub const PRUNE_TOL: f64 = 1e-14;

/// One pole with its double and simple coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleTerm {
    pub pole: Complex64,
    pub a2: Complex64,
    pub a1: Complex64,
}

/// A rational function vanishing at infinity with poles of order at most
/// two. Poles are distinct and kept in lexicographic order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "Vec<PoleTerm>", into = "Vec<PoleTerm>")]
pub struct PoleSum {
    terms: Vec<PoleTerm>,
}

impl From<Vec<PoleTerm>> for PoleSum {
    fn from(terms: Vec<PoleTerm>) -> Self {
        PoleSum::from_terms(terms)
    }
}

impl From<PoleSum> for Vec<PoleTerm> {
    fn from(p: PoleSum) -> Self {
        p.terms
    }
}

impl PoleSum {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Merges coincident poles and prunes negligible terms.
    pub fn from_terms(terms: impl IntoIterator<Item = PoleTerm>) -> Self {
        let raw: Vec<PoleTerm> = terms.into_iter().collect();
        let pole_scale = raw.iter().map(|t| t.pole.norm()).fold(1.0, f64::max);
        let mut merged: Vec<PoleTerm> = Vec::with_capacity(raw.len());
        for t in raw {
            match merged
                .iter_mut()
                .find(|m| (m.pole - t.pole).norm() <= POLE_MERGE_TOL * pole_scale)
            {
                Some(m) => {
                    m.a2 += t.a2;
                    m.a1 += t.a1;
                }
                None => merged.push(t),
            }
        }
        let coeff_scale = merged.iter().map(|t| t.a2.norm().max(t.a1.norm())).fold(0.0, f64::max);
        merged.retain(|t| t.a2.norm().max(t.a1.norm()) > PRUNE_TOL * coeff_scale);
        merged.sort_by(|a, b| lex_cmp(a.pole, b.pole));
        PoleSum { terms: merged }
    }

    pub fn terms(&self) -> &[PoleTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn poles(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.terms.iter().map(|t| t.pole)
    }

    /// Largest pole modulus, at least 1.
    pub fn scale(&self) -> f64 {
        self.poles().map(|b| b.norm()).fold(1.0, f64::max)
    }

    /// Largest coefficient modulus.
    pub fn coeff_scale(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.a2.norm().max(t.a1.norm()))
            .fold(0.0, f64::max)
    }

    /// The term whose pole lies within `tol * scale` of `z`.
    pub fn term_near(&self, z: Complex64, tol: f64) -> Option<PoleTerm> {
        let scale = self.scale().max(z.norm());
        self.terms.iter().copied().find(|t| (t.pole - z).norm() <= tol * scale)
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let scale = self.scale();
        let mut sum = ZERO;
        for t in &self.terms {
            let u = z - t.pole;
            if u.norm() <= 1e-12 * scale {
                return Err(Error::EvalAtPole(t.pole));
            }
            let inv = u.inv();
            sum += (t.a2 * inv + t.a1) * inv;
        }
        Ok(sum)
    }

    /// `(Gamma_1, Gamma_2)` with `psi(z) = Gamma_1/z + Gamma_2/z^2 + O(1/z^3)`.
    pub fn gamma_coeffs(&self) -> (Complex64, Complex64) {
        let g1 = self.terms.iter().map(|t| t.a1).sum();
        let g2 = self.terms.iter().map(|t| t.a2 + t.pole * t.a1).sum();
        (g1, g2)
    }

    pub fn scaled(&self, s: Complex64) -> PoleSum {
        PoleSum::from_terms(self.terms.iter().map(|t| PoleTerm {
            pole: t.pole,
            a2: t.a2 * s,
            a1: t.a1 * s,
        }))
    }

    pub fn add(&self, other: &PoleSum) -> PoleSum {
        PoleSum::from_terms(self.terms.iter().chain(&other.terms).copied())
    }

    pub fn sub(&self, other: &PoleSum) -> PoleSum {
        self.add(&other.scaled(-ONE))
    }
}

/// `B(z) = sum rho/(z-b_k)^2 + (1/(1-rho)) sum s_k/(z-b_k)`.
pub fn b_function(orbit: &PeriodicOrbit) -> Result<PoleSum> {
    let rho = orbit.multiplier;
    let gap = (ONE - rho).norm();
    if gap < PARABOLIC_TOL {
        return Err(Error::ParabolicOrbit(gap));
    }
    Ok(PoleSum::from_terms(orbit.points.iter().zip(&orbit.second_derivs).map(
        |(&b, &s)| PoleTerm {
            pole: b,
            a2: rho,
            a1: s / (ONE - rho),
        },
    )))
}

/// `A = B / rho`.
pub fn a_function(orbit: &PeriodicOrbit) -> Result<PoleSum> {
    if orbit.multiplier.norm() < 1e-12 {
        return Err(Error::SuperattractingOrbit);
    }
    Ok(b_function(orbit)?.scaled(orbit.multiplier.inv()))
}

/// `B^(z) = sum s_k/(z-b_k)`, the cusp function of a multiplier-one orbit.
pub fn b_hat(orbit: &PeriodicOrbit) -> Result<PoleSum> {
    let scale = orbit.second_derivs.iter().map(|s| s.norm()).fold(0.0, f64::max);
    for (&b, s) in orbit.points.iter().zip(&orbit.second_derivs) {
        if s.norm() <= 1e-12 * scale.max(1.0) {
            return Err(Error::DegenerateOrbit(b));
        }
    }
    Ok(PoleSum::from_terms(orbit.points.iter().zip(&orbit.second_derivs).map(
        |(&b, &s)| PoleTerm {
            pole: b,
            a2: ZERO,
            a1: s,
        },
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpoly::ComplexPoly;
    use crate::orbits::orbit_data;
    use crate::spaces::{MapPoint, PolySpacePoint, RationalMapPoint};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn quadratic(v: f64) -> MapPoint {
        PolySpacePoint::build(c(v, 0.0), &[ZERO], &[1]).unwrap().into()
    }

    fn two_z_minus_inverse() -> MapPoint {
        RationalMapPoint::validate(
            c(2.0, 0.0),
            ZERO,
            ComplexPoly::constant(c(-1.0, 0.0)),
            ComplexPoly::identity(),
        )
        .unwrap()
        .into()
    }

    fn term(pole: Complex64, a2: Complex64, a1: Complex64) -> PoleTerm {
        PoleTerm { pole, a2, a1 }
    }

    #[test]
    fn b_of_superattracting_fixed_point() {
        let o = orbit_data(&quadratic(0.0), &[ZERO]).unwrap();
        let b = b_function(&o).unwrap();
        assert_eq!(b.terms(), &[term(ZERO, ZERO, c(2.0, 0.0))]);
    }

    #[test]
    fn b_of_basilica_cycle() {
        let o = orbit_data(&quadratic(-1.0), &[ZERO, c(-1.0, 0.0)]).unwrap();
        let b = b_function(&o).unwrap();
        assert_eq!(b.terms().len(), 2);
        let t0 = b.term_near(ZERO, 1e-12).unwrap();
        let t1 = b.term_near(c(-1.0, 0.0), 1e-12).unwrap();
        assert!((t0.a1 + 4.0).norm() < 1e-14 && t0.a2.norm() < 1e-14);
        assert!((t1.a1 - 8.0).norm() < 1e-14 && t1.a2.norm() < 1e-14);
        let (g1, g2) = b.gamma_coeffs();
        assert!((g1 - 4.0).norm() < 1e-13 && (g2 + 8.0).norm() < 1e-13);
        assert!(b.eval(c(1.0, 0.0)).unwrap().norm() < 1e-14);
    }

    #[test]
    fn b_and_a_of_repelling_rational_fixed_point() {
        let o = orbit_data(&two_z_minus_inverse(), &[c(1.0, 0.0)]).unwrap();
        assert!((o.multiplier - 3.0).norm() < 1e-14);
        assert!((o.second_derivs[0] + 2.0).norm() < 1e-14);
        let b = b_function(&o).unwrap();
        let t = b.terms()[0];
        assert!((t.a2 - 3.0).norm() < 1e-14 && (t.a1 - 1.0).norm() < 1e-14);
        let (g1, g2) = b.gamma_coeffs();
        assert!((g1 - 1.0).norm() < 1e-14 && (g2 - 4.0).norm() < 1e-14);

        let a = a_function(&o).unwrap();
        let t = a.terms()[0];
        assert!((t.a2 - 1.0).norm() < 1e-14 && (t.a1 - 1.0 / 3.0).norm() < 1e-14);
        for k in 0..10 {
            let z = c(0.3 * k as f64 - 1.1, 0.7);
            assert!((a.eval(z).unwrap() * 3.0 - b.eval(z).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn a_function_rejects_superattracting() {
        let o = orbit_data(&quadratic(0.0), &[ZERO]).unwrap();
        assert_eq!(a_function(&o), Err(Error::SuperattractingOrbit));
    }

    #[test]
    fn b_hat_examples() {
        let o = orbit_data(&quadratic(0.25), &[c(0.5, 0.0)]).unwrap();
        assert!(matches!(b_function(&o), Err(Error::ParabolicOrbit(_))));
        assert_eq!(b_hat(&o).unwrap().terms(), &[term(c(0.5, 0.0), ZERO, c(2.0, 0.0))]);

        let s3 = 3f64.sqrt();
        let f: MapPoint = PolySpacePoint::build(c(2.0 / (3.0 * s3), 0.0), &[ZERO], &[2])
            .unwrap()
            .into();
        let o = orbit_data(&f, &[c(1.0 / s3, 0.0)]).unwrap();
        let t = b_hat(&o).unwrap().terms()[0];
        assert!((t.a1 - 2.0 * s3).norm() < 1e-13);

        let degenerate = PeriodicOrbit {
            points: vec![ZERO],
            period: 1,
            multiplier: ONE,
            second_derivs: vec![ZERO],
        };
        assert_eq!(b_hat(&degenerate), Err(Error::DegenerateOrbit(ZERO)));
    }

    #[test]
    fn eval_examples() {
        let two_over_z = PoleSum::from_terms([term(ZERO, ZERO, c(2.0, 0.0))]);
        assert_eq!(two_over_z.eval(c(2.0, 0.0)).unwrap(), ONE);
        assert_eq!(PoleSum::zero().eval(c(0.3, 0.1)).unwrap(), ZERO);
        assert_eq!(two_over_z.eval(ZERO), Err(Error::EvalAtPole(ZERO)));
        assert_eq!(two_over_z.gamma_coeffs(), (c(2.0, 0.0), ZERO));
    }

    #[test]
    fn merging_and_pruning() {
        let p = PoleSum::from_terms([
            term(ONE, ONE, ONE),
            term(ONE + 1e-13, ZERO, -ONE),
            term(c(2.0, 0.0), c(1e-17, 0.0), ZERO),
        ]);
        assert_eq!(p.terms().len(), 1);
        assert_eq!(p.terms()[0].a1, ZERO);
    }

    #[test]
    fn large_z_expansion() {
        let p = PoleSum::from_terms([
            term(c(0.3, -0.2), c(1.5, 0.5), c(-0.7, 0.1)),
            term(c(-1.0, 0.4), c(0.0, 1.0), c(2.0, -1.0)),
        ]);
        let (g1, g2) = p.gamma_coeffs();
        let remainder = |r: f64| {
            let z = Complex64::from_polar(r, 0.7);
            (p.eval(z).unwrap() - g1 / z - g2 / (z * z)).norm() * r.powi(3)
        };
        let (c3, c4) = (remainder(1e3), remainder(1e4));
        assert!(c3 < 10.0 && (c3 - c4).abs() < 1e-2 * c3.max(1.0));
    }

    #[test]
    fn json_form() {
        let p = PoleSum::from_terms([term(ZERO, ZERO, c(2.0, 0.0))]);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"[{"pole":[0.0,0.0],"a2":[0.0,0.0],"a1":[2.0,0.0]}]"#);
        assert_eq!(serde_json::from_str::<PoleSum>(&json).unwrap(), p);
    }
}
