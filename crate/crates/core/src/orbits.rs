//! Periodic orbits: search, multipliers and second derivatives along the
//! orbit, and continuation under changes of the map.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cpoly::{circle_starts, lex_cmp, merge_clusters, simultaneous_iteration, ComplexPoly};
use crate::error::{Error, Result};
use crate::spaces::MapPoint;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Default relative tolerance for cycle defects.
pub const ORBIT_TOL: f64 = 1e-10;
/// Largest number of fixed points of `f^n` the search will attempt.
pub const MAX_SEARCH_DEGREE: usize = 4096;
/// Continuation is refused when `|rho - 1|` is below this.
pub const PARABOLIC_TOL: f64 = 1e-6;

/// A periodic orbit `b_1 -> b_2 -> ... -> b_n -> b_1` of exact period `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    pub points: Vec<Complex64>,
    pub period: usize,
    /// `rho = prod f'(b_k)`.
    pub multiplier: Complex64,
    /// `s_k = (f^n)''(b_k)`.
    pub second_derivs: Vec<Complex64>,
}

impl PeriodicOrbit {
    pub fn scale(&self) -> f64 {
        self.points.iter().map(|b| b.norm()).fold(1.0, f64::max)
    }

    /// Index of the orbit point within `tol * scale` of `z`.
    pub fn position(&self, z: Complex64, tol: f64) -> Option<usize> {
        let scale = self.scale();
        self.points.iter().position(|&b| (b - z).norm() <= tol * scale)
    }
}

/// Result of [`find_orbits`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitSearch {
    pub orbits: Vec<PeriodicOrbit>,
    /// False when some root of `f^n(z) = z` could not be verified, so
    /// orbits may be missing.
    pub complete: bool,
}

fn divisors(n: usize) -> Vec<usize> {
    (1..n).filter(|k| n.is_multiple_of(*k)).collect()
}

fn iterate(f: &MapPoint, z: Complex64, times: usize) -> Complex64 {
    (0..times).fold(z, |w, _| f.eval(w))
}

/// Relative defect `max |f(b_k) - b_{k+1}|`.
fn cycle_defect(f: &MapPoint, points: &[Complex64]) -> f64 {
    let n = points.len();
    let scale = points.iter().map(|b| b.norm()).fold(1.0, f64::max);
    (0..n)
        .map(|k| (f.eval(points[k]) - points[(k + 1) % n]).norm())
        .fold(0.0, |acc, d| if d.is_nan() { f64::INFINITY } else { acc.max(d) })
        / scale
}

fn at_pole(f: &MapPoint, z: Complex64) -> bool {
    let scale = f.scale();
    f.poles().iter().any(|&p| (p - z).norm() <= 1e-10 * scale)
}

/// Multiplier and second derivatives of `f^n` along a cycle, by the chain
/// rule over the stored points.
pub fn orbit_data(f: &MapPoint, points: &[Complex64]) -> Result<PeriodicOrbit> {
    orbit_data_with_tol(f, points, 1e-8)
}

/// [`orbit_data`] with an explicit relative tolerance for the cycle check.
pub fn orbit_data_with_tol(f: &MapPoint, points: &[Complex64], tol: f64) -> Result<PeriodicOrbit> {
    let n = points.len();
    if n == 0 {
        return Err(Error::NotACycle(f64::INFINITY));
    }
    if let Some(&b) = points.iter().find(|&&b| at_pole(f, b)) {
        return Err(Error::OrbitAtPole(b));
    }
    let defect = cycle_defect(f, points);
    if !(defect <= tol) {
        return Err(Error::NotACycle(defect));
    }
    let scale = points.iter().map(|b| b.norm()).fold(1.0, f64::max);
    for k in divisors(n) {
        if (points[k] - points[0]).norm() <= 10.0 * tol * scale {
            return Err(Error::PeriodNotExact { requested: n, exact: k });
        }
    }
    let jets: Vec<[Complex64; 2]> = points
        .iter()
        .map(|&b| {
            let j = f.jet(b, 2);
            [j[1], j[2]]
        })
        .collect();
    let multiplier = jets.iter().map(|j| j[0]).product();
    let second_derivs = (0..n)
        .map(|k| {
            let mut d1 = ONE;
            let mut d2 = Complex64::new(0.0, 0.0);
            for i in 0..n {
                let [f1, f2] = jets[(k + i) % n];
                d2 = f2 * d1 * d1 + f1 * d2;
                d1 *= f1;
            }
            d2
        })
        .collect();
    Ok(PeriodicOrbit {
        points: points.to_vec(),
        period: n,
        multiplier,
        second_derivs,
    })
}

/// Residual of the telescoping relation
/// `g_{k+1} - g_k / f'(b_k) + f''(b_k) / f'(b_k)^2 = 0` with
/// `g_k = s_k / (rho (1 - rho))`, relative to `max |g_k|`. `None` when
/// `rho` is 0 or 1.
pub fn telescoping_residual(f: &MapPoint, orbit: &PeriodicOrbit) -> Option<f64> {
    let rho = orbit.multiplier;
    if rho.norm() < 1e-12 || (rho - ONE).norm() < 1e-12 {
        return None;
    }
    let n = orbit.period;
    let gamma: Vec<Complex64> = orbit.second_derivs.iter().map(|s| s / (rho * (ONE - rho))).collect();
    let scale = gamma.iter().map(|g| g.norm()).fold(0.0, f64::max).max(1.0);
    let worst = (0..n)
        .map(|k| {
            let j = f.jet(orbit.points[k], 2);
            (gamma[(k + 1) % n] - gamma[k] / j[1] + j[2] / (j[1] * j[1])).norm()
        })
        .fold(0.0, f64::max);
    Some(worst / scale)
}

/// One round of multiple-shooting Newton on `f(b_k) = b_{k+1}`. The
/// cyclic bidiagonal system is solved in closed form.
fn shooting_step(f: &MapPoint, points: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = points.len();
    let derivs: Vec<Complex64> = points.iter().map(|&b| f.jet(b, 1)[1]).collect();
    let defects: Vec<Complex64> = (0..n).map(|k| f.eval(points[k]) - points[(k + 1) % n]).collect();
    // delta_{k+1} = F_k + f'(b_k) delta_k, closed around the cycle.
    let mut acc = Complex64::new(0.0, 0.0);
    let mut rho = ONE;
    for k in 0..n {
        acc = defects[k] + derivs[k] * acc;
        rho *= derivs[k];
    }
    let mut delta = acc / (ONE - rho);
    if !delta.is_finite() {
        return None;
    }
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        out.push(points[k] + delta);
        delta = defects[k] + derivs[k] * delta;
    }
    Some(out)
}

fn min_separation(points: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            best = best.min((points[i] - points[j]).norm());
        }
    }
    best
}

/// Newton continuation of `seed` (an orbit of a nearby map) to an orbit of
/// `f_target`.
pub fn continue_orbit(f_target: &MapPoint, seed: &PeriodicOrbit, tol: f64) -> Result<PeriodicOrbit> {
    let gap = (seed.multiplier - ONE).norm();
    if gap < PARABOLIC_TOL {
        return Err(Error::ParabolicOrbit(gap));
    }
    let scale = seed.scale();
    let radius = if seed.period > 1 {
        (0.5 * min_separation(&seed.points)).min(0.5 * scale)
    } else {
        0.5 * scale
    };
    let mut points = seed.points.clone();
    let mut defect = cycle_defect(f_target, &points);
    let mut iterations = 0;
    while !(defect <= tol) {
        if iterations == 50 {
            return Err(Error::NewtonDivergence {
                iterations,
                residual: defect,
            });
        }
        let next = shooting_step(f_target, &points).ok_or(Error::NewtonDivergence {
            iterations,
            residual: defect,
        })?;
        let moved = next
            .iter()
            .zip(&seed.points)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if !(moved <= radius) {
            return Err(Error::ContinuationJump { moved, radius });
        }
        points = next;
        defect = cycle_defect(f_target, &points);
        iterations += 1;
    }
    // A final step once within tolerance squeezes out the last digits.
    if let Some(next) = shooting_step(f_target, &points) {
        if cycle_defect(f_target, &next) <= defect {
            points = next;
        }
    }
    if seed.period > 1 {
        let sep = min_separation(&points);
        if sep <= 1e-8 * scale {
            return Err(Error::PeriodCollapse(sep));
        }
    }
    if let Some(&b) = points.iter().find(|&&b| at_pole(f_target, b)) {
        return Err(Error::OrbitAtPole(b));
    }
    orbit_data_with_tol(f_target, &points, tol.max(1e-12) * 10.0)
}

/// Re-polishes an orbit of `f` (given approximately) to working precision.
/// Parabolic orbits are refined with Newton on `(f^n)' = 1` instead.
pub fn refine_orbit(f: &MapPoint, orbit: &PeriodicOrbit) -> Result<PeriodicOrbit> {
    if (orbit.multiplier - ONE).norm() < PARABOLIC_TOL {
        return refine_parabolic(f, orbit);
    }
    continue_orbit(f, orbit, 1e-14).or_else(|_| Ok(orbit.clone()))
}

/// At a multiplier-one orbit, `b_1` is a simple zero of `(f^n)' - 1`.
fn refine_parabolic(f: &MapPoint, orbit: &PeriodicOrbit) -> Result<PeriodicOrbit> {
    let n = orbit.period;
    let trace = |b: Complex64| -> Vec<Complex64> {
        let mut pts = Vec::with_capacity(n);
        let mut w = b;
        for _ in 0..n {
            pts.push(w);
            w = f.eval(w);
        }
        pts
    };
    let chain = |b: Complex64| -> (Complex64, Complex64) {
        let mut d1 = ONE;
        let mut d2 = Complex64::new(0.0, 0.0);
        let mut w = b;
        for _ in 0..n {
            let j = f.jet(w, 2);
            d2 = j[2] * d1 * d1 + j[1] * d2;
            d1 *= j[1];
            w = j[0];
        }
        (d1, d2)
    };
    let mut b = orbit.points[0];
    for _ in 0..20 {
        let (rho, s) = chain(b);
        let step = (rho - ONE) / s;
        if !step.is_finite() {
            break;
        }
        b -= step;
        if step.norm() <= 1e-15 * b.norm().max(1.0) {
            break;
        }
    }
    orbit_data_with_tol(f, &trace(b), 1e-8)
}

/// Homogeneous form `y^d p(x/y)` of a coefficient list of length `d+1`,
/// with its partial derivatives, evaluated without overflow when
/// `max(|x|, |y|) = 1`.
fn homogeneous(coeffs: &[Complex64], x: Complex64, y: Complex64) -> [Complex64; 3] {
    let d = coeffs.len() - 1;
    let df = d as f64;
    let horner = |c: &mut dyn Iterator<Item = Complex64>, t: Complex64| {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for a in c {
            dp = dp * t + p;
            p = p * t + a;
        }
        (p, dp)
    };
    if y.norm() >= x.norm() {
        let t = x / y;
        let (p, dp) = horner(&mut coeffs.iter().rev().copied(), t);
        let yd1 = y.powu(d as u32 - 1);
        [y * yd1 * p, yd1 * dp, yd1 * (df * p - t * dp)]
    } else {
        let s = y / x;
        let (r, dr) = horner(&mut coeffs.iter().copied(), s);
        let xd1 = x.powu(d as u32 - 1);
        [x * xd1 * r, xd1 * (df * r - s * dr), xd1 * dr]
    }
}

/// Newton ratio of `H = X_n - z Y_n` where `f^n = X_n / Y_n` is computed
/// by homogeneous iteration with rescaling at every step.
fn fixed_point_ratio(num: &[Complex64], den: &[Complex64], n: usize, z: Complex64) -> Complex64 {
    let norm = z.norm().max(1.0);
    let (mut x, mut y, mut dx, mut dy) = (z / norm, ONE / norm, ONE / norm, Complex64::new(0.0, 0.0));
    for _ in 0..n {
        let [nv, nx, ny] = homogeneous(num, x, y);
        let [dv, ddx, ddy] = homogeneous(den, x, y);
        let (x1, y1) = (nv, dv);
        let dx1 = nx * dx + ny * dy;
        let dy1 = ddx * dx + ddy * dy;
        let s = x1.norm().max(y1.norm());
        if s == 0.0 || !s.is_finite() {
            return Complex64::new(f64::NAN, 0.0);
        }
        x = x1 / s;
        y = y1 / s;
        dx = dx1 / s;
        dy = dy1 / s;
    }
    (x - z * y) / (dx - y - z * dy)
}

/// Radius of a disk expected to contain the periodic points.
fn search_radius(f: &MapPoint) -> f64 {
    match f {
        MapPoint::Polynomial(p) => {
            let c = p.poly().coeffs();
            1.0 + c[..c.len() - 1].iter().map(|a| a.norm()).sum::<f64>()
        }
        MapPoint::Rational(_) => {
            // Fixed points of f are the roots of N(z) - z D(z).
            let fp = f.numerator() - &(&ComplexPoly::identity() * &f.denominator());
            let lead = fp.leading();
            let bound = if fp.degree().unwrap_or(0) >= 1 {
                1.0 + fp.coeffs()[..fp.coeffs().len() - 1]
                    .iter()
                    .map(|a| (a / lead).norm())
                    .fold(0.0, f64::max)
            } else {
                1.0
            };
            2.0 * bound.max(f.scale())
        }
    }
}

/// Finds the periodic orbits of exact period `n`.
///
/// All `d^n` fixed points of `f^n` are located simultaneously; roots of
/// lower exact period are filtered out, the remaining cycles polished and
/// deduplicated. Orbits start at their lexicographically smallest point
/// and are listed in lexicographic order of that point.
pub fn find_orbits(f: &MapPoint, n: usize, tol: f64) -> Result<OrbitSearch> {
    if n == 0 {
        return Err(Error::InvalidMap("period must be positive".into()));
    }
    let d = f.degree();
    let count = (0..n)
        .try_fold(1usize, |acc, _| acc.checked_mul(d).filter(|&c| c <= MAX_SEARCH_DEGREE))
        .ok_or(Error::PeriodTooLarge {
            period: n,
            count: d.saturating_pow(n as u32),
            cap: MAX_SEARCH_DEGREE,
        })?;

    let mut num = f.numerator().coeffs().to_vec();
    num.resize(d + 1, Complex64::new(0.0, 0.0));
    let mut den = f.denominator().coeffs().to_vec();
    den.resize(d + 1, Complex64::new(0.0, 0.0));

    let r = search_radius(f);
    let starts = circle_starts(count, &[0.5 * r, 0.8 * r, 1.1 * r], 0x5eed + n as u64);
    let outcome = simultaneous_iteration(starts, 400, |z| {
        let ratio = fixed_point_ratio(&num, &den, n, z);
        (ratio, ratio.norm() <= 1e-14 * z.norm().max(1.0))
    });

    let finite: Vec<Complex64> = outcome
        .points
        .iter()
        .copied()
        .filter(|z| z.is_finite() && z.norm() < 1e8 * r)
        .collect();
    let mut complete = finite.len() == count;
    let mut clusters = merge_clusters(&finite, 1e-10);
    clusters.sort_by(|a, b| lex_cmp(a.value, b.value));

    let mut orbits: Vec<PeriodicOrbit> = Vec::new();
    for cluster in clusters {
        let z = cluster.value;
        let scale = z.norm().max(1.0);
        if orbits
            .iter()
            .any(|o| o.points.iter().any(|&b| (b - z).norm() <= 1e-6 * scale.max(o.scale())))
        {
            continue;
        }
        if at_pole(f, z) {
            complete = false;
            continue;
        }
        let lower = divisors(n)
            .into_iter()
            .find(|&k| (iterate(f, z, k) - z).norm() <= 10.0 * tol.max(1e-8) * scale);
        if lower.is_some() {
            continue;
        }
        let mut points = Vec::with_capacity(n);
        let mut w = z;
        for _ in 0..n {
            points.push(w);
            w = f.eval(w);
        }
        let Ok(rough) = orbit_data_with_tol(f, &points, 1e-6) else {
            complete = false;
            continue;
        };
        let Ok(polished) = refine_orbit(f, &rough) else {
            complete = false;
            continue;
        };
        if cycle_defect(f, &polished.points) > tol {
            complete = false;
            continue;
        }
        orbits.push(rotate_canonical(polished));
    }
    orbits.sort_by(|a, b| lex_cmp(a.points[0], b.points[0]));
    Ok(OrbitSearch { orbits, complete })
}

/// Rotates an orbit to start at its lexicographically smallest point.
pub fn rotate_canonical(orbit: PeriodicOrbit) -> PeriodicOrbit {
    let n = orbit.period;
    let start = (0..n)
        .min_by(|&i, &j| lex_cmp(orbit.points[i], orbit.points[j]))
        .unwrap_or(0);
    PeriodicOrbit {
        points: (0..n).map(|k| orbit.points[(start + k) % n]).collect(),
        second_derivs: (0..n).map(|k| orbit.second_derivs[(start + k) % n]).collect(),
        ..orbit
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::PolySpacePoint;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn quadratic(v: f64) -> MapPoint {
        PolySpacePoint::build(c(v, 0.0), &[c(0.0, 0.0)], &[1]).unwrap().into()
    }

    #[test]
    fn fixed_points_of_z_squared() {
        let search = find_orbits(&quadratic(0.0), 1, ORBIT_TOL).unwrap();
        assert!(search.complete);
        assert_eq!(search.orbits.len(), 2);
        assert!(search.orbits[0].points[0].norm() < 1e-12);
        assert!(search.orbits[0].multiplier.norm() < 1e-12);
        assert!((search.orbits[1].points[0] - 1.0).norm() < 1e-12);
        assert!((search.orbits[1].multiplier - 2.0).norm() < 1e-12);
    }

    #[test]
    fn basilica_period_two() {
        let search = find_orbits(&quadratic(-1.0), 2, ORBIT_TOL).unwrap();
        assert_eq!(search.orbits.len(), 1);
        let o = &search.orbits[0];
        assert!((o.points[0] + 1.0).norm() < 1e-12 && o.points[1].norm() < 1e-12);
        assert!(o.multiplier.norm() < 1e-12);
    }

    #[test]
    fn basilica_fixed_points() {
        let search = find_orbits(&quadratic(-1.0), 1, ORBIT_TOL).unwrap();
        let s5 = 5f64.sqrt();
        assert_eq!(search.orbits.len(), 2);
        assert!((search.orbits[0].points[0] - (1.0 - s5) / 2.0).norm() < 1e-12);
        assert!((search.orbits[0].multiplier - (1.0 - s5)).norm() < 1e-12);
        assert!((search.orbits[1].multiplier - (1.0 + s5)).norm() < 1e-12);
    }

    #[test]
    fn orbit_data_examples() {
        let o = orbit_data(&quadratic(0.0), &[c(1.0, 0.0)]).unwrap();
        assert_eq!(o.multiplier, c(2.0, 0.0));
        assert_eq!(o.second_derivs, vec![c(2.0, 0.0)]);

        let o = orbit_data(&quadratic(-1.0), &[c(0.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert_eq!(o.multiplier, c(0.0, 0.0));
        assert!((o.second_derivs[0] - c(-4.0, 0.0)).norm() < 1e-14);
        assert!((o.second_derivs[1] - c(8.0, 0.0)).norm() < 1e-14);

        let o = orbit_data(&quadratic(0.25), &[c(0.5, 0.0)]).unwrap();
        assert_eq!(o.multiplier, c(1.0, 0.0));
        assert_eq!(o.second_derivs, vec![c(2.0, 0.0)]);
    }

    #[test]
    fn orbit_data_rejects_non_cycles() {
        assert!(matches!(
            orbit_data(&quadratic(0.0), &[c(0.5, 0.0)]),
            Err(Error::NotACycle(_))
        ));
        assert!(matches!(
            orbit_data(&quadratic(0.0), &[c(1.0, 0.0), c(1.0, 0.0)]),
            Err(Error::PeriodNotExact { requested: 2, exact: 1 })
        ));
    }

    #[test]
    fn continuation_examples() {
        let seed = orbit_data(&quadratic(0.0), &[c(0.0, 0.0)]).unwrap();
        let same = continue_orbit(&quadratic(0.0), &seed, 1e-14).unwrap();
        assert_eq!(same.points, seed.points);

        let moved = continue_orbit(&quadratic(-0.1), &seed, 1e-14).unwrap();
        let expected = (1.0 - 1.4f64.sqrt()) / 2.0;
        assert!((moved.points[0] - expected).norm() < 1e-14);

        let seed = orbit_data(&quadratic(-1.0), &[c(-1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let moved = continue_orbit(&quadratic(-1.1), &seed, 1e-14).unwrap();
        let s = 1.4f64.sqrt();
        assert!((moved.points[0] - (-1.0 - s) / 2.0).norm() < 1e-13);
        assert!((moved.points[1] - (-1.0 + s) / 2.0).norm() < 1e-13);
        assert!((moved.multiplier + 0.4).norm() < 1e-13);
    }

    #[test]
    fn continuation_refuses_parabolic_orbit() {
        let seed = orbit_data(&quadratic(0.25), &[c(0.5, 0.0)]).unwrap();
        assert!(matches!(
            continue_orbit(&quadratic(0.2), &seed, 1e-12),
            Err(Error::ParabolicOrbit(_))
        ));
    }

    #[test]
    fn parabolic_orbit_is_found_exactly() {
        let search = find_orbits(&quadratic(0.25), 1, ORBIT_TOL).unwrap();
        assert_eq!(search.orbits.len(), 1);
        assert!((search.orbits[0].points[0] - 0.5).norm() < 1e-12);
        assert!((search.orbits[0].multiplier - 1.0).norm() < 1e-12);
    }
}
