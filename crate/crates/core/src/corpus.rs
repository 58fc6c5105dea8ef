//! The default regression corpus: nine criteria, each a set of numerical
//! checks against independently derived values.
//!
//! Shared by the `acceptance` test target and the `corpus` subcommand of
//! the command-line tool.

use std::f64::consts::TAU;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bfunc::{b_function, b_hat, PoleSum, PoleTerm};
use crate::cpoly::ComplexPoly;
use crate::derivs::{
    assemble_jacobian, cusp_derivatives_with, cusp_direct, derivative, drho_dsigma_m, drho_dv_residue, sum_rules,
    verify_identity, Method, FD_STEP,
};
use crate::error::{Error, Result};
use crate::orbits::{find_orbits, orbit_data, telescoping_residual, PeriodicOrbit, ORBIT_TOL};
use crate::spaces::{invert_chart, ChartVector, Coord, MapPoint, PolySpacePoint, RationalMapPoint, CHART_TOL};
use crate::transfer::{identity_coefficients, transfer_closed_form, transfer_eval};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// One numerical comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    fn below(label: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            label: label.into(),
            value,
            threshold,
            passed: value < threshold,
        }
    }

    fn above(label: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            label: label.into(),
            value,
            threshold,
            passed: value > threshold,
        }
    }

    fn failed(label: impl Into<String>, err: &Error) -> Self {
        Check {
            label: format!("{}: {}", label.into(), err),
            value: f64::NAN,
            threshold: f64::NAN,
            passed: false,
        }
    }
}

/// Outcome of one criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl CriterionOutcome {
    fn new(id: usize, name: &str, checks: Vec<Check>) -> Self {
        CriterionOutcome {
            id,
            name: name.to_string(),
            passed: !checks.is_empty() && checks.iter().all(|c| c.passed),
            checks,
        }
    }

    /// One-line summary: the worst check relative to its threshold.
    pub fn summary(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let failing = self.checks.iter().find(|c| !c.passed);
        let detail = match failing {
            Some(c) => format!("failed {} = {:.3e} (threshold {:.1e})", c.label, c.value, c.threshold),
            None => format!("{} checks", self.checks.len()),
        };
        format!("criterion {} [{}] {}: {}", self.id, status, self.name, detail)
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_disk(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    Complex64::from_polar(radius * rng.gen_range(0.0..1.0f64).sqrt(), rng.gen_range(0.0..TAU))
}

fn min_pairwise(points: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            best = best.min((points[i] - points[j]).norm());
        }
    }
    best
}

/// A random monic centered polynomial with the given multiplicities,
/// critical points in the unit disk separated by at least 0.2.
pub fn random_polynomial(rng: &mut ChaCha8Rng, multiplicities: &[usize]) -> MapPoint {
    let total: usize = multiplicities.iter().sum();
    loop {
        let mut cps: Vec<Complex64> = multiplicities.iter().map(|_| random_disk(rng, 1.0)).collect();
        let mean: Complex64 = cps
            .iter()
            .zip(multiplicities)
            .map(|(z, &m)| z * m as f64)
            .sum::<Complex64>()
            / total as f64;
        cps.iter_mut().for_each(|z| *z -= mean);
        if min_pairwise(&cps) < 0.2 {
            continue;
        }
        let f0 = random_disk(rng, 0.6);
        if let Ok(f) = PolySpacePoint::build(f0, &cps, multiplicities) {
            return f.into();
        }
    }
}

/// A random rational map of degree `d` with simple critical points and
/// finite critical values, all special points well separated.
pub fn random_rational(rng: &mut ChaCha8Rng, d: usize) -> MapPoint {
    loop {
        let sigma = Complex64::from_polar(rng.gen_range(0.6..2.0), rng.gen_range(0.0..TAU));
        let m = random_disk(rng, 0.5);
        let q_roots: Vec<Complex64> = (0..d - 1).map(|_| random_disk(rng, 1.0)).collect();
        let q = ComplexPoly::from_roots(&q_roots, ONE);
        let p = ComplexPoly::new(
            (0..d - 1)
                .map(|_| Complex64::from_polar(rng.gen_range(0.3..1.0), rng.gen_range(0.0..TAU)))
                .collect(),
        );
        let Ok(f) = RationalMapPoint::validate(sigma, m, p, q) else {
            continue;
        };
        if f.multiplicities().iter().any(|&k| k != 1) || f.finite_count() != 2 * d - 2 {
            continue;
        }
        let mut special: Vec<Complex64> = f.crit_points().to_vec();
        special.extend_from_slice(f.poles());
        if min_pairwise(&special) < 0.1 || f.crit_points().iter().any(|z| z.norm() > 3.0) {
            continue;
        }
        return f.into();
    }
}

fn random_pole_sum(rng: &mut ChaCha8Rng, f: &MapPoint, count: usize) -> PoleSum {
    let mut terms = Vec::with_capacity(count);
    while terms.len() < count {
        let pole = random_disk(rng, 1.5);
        let near_special = f
            .crit_points()
            .iter()
            .chain(f.poles())
            .any(|&z| (z - pole).norm() < 0.1);
        if near_special {
            continue;
        }
        terms.push(PoleTerm {
            pole,
            a2: random_disk(rng, 1.0),
            a1: random_disk(rng, 1.0),
        });
    }
    PoleSum::from_terms(terms)
}

/// A polynomial of degree 3 or 4 with simple critical points and an orbit
/// of period at most 3 with `rho` away from 0 and 1 and no critical point
/// on it.
pub fn random_orbit_case(seed: u64) -> (MapPoint, PeriodicOrbit) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = 3 + (seed % 2) as usize;
    let n = 1 + (seed % 3) as usize;
    loop {
        let f = random_polynomial(&mut rng, &vec![1; d - 1]);
        let Ok(search) = find_orbits(&f, n, ORBIT_TOL) else {
            continue;
        };
        let scale = f.scale();
        let pick = search.orbits.into_iter().find(|o| {
            let rho = o.multiplier.norm();
            let clear = f
                .crit_points()
                .iter()
                .all(|&cp| o.points.iter().all(|&b| (b - cp).norm() > 1e-2 * scale));
            rho > 1e-2 && rho < 1e4 && (o.multiplier - ONE).norm() > 1e-2 && clear
        });
        if let Some(o) = pick {
            return (f, o);
        }
    }
}

fn quadratic(v: f64) -> MapPoint {
    PolySpacePoint::build(c(v, 0.0), &[ZERO], &[1])
        .expect("valid quadratic")
        .into()
}

fn attracting_fixed(f: &MapPoint) -> Result<PeriodicOrbit> {
    find_orbits(f, 1, ORBIT_TOL)?
        .orbits
        .into_iter()
        .find(|o| o.multiplier.norm() < 1.0)
        .ok_or(Error::Hypothesis("no attracting fixed point".into()))
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

/// Runs `body`, turning an error into a failed check.
fn guard(checks: &mut Vec<Check>, label: &str, body: impl FnOnce(&mut Vec<Check>) -> Result<()>) {
    if let Err(e) = body(checks) {
        checks.push(Check::failed(label, &e));
    }
}

/// Criterion 1: `B - T B = sum L_j/(z - v_j)` with residue-route `L_j`
/// on twenty random cubic and quartic cases.
pub fn criterion_main_identity() -> CriterionOutcome {
    let start = Instant::now();
    let mut checks = Vec::new();
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let (f, o) = random_orbit_case(seed);
        guard(&mut checks, &format!("seed {seed}"), |_| {
            let check = verify_identity(&f, &o, 16)?;
            if check.sources.iter().any(|&s| s != Method::Residue) {
                return Err(Error::Hypothesis("residue route unavailable".into()));
            }
            worst = worst.max(check.max_residual);
            Ok(())
        });
    }
    checks.push(Check::below("max relative residual", worst, 1e-7));
    checks.push(Check::below("runtime seconds", start.elapsed().as_secs_f64(), 10.0));
    CriterionOutcome::new(1, "main identity, polynomial", checks)
}

/// Criterion 2: quadratic closed forms `2/(1 - rho)` and `4`.
pub fn criterion_quadratic() -> CriterionOutcome {
    let mut checks = Vec::new();
    guard(&mut checks, "fixed orbit at v=-0.5", |checks| {
        let f = quadratic(-0.5);
        let o = attracting_fixed(&f)?;
        let closed = 2.0 / (ONE - o.multiplier);
        let expected = c(2.0 / 3f64.sqrt(), 0.0);
        checks.push(Check::below("2/(1-rho) at v=-0.5", rel(closed, expected), 1e-12));
        for (m, tol) in [(Method::Residue, 1e-8), (Method::Identity, 1e-8), (Method::Fd, 1e-6)] {
            let d = derivative(&f, &o, Coord::V(0), m)?;
            checks.push(Check::below(format!("fixed orbit {m}"), rel(d, expected), tol));
        }
        Ok(())
    });
    guard(&mut checks, "period 2 at v=-1", |checks| {
        let f = quadratic(-1.0);
        let o = orbit_data(&f, &[c(-1.0, 0.0), ZERO])?;
        let d = derivative(&f, &o, Coord::V(0), Method::Identity)?;
        checks.push(Check::below("period 2 identity at v=-1", rel(d, c(4.0, 0.0)), 1e-8));
        Ok(())
    });
    guard(&mut checks, "period 2 at v=-1.1", |checks| {
        let f = quadratic(-1.1);
        let o = find_orbits(&f, 2, ORBIT_TOL)?
            .orbits
            .into_iter()
            .next()
            .ok_or(Error::Hypothesis("no period-2 orbit".into()))?;
        for (m, tol) in [(Method::Residue, 1e-8), (Method::Identity, 1e-8), (Method::Fd, 1e-6)] {
            let d = derivative(&f, &o, Coord::V(0), m)?;
            checks.push(Check::below(
                format!("period 2 {m} at v=-1.1"),
                rel(d, c(4.0, 0.0)),
                tol,
            ));
        }
        Ok(())
    });
    CriterionOutcome::new(2, "quadratic closed forms", checks)
}

fn cusp_case(checks: &mut Vec<Check>, name: &str, f: &MapPoint, point: f64, expected: f64) -> Result<()> {
    let o = orbit_data(f, &[c(point, 0.0)])?;
    let hat = b_hat(&o)?;
    let id = identity_coefficients(f, &hat)?;
    let value = f.crit_values()[0]
        .finite()
        .ok_or(Error::Hypothesis("infinite value".into()))?;
    let coeff = id.at(value, 1e-9).ok_or(Error::Hypothesis("no coefficient".into()))?;
    let expected = c(expected, 0.0);
    checks.push(Check::below(format!("{name} direct"), rel(coeff, expected), 1e-9));
    let report = cusp_derivatives_with(f, &o, &[Coord::Group(0)], FD_STEP, f64::INFINITY)?;
    let entry = &report.entries[0];
    checks.push(Check::below(format!("{name} limit"), rel(entry.limit, expected), 1e-4));
    checks.push(Check::below(
        format!("{name} direction independence"),
        rel(entry.limit, entry.limit_reverse),
        1e-4,
    ));
    Ok(())
}

/// Criterion 3: cusp derivatives of `z^2 + 1/4` and `z^3 + 2/(3 sqrt 3)`.
pub fn criterion_cusp() -> CriterionOutcome {
    let mut checks = Vec::new();
    guard(&mut checks, "z^2+1/4", |checks| {
        cusp_case(checks, "z^2+1/4", &quadratic(0.25), 0.5, 2.0)
    });
    guard(&mut checks, "z^3+2/(3 sqrt 3)", |checks| {
        let s3 = 3f64.sqrt();
        let f: MapPoint = PolySpacePoint::build(c(2.0 / (3.0 * s3), 0.0), &[ZERO], &[2])?.into();
        cusp_case(checks, "z^3+2/(3 sqrt 3)", &f, 1.0 / s3, 2.0 * s3)
    });
    CriterionOutcome::new(3, "cusp limits", checks)
}

/// `2z - 1/z`.
pub fn two_z_minus_inverse() -> MapPoint {
    RationalMapPoint::validate(
        c(2.0, 0.0),
        ZERO,
        ComplexPoly::constant(c(-1.0, 0.0)),
        ComplexPoly::identity(),
    )
    .expect("valid rational map")
    .into()
}

/// Criterion 4: the rational example `2z - 1/z` with the fixed point 1.
pub fn criterion_rational() -> CriterionOutcome {
    let mut checks = Vec::new();
    guard(&mut checks, "2z-1/z", |checks| {
        let f = two_z_minus_inverse();
        let o = orbit_data(&f, &[ONE])?;
        let (ds, dm) = drho_dsigma_m(&f, &o)?;
        checks.push(Check::below("d rho/d sigma", rel(ds, c(2.0, 0.0)), 1e-12));
        checks.push(Check::below("d rho/d m", rel(dm, c(0.5, 0.0)), 1e-12));
        for (coord, exact) in [(Coord::Sigma, 2.0), (Coord::M, 0.5)] {
            let fd = derivative(&f, &o, coord, Method::Fd)?;
            checks.push(Check::below(format!("{coord} vs fd"), rel(fd, c(exact, 0.0)), 1e-6));
        }
        for j in 0..2 {
            let coord = Coord::V(j);
            let fd = derivative(&f, &o, coord, Method::Fd)?;
            for m in [Method::Residue, Method::Identity] {
                let d = derivative(&f, &o, coord, m)?;
                checks.push(Check::below(format!("{coord} {m}"), rel(d, c(0.25, 0.0)), 1e-9));
                checks.push(Check::below(format!("{coord} {m} vs fd"), rel(d, fd), 1e-6));
            }
        }
        let rules = sum_rules(&f, &o)?;
        checks.push(Check::below("first sum rule", rules.first, 1e-9));
        checks.push(Check::below("second sum rule", rules.second.unwrap_or(f64::NAN), 1e-9));
        Ok(())
    });
    CriterionOutcome::new(4, "rational map 2z-1/z", checks)
}

/// Criterion 5: closed-form transfer against preimage summation.
pub fn criterion_closed_transfer() -> CriterionOutcome {
    let mut checks = Vec::new();
    let mut worst = 0.0f64;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let d = 2 + (seed / 2 % 3) as usize;
        let f = if seed % 2 == 0 {
            random_polynomial(&mut rng, &vec![1; d - 1])
        } else {
            random_rational(&mut rng, d)
        };
        let psi = random_pole_sum(&mut rng, &f, 3);
        guard(&mut checks, &format!("seed {seed}"), |_| {
            let closed = transfer_closed_form(&f, &psi)?;
            let scale = f.scale().max(psi.scale());
            let values: Vec<Complex64> = f.crit_values().into_iter().filter_map(|v| v.finite()).collect();
            let images: Vec<Complex64> = psi.poles().map(|b| f.eval(b)).collect();
            let mut diff = 0.0f64;
            let mut size = 0.0f64;
            let mut taken = 0;
            while taken < 32 {
                let z = random_disk(&mut rng, 1.5 * scale);
                if values.iter().chain(&images).any(|&w| (w - z).norm() < 2e-2 * scale) {
                    continue;
                }
                let numeric = transfer_eval(&f, &psi, z)?;
                diff = diff.max((closed.eval(z)? - numeric).norm());
                size = size.max(numeric.norm());
                taken += 1;
            }
            worst = worst.max(diff / size);
            Ok(())
        });
    }
    checks.push(Check::below("max relative disagreement", worst, 1e-9));
    CriterionOutcome::new(5, "closed-form transfer", checks)
}

fn round_trip(rng: &mut ChaCha8Rng, f: &MapPoint) -> Result<f64> {
    let chart = f.chart();
    let values = chart
        .values
        .iter()
        .map(|v| v + Complex64::from_polar(1e-3, rng.gen_range(0.0..TAU)))
        .collect();
    let target = ChartVector {
        coords: chart.coords.clone(),
        values,
    };
    let g = invert_chart(f, &target, CHART_TOL)?;
    Ok(g.chart_in(&target.coords)?.distance(&target))
}

/// Criterion 6: chart round trips with perturbations of size `1e-3`.
pub fn criterion_chart_round_trip() -> CriterionOutcome {
    let mut checks = Vec::new();
    let patterns: [&[usize]; 6] = [&[1], &[1, 1], &[2], &[1, 1, 1], &[1, 2], &[3]];
    let mut worst_poly = 0.0f64;
    let mut worst_rat = 0.0f64;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(2000 + seed);
        let f = random_polynomial(&mut rng, patterns[seed as usize % patterns.len()]);
        guard(&mut checks, &format!("polynomial seed {seed}"), |_| {
            worst_poly = worst_poly.max(round_trip(&mut rng, &f)?);
            Ok(())
        });
        let mut rng = ChaCha8Rng::seed_from_u64(3000 + seed);
        let f = random_rational(&mut rng, 2 + (seed % 2) as usize);
        guard(&mut checks, &format!("rational seed {seed}"), |_| {
            worst_rat = worst_rat.max(round_trip(&mut rng, &f)?);
            Ok(())
        });
    }
    checks.push(Check::below("polynomial round trip", worst_poly, 1e-10));
    checks.push(Check::below("rational round trip", worst_rat, 1e-10));
    CriterionOutcome::new(6, "chart round trip", checks)
}

/// `sigma z + b/(z + a)` with the fixed point 1 of multiplier `lambda`.
pub fn quadratic_rational_with_fixed_point(sigma: Complex64, lambda: Complex64) -> Result<MapPoint> {
    // f(1) = 1 and f'(1) = lambda with u = 1/(1 + a).
    let u = (sigma - lambda) / (ONE - sigma);
    let b = (ONE - sigma) / u;
    let a = u.inv() - ONE;
    Ok(RationalMapPoint::validate(sigma, ZERO, ComplexPoly::constant(b), ComplexPoly::new(vec![a, ONE]))?.into())
}

/// Criterion 7: numerical rank of multiplier Jacobians.
pub fn criterion_rank() -> CriterionOutcome {
    let mut checks = Vec::new();
    guard(&mut checks, "z^3+(3/2)z", |checks| {
        let f: MapPoint = MapPoint::polynomial(&[ZERO, c(1.5, 0.0), ZERO, ONE])?;
        let s = 0.5f64.sqrt();
        let orbits = [orbit_data(&f, &[c(0.0, -s)])?, orbit_data(&f, &[c(0.0, s)])?];
        let jac = assemble_jacobian(&f, &orbits, &[Coord::Group(0), Coord::Group(1)])?;
        let ratio = jac.singular_values[1] / jac.singular_values[0];
        checks.push(Check::above("z^3+(3/2)z singular value ratio", ratio, 1e-6));
        checks.push(Check::above("z^3+(3/2)z rank", jac.rank as f64, 1.5));
        Ok(())
    });
    let single: [(&str, f64, Vec<Complex64>); 3] = [
        ("z^2-1/2 fixed", -0.5, vec![]),
        ("z^2-1 period 2", -1.0, vec![c(-1.0, 0.0), ZERO]),
        ("z^2+1/4 cusp", 0.25, vec![c(0.5, 0.0)]),
    ];
    for (name, v, points) in single {
        guard(&mut checks, name, |checks| {
            let f = quadratic(v);
            let o = if points.is_empty() {
                attracting_fixed(&f)?
            } else {
                orbit_data(&f, &points)?
            };
            let jac = assemble_jacobian(&f, &[o], &[Coord::Group(0)])?;
            checks.push(Check::below(
                format!("{name} rank defect"),
                (jac.rank as f64 - 1.0).abs(),
                0.5,
            ));
            Ok(())
        });
    }
    let sigmas = [c(2.0, 0.0), c(-1.5, 0.5), c(0.0, 1.2), Complex64::from_polar(1.0, 1.0)];
    let lambdas = [
        c(0.5, 0.0),
        c(-0.3, 0.2),
        ZERO,
        Complex64::from_polar(1.0, 0.3 * TAU),
        ONE,
    ];
    let mut smallest = f64::INFINITY;
    for &sigma in &sigmas {
        for &lambda in &lambdas {
            guard(
                &mut checks,
                &format!("quadratic rational sigma={sigma} lambda={lambda}"),
                |_| {
                    let f = quadratic_rational_with_fixed_point(sigma, lambda)?;
                    let o = orbit_data(&f, &[ONE])?;
                    let groups = f.value_groups();
                    let cols: Vec<Coord> = (0..groups.len()).map(Coord::Group).collect();
                    let entries = if (lambda - ONE).norm() < 1e-12 {
                        cusp_direct(&f, &o, &cols)?
                    } else {
                        let id = identity_coefficients(&f, &b_function(&o)?)?;
                        id.coefficients.iter().map(|c| c.coefficient).collect()
                    };
                    let scale = f.scale();
                    for k in 0..groups.len() {
                        // The statement applies to v_k whenever the other
                        // critical value is nonzero.
                        let other_nonzero = groups.len() == 2 && groups[1 - k].value.norm() > 1e-9 * scale;
                        if other_nonzero {
                            smallest = smallest.min(entries[k].norm() / scale);
                        }
                    }
                    Ok(())
                },
            );
        }
    }
    checks.push(Check::above("quadratic rational smallest |d rho/d v|", smallest, 1e-8));
    CriterionOutcome::new(7, "rank certificates", checks)
}

/// Criterion 8: `sum_j d rho/d v_j = Gamma_1` on the suite of criterion 1.
pub fn criterion_sum_rule() -> CriterionOutcome {
    let mut checks = Vec::new();
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let (f, o) = random_orbit_case(seed);
        guard(&mut checks, &format!("seed {seed}"), |_| {
            let total: Complex64 = (0..f.crit_points().len())
                .map(|j| drho_dv_residue(&f, &o, j))
                .sum::<Result<Complex64>>()?;
            let (g1, _) = b_function(&o)?.gamma_coeffs();
            worst = worst.max(rel(total, g1));
            Ok(())
        });
    }
    checks.push(Check::below("max relative sum-rule residual", worst, 1e-8));
    CriterionOutcome::new(8, "polynomial sum rule", checks)
}

/// Criterion 9: telescoping identity on found orbits and fixed-point
/// counts of `z^2`.
pub fn criterion_orbit_invariants() -> CriterionOutcome {
    let mut checks = Vec::new();
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let (f, _) = random_orbit_case(seed);
        for n in 1..=3 {
            guard(&mut checks, &format!("seed {seed} period {n}"), |_| {
                for o in find_orbits(&f, n, ORBIT_TOL)?.orbits {
                    if let Some(r) = telescoping_residual(&f, &o) {
                        worst = worst.max(r);
                    }
                }
                Ok(())
            });
        }
    }
    checks.push(Check::below("max telescoping residual", worst, 1e-9));
    let f = quadratic(0.0);
    for n in 1..=3usize {
        guard(&mut checks, &format!("z^2 count n={n}"), |checks| {
            let mut count = 0usize;
            for k in (1..=n).filter(|k| n.is_multiple_of(*k)) {
                count += k * find_orbits(&f, k, ORBIT_TOL)?.orbits.len();
            }
            checks.push(Check::below(
                format!("z^2 fixed points of f^{n} missing"),
                (count as f64 - 2f64.powi(n as i32)).abs(),
                0.5,
            ));
            Ok(())
        });
    }
    CriterionOutcome::new(9, "orbit invariants", checks)
}

/// Runs all nine criteria in order.
pub fn run_default() -> Vec<CriterionOutcome> {
    vec![
        criterion_main_identity(),
        criterion_quadratic(),
        criterion_cusp(),
        criterion_rational(),
        criterion_closed_transfer(),
        criterion_chart_round_trip(),
        criterion_rank(),
        criterion_sum_rule(),
        criterion_orbit_invariants(),
    ]
}
