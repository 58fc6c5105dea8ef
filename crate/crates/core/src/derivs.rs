//! Derivatives of orbit multipliers in chart coordinates.
//!
//! Three independent routes are provided: contour integrals around the
//! critical points, the coefficients of `B - T B` at the critical values,
//! and finite differences through chart inversion and orbit continuation.
//! Multiplier-one orbits are handled through the cusp function `B^`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bfunc::{b_function, b_hat, PoleSum};
use crate::error::{Error, Result};
use crate::linalg::singular_values;
use crate::orbits::{continue_orbit, orbit_data_with_tol, PeriodicOrbit, PARABOLIC_TOL};
use crate::spaces::{invert_chart, Coord, CriticalValue, MapPoint, CHART_TOL};
use crate::transfer::{identity_coefficients, sample_points, transfer_eval, IdentityMethod};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Quadrature nodes on each contour.
pub const CONTOUR_NODES: usize = 256;
/// Default step of the finite-difference oracle.
pub const FD_STEP: f64 = 1e-3;
/// Default relative threshold of [`numerical_rank`].
pub const RANK_TOL: f64 = 1e-6;
/// Largest accepted disagreement between the two cusp routes.
pub const CUSP_TOL: f64 = 1e-4;

/// Radius of a circle around `c` that encloses no other singularity.
fn contour_radius(f: &MapPoint, orbit: &PeriodicOrbit, j: usize) -> Result<f64> {
    let c = f.crit_points()[j];
    let others = f
        .crit_points()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != j)
        .map(|(_, &z)| z)
        .chain(orbit.points.iter().copied())
        .chain(
            f.poles()
                .iter()
                .copied()
                .filter(|&p| (p - c).norm() > 1e-10 * f.scale()),
        );
    let nearest = others.map(|z| (z - c).norm()).fold(f64::INFINITY, f64::min);
    let r = if nearest.is_finite() { 0.5 * nearest } else { 1.0 };
    if r <= 1e-10 * f.scale() {
        return Err(Error::ContourSeparation(j));
    }
    Ok(r)
}

/// `(1/2 pi i) * integral of g over |w - c| = r` by the trapezoid rule.
fn contour_integral(c: Complex64, r: f64, g: impl Fn(Complex64) -> Complex64) -> Complex64 {
    let n = CONTOUR_NODES;
    let sum: Complex64 = (0..n)
        .map(|k| {
            let u = Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / n as f64);
            g(c + u) * u
        })
        .sum();
    sum / n as f64
}

fn check_regular(orbit: &PeriodicOrbit) -> Result<PoleSum> {
    b_function(orbit)
}

fn check_off_orbit(f: &MapPoint, orbit: &PeriodicOrbit, j: usize) -> Result<()> {
    let c = *f
        .crit_points()
        .get(j)
        .ok_or_else(|| Error::InvalidCoordinate(Coord::V(j).to_string()))?;
    if orbit.position(c, 1e-9).is_some() {
        return Err(Error::CriticalPointOnOrbit(j));
    }
    Ok(())
}

/// `d rho / d v_j = -(1/2 pi i) * integral of B / f'` around `c_j`.
pub fn drho_dv_residue(f: &MapPoint, orbit: &PeriodicOrbit, j: usize) -> Result<Complex64> {
    let b = check_regular(orbit)?;
    check_off_orbit(f, orbit, j)?;
    if f.crit_values()[j] == CriticalValue::Infinite {
        return Err(Error::InvalidCoordinate(Coord::V(j).to_string()));
    }
    let c = f.crit_points()[j];
    let r = contour_radius(f, orbit, j)?;
    let value = contour_integral(c, r, |w| {
        let df = f.jet(w, 1)[1];
        b.eval(w).unwrap_or(ZERO) / df
    });
    Ok(-value)
}

/// `-B(c_j) / f''(c_j)`, the residue at a simple critical point.
pub fn drho_dv_simple(f: &MapPoint, orbit: &PeriodicOrbit, j: usize) -> Result<Complex64> {
    let b = check_regular(orbit)?;
    check_off_orbit(f, orbit, j)?;
    if f.multiplicities()[j] != 1 {
        return Err(Error::InvalidCoordinate(format!(
            "critical point {} is not simple",
            j + 1
        )));
    }
    let c = f.crit_points()[j];
    Ok(-b.eval(c)? / f.jet(c, 2)[2])
}

/// `d rho / d (1/v_j) = (1/2 pi i) * integral of B f^2 / f'` around a
/// critical point `c_j` whose critical value is infinite.
pub fn drho_dv_inf(f: &MapPoint, orbit: &PeriodicOrbit, j: usize) -> Result<Complex64> {
    let b = check_regular(orbit)?;
    match f.crit_values().get(j) {
        Some(CriticalValue::Infinite) => {}
        _ => return Err(Error::InvalidCoordinate(Coord::InvV(j).to_string())),
    }
    let c = f.crit_points()[j];
    let r = contour_radius(f, orbit, j)?;
    Ok(contour_integral(c, r, |w| {
        let jet = f.jet(w, 1);
        b.eval(w).unwrap_or(ZERO) * jet[0] * jet[0] / jet[1]
    }))
}

/// `(d rho / d sigma, d rho / d m) = (Gamma_2 / sigma, Gamma_1 / sigma)`
/// from the expansion of `B` at infinity.
pub fn drho_dsigma_m(f: &MapPoint, orbit: &PeriodicOrbit) -> Result<(Complex64, Complex64)> {
    let (sigma, _) = f
        .infinity_data()
        .ok_or_else(|| Error::InvalidCoordinate("sigma".into()))?;
    let (g1, g2) = check_regular(orbit)?.gamma_coeffs();
    Ok((g2 / sigma, g1 / sigma))
}

/// The cusp counterpart of [`drho_dsigma_m`], from the expansion of `B^`.
pub fn cusp_dsigma_m(f: &MapPoint, orbit: &PeriodicOrbit) -> Result<(Complex64, Complex64)> {
    let (sigma, _) = f
        .infinity_data()
        .ok_or_else(|| Error::InvalidCoordinate("sigma".into()))?;
    let (g1, g2) = b_hat(orbit)?.gamma_coeffs();
    Ok((g2 / sigma, g1 / sigma))
}

fn shifted_map(f: &MapPoint, coord: Coord, delta: Complex64) -> Result<MapPoint> {
    let chart = f.chart();
    let target = chart.shifted(coord, delta, &f.value_groups())?;
    invert_chart(f, &target, CHART_TOL)
}

fn multiplier_at(f: &MapPoint, orbit: &PeriodicOrbit, coord: Coord, delta: Complex64) -> Result<Complex64> {
    let g = shifted_map(f, coord, delta)?;
    Ok(continue_orbit(&g, orbit, 1e-13)?.multiplier)
}

/// Central difference of `rho` along one chart coordinate, through
/// [`invert_chart`] and [`continue_orbit`], Richardson-extrapolated over
/// steps `h`, `h/2` and `h/4`.
pub fn drho_fd_oracle(f: &MapPoint, orbit: &PeriodicOrbit, coord: Coord, h: f64) -> Result<Complex64> {
    let gap = (orbit.multiplier - ONE).norm();
    if gap < PARABOLIC_TOL {
        return Err(Error::ParabolicOrbit(gap));
    }
    let central = |h: f64| -> Result<Complex64> {
        let step = Complex64::new(h, 0.0);
        let plus = multiplier_at(f, orbit, coord, step)?;
        let minus = multiplier_at(f, orbit, coord, -step)?;
        Ok((plus - minus) / (2.0 * h))
    };
    let levels = [central(h)?, central(0.5 * h)?, central(0.25 * h)?].map(|d| vec![d]);
    Ok(richardson(&levels, 2)[0])
}

/// A derivative route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Residue,
    Identity,
    Fd,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Residue => "residue",
            Method::Identity => "identity",
            Method::Fd => "fd",
        })
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "residue" => Ok(Method::Residue),
            "identity" => Ok(Method::Identity),
            "fd" => Ok(Method::Fd),
            _ => Err(Error::InvalidCoordinate(format!("unknown method {s}"))),
        }
    }
}

/// `d rho / d coord` by the chosen route.
///
/// For `sigma` and `m` the residue and identity routes both use the
/// expansion of `B` at infinity. The identity route gives per-point
/// derivatives `v_j` only when no other critical point shares the value.
pub fn derivative(f: &MapPoint, orbit: &PeriodicOrbit, coord: Coord, method: Method) -> Result<Complex64> {
    match (method, coord) {
        (Method::Fd, _) => drho_fd_oracle(f, orbit, coord, FD_STEP),
        (_, Coord::Sigma) => drho_dsigma_m(f, orbit).map(|d| d.0),
        (_, Coord::M) => drho_dsigma_m(f, orbit).map(|d| d.1),
        (Method::Residue, Coord::V(j)) => drho_dv_residue(f, orbit, j),
        (Method::Residue, Coord::InvV(j)) => drho_dv_inf(f, orbit, j),
        (Method::Residue, Coord::Group(k)) => {
            let group = f
                .value_groups()
                .get(k)
                .cloned()
                .ok_or_else(|| Error::InvalidCoordinate(coord.to_string()))?;
            group.members.iter().map(|&j| drho_dv_residue(f, orbit, j)).sum()
        }
        (Method::Identity, Coord::V(j)) => {
            let groups = f.value_groups();
            let k = groups
                .iter()
                .position(|g| g.members.contains(&j))
                .ok_or_else(|| Error::InvalidCoordinate(coord.to_string()))?;
            if groups[k].members.len() > 1 {
                return Err(Error::InvalidCoordinate(format!(
                    "{coord} shares its critical value; the identity route gives only V{}",
                    k + 1
                )));
            }
            derivative(f, orbit, Coord::Group(k), Method::Identity)
        }
        (Method::Identity, Coord::Group(k)) => {
            let id = identity_coefficients(f, &b_function(orbit)?)?;
            id.coefficients
                .get(k)
                .map(|c| c.coefficient)
                .ok_or_else(|| Error::InvalidCoordinate(coord.to_string()))
        }
        (Method::Identity, Coord::InvV(_)) => Err(Error::InvalidCoordinate(format!(
            "{coord} has no identity route; use residue or fd"
        ))),
    }
}

/// Outcome of checking `B - T B = sum L_j / (z - v_j)` at sample points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    /// `max |(B - T B)(z) - sum L_j/(z - v_j)|` over the samples, relative
    /// to `max |B(z)|`.
    pub max_residual: f64,
    pub samples: usize,
    /// `L_j` per critical point with finite value, in marking order.
    pub coefficients: Vec<Complex64>,
    /// Route used for each `L_j`.
    pub sources: Vec<Method>,
}

/// Verifies the transfer identity for `B` of `orbit` with `T B` evaluated
/// by preimage summation. `L_j` comes from the residue route, or from the
/// identity route when `c_j` lies on the orbit.
pub fn verify_identity(f: &MapPoint, orbit: &PeriodicOrbit, samples: usize) -> Result<IdentityCheck> {
    let b = b_function(orbit)?;
    let mut values = Vec::new();
    let mut coefficients = Vec::new();
    let mut sources = Vec::new();
    let mut identity = None;
    for (j, v) in f.crit_values().into_iter().enumerate() {
        let CriticalValue::Finite(v) = v else { continue };
        let (l, source) = match drho_dv_residue(f, orbit, j) {
            Ok(l) => (l, Method::Residue),
            Err(Error::CriticalPointOnOrbit(_)) => {
                if identity.is_none() {
                    identity = Some(identity_coefficients(f, &b)?);
                }
                let id = identity.as_ref().expect("set above");
                // The whole group's coefficient sits on the one critical
                // point of the group lying on the orbit.
                let group = id
                    .coefficients
                    .iter()
                    .find(|c| c.members.contains(&j))
                    .ok_or_else(|| Error::InvalidCoordinate(Coord::V(j).to_string()))?;
                let others: Complex64 = group
                    .members
                    .iter()
                    .filter(|&&i| i != j)
                    .map(|&i| drho_dv_residue(f, orbit, i))
                    .sum::<Result<Complex64>>()?;
                (group.coefficient - others, Method::Identity)
            }
            Err(e) => return Err(e),
        };
        values.push(v);
        coefficients.push(l);
        sources.push(source);
    }
    let points = sample_points(f, &b, samples);
    let mut worst = 0.0f64;
    let mut size = 0.0f64;
    for &z in &points {
        let bz = b.eval(z)?;
        let tb = transfer_eval(f, &b, z)?;
        let rhs: Complex64 = values.iter().zip(&coefficients).map(|(v, l)| l / (z - v)).sum();
        worst = worst.max((bz - tb - rhs).norm());
        size = size.max(bz.norm());
    }
    Ok(IdentityCheck {
        max_residual: worst / size.max(f64::MIN_POSITIVE),
        samples: points.len(),
        coefficients,
        sources,
    })
}

/// Residuals of the linear relations between the derivatives and the
/// expansion of `B` at infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumRules {
    /// Polynomials: `|sum_j d rho/d v_j - Gamma_1|`. Rational maps:
    /// `|((sigma-1)/sigma) Gamma_1 - sum_j d rho/d v_j|`.
    pub first: f64,
    /// Rational maps only: `|(m/sigma) Gamma_1 + sum_j v_j d rho/d v_j|`.
    pub second: Option<f64>,
}

/// Checks the sum rules with the identity-route coefficients.
pub fn sum_rules(f: &MapPoint, orbit: &PeriodicOrbit) -> Result<SumRules> {
    let b = b_function(orbit)?;
    let (g1, _) = b.gamma_coeffs();
    let id = identity_coefficients(f, &b)?;
    let total: Complex64 = id.coefficients.iter().map(|c| c.coefficient).sum();
    let moment: Complex64 = id.coefficients.iter().map(|c| c.coefficient * c.value).sum();
    Ok(match f.infinity_data() {
        None => SumRules {
            first: (total - g1).norm(),
            second: None,
        },
        Some((sigma, m)) => SumRules {
            first: ((sigma - ONE) / sigma * g1 - total).norm(),
            second: Some((m / sigma * g1 + moment).norm()),
        },
    })
}

/// Chart coordinates along which multipliers are differentiated by
/// default: `sigma`, `m` (rational maps) and the distinct critical values.
pub fn default_columns(f: &MapPoint) -> Vec<Coord> {
    let mut cols = Vec::new();
    if f.infinity_data().is_some() {
        cols.extend([Coord::Sigma, Coord::M]);
    }
    cols.extend((0..f.value_groups().len()).map(Coord::Group));
    cols
}

/// One coordinate of a cusp report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuspEntry {
    pub coord: Coord,
    /// From the coefficients of `B^ - T B^` (or `B^` at infinity).
    pub direct: Complex64,
    /// `lim (1 - rho_i) d rho_i` approached along the ray.
    pub limit: Complex64,
    /// The same limit approached along the opposite ray.
    pub limit_reverse: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuspReport {
    pub entries: Vec<CuspEntry>,
    /// Largest disagreement among the three values of any entry,
    /// relative to `max(1, |direct|)`.
    pub max_delta: f64,
}

impl CuspReport {
    pub fn get(&self, coord: Coord) -> Option<&CuspEntry> {
        self.entries.iter().find(|e| e.coord == coord)
    }
}

/// Direct-route cusp derivatives `lim (1 - rho_i) d rho_i / d x` for the
/// columns `cols`, from `B^`.
pub fn cusp_direct(f: &MapPoint, orbit: &PeriodicOrbit, cols: &[Coord]) -> Result<Vec<Complex64>> {
    let hat = b_hat(orbit)?;
    let id = identity_coefficients(f, &hat)?;
    cols.iter()
        .map(|&coord| match coord {
            Coord::Sigma => cusp_dsigma_m(f, orbit).map(|d| d.0),
            Coord::M => cusp_dsigma_m(f, orbit).map(|d| d.1),
            Coord::Group(k) => id
                .coefficients
                .get(k)
                .map(|c| c.coefficient)
                .ok_or_else(|| Error::InvalidCoordinate(coord.to_string())),
            Coord::V(j) => id
                .for_critical_point(j)
                .ok_or_else(|| Error::InvalidCoordinate(coord.to_string())),
            Coord::InvV(_) => Err(Error::InvalidCoordinate(format!("{coord} is not a cusp column"))),
        })
        .collect()
}

/// Newton on `g^n(z) = z` from `z`, with the chain rule for the derivative.
fn periodic_newton(g: &MapPoint, z: Complex64, n: usize) -> Complex64 {
    let mut z = z;
    for _ in 0..40 {
        let mut w = z;
        let mut d = ONE;
        for _ in 0..n {
            let jet = g.jet(w, 1);
            d *= jet[1];
            w = jet[0];
        }
        let step = (w - z) / (d - ONE);
        if !step.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= 1e-15 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

/// The two orbits of `g` into which a multiplier-one orbit of a nearby
/// map splits.
fn split_orbits(g: &MapPoint, base: &PeriodicOrbit) -> Result<[PeriodicOrbit; 2]> {
    let n = base.period;
    let b = base.points[0];
    let mut w = b;
    let mut d1 = ONE;
    let mut d2 = ZERO;
    for _ in 0..n {
        let jet = g.jet(w, 2);
        d2 = jet[2] * d1 * d1 + jet[1] * d2;
        d1 *= jet[1];
        w = jet[0];
    }
    // g^n(b + e) - (b + e) ~ c0 + c1 e + c2 e^2
    let (c0, c1, c2) = (w - b, d1 - ONE, 0.5 * d2);
    let disc = (c1 * c1 - 4.0 * c2 * c0).sqrt();
    let mut out = Vec::with_capacity(2);
    for sign in [1.0, -1.0] {
        let e = (-c1 + sign * disc) / (2.0 * c2);
        let z = periodic_newton(g, b + e, n);
        let mut points = Vec::with_capacity(n);
        let mut w = z;
        for _ in 0..n {
            points.push(w);
            w = g.eval(w);
        }
        let rough = orbit_data_with_tol(g, &points, 1e-6)?;
        out.push(continue_orbit(g, &rough, 1e-14).unwrap_or(rough));
    }
    let sep = (out[0].points[0] - out[1].points[0]).norm();
    if sep <= 1e-12 * base.scale() {
        return Err(Error::PeriodCollapse(sep));
    }
    let second = out.pop().expect("two branches");
    let first = out.pop().expect("two branches");
    Ok([first, second])
}

/// `(1 - rho_i) d rho_i / d x` averaged over the two split orbits of the
/// map at chart position `chart + h * direction`.
fn split_average(
    f: &MapPoint,
    orbit: &PeriodicOrbit,
    direction: &[(Coord, Complex64)],
    h: f64,
    cols: &[Coord],
) -> Result<Vec<Complex64>> {
    let mut target = f.chart();
    let groups = f.value_groups();
    for &(coord, u) in direction {
        target = target.shifted(coord, u * h, &groups)?;
    }
    let g = invert_chart(f, &target, CHART_TOL)?;
    let branches = split_orbits(&g, orbit)?;
    let inner = 1e-2 * h;
    cols.iter()
        .map(|&coord| {
            let mut acc = ZERO;
            for o in &branches {
                acc += (ONE - o.multiplier) * drho_fd_oracle(&g, o, coord, inner)?;
            }
            Ok(0.5 * acc)
        })
        .collect()
}

/// Extrapolates `L(h), L(h/2), L(h/4)` to `h = 0` assuming an expansion
/// in integer powers of `h`.
/// Richardson table over levels with halved steps, for an error expansion
/// in powers of `h^order`.
fn richardson(levels: &[Vec<Complex64>], order: i32) -> Vec<Complex64> {
    let base = 2f64.powi(order);
    let mut table: Vec<Vec<Complex64>> = levels.to_vec();
    let mut factor = base;
    while table.len() > 1 {
        table = table
            .windows(2)
            .map(|w| {
                w[0].iter()
                    .zip(&w[1])
                    .map(|(coarse, fine)| (factor * fine - coarse) / (factor - 1.0))
                    .collect()
            })
            .collect();
        factor *= base;
    }
    table.pop().unwrap_or_default()
}

fn cusp_limit(
    f: &MapPoint,
    orbit: &PeriodicOrbit,
    direction: &[(Coord, Complex64)],
    h0: f64,
    cols: &[Coord],
) -> Result<Vec<Complex64>> {
    let levels = (0..3)
        .map(|i| split_average(f, orbit, direction, h0 / f64::powi(2.0, i), cols))
        .collect::<Result<Vec<_>>>()?;
    Ok(richardson(&levels, 1))
}

/// Cusp derivatives by both routes: directly from `B^`, and as the limit
/// of `(1 - rho_i) d rho_i` along a ray of nearby maps (both directions).
pub fn cusp_derivatives(f: &MapPoint, orbit: &PeriodicOrbit) -> Result<CuspReport> {
    cusp_derivatives_with(f, orbit, &default_columns(f), FD_STEP, CUSP_TOL)
}

/// [`cusp_derivatives`] for chosen columns and initial ray step.
pub fn cusp_derivatives_with(
    f: &MapPoint,
    orbit: &PeriodicOrbit,
    cols: &[Coord],
    h0: f64,
    tol: f64,
) -> Result<CuspReport> {
    let direct = cusp_direct(f, orbit, cols)?;
    // Ray along the conjugate of the direct vector, so that the first-order
    // change of the multiplier is real.
    let norm = direct.iter().map(|d| d.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::Hypothesis("cusp derivative vector vanishes".into()));
    }
    let ray_cols: Vec<Coord> = cols.iter().copied().filter(|c| !matches!(c, Coord::V(_))).collect();
    let direction: Vec<(Coord, Complex64)> = cols
        .iter()
        .zip(&direct)
        .filter(|(c, _)| ray_cols.contains(c))
        .map(|(&c, d)| (c, d.conj() / norm))
        .collect();
    let reverse: Vec<(Coord, Complex64)> = direction.iter().map(|&(c, u)| (c, -u)).collect();
    let limit = cusp_limit(f, orbit, &direction, h0, cols)?;
    let limit_reverse = cusp_limit(f, orbit, &reverse, h0, cols)?;
    let mut max_delta = 0.0f64;
    let mut entries = Vec::with_capacity(cols.len());
    for (k, &coord) in cols.iter().enumerate() {
        let scale = direct[k].norm().max(1.0);
        let delta = (direct[k] - limit[k])
            .norm()
            .max((direct[k] - limit_reverse[k]).norm())
            .max((limit[k] - limit_reverse[k]).norm())
            / scale;
        if delta > tol {
            return Err(Error::CuspRouteMismatch {
                direct: direct[k],
                limit: limit[k],
                delta,
            });
        }
        max_delta = max_delta.max(delta);
        entries.push(CuspEntry {
            coord,
            direct: direct[k],
            limit: limit[k],
            limit_reverse: limit_reverse[k],
        });
    }
    Ok(CuspReport { entries, max_delta })
}

/// How a Jacobian row was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowMethod {
    /// Coefficients of `B - T B` in closed form.
    Identity,
    /// Coefficients of `B - T B` fitted to samples.
    IdentityFit,
    /// Cusp row from `B^`, confirmed by the limit route.
    Cusp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobianRow {
    pub period: usize,
    pub multiplier: Complex64,
    pub points: Vec<Complex64>,
    pub method: RowMethod,
    /// Orbit-pole cancellation (closed form) or fit residual, or the cusp
    /// route disagreement.
    pub residual: f64,
    /// Rank hypotheses that this row violates.
    pub violations: Vec<String>,
}

/// Derivatives of several orbit multipliers along chosen chart columns,
/// with cusp rows normalized by `1 - rho`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierJacobian {
    pub cols: Vec<Coord>,
    pub rows: Vec<JacobianRow>,
    /// Row-major entries.
    pub entries: Vec<Vec<Complex64>>,
    pub singular_values: Vec<f64>,
    pub rank: usize,
    pub rank_tol: f64,
}

fn row_violations(f: &MapPoint, orbit: &PeriodicOrbit) -> Vec<String> {
    let mut out = Vec::new();
    let rho = orbit.multiplier;
    if rho.norm() < 1e-12 {
        let on_orbit: Vec<usize> = (0..f.crit_points().len())
            .filter(|&j| orbit.position(f.crit_points()[j], 1e-9).is_some())
            .collect();
        if on_orbit.len() != 1 {
            out.push(format!(
                "superattracting orbit contains {} critical points, expected one",
                on_orbit.len()
            ));
        } else if f.multiplicities()[on_orbit[0]] != 1 {
            out.push("superattracting orbit contains a multiple critical point".into());
        }
    }
    if rho.norm() > 1.0 + 1e-12 {
        out.push("orbit is repelling".into());
    }
    out
}

/// Assembles the multiplier Jacobian. Regular rows come from the
/// coefficients of `B - T B` (plus the expansion at infinity for `sigma`
/// and `m`), cusp rows from [`cusp_derivatives_with`].
pub fn assemble_jacobian(f: &MapPoint, orbits: &[PeriodicOrbit], cols: &[Coord]) -> Result<MultiplierJacobian> {
    let mut rows = Vec::with_capacity(orbits.len());
    let mut entries = Vec::with_capacity(orbits.len());
    for orbit in orbits {
        let violations = row_violations(f, orbit);
        let parabolic = (orbit.multiplier - ONE).norm() < PARABOLIC_TOL;
        let (values, method, residual) = if parabolic {
            let report = cusp_derivatives_with(f, orbit, cols, FD_STEP, CUSP_TOL)?;
            let values = report.entries.iter().map(|e| e.direct).collect();
            (values, RowMethod::Cusp, report.max_delta)
        } else {
            let b = b_function(orbit)?;
            let id = identity_coefficients(f, &b)?;
            let values = cols
                .iter()
                .map(|&coord| match coord {
                    Coord::Sigma => drho_dsigma_m(f, orbit).map(|d| d.0),
                    Coord::M => drho_dsigma_m(f, orbit).map(|d| d.1),
                    Coord::Group(k) => id
                        .coefficients
                        .get(k)
                        .map(|c| c.coefficient)
                        .ok_or_else(|| Error::InvalidCoordinate(coord.to_string())),
                    other => derivative(f, orbit, other, Method::Residue),
                })
                .collect::<Result<Vec<_>>>()?;
            let method = match id.method {
                IdentityMethod::ClosedForm => RowMethod::Identity,
                IdentityMethod::NumericFit => RowMethod::IdentityFit,
            };
            (values, method, id.residual)
        };
        rows.push(JacobianRow {
            period: orbit.period,
            multiplier: orbit.multiplier,
            points: orbit.points.clone(),
            method,
            residual,
            violations,
        });
        entries.push(values);
    }
    let flat: Vec<Complex64> = entries.iter().flatten().copied().collect();
    let singular_values = singular_values(entries.len(), cols.len(), &flat);
    let mut jac = MultiplierJacobian {
        cols: cols.to_vec(),
        rows,
        entries,
        singular_values,
        rank: 0,
        rank_tol: RANK_TOL,
    };
    jac.rank = numerical_rank(&jac, RANK_TOL);
    Ok(jac)
}

/// Number of singular values above `rank_tol` times the largest.
pub fn numerical_rank(m: &MultiplierJacobian, rank_tol: f64) -> usize {
    let top = m.singular_values.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    m.singular_values.iter().filter(|&&s| s > rank_tol * top).count()
}
