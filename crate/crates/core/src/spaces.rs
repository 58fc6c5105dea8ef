//! Points of the map spaces: monic centered polynomials with prescribed
//! critical multiplicities, and rational maps `sigma z + m + P/Q` with a
//! simple fixed point at infinity.
//!
//! Both spaces are parameterized near a point by critical values (plus
//! `sigma` and `m` for rational maps). [`MapPoint::chart`] computes these
//! coordinates and [`invert_chart`] goes back by Newton iteration.
//!
//! Critical points are *marked*: at construction they are sorted
//! lexicographically, and every map produced by [`invert_chart`] keeps the
//! marking of its seed.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cpoly::{lex_cmp, ComplexPoly};
use crate::error::{Error, Result};
use crate::linalg::{newton_fd, NewtonOptions};
use crate::series::Series;

#[cfg(test)]
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative tolerance at which two critical values are treated as equal.
pub const VALUE_MERGE_TOL: f64 = 1e-9;

/// Image of a critical point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriticalValue {
    Finite(Complex64),
    Infinite,
}

impl CriticalValue {
    pub fn finite(&self) -> Option<Complex64> {
        match *self {
            CriticalValue::Finite(v) => Some(v),
            CriticalValue::Infinite => None,
        }
    }
}

/// A monic centered polynomial of degree `d` with `p` distinct critical
/// points of prescribed multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySpacePoint {
    degree: usize,
    multiplicities: Vec<usize>,
    f0: Complex64,
    crit_points: Vec<Complex64>,
    poly: ComplexPoly,
    crit_values: Vec<Complex64>,
}

impl PolySpacePoint {
    /// `f(z) = f0 + d * integral_0^z prod (w - c_j)^{m_j} dw`.
    pub fn build(f0: Complex64, crit_points: &[Complex64], multiplicities: &[usize]) -> Result<Self> {
        if crit_points.len() != multiplicities.len() || crit_points.is_empty() {
            return Err(Error::InvalidMap(
                "critical points and multiplicities must be non-empty and of equal length".into(),
            ));
        }
        if multiplicities.contains(&0) {
            return Err(Error::InvalidMap("multiplicities must be positive".into()));
        }
        let scale = crit_points.iter().map(|c| c.norm()).fold(1.0, f64::max);
        let moment: Complex64 = crit_points.iter().zip(multiplicities).map(|(c, &m)| c * m as f64).sum();
        if moment.norm() > 1e-12 * scale * multiplicities.iter().sum::<usize>() as f64 {
            return Err(Error::NotCentered(moment));
        }
        for i in 0..crit_points.len() {
            for j in (i + 1)..crit_points.len() {
                if (crit_points[i] - crit_points[j]).norm() <= 1e-10 * scale {
                    return Err(Error::CoincidentCriticalPoints(i, j));
                }
            }
        }
        Ok(Self::assemble(f0, crit_points.to_vec(), multiplicities.to_vec()))
    }

    fn assemble(f0: Complex64, crit_points: Vec<Complex64>, multiplicities: Vec<usize>) -> Self {
        let degree = multiplicities.iter().sum::<usize>() + 1;
        let mut roots = Vec::with_capacity(degree - 1);
        for (&c, &m) in crit_points.iter().zip(&multiplicities) {
            roots.extend(std::iter::repeat_n(c, m));
        }
        let derivative = ComplexPoly::from_roots(&roots, Complex64::new(degree as f64, 0.0));
        let poly = &derivative.antiderivative() + &ComplexPoly::constant(f0);
        let crit_values = crit_points.iter().map(|&c| poly.eval(c)).collect();
        Self {
            degree,
            multiplicities,
            f0,
            crit_points,
            poly,
            crit_values,
        }
    }

    /// Recovers the critical data of a monic centered polynomial given by
    /// its coefficients. Critical points are marked lexicographically.
    pub fn from_coefficients(poly: &ComplexPoly) -> Result<Self> {
        let d = match poly.degree() {
            Some(d) if d >= 2 => d,
            _ => return Err(Error::InvalidMap("polynomial degree must be at least 2".into())),
        };
        if (poly.leading() - ONE).norm() > 1e-12 {
            return Err(Error::InvalidMap("polynomial must be monic".into()));
        }
        let sub = poly.coeff(d - 1);
        if sub.norm() > 1e-12 * poly.max_coeff() {
            return Err(Error::NotCentered(sub));
        }
        let roots = poly.derivative().roots()?;
        let mut crit_points: Vec<Complex64> = roots.iter().map(|r| r.value).collect();
        let multiplicities: Vec<usize> = roots.iter().map(|r| r.multiplicity).collect();
        // Re-center exactly so that the moment constraint holds.
        let total: usize = multiplicities.iter().sum();
        let moment: Complex64 = crit_points
            .iter()
            .zip(&multiplicities)
            .map(|(c, &m)| c * m as f64)
            .sum::<Complex64>()
            / total as f64;
        for c in &mut crit_points {
            *c -= moment;
        }
        Self::build(poly.coeff(0), &crit_points, &multiplicities)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn f0(&self) -> Complex64 {
        self.f0
    }
    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }
    pub fn crit_points(&self) -> &[Complex64] {
        &self.crit_points
    }
    pub fn crit_values(&self) -> &[Complex64] {
        &self.crit_values
    }
    pub fn poly(&self) -> &ComplexPoly {
        &self.poly
    }
}

/// A rational map `f(z) = sigma z + m + P(z)/Q(z)` with `Q` monic of
/// degree `d - 1`, `deg P <= d - 2`, and no common roots.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMapPoint {
    degree: usize,
    sigma: Complex64,
    m: Complex64,
    p: ComplexPoly,
    q: ComplexPoly,
    numerator: ComplexPoly,
    poles: Vec<Complex64>,
    crit_points: Vec<Complex64>,
    multiplicities: Vec<usize>,
    crit_values: Vec<CriticalValue>,
}

impl RationalMapPoint {
    /// Validates the normal form and computes the critical data.
    pub fn validate(sigma: Complex64, m: Complex64, p: ComplexPoly, q: ComplexPoly) -> Result<Self> {
        let (degree, poles) = Self::check_normal_form(sigma, &p, &q)?;
        let w = critical_numerator(sigma, &p, &q);
        let roots = w.roots()?;
        let crit_points: Vec<Complex64> = roots.iter().map(|r| r.value).collect();
        let multiplicities: Vec<usize> = roots.iter().map(|r| r.multiplicity).collect();
        Ok(Self::assemble(
            degree,
            sigma,
            m,
            p,
            q,
            poles,
            crit_points,
            multiplicities,
        ))
    }

    fn check_normal_form(sigma: Complex64, p: &ComplexPoly, q: &ComplexPoly) -> Result<(usize, Vec<Complex64>)> {
        if sigma.norm() == 0.0 || !sigma.is_finite() {
            return Err(Error::InvalidMap("sigma must be finite and nonzero".into()));
        }
        let dq = q
            .degree()
            .ok_or_else(|| Error::InvalidMap("Q must be nonzero".into()))?;
        let degree = dq + 1;
        if degree < 2 {
            return Err(Error::InvalidMap("degree must be at least 2 (deg Q >= 1)".into()));
        }
        if (q.leading() - ONE).norm() > 1e-12 {
            return Err(Error::InvalidMap("Q must be monic".into()));
        }
        if p.degree().is_some_and(|dp| dp + 2 > degree) {
            return Err(Error::InvalidMap(format!("deg P must be at most {}", degree - 2)));
        }
        let q_roots = q.roots()?;
        for r in &q_roots {
            let scale = p.eval_abs(r.value).max(f64::MIN_POSITIVE);
            if p.is_zero() || p.eval(r.value).norm() <= 1e-10 * scale {
                return Err(Error::CommonRoot(r.value));
            }
        }
        Ok((degree, q_roots.iter().map(|r| r.value).collect()))
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        degree: usize,
        sigma: Complex64,
        m: Complex64,
        p: ComplexPoly,
        q: ComplexPoly,
        poles: Vec<Complex64>,
        crit_points: Vec<Complex64>,
        multiplicities: Vec<usize>,
    ) -> Self {
        let linear = ComplexPoly::new(vec![m, sigma]);
        let numerator = &(&linear * &q) + &p;
        let scale = poles.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let crit_values = crit_points
            .iter()
            .map(|&c| {
                let at_pole = poles.iter().any(|&pole| (pole - c).norm() <= 1e-7 * scale);
                if at_pole {
                    CriticalValue::Infinite
                } else {
                    CriticalValue::Finite(numerator.eval(c) / q.eval(c))
                }
            })
            .collect();
        Self {
            degree,
            sigma,
            m,
            p,
            q,
            numerator,
            poles,
            crit_points,
            multiplicities,
            crit_values,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn sigma(&self) -> Complex64 {
        self.sigma
    }
    pub fn m(&self) -> Complex64 {
        self.m
    }
    pub fn p(&self) -> &ComplexPoly {
        &self.p
    }
    pub fn q(&self) -> &ComplexPoly {
        &self.q
    }
    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }
    pub fn crit_points(&self) -> &[Complex64] {
        &self.crit_points
    }
    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }
    pub fn crit_values(&self) -> &[CriticalValue] {
        &self.crit_values
    }
    /// Number of critical points with finite critical value.
    pub fn finite_count(&self) -> usize {
        self.crit_values.iter().filter(|v| v.finite().is_some()).count()
    }
}

/// `sigma Q^2 + P'Q - PQ'`, the numerator of `f'` over `Q^2`.
fn critical_numerator(sigma: Complex64, p: &ComplexPoly, q: &ComplexPoly) -> ComplexPoly {
    let qq = q * q;
    &(&qq.scale(sigma) + &(&p.derivative() * q)) - &(p * &q.derivative())
}

/// A point of either map space.
#[derive(Debug, Clone, PartialEq)]
pub enum MapPoint {
    Polynomial(PolySpacePoint),
    Rational(RationalMapPoint),
}

impl From<PolySpacePoint> for MapPoint {
    fn from(p: PolySpacePoint) -> Self {
        MapPoint::Polynomial(p)
    }
}

impl From<RationalMapPoint> for MapPoint {
    fn from(r: RationalMapPoint) -> Self {
        MapPoint::Rational(r)
    }
}

impl MapPoint {
    /// `z^d + f0` style shortcut: the monic centered polynomial with the
    /// given coefficients (ascending order).
    pub fn polynomial(coeffs: &[Complex64]) -> Result<Self> {
        PolySpacePoint::from_coefficients(&ComplexPoly::new(coeffs.to_vec())).map(Self::from)
    }

    pub fn rational(sigma: Complex64, m: Complex64, p: ComplexPoly, q: ComplexPoly) -> Result<Self> {
        RationalMapPoint::validate(sigma, m, p, q).map(Self::from)
    }

    pub fn degree(&self) -> usize {
        match self {
            MapPoint::Polynomial(p) => p.degree,
            MapPoint::Rational(r) => r.degree,
        }
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self, MapPoint::Polynomial(_))
    }

    /// Numerator `N` and denominator `D` with `f = N / D`.
    pub fn numerator(&self) -> &ComplexPoly {
        match self {
            MapPoint::Polynomial(p) => &p.poly,
            MapPoint::Rational(r) => &r.numerator,
        }
    }

    pub fn denominator(&self) -> ComplexPoly {
        match self {
            MapPoint::Polynomial(_) => ComplexPoly::constant(ONE),
            MapPoint::Rational(r) => r.q.clone(),
        }
    }

    pub fn poles(&self) -> &[Complex64] {
        match self {
            MapPoint::Polynomial(_) => &[],
            MapPoint::Rational(r) => &r.poles,
        }
    }

    pub fn crit_points(&self) -> &[Complex64] {
        match self {
            MapPoint::Polynomial(p) => &p.crit_points,
            MapPoint::Rational(r) => &r.crit_points,
        }
    }

    pub fn multiplicities(&self) -> &[usize] {
        match self {
            MapPoint::Polynomial(p) => &p.multiplicities,
            MapPoint::Rational(r) => &r.multiplicities,
        }
    }

    pub fn crit_values(&self) -> Vec<CriticalValue> {
        match self {
            MapPoint::Polynomial(p) => p.crit_values.iter().map(|&v| CriticalValue::Finite(v)).collect(),
            MapPoint::Rational(r) => r.crit_values.clone(),
        }
    }

    /// `sigma` and `m` for rational maps.
    pub fn infinity_data(&self) -> Option<(Complex64, Complex64)> {
        match self {
            MapPoint::Polynomial(_) => None,
            MapPoint::Rational(r) => Some((r.sigma, r.m)),
        }
    }

    /// `f(z)`; non-finite at poles.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            MapPoint::Polynomial(p) => p.poly.eval(z),
            MapPoint::Rational(r) => r.numerator.eval(z) / r.q.eval(z),
        }
    }

    /// `(f(z), f'(z), ..., f^(order)(z))`.
    pub fn jet(&self, z: Complex64, order: usize) -> Vec<Complex64> {
        match self {
            MapPoint::Polynomial(p) => p.poly.eval_jet(z, order),
            MapPoint::Rational(_) => {
                let taylor = self.taylor(z, order + 1);
                let mut factorial = 1.0;
                taylor
                    .0
                    .into_iter()
                    .enumerate()
                    .map(|(k, c)| {
                        if k > 0 {
                            factorial *= k as f64;
                        }
                        c * factorial
                    })
                    .collect()
            }
        }
    }

    /// Taylor coefficients of `f(z + t)` up to `t^(len-1)`.
    pub(crate) fn taylor(&self, z: Complex64, len: usize) -> Series {
        match self {
            MapPoint::Polynomial(p) => Series::of_poly(&p.poly, z, len),
            MapPoint::Rational(r) => {
                let mut s = Series::of_poly(&r.p, z, len).div(&Series::of_poly(&r.q, z, len));
                s.0[0] += r.sigma * z + r.m;
                if len > 1 {
                    s.0[1] += r.sigma;
                }
                s
            }
        }
    }

    /// Polynomial whose roots are the preimages of `z`: `N(w) - z D(w)`.
    pub fn preimage_poly(&self, z: Complex64) -> ComplexPoly {
        self.numerator() - &self.denominator().scale(z)
    }

    /// Magnitude scale of the map's special points, at least 1.
    pub fn scale(&self) -> f64 {
        let crit = self.crit_points().iter().map(|c| c.norm());
        let vals = self
            .crit_values()
            .into_iter()
            .filter_map(|v| v.finite())
            .map(|v| v.norm());
        let poles = self.poles().iter().map(|c| c.norm());
        crit.chain(vals).chain(poles).fold(1.0, f64::max)
    }

    /// Distinct finite critical values `V_k` with the indices of the
    /// critical points mapped to each, ordered by first member.
    pub fn value_groups(&self) -> Vec<ValueGroup> {
        let scale = self.scale();
        let mut groups: Vec<ValueGroup> = Vec::new();
        for (j, v) in self.crit_values().into_iter().enumerate() {
            let Some(v) = v.finite() else { continue };
            match groups
                .iter_mut()
                .find(|g| (g.value - v).norm() <= VALUE_MERGE_TOL * scale)
            {
                Some(g) => g.members.push(j),
                None => groups.push(ValueGroup {
                    value: v,
                    members: vec![j],
                }),
            }
        }
        groups
    }

    /// Chart coordinates in the layout native to this map: reciprocal
    /// coordinates exactly where the critical value is infinite.
    pub fn chart(&self) -> ChartVector {
        let layout = self.native_layout();
        self.chart_in(&layout).expect("native layout is always valid")
    }

    pub fn native_layout(&self) -> Vec<Coord> {
        match self {
            MapPoint::Polynomial(p) => (0..p.crit_points.len()).map(Coord::V).collect(),
            MapPoint::Rational(r) => {
                let mut layout = vec![Coord::Sigma, Coord::M];
                layout.extend(r.crit_values.iter().enumerate().map(|(j, v)| match v {
                    CriticalValue::Finite(_) => Coord::V(j),
                    CriticalValue::Infinite => Coord::InvV(j),
                }));
                layout
            }
        }
    }

    /// Chart coordinates in a given layout, using this map's marking.
    pub fn chart_in(&self, layout: &[Coord]) -> Result<ChartVector> {
        let values = layout
            .iter()
            .map(|&coord| self.coordinate(coord))
            .collect::<Result<Vec<_>>>()?;
        Ok(ChartVector {
            coords: layout.to_vec(),
            values,
        })
    }

    fn coordinate(&self, coord: Coord) -> Result<Complex64> {
        let crit = |j: usize| {
            self.crit_points()
                .get(j)
                .copied()
                .ok_or_else(|| Error::InvalidCoordinate(coord.to_string()))
        };
        match (self, coord) {
            (MapPoint::Rational(r), Coord::Sigma) => Ok(r.sigma),
            (MapPoint::Rational(r), Coord::M) => Ok(r.m),
            (_, Coord::V(j)) => {
                let c = crit(j)?;
                match self.crit_values()[j] {
                    CriticalValue::Finite(_) => Ok(self.eval(c)),
                    CriticalValue::Infinite => Err(Error::InvalidCoordinate(coord.to_string())),
                }
            }
            (MapPoint::Rational(r), Coord::InvV(j)) => {
                let c = crit(j)?;
                Ok(r.q.eval(c) / r.numerator.eval(c))
            }
            _ => Err(Error::InvalidCoordinate(coord.to_string())),
        }
    }

    /// Reorders critical points to follow the marking of `base` by nearest
    /// neighbour. Fails when a match is ambiguous: the runner-up lies
    /// within ten times the nearest distance.
    pub fn remark_like(&self, base: &MapPoint) -> Result<MapPoint> {
        let ours = self.crit_points();
        let theirs = base.crit_points();
        if ours.len() != theirs.len() || self.multiplicities().len() != base.multiplicities().len() {
            return Err(Error::InvalidMap("maps lie in different spaces".into()));
        }
        let mut order = Vec::with_capacity(ours.len());
        for (j, &b) in theirs.iter().enumerate() {
            let mut dists: Vec<(f64, usize)> = ours.iter().enumerate().map(|(i, &c)| ((c - b).norm(), i)).collect();
            dists.sort_by(|a, b| a.0.total_cmp(&b.0));
            if dists.len() > 1 && dists[1].0 <= 10.0 * dists[0].0 {
                return Err(Error::InvalidMap(format!(
                    "ambiguous marking of critical point {}",
                    j + 1
                )));
            }
            if self.multiplicities()[dists[0].1] != base.multiplicities()[j] {
                return Err(Error::InvalidMap("critical multiplicities differ".into()));
            }
            order.push(dists[0].1);
        }
        let cps: Vec<Complex64> = order.iter().map(|&i| ours[i]).collect();
        let ms: Vec<usize> = order.iter().map(|&i| self.multiplicities()[i]).collect();
        Ok(match self {
            MapPoint::Polynomial(p) => PolySpacePoint::assemble(p.f0, cps, ms).into(),
            MapPoint::Rational(r) => RationalMapPoint::assemble(
                r.degree,
                r.sigma,
                r.m,
                r.p.clone(),
                r.q.clone(),
                r.poles.clone(),
                cps,
                ms,
            )
            .into(),
        })
    }

    pub fn descriptor(&self) -> MapDescriptor {
        match self {
            MapPoint::Polynomial(p) => MapDescriptor::Polynomial {
                f0: p.f0,
                crit_points: p.crit_points.clone(),
                multiplicities: p.multiplicities.clone(),
            },
            MapPoint::Rational(r) => MapDescriptor::Rational {
                sigma: r.sigma,
                m: r.m,
                p: r.p.coeffs().to_vec(),
                q: r.q.coeffs().to_vec(),
            },
        }
    }
}

/// A distinct finite critical value and the critical points above it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueGroup {
    pub value: Complex64,
    pub members: Vec<usize>,
}

/// A chart coordinate label. Indices are zero-based; the text form is
/// one-based (`v1`, `iv2`, `V1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coord {
    Sigma,
    M,
    /// Critical value of critical point `j`.
    V(usize),
    /// Reciprocal critical value `1 / v_j`, used where `v_j` is infinite
    /// at the base map.
    InvV(usize),
    /// Distinct critical value `V_k` (all critical points in the group
    /// move together).
    Group(usize),
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Sigma => write!(f, "sigma"),
            Coord::M => write!(f, "m"),
            Coord::V(j) => write!(f, "v{}", j + 1),
            Coord::InvV(j) => write!(f, "iv{}", j + 1),
            Coord::Group(k) => write!(f, "V{}", k + 1),
        }
    }
}

impl FromStr for Coord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let index = |rest: &str| -> Result<usize> {
            match rest.parse::<usize>() {
                Ok(k) if k >= 1 => Ok(k - 1),
                _ => Err(Error::InvalidCoordinate(s.to_string())),
            }
        };
        match s {
            "sigma" => Ok(Coord::Sigma),
            "m" => Ok(Coord::M),
            _ if s.starts_with("iv") => index(&s[2..]).map(Coord::InvV),
            _ if s.starts_with('v') => index(&s[1..]).map(Coord::V),
            _ if s.starts_with('V') => index(&s[1..]).map(Coord::Group),
            _ => Err(Error::InvalidCoordinate(s.to_string())),
        }
    }
}

impl Serialize for Coord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Coord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Chart coordinates of a map, labeled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartVector {
    pub coords: Vec<Coord>,
    pub values: Vec<Complex64>,
}

impl ChartVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, coord: Coord) -> Option<Complex64> {
        self.coords.iter().position(|&c| c == coord).map(|i| self.values[i])
    }

    /// Adds `delta` to one coordinate, or to every member of a group.
    pub fn shifted(&self, coord: Coord, delta: Complex64, groups: &[ValueGroup]) -> Result<ChartVector> {
        let mut out = self.clone();
        match coord {
            Coord::Group(k) => {
                let group = groups
                    .get(k)
                    .ok_or_else(|| Error::InvalidCoordinate(coord.to_string()))?;
                for &j in &group.members {
                    let i = self
                        .coords
                        .iter()
                        .position(|&c| c == Coord::V(j))
                        .ok_or_else(|| Error::InvalidCoordinate(coord.to_string()))?;
                    // Coinciding critical values stay exactly equal.
                    out.values[i] = group.value + delta;
                }
            }
            _ => {
                let i = self
                    .coords
                    .iter()
                    .position(|&c| c == coord)
                    .ok_or_else(|| Error::InvalidCoordinate(coord.to_string()))?;
                out.values[i] += delta;
            }
        }
        Ok(out)
    }

    pub fn distance(&self, other: &ChartVector) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Default Newton tolerance of [`invert_chart`].
pub const CHART_TOL: f64 = 1e-12;
const MAX_CONDITION: f64 = 1e12;

/// Finds the map near `seed` whose chart coordinates (in the seed's
/// layout and marking) equal `target`.
pub fn invert_chart(seed: &MapPoint, target: &ChartVector, tol: f64) -> Result<MapPoint> {
    let expected = seed.native_layout().len();
    if target.len() != expected {
        return Err(Error::ChartDimension {
            expected,
            got: target.len(),
        });
    }
    let scale = target.values.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let opts = NewtonOptions {
        tol: tol * scale,
        max_iter: 60,
        max_condition: MAX_CONDITION,
    };
    match seed {
        MapPoint::Polynomial(p) => invert_polynomial(p, target, &opts).map(MapPoint::from),
        MapPoint::Rational(r) => invert_rational(r, target, &opts).map(MapPoint::from),
    }
}

fn invert_polynomial(seed: &PolySpacePoint, target: &ChartVector, opts: &NewtonOptions) -> Result<PolySpacePoint> {
    let ms = seed.multiplicities.clone();
    let p = ms.len();
    let goal: Vec<Complex64> = (0..p)
        .map(|j| {
            target
                .get(Coord::V(j))
                .ok_or(Error::InvalidCoordinate(format!("v{}", j + 1)))
        })
        .collect::<Result<_>>()?;
    // Unknowns (f0, c_1, .., c_{p-1}); c_p follows from sum m_j c_j = 0.
    let unpack = |x: &[Complex64]| -> (Complex64, Vec<Complex64>) {
        let mut cps: Vec<Complex64> = x[1..].to_vec();
        let partial: Complex64 = cps.iter().zip(&ms).map(|(c, &m)| c * m as f64).sum();
        cps.push(-partial / ms[p - 1] as f64);
        (x[0], cps)
    };
    let residual = |x: &[Complex64]| -> Result<Vec<Complex64>> {
        let (f0, cps) = unpack(x);
        let f = PolySpacePoint::assemble(f0, cps, ms.clone());
        Ok(f.crit_values.iter().zip(&goal).map(|(v, g)| v - g).collect())
    };
    let mut x0 = vec![seed.f0];
    x0.extend_from_slice(&seed.crit_points[..p - 1]);
    let x = newton_fd(x0, residual, opts)?;
    let (f0, cps) = unpack(&x);
    Ok(PolySpacePoint::assemble(f0, cps, ms))
}

fn invert_rational(seed: &RationalMapPoint, target: &ChartVector, opts: &NewtonOptions) -> Result<RationalMapPoint> {
    let d = seed.degree;
    let sigma = target
        .get(Coord::Sigma)
        .ok_or(Error::InvalidCoordinate("sigma".into()))?;
    let m = target.get(Coord::M).ok_or(Error::InvalidCoordinate("m".into()))?;
    let ms = seed.multiplicities.clone();
    let npts = ms.len();
    // For each critical point: (reciprocal?, target value).
    let goals: Vec<(bool, Complex64)> = (0..npts)
        .map(|j| match seed.crit_values[j] {
            CriticalValue::Finite(_) => target
                .get(Coord::V(j))
                .map(|v| (false, v))
                .ok_or(Error::InvalidCoordinate(format!("v{}", j + 1))),
            CriticalValue::Infinite => target
                .get(Coord::InvV(j))
                .map(|v| (true, v))
                .ok_or(Error::InvalidCoordinate(format!("iv{}", j + 1))),
        })
        .collect::<Result<_>>()?;

    // Unknowns: Q coefficients a_0..a_{d-2} (Q monic), P coefficients
    // b_0..b_{d-2}, critical points c_1..c_{p'}.
    let unpack = |x: &[Complex64]| -> (ComplexPoly, ComplexPoly, Vec<Complex64>) {
        let mut qc = x[..d - 1].to_vec();
        qc.push(ONE);
        let pc = x[d - 1..2 * d - 2].to_vec();
        (ComplexPoly::new(pc), ComplexPoly::new(qc), x[2 * d - 2..].to_vec())
    };
    let residual = |x: &[Complex64]| -> Result<Vec<Complex64>> {
        let (p, q, cps) = unpack(x);
        let w = critical_numerator(sigma, &p, &q);
        let numer = &(&ComplexPoly::new(vec![m, sigma]) * &q) + &p;
        let mut out = Vec::with_capacity(x.len());
        for (j, &c) in cps.iter().enumerate() {
            // c is a zero of order m_j of the critical numerator.
            let jet = w.eval_jet(c, ms[j] - 1);
            out.extend(jet);
            let (reciprocal, goal) = goals[j];
            let value = if reciprocal {
                q.eval(c) / numer.eval(c)
            } else {
                numer.eval(c) / q.eval(c)
            };
            out.push(value - goal);
        }
        Ok(out)
    };
    let mut x0: Vec<Complex64> = (0..d - 1).map(|k| seed.q.coeff(k)).collect();
    x0.extend((0..d - 1).map(|k| seed.p.coeff(k)));
    x0.extend_from_slice(&seed.crit_points);
    let x = newton_fd(x0, residual, opts)?;
    let (p, q, cps) = unpack(&x);
    let (degree, poles) = RationalMapPoint::check_normal_form(sigma, &p, &q)?;
    Ok(RationalMapPoint::assemble(degree, sigma, m, p, q, poles, cps, ms))
}

/// JSON map descriptor shared with the CLI. Polynomial coefficient lists
/// are in ascending order of power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MapDescriptor {
    Polynomial {
        f0: Complex64,
        crit_points: Vec<Complex64>,
        multiplicities: Vec<usize>,
    },
    Rational {
        sigma: Complex64,
        m: Complex64,
        #[serde(rename = "P")]
        p: Vec<Complex64>,
        #[serde(rename = "Q")]
        q: Vec<Complex64>,
    },
}

impl MapDescriptor {
    pub fn build(&self) -> Result<MapPoint> {
        match self {
            MapDescriptor::Polynomial {
                f0,
                crit_points,
                multiplicities,
            } => {
                // Marking follows the canonical lexicographic order.
                let mut pairs: Vec<(Complex64, usize)> = crit_points
                    .iter()
                    .copied()
                    .zip(multiplicities.iter().copied())
                    .collect();
                pairs.sort_by(|a, b| lex_cmp(a.0, b.0));
                let (cps, ms): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
                if crit_points.len() != multiplicities.len() {
                    return Err(Error::InvalidMap(
                        "crit_points and multiplicities differ in length".into(),
                    ));
                }
                PolySpacePoint::build(*f0, &cps, &ms).map(MapPoint::from)
            }
            MapDescriptor::Rational { sigma, m, p, q } => {
                RationalMapPoint::validate(*sigma, *m, ComplexPoly::new(p.clone()), ComplexPoly::new(q.clone()))
                    .map(MapPoint::from)
            }
        }
    }
}
