//! Dense complex polynomials: evaluation with derivatives, calculus, and a
//! global simultaneous-iteration root finder with multiplicity detection.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A polynomial with complex coefficients, stored densely in ascending
/// order: `coeffs[k]` is the coefficient of `z^k`.
///
/// Trailing zero coefficients are trimmed on construction, so the zero
/// polynomial is the empty sequence and `degree()` returns `None` for it.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct ComplexPoly {
    coeffs: Vec<Complex64>,
}

impl From<Vec<Complex64>> for ComplexPoly {
    fn from(coeffs: Vec<Complex64>) -> Self {
        Self::new(coeffs)
    }
}

impl From<ComplexPoly> for Vec<Complex64> {
    fn from(p: ComplexPoly) -> Self {
        p.coeffs
    }
}

impl ComplexPoly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == ZERO) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// The identity polynomial `z`.
    pub fn identity() -> Self {
        Self::new(vec![ZERO, ONE])
    }

    /// Expands `lead * prod (z - r_i)`.
    pub fn from_roots(roots: &[Complex64], lead: Complex64) -> Self {
        let mut coeffs = vec![lead];
        for &r in roots {
            let mut next = vec![ZERO; coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * r;
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or(ZERO)
    }

    /// Largest coefficient modulus.
    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// `sum |a_k| |z|^k`, the magnitude scale against which a residual
    /// `|p(z)|` is judged.
    pub fn eval_abs(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    /// Returns `(p(z), p'(z), ..., p^(order)(z))` from a single Horner pass
    /// that carries the whole Taylor jet.
    pub fn eval_jet(&self, z: Complex64, order: usize) -> Vec<Complex64> {
        // t[k] accumulates the k-th Taylor coefficient p^(k)(z)/k!.
        let mut t = vec![ZERO; order + 1];
        for &c in self.coeffs.iter().rev() {
            for k in (1..=order).rev() {
                t[k] = t[k] * z + t[k - 1];
            }
            t[0] = t[0] * z + c;
        }
        let mut factorial = 1.0;
        for (k, tk) in t.iter_mut().enumerate() {
            if k > 0 {
                factorial *= k as f64;
            }
            *tk *= factorial;
        }
        t
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// The antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(ZERO);
        coeffs.extend(self.coeffs.iter().enumerate().map(|(k, &c)| c / (k + 1) as f64));
        Self::new(coeffs)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Finds all roots with the default [`RootOptions`].
    pub fn roots(&self) -> Result<Vec<Root>> {
        self.roots_with(&RootOptions::default())
    }

    /// Finds all roots, merging clusters into multiple roots.
    ///
    /// The returned multiplicities sum to the degree and the roots are
    /// sorted by real part, then imaginary part.
    pub fn roots_with(&self, opts: &RootOptions) -> Result<Vec<Root>> {
        let n = match self.degree() {
            Some(n) if n >= 1 => n,
            _ => return Err(Error::ConstantPolynomial),
        };
        let lead = self.leading();
        let monic: Vec<Complex64> = self.coeffs.iter().map(|&c| c / lead).collect();
        let monic = ComplexPoly { coeffs: monic };

        let approx = if n == 1 {
            vec![-monic.coeffs[0]]
        } else {
            let radius = cauchy_radius(&monic);
            let starts = circle_starts(n, &[radius], opts.seed);
            let residual_floor = |z: Complex64| 4.0 * n as f64 * f64::EPSILON * monic.eval_abs(z);
            let outcome = simultaneous_iteration(starts, opts.max_iter, |z| {
                let (ratio, value) = newton_ratio(&monic, z);
                (ratio, value.norm() <= residual_floor(z))
            });
            if !outcome.converged {
                let best = outcome
                    .points
                    .iter()
                    .map(|&z| monic.eval(z).norm() / monic.eval_abs(z).max(f64::MIN_POSITIVE))
                    .fold(0.0, f64::max);
                return Err(Error::RootsNoConvergence {
                    iterations: outcome.iterations,
                    best_residual: best,
                });
            }
            outcome.points
        };

        let mut roots = merge_clusters(&approx, opts.cluster_radius);
        for root in &mut roots {
            root.value = polish(&monic, root.value, root.multiplicity);
        }
        for root in &roots {
            let scale = monic.eval_abs(root.value).max(1.0);
            let residual = monic.eval(root.value).norm() / scale;
            if residual > opts.residual_tol {
                return Err(Error::RootsNoConvergence {
                    iterations: opts.max_iter,
                    best_residual: residual,
                });
            }
        }
        sort_lexicographic(&mut roots, |r| r.value);
        Ok(roots)
    }
}

impl fmt::Display for ComplexPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if *c == ZERO {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add for &ComplexPoly {
    type Output = ComplexPoly;
    fn add(self, rhs: &ComplexPoly) -> ComplexPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &ComplexPoly {
    type Output = ComplexPoly;
    fn sub(self, rhs: &ComplexPoly) -> ComplexPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &ComplexPoly {
    type Output = ComplexPoly;
    fn mul(self, rhs: &ComplexPoly) -> ComplexPoly {
        if self.is_zero() || rhs.is_zero() {
            return ComplexPoly::zero();
        }
        let mut out = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ComplexPoly::new(out)
    }
}

impl Neg for &ComplexPoly {
    type Output = ComplexPoly;
    fn neg(self) -> ComplexPoly {
        self.scale(-ONE)
    }
}

/// A root together with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
}

/// Tolerances for [`ComplexPoly::roots_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// Accepted `|p(r)|` relative to `sum |a_k| |r|^k` (monic-normalized).
    pub residual_tol: f64,
    /// Base radius `eps`: a cluster of `k` approximations is merged when
    /// its spread is below `eps^(1/k)` (scaled by `max(1, |r|)`).
    pub cluster_radius: f64,
    pub max_iter: usize,
    /// Seed of the angular jitter of the starting points.
    pub seed: u64,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            residual_tol: 1e-12,
            cluster_radius: 1e-8,
            max_iter: 1000,
            seed: 0x005e_ed0f_a6e7,
        }
    }
}

/// Sorts by real part then imaginary part. Real parts are compared on a
/// 1e-9 grid so that rounding noise on a shared real part does not
/// decide the order.
pub(crate) fn sort_lexicographic<T>(items: &mut [T], key: impl Fn(&T) -> Complex64) {
    items.sort_by(|a, b| lex_cmp(key(a), key(b)));
}

pub(crate) fn lex_cmp(a: Complex64, b: Complex64) -> Ordering {
    let snap = |x: f64| (x * 1e9).round();
    snap(a.re).total_cmp(&snap(b.re)).then(a.im.total_cmp(&b.im))
}

/// `p(z)/p'(z)` and `p(z)`. For `|z| > 1` the ratio is formed from the
/// reversed polynomial to avoid overflow at high degree.
fn newton_ratio(p: &ComplexPoly, z: Complex64) -> (Complex64, Complex64) {
    let n = p.coeffs.len() - 1;
    if z.norm() <= 1.0 {
        let jet = p.eval_jet(z, 1);
        (jet[0] / jet[1], jet[0])
    } else {
        // p(z) = z^n r(1/z), so p'/p = n/z - r'(1/z) / (z^2 r(1/z)).
        let w = z.inv();
        let mut r = ZERO;
        let mut dr = ZERO;
        for &c in p.coeffs.iter() {
            dr = dr * w + r;
            r = r * w + c;
        }
        let log_deriv = n as f64 * w - w * w * dr / r;
        let value = if n as f64 * z.norm().log2() < 1000.0 {
            p.eval(z)
        } else {
            Complex64::new(f64::INFINITY, 0.0)
        };
        (log_deriv.inv(), value)
    }
}

/// A root of multiplicity `k` is a simple root of `p^(k-1)`; a few Newton
/// steps there recover accuracy lost to clustering.
fn polish(p: &ComplexPoly, z: Complex64, k: usize) -> Complex64 {
    let mut z = z;
    let mut best = p.eval_jet(z, k - 1)[k - 1].norm();
    for _ in 0..4 {
        let jet = p.eval_jet(z, k);
        let next = z - jet[k - 1] / jet[k];
        if !next.is_finite() {
            break;
        }
        let r = p.eval_jet(next, k - 1)[k - 1].norm();
        if r >= best {
            break;
        }
        best = r;
        z = next;
    }
    z
}

/// Unique positive root of `|a_n| x^n - sum_{k<n} |a_k| x^k`, an upper
/// bound on the root moduli.
fn cauchy_radius(monic: &ComplexPoly) -> f64 {
    let n = monic.coeffs.len() - 1;
    let abs: Vec<f64> = monic.coeffs.iter().map(|c| c.norm()).collect();
    if abs[..n].iter().all(|&a| a == 0.0) {
        return 1.0;
    }
    let g = |x: f64| {
        let mut v = 1.0;
        let mut dv = 0.0;
        for k in (0..n).rev() {
            dv = dv * x + v;
            v = v * x - abs[k];
        }
        (v, dv)
    };
    let mut x = 1.0 + abs[..n].iter().cloned().fold(0.0, f64::max);
    for _ in 0..100 {
        let (v, dv) = g(x);
        let step = v / dv;
        x -= step;
        if step.abs() <= 1e-12 * x {
            break;
        }
    }
    x.max(f64::MIN_POSITIVE)
}

/// `count` starting points spread over the given circles with seeded
/// angular jitter.
pub(crate) fn circle_starts(count: usize, radii: &[f64], seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rings = radii.len();
    (0..count)
        .map(|k| {
            let ring = k % rings;
            let jitter: f64 = rng.gen_range(-0.25..0.25);
            let theta = std::f64::consts::TAU * (k as f64 + jitter) / count as f64 + 0.4;
            Complex64::from_polar(radii[ring], theta)
        })
        .collect()
}

pub(crate) struct IterationOutcome {
    pub points: Vec<Complex64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Aberth-Ehrlich simultaneous iteration. `step(z)` returns the Newton
/// ratio `g(z)/g'(z)` of the target function and whether `z` already
/// meets the caller's residual criterion; converged points are frozen.
pub(crate) fn simultaneous_iteration(
    mut points: Vec<Complex64>,
    max_iter: usize,
    step: impl Fn(Complex64) -> (Complex64, bool),
) -> IterationOutcome {
    let n = points.len();
    let mut done = vec![false; n];
    for iter in 0..max_iter {
        let mut moved = false;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let z = points[i];
            let (ratio, converged) = step(z);
            if converged || !ratio.is_finite() {
                done[i] = converged;
                if !converged {
                    // Zero derivative: nudge off the critical point.
                    points[i] = z + Complex64::new(1e-7, 1e-7) * (1.0 + z.norm());
                    moved = true;
                }
                continue;
            }
            let repulsion: Complex64 = points
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &w)| (z - w).inv())
                .sum();
            let correction = ratio / (ONE - ratio * repulsion);
            let next = if correction.is_finite() {
                z - correction
            } else {
                z - ratio
            };
            if (next - z).norm() <= 4.0 * f64::EPSILON * z.norm().max(f64::MIN_POSITIVE) {
                done[i] = true;
            }
            points[i] = next;
            moved = true;
        }
        if done.iter().all(|&d| d) || !moved {
            return IterationOutcome {
                points,
                converged: done.iter().all(|&d| d),
                iterations: iter + 1,
            };
        }
    }
    IterationOutcome {
        points,
        converged: false,
        iterations: max_iter,
    }
}

/// Single-linkage merge: two clusters join when the distance between
/// their centroids is below `eps^(1/k)` for the merged size `k`.
pub(crate) fn merge_clusters(points: &[Complex64], eps: f64) -> Vec<Root> {
    let mut clusters: Vec<(Complex64, usize)> = points.iter().map(|&z| (z, 1)).collect();
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..clusters.len() {
            for j in (i + 1)..clusters.len() {
                let (ci, ki) = clusters[i];
                let (cj, kj) = clusters[j];
                let k = (ki + kj) as f64;
                let scale = 1.0f64.max(ci.norm()).max(cj.norm());
                let radius = eps.powf(1.0 / k) * scale;
                let dist = (ci - cj).norm();
                if dist < radius && best.is_none_or(|(_, _, d)| dist / radius < d) {
                    best = Some((i, j, dist / radius));
                }
            }
        }
        match best {
            Some((i, j, _)) => {
                let (ci, ki) = clusters[i];
                let (cj, kj) = clusters.swap_remove(j);
                let k = ki + kj;
                clusters[i] = ((ci * ki as f64 + cj * kj as f64) / k as f64, k);
            }
            None => break,
        }
    }
    clusters
        .into_iter()
        .map(|(value, multiplicity)| Root { value, multiplicity })
        .collect()
}
