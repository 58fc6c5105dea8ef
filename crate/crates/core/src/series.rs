//! Truncated power series in a local variable `t`, used to read off
//! Taylor and Laurent coefficients at critical points exactly.

use num_complex::Complex64;

use crate::cpoly::ComplexPoly;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Coefficients `s[k]` of `t^k`, truncated at a fixed length.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Series(pub Vec<Complex64>);

impl Series {
    pub fn zeros(len: usize) -> Self {
        Series(vec![ZERO; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Taylor expansion of `p(center + t)`.
    pub fn of_poly(p: &ComplexPoly, center: Complex64, len: usize) -> Self {
        let jet = p.eval_jet(center, len.saturating_sub(1));
        let mut factorial = 1.0;
        Series(
            jet.into_iter()
                .enumerate()
                .map(|(k, d)| {
                    if k > 0 {
                        factorial *= k as f64;
                    }
                    d / factorial
                })
                .collect(),
        )
    }

    /// Expansion of `1/(center + t - pole)^order` for `order` in {1, 2}.
    pub fn of_pole(pole: Complex64, center: Complex64, order: u32, len: usize) -> Self {
        // 1/(u + t) = sum (-1)^k t^k / u^(k+1)
        let u = center - pole;
        let inv = u.inv();
        let simple: Vec<Complex64> = (0..len)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                inv.powu(k as u32 + 1) * sign
            })
            .collect();
        match order {
            1 => Series(simple),
            _ => {
                // 1/(u + t)^2 = sum (-1)^k (k+1) t^k / u^(k+2)
                Series((0..len).map(|k| simple[k] * inv * (k + 1) as f64).collect())
            }
        }
    }

    pub fn add(&self, other: &Series) -> Series {
        Series(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, s: Complex64) -> Series {
        Series(self.0.iter().map(|a| a * s).collect())
    }

    #[cfg(test)]
    pub fn mul(&self, other: &Series) -> Series {
        let n = self.len().min(other.len());
        let mut out = vec![ZERO; n];
        for i in 0..n {
            for j in 0..(n - i) {
                out[i + j] += self.0[i] * other.0[j];
            }
        }
        Series(out)
    }

    /// `self / other`; requires `other[0] != 0`.
    pub fn div(&self, other: &Series) -> Series {
        let n = self.len().min(other.len());
        let mut out = vec![ZERO; n];
        for k in 0..n {
            let mut acc = self.0[k];
            for j in 1..=k {
                acc -= other.0[j] * out[k - j];
            }
            out[k] = acc / other.0[0];
        }
        Series(out)
    }

    /// Drops the first `k` coefficients (division by `t^k` when they vanish).
    pub fn shift_down(&self, k: usize) -> Series {
        Series(self.0.iter().skip(k).copied().collect())
    }
}
