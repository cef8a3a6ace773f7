//! Integer polynomials in `z = gamma / (1 - gamma)` with exact sign
//! evaluation at dyadic rational points, plus the certified bisection used by
//! every crossover solver.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, Zero};

use crate::distdist::DistDist;

/// Denominator exponent for dyadic evaluation points: `gamma = p / 2^BITS`.
pub const BITS: u32 = 60;

/// Scan resolution in gamma before bisection.
pub const SCAN_STEP: f64 = 1e-3;

/// Interior margin kept away from 0 and 1/2.
pub const EDGE: f64 = 1e-8;

/// Final bracket width.
pub const TOLERANCE: f64 = 1e-9;

const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> IntPoly {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> IntPoly {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn from_dist(d: &DistDist) -> IntPoly {
        IntPoly::new(
            d.coeffs()
                .iter()
                .map(|c| BigInt::from_biguint(Sign::Plus, c.clone()))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, k: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = BigInt::zero();
        IntPoly::new(
            (0..len)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) - other.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::new(vec![]);
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    /// `(1 + z)^d`.
    pub fn one_plus_z_pow(d: usize) -> IntPoly {
        let mut c = vec![BigInt::one()];
        for _ in 0..d {
            let mut next = vec![BigInt::zero(); c.len() + 1];
            for (i, v) in c.iter().enumerate() {
                next[i] += v;
                next[i + 1] += v;
            }
            c = next;
        }
        IntPoly::new(c)
    }

    fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Sign at `z = num / den` with `den > 0`, computed as the sign of
    /// `sum c_i num^i den^(d-i)`.
    fn sign_at_ratio(&self, num: &BigInt, den: &BigInt) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        let d = self.degree();
        let mut num_pows = Vec::with_capacity(d + 1);
        let mut acc = BigInt::one();
        for _ in 0..=d {
            num_pows.push(acc.clone());
            acc *= num;
        }
        let mut total = BigInt::zero();
        let mut den_pow = BigInt::one();
        for i in (0..=d).rev() {
            if !self.coeffs[i].is_zero() {
                total += &self.coeffs[i] * &num_pows[i] * &den_pow;
            }
            den_pow *= den;
        }
        total.sign_ordering()
    }

    /// Exact sign at `gamma = p / 2^BITS`.
    pub fn sign_at_gamma(&self, p: u128) -> Ordering {
        let q = 1u128 << BITS;
        self.sign_at_ratio(&BigInt::from(p), &BigInt::from(q - p))
    }

    /// Exact sign at `z = p / 2^BITS`.
    pub fn sign_at_zeta(&self, p: u128) -> Ordering {
        self.sign_at_ratio(&BigInt::from(p), &BigInt::from(1u128 << BITS))
    }

    pub fn eval_f64(&self, z: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * z + bigint_to_f64(c))
    }
}

trait SignOrdering {
    fn sign_ordering(&self) -> Ordering;
}

impl SignOrdering for BigInt {
    fn sign_ordering(&self) -> Ordering {
        if self.is_positive() {
            Ordering::Greater
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
}

fn bigint_to_f64(c: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    c.to_f64().unwrap_or(if c.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

pub fn to_dyadic(x: f64) -> u128 {
    (x * (1u128 << BITS) as f64).round() as u128
}

pub fn from_dyadic(p: u128) -> f64 {
    p as f64 / (1u128 << BITS) as f64
}

/// A certified sign change of some function on `[lo, hi]` (dyadic numerators).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bracket {
    pub lo: u128,
    pub hi: u128,
    /// Sign just below the root.
    pub sign_lo: Ordering,
    pub sign_hi: Ordering,
}

impl Bracket {
    pub fn lo_f64(&self) -> f64 {
        from_dyadic(self.lo)
    }

    pub fn hi_f64(&self) -> f64 {
        from_dyadic(self.hi)
    }

    pub fn mid_f64(&self) -> f64 {
        from_dyadic(self.lo + (self.hi - self.lo) / 2)
    }
}

/// Scan grid in gamma: the interior margins plus every multiple of the scan
/// step strictly inside `(0, 1/2)`.
pub fn gamma_grid() -> Vec<u128> {
    let steps = (0.5 / SCAN_STEP).round() as usize;
    let mut g = Vec::with_capacity(steps + 1);
    g.push(to_dyadic(EDGE));
    for j in 1..steps {
        g.push(to_dyadic(j as f64 * SCAN_STEP));
    }
    g.push(to_dyadic(0.5 - EDGE));
    g
}

/// Bisects a sign change of `sign` between dyadic points until the bracket is
/// narrower than [`TOLERANCE`].
pub fn bisect<F: Fn(u128) -> Ordering>(sign: &F, mut lo: u128, mut hi: u128) -> Bracket {
    let sign_lo = sign(lo);
    let sign_hi = sign(hi);
    debug_assert!(sign_lo != Ordering::Equal && sign_hi != Ordering::Equal && sign_lo != sign_hi);
    let tol = to_dyadic(TOLERANCE).max(1);
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= tol {
            break;
        }
        let mid = lo + (hi - lo) / 2;
        match sign(mid) {
            Ordering::Equal => {
                return Bracket {
                    lo: mid,
                    hi: mid,
                    sign_lo,
                    sign_hi,
                }
            }
            s if s == sign_lo => lo = mid,
            _ => hi = mid,
        }
    }
    Bracket {
        lo,
        hi,
        sign_lo,
        sign_hi,
    }
}

/// All sign changes of `sign` over `grid`, each bisected. Grid points where the
/// function vanishes are skipped over so that a touching zero is not reported.
pub fn sign_changes<F: Fn(u128) -> Ordering>(sign: &F, grid: &[u128]) -> Vec<Bracket> {
    let mut out = Vec::new();
    let mut prev: Option<(u128, Ordering)> = None;
    for &g in grid {
        let s = sign(g);
        if s == Ordering::Equal {
            continue;
        }
        if let Some((pg, ps)) = prev {
            if ps != s {
                out.push(bisect(sign, pg, g));
            }
        }
        prev = Some((g, s));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_sign_of_linear_factor() {
        // 4z - 1 vanishes at z = 1/4, i.e. gamma = 1/5.
        let p = IntPoly::from_i64(&[-1, 4]);
        assert_eq!(p.sign_at_zeta(to_dyadic(0.25)), Ordering::Equal);
        assert_eq!(p.sign_at_zeta(to_dyadic(0.25) + 1), Ordering::Greater);
        let roots = sign_changes(&|g| p.sign_at_gamma(g), &gamma_grid());
        assert_eq!(roots.len(), 1);
        assert!((roots[0].mid_f64() - 0.2).abs() < 2e-9);
        assert_eq!(roots[0].sign_lo, Ordering::Less);
    }

    #[test]
    fn double_root_is_not_a_crossing() {
        // (z - 1/4)^2 touches zero without changing sign.
        let p = IntPoly::from_i64(&[1, -8, 16]);
        assert!(sign_changes(&|g| p.sign_at_gamma(g), &gamma_grid()).is_empty());
    }

    #[test]
    fn binomial_expansion() {
        let p = IntPoly::one_plus_z_pow(4);
        assert_eq!(p, IntPoly::from_i64(&[1, 4, 6, 4, 1]));
        let q = IntPoly::from_i64(&[1, 1]).mul(&IntPoly::one_plus_z_pow(3));
        assert_eq!(p, q);
        assert!(p.sub(&q).is_zero());
    }

    #[test]
    fn grid_spans_open_interval() {
        let g = gamma_grid();
        assert_eq!(g.len(), 501);
        assert!(from_dyadic(g[0]) > 0.0 && from_dyadic(*g.last().unwrap()) < 0.5);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
