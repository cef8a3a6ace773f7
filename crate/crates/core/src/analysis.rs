//! Crossover solvers between collision-probability curves, and the
//! asymptotic random-code exponent machinery.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use serde::Serialize;

use crate::distdist::DistDist;
use crate::error::{Error, Result};
use crate::poly::{self, Bracket, IntPoly};

/// A certified sign change of `P_lhs - P_rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossoverReport {
    pub lhs: String,
    pub rhs: String,
    pub gamma_cross: f64,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    /// True when `lhs` has the larger collision probability just below the
    /// crossing.
    pub lhs_wins_below: bool,
}

fn big(x: &num_bigint::BigUint) -> BigInt {
    BigInt::from_biguint(Sign::Plus, x.clone())
}

/// `log2` of a power of two.
fn exact_log2(x: &num_bigint::BigUint) -> Option<u64> {
    let bits = x.bits();
    (bits > 0 && x.trailing_zeros() == Some(bits - 1)).then(|| bits - 1)
}

/// Integer polynomial in `z` with the same sign as `P_a - P_b` at
/// `gamma = z / (1 + z)`.
///
/// Sets in different dimensions are accepted when both have power-of-two
/// size and the same hash length `n - lg|S|`.
pub fn difference_poly(a: &DistDist, b: &DistDist) -> Result<IntPoly> {
    if a.n() != b.n() {
        let ka = exact_log2(a.size()).map(|l| a.n() as i64 - l as i64);
        let kb = exact_log2(b.size()).map(|l| b.n() as i64 - l as i64);
        if ka.is_none() || ka != kb {
            return Err(Error::DimensionMismatch {
                left: a.n(),
                right: b.n(),
            });
        }
    }
    let top = a.n().max(b.n());
    let pa = IntPoly::from_dist(a)
        .mul(&IntPoly::one_plus_z_pow(top - a.n()))
        .scale(&big(b.size()));
    let pb = IntPoly::from_dist(b)
        .mul(&IntPoly::one_plus_z_pow(top - b.n()))
        .scale(&big(a.size()));
    Ok(pa.sub(&pb))
}

/// Every crossing of the two curves on `(0, 1/2)`.
pub fn crossover_brackets(a: &DistDist, b: &DistDist) -> Result<Vec<Bracket>> {
    let d = difference_poly(a, b)?;
    Ok(poly::sign_changes(&|g| d.sign_at_gamma(g), &poly::gamma_grid()))
}

pub fn crossover(
    lhs: &str,
    a: &DistDist,
    rhs: &str,
    b: &DistDist,
) -> Result<Vec<CrossoverReport>> {
    Ok(crossover_brackets(a, b)?
        .into_iter()
        .map(|br| CrossoverReport {
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            gamma_cross: br.mid_f64(),
            bracket_lo: br.lo_f64(),
            bracket_hi: br.hi_f64(),
            lhs_wins_below: br.sign_lo == Ordering::Greater,
        })
        .collect())
}

/// `f_m(z)`: the projection-minus-sphere difference of distance
/// distribution functions for `2^m`-point sets in `2^m - 1` dimensions,
/// divided by `z`.
pub fn hamming_difference(m: usize) -> Result<IntPoly> {
    if !(2..=20).contains(&m) {
        return Err(Error::InvalidParameter(format!("m must lie in 2..=20, got {m}")));
    }
    let n = (1usize << m) - 1;
    let cube = DistDist::subcube(n, m)?;
    let sphere = DistDist::one_sphere(n)?;
    let diff = IntPoly::from_dist(&cube).sub(&IntPoly::from_dist(&sphere));
    debug_assert!(diff.coeffs().first().is_none_or(|c| c.sign() == Sign::NoSign));
    Ok(IntPoly::new(diff.coeffs().iter().skip(1).cloned().collect()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HammingAlpha {
    pub m: usize,
    /// Root of `f_m` in `(0, 1)`.
    pub alpha: f64,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    /// The corresponding error probability `alpha / (1 + alpha)`.
    pub gamma: f64,
    pub claimed_lo: f64,
    pub claimed_hi: f64,
    /// Whether `alpha` lies in `((m-2)/2^m, m/2^m)`.
    pub within_claim: bool,
}

pub fn hamming_alpha(m: usize) -> Result<HammingAlpha> {
    if m < 4 {
        return Err(Error::InvalidParameter(format!("requires m >= 4, got {m}")));
    }
    let f = hamming_difference(m)?;
    let lo = poly::to_dyadic(poly::EDGE);
    let hi = poly::to_dyadic(0.99);
    let sign = |p| f.sign_at_zeta(p);
    if sign(lo) != Ordering::Greater || sign(hi) != Ordering::Less {
        return Err(Error::InvalidParameter(format!(
            "no sign change of f_{m} on (0, 0.99)"
        )));
    }
    let br = poly::bisect(&sign, lo, hi);
    let alpha = br.mid_f64();
    let scale = (1u64 << m) as f64;
    let claimed_lo = (m as f64 - 2.0) / scale;
    let claimed_hi = m as f64 / scale;
    Ok(HammingAlpha {
        m,
        alpha,
        bracket_lo: br.lo_f64(),
        bracket_hi: br.hi_f64(),
        gamma: alpha / (1.0 + alpha),
        claimed_lo,
        claimed_hi,
        within_claim: claimed_lo < alpha && alpha < claimed_hi,
    })
}

/// Binary entropy in bits.
pub fn binary_entropy(delta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidProbability(delta));
    }
    let term = |p: f64| if p == 0.0 { 0.0 } else { -p * p.log2() };
    Ok(term(delta) + term(1.0 - delta))
}

fn check_open_half(x: f64) -> Result<()> {
    if x > 0.0 && x < 0.5 {
        Ok(())
    } else {
        Err(Error::InvalidProbability(x))
    }
}

/// Maximizing `eps` for the random-code exponent bound. Accepts
/// `gamma = 1/2`, where the defining quadratic degenerates.
pub fn epsilon_max(gamma: f64, delta: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma <= 0.5) {
        return Err(Error::InvalidProbability(gamma));
    }
    check_open_half(delta)?;
    let k = (1.0 - gamma) / gamma;
    let a = k * k - 1.0;
    let c = 4.0 * delta * (1.0 - delta);
    // Positive root of a e^2 + 2 e - c, in the cancellation-free form.
    Ok(c / (1.0 + (1.0 + a * c).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticParams {
    pub rate: f64,
    pub delta: f64,
    pub gamma: f64,
    pub eps: f64,
}

impl AsymptoticParams {
    /// Parameters at the Gilbert-Varshamov rate `1 - H(delta)`, with `eps`
    /// at its maximizing value.
    pub fn at_gv_rate(gamma: f64, delta: f64) -> Result<AsymptoticParams> {
        let p = AsymptoticParams {
            rate: 1.0 - binary_entropy(delta)?,
            delta,
            gamma,
            eps: epsilon_max(gamma, delta)?,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_open_half(self.delta)?;
        check_open_half(self.gamma)?;
        if !(self.rate > 0.0 && self.rate < 1.0) {
            return Err(Error::InvalidParameter(format!("rate {} outside (0,1)", self.rate)));
        }
        if binary_entropy(self.delta)? > 1.0 - self.rate + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "H({}) exceeds 1 - R = {}",
                self.delta,
                1.0 - self.rate
            )));
        }
        if !(self.eps > 0.0 && self.eps <= 0.5 && self.eps <= 2.0 * self.delta) {
            return Err(Error::InvalidParameter(format!(
                "eps {} outside (0, min(1/2, 2 delta)]",
                self.eps
            )));
        }
        Ok(())
    }
}

/// Lower bound on the exponent advantage of a random code at rate
/// `1 - H(delta)` over projection.
pub fn exponent_gap(gamma: f64, delta: f64, eps: f64) -> Result<f64> {
    check_open_half(gamma)?;
    check_open_half(delta)?;
    if !(eps > 0.0 && eps <= 2.0 * delta) {
        return Err(Error::InvalidParameter(format!(
            "eps {eps} outside (0, 2 delta = {}]",
            2.0 * delta
        )));
    }
    let h = binary_entropy(delta)?;
    let lg1 = (1.0 - gamma).log2();
    Ok(eps * gamma.log2() + (1.0 - eps) * lg1
        + delta * binary_entropy(eps / (2.0 * delta))?
        + (1.0 - delta) * binary_entropy(eps / (2.0 * (1.0 - delta)))?
        - (1.0 - h) * lg1)
}

/// `exponent_gap` with `eps = epsilon_max(gamma, delta)`.
pub fn exponent_gap_at_max(gamma: f64, delta: f64) -> Result<f64> {
    exponent_gap(gamma, delta, epsilon_max(gamma, delta)?)
}

/// Stationary point in `gamma` of `exponent_gap_at_max(., delta)`.
pub fn critical_gamma(delta: f64) -> Result<f64> {
    check_open_half(delta)?;
    let h = binary_entropy(delta)?;
    let g = (4.0 * delta * (1.0 - delta) - h * h) / (2.0 * (h - h * h));
    if !(g > 0.0 && g < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "critical gamma {g} outside (0, 1/2)"
        )));
    }
    Ok(g)
}

/// `(gamma, delta, D)` on an evenly spaced grid over `[lo, hi]^2`.
pub fn exponent_gap_grid(steps: usize, lo: f64, hi: f64) -> Result<Vec<(f64, f64, f64)>> {
    if steps < 2 || !(0.0 < lo && lo < hi && hi < 0.5) {
        return Err(Error::InvalidParameter("grid needs steps >= 2 and 0 < lo < hi < 1/2".into()));
    }
    let at = |i: usize| lo + (hi - lo) * i as f64 / (steps - 1) as f64;
    let mut out = Vec::with_capacity(steps * steps);
    for i in 0..steps {
        for j in 0..steps {
            let (g, d) = (at(i), at(j));
            out.push((g, d, exponent_gap_at_max(g, d)?));
        }
    }
    Ok(out)
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(n + 1);
    t.push(0.0);
    let mut acc = 0.0;
    for i in 1..=n {
        acc += (i as f64).ln();
        t.push(acc);
    }
    t
}

/// Collision probability lower bound for a random code that decodes every
/// radius-`floor(delta n)` sphere: `sum_i C(d,i) C(n-d,i) g^{2i} (1-g)^{n-2i}`.
pub fn random_code_collision_lower_bound(n: usize, delta: f64, gamma: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&delta) {
        return Err(Error::InvalidProbability(delta));
    }
    if !(0.0..0.5).contains(&gamma) {
        return Err(Error::InvalidProbability(gamma));
    }
    let d = (delta * n as f64).floor() as usize;
    if 2 * d > n {
        return Err(Error::InvalidParameter(format!("radius {d} exceeds n/2")));
    }
    if gamma == 0.0 {
        return Ok(1.0);
    }
    let lf = ln_factorials(n);
    let ln_choose = |a: usize, b: usize| lf[a] - lf[b] - lf[a - b];
    let (lg, lg1) = (gamma.ln(), (1.0 - gamma).ln());
    let terms: Vec<f64> = (0..=d)
        .map(|i| {
            ln_choose(d, i) + ln_choose(n - d, i) + 2.0 * i as f64 * lg + (n - 2 * i) as f64 * lg1
        })
        .collect();
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok((max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes;

    #[test]
    fn table_one_crossovers() {
        for (m, expect) in [(4, 0.2826), (5, 0.1518), (6, 0.0838), (7, 0.0468)] {
            let n = (1 << m) - 1;
            let r = crossover(
                "hamming",
                &DistDist::one_sphere(n).unwrap(),
                "projection",
                &DistDist::subcube(n, m).unwrap(),
            )
            .unwrap();
            assert_eq!(r.len(), 1, "m={m}");
            assert!((r[0].gamma_cross - expect).abs() < 1e-4, "m={m}: {}", r[0].gamma_cross);
            assert!(r[0].bracket_hi - r[0].bracket_lo <= 1e-6);
            assert!(!r[0].lhs_wins_below);
        }
    }

    #[test]
    fn golay_crossover_and_self_comparison() {
        let g = codes::golay_code().dist_dist().unwrap();
        let p = DistDist::subcube(23, 11).unwrap();
        let r = crossover("golay", &g, "projection", &p).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].gamma_cross - 0.2555).abs() < 1e-4);
        assert!(crossover("golay", &g, "golay", &g).unwrap().is_empty());
    }

    #[test]
    fn mismatched_dimensions() {
        let a = DistDist::subcube(10, 3).unwrap();
        let b = DistDist::subcube(12, 5).unwrap();
        assert!(crossover_brackets(&a, &b).unwrap().is_empty());
        let c = DistDist::subcube(12, 4).unwrap();
        assert!(difference_poly(&a, &c).is_err());
    }

    #[test]
    fn f_m_structure() {
        for m in 4..=10 {
            let f = hamming_difference(m).unwrap();
            let negatives: Vec<usize> = f
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| c.sign() == Sign::Minus)
                .map(|(i, _)| i)
                .collect();
            // Index 1 of f_m is the z^2 coefficient before dividing by z.
            assert_eq!(negatives, vec![1], "m={m}");
            assert_eq!(f.coeffs()[0], BigInt::from((m as i64 - 2) * (1 << m) + 2));
            assert_eq!(f.sign_at_zeta(1 << poly::BITS), Ordering::Equal);
        }
    }

    #[test]
    fn alpha_matches_table_crossover() {
        let a = hamming_alpha(5).unwrap();
        assert!((a.gamma - 0.1518).abs() < 1e-4);
        assert!(hamming_alpha(3).is_err());
        for m in 7..=10 {
            assert!(hamming_alpha(m).unwrap().within_claim, "m={m}");
        }
    }

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert!((binary_entropy(0.11).unwrap() - 0.499916).abs() < 1e-6);
        assert!(binary_entropy(1.5).is_err());
    }

    #[test]
    fn epsilon_max_values() {
        let d = 0.1;
        assert!((epsilon_max(0.5, d).unwrap() - 2.0 * d * (1.0 - d)).abs() < 1e-15);
        let e = epsilon_max(0.25, d).unwrap();
        assert!((8.0 * e * e + 2.0 * e - 0.36).abs() < 1e-12);
        let k: f64 = 3.0;
        assert!(((2.0 * d - e) * (2.0 * (1.0 - d) - e) / (e * e) - k * k).abs() < 1e-9);
        for i in 1..100 {
            let delta = 0.005 * i as f64;
            let mut prev = 0.0;
            for j in 1..100 {
                let e = epsilon_max(0.005 * j as f64, delta).unwrap();
                assert!(e > prev && e <= 2.0 * delta);
                prev = e;
            }
        }
    }

    #[test]
    fn exponent_gap_is_stationary_at_epsilon_max() {
        for (g, d) in [(0.1, 0.11), (0.3, 0.2), (0.45, 0.05)] {
            let e = epsilon_max(g, d).unwrap();
            let h = 1e-6;
            let slope = (exponent_gap(g, d, e + h).unwrap() - exponent_gap(g, d, e - h).unwrap()) / (2.0 * h);
            assert!(slope.abs() < 1e-4, "({g},{d}): {slope}");
        }
    }

    #[test]
    fn critical_gamma_consistency() {
        let d = 0.11;
        let g = critical_gamma(d).unwrap();
        assert!((g - 0.283368).abs() < 1e-6);
        let h = binary_entropy(d).unwrap();
        assert!((epsilon_max(g, d).unwrap() - g * h).abs() < 1e-8);
        let best = exponent_gap_at_max(g, d).unwrap();
        for i in 1..1000 {
            assert!(exponent_gap_at_max(0.0005 * i as f64, d).unwrap() <= best + 1e-15);
        }
    }

    #[test]
    fn random_code_bound() {
        assert_eq!(random_code_collision_lower_bound(40, 0.1, 0.0).unwrap(), 1.0);
        let v = random_code_collision_lower_bound(40, 0.01, 0.2).unwrap();
        assert!((v - 0.8f64.powi(40)).abs() < 1e-15);
        // Direct summation oracle.
        let (n, d, g) = (30usize, 4usize, 0.15f64);
        let choose = |a: u64, b: u64| (0..b).fold(1.0, |acc, i| acc * (a - i) as f64 / (i + 1) as f64);
        let direct: f64 = (0..=d)
            .map(|i| {
                choose(d as u64, i as u64)
                    * choose((n - d) as u64, i as u64)
                    * g.powi(2 * i as i32)
                    * (1.0 - g).powi((n - 2 * i) as i32)
            })
            .sum();
        let fast = random_code_collision_lower_bound(n, d as f64 / n as f64 + 1e-9, g).unwrap();
        assert!((fast - direct).abs() < 1e-14);
    }

    #[test]
    fn random_code_beats_projection_for_long_codes() {
        let (delta, gamma): (f64, f64) = (0.11, 0.1);
        let h = binary_entropy(delta).unwrap();
        let projection = |n: usize| (1.0 - gamma).powf(n as f64 * (1.0 - h));
        for n in [200, 500, 1000, 2000] {
            assert!(random_code_collision_lower_bound(n, delta, gamma).unwrap() > projection(n), "n={n}");
        }
        // At n = 46 the bound is still below projection.
        assert!(random_code_collision_lower_bound(46, delta, gamma).unwrap() < projection(46));
    }
}
