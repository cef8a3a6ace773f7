//! Distance distributions of point sets and the collision functionals built
//! on them.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{hamming_distance, Word};

/// Coefficient magnitude above which probabilities are evaluated in the log
/// domain.
const LOG_DOMAIN_DIM: usize = 512;

/// A nonempty, duplicate-free set of words sharing one dimension. Elements
/// are kept sorted by integer encoding.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    n: usize,
    elements: Vec<Word>,
}

impl PointSet {
    pub fn new(mut elements: Vec<Word>) -> Result<PointSet> {
        let n = elements.first().ok_or(Error::EmptySet)?.n();
        if let Some(bad) = elements.iter().find(|w| w.n() != n) {
            return Err(Error::DimensionMismatch {
                left: n,
                right: bad.n(),
            });
        }
        elements.sort();
        elements.dedup();
        Ok(PointSet { n, elements })
    }

    pub fn from_u64s(n: usize, values: &[u64]) -> Result<PointSet> {
        let words = values
            .iter()
            .map(|&v| Word::from_u64(n, v))
            .collect::<Result<Vec<_>>>()?;
        PointSet::new(words)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Word] {
        &self.elements
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.elements.binary_search(w).is_ok()
    }

    /// Integer encodings, when `n <= 64`.
    pub fn to_u64s(&self) -> Option<Vec<u64>> {
        self.elements.iter().map(Word::as_u64).collect()
    }

    /// Cartesian product with `self` on the leading coordinates.
    pub fn product(&self, tail: &PointSet) -> Result<PointSet> {
        let mut out = Vec::with_capacity(self.len() * tail.len());
        for a in &self.elements {
            for b in &tail.elements {
                out.push(a.concat(b)?);
            }
        }
        PointSet::new(out)
    }

    /// Parses the set literal `"n:hex,hex,..."`.
    pub fn parse_literal(s: &str) -> Result<PointSet> {
        let (n, rest) = parse_literal_parts(s)?;
        PointSet::new(
            rest.iter()
                .map(|h| Word::from_hex(n, h))
                .collect::<Result<_>>()?,
        )
    }

    pub fn to_literal(&self) -> String {
        let hex: Vec<String> = self.elements.iter().map(Word::hex).collect();
        format!("{}:{}", self.n, hex.join(","))
    }
}

impl Serialize for PointSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_literal())
    }
}

pub(crate) fn parse_literal_parts(s: &str) -> Result<(usize, Vec<&str>)> {
    let (n, rest) = s
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("expected n:hex,hex,..., got {s:?}")))?;
    let n: usize = n
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad dimension in {s:?}")))?;
    let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Parse(format!("empty element in {s:?}")));
    }
    Ok((n, parts))
}

/// Coefficients `(A_0, ..., A_n)` of the distance distribution function,
/// where `A_i` counts ordered pairs at distance `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DistDist {
    n: usize,
    size: BigUint,
    coeffs: Vec<BigUint>,
}

impl DistDist {
    /// Validates `A_0 = size`, `sum A_i = size^2` and pads to length `n + 1`.
    pub fn new(n: usize, size: BigUint, mut coeffs: Vec<BigUint>) -> Result<DistDist> {
        while coeffs.len() > n + 1 {
            if !coeffs.pop().unwrap().is_zero() {
                return Err(Error::InvalidParameter(format!(
                    "distance distribution has terms beyond degree {n}"
                )));
            }
        }
        coeffs.resize(n + 1, BigUint::zero());
        if size.is_zero() {
            return Err(Error::EmptySet);
        }
        if coeffs[0] != size {
            return Err(Error::InvalidParameter("A_0 must equal |S|".into()));
        }
        let total: BigUint = coeffs.iter().sum();
        if total != &size * &size {
            return Err(Error::InvalidParameter("sum of A_i must equal |S|^2".into()));
        }
        Ok(DistDist { n, size, coeffs })
    }

    pub fn from_counts(n: usize, counts: &[u64]) -> Result<DistDist> {
        let size = BigUint::from(*counts.first().ok_or(Error::EmptySet)?);
        DistDist::new(n, size, counts.iter().map(|&c| BigUint::from(c)).collect())
    }

    /// Distribution of the `2^dim` subcube: `(2(1+z))^dim`.
    pub fn subcube(n: usize, dim: usize) -> Result<DistDist> {
        if dim > n {
            return Err(Error::InvalidParameter(format!(
                "subcube dimension {dim} exceeds {n}"
            )));
        }
        let size = BigUint::one() << dim;
        let mut coeffs = Vec::with_capacity(dim + 1);
        let mut binom = BigUint::one();
        for i in 0..=dim {
            coeffs.push(&size * &binom);
            binom = binom * BigUint::from(dim - i) / BigUint::from(i + 1);
        }
        DistDist::new(n, size, coeffs)
    }

    /// Distribution of the radius-one sphere around 0 in dimension `n`.
    pub fn one_sphere(n: usize) -> Result<DistDist> {
        let s = BigUint::from(n + 1);
        let n_big = BigUint::from(n);
        let a1 = BigUint::from(2u32) * &n_big;
        let a2 = if n >= 2 {
            &n_big * BigUint::from(n - 1)
        } else {
            BigUint::zero()
        };
        DistDist::new(n, s, vec![BigUint::from(n + 1), a1, a2])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> &BigUint {
        &self.size
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &BigUint {
        &self.coeffs[i]
    }

    /// Coefficients with trailing zeros removed.
    pub fn trimmed(&self) -> &[BigUint] {
        let d = self.degree();
        &self.coeffs[..=d]
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    pub fn coeffs_u64(&self) -> Option<Vec<u64>> {
        self.trimmed().iter().map(ToPrimitive::to_u64).collect()
    }

    /// Half the sum of all pairwise distances.
    pub fn distance_sum(&self) -> BigUint {
        let twice: BigUint = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| a * BigUint::from(i))
            .sum();
        twice >> 1
    }

    /// Distribution of the product set (distances add, pair counts multiply).
    pub fn product(&self, other: &DistDist) -> Result<DistDist> {
        let mut coeffs = vec![BigUint::zero(); self.n + other.n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        DistDist::new(self.n + other.n, &self.size * &other.size, coeffs)
    }

    /// Same set embedded in a larger cube (pad with constant coordinates).
    pub fn embed(&self, n: usize) -> Result<DistDist> {
        if n < self.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: n,
            });
        }
        DistDist::new(n, self.size.clone(), self.coeffs.clone())
    }

    /// `P_S(gamma) = (1/|S|) sum_i A_i gamma^i (1-gamma)^(n-i)`.
    pub fn collision_probability(&self, gamma: f64) -> Result<f64> {
        check_gamma(gamma)?;
        if gamma == 0.0 {
            return Ok(1.0);
        }
        let zeta = gamma / (1.0 - gamma);
        let direct = if self.n <= LOG_DOMAIN_DIM {
            let fs: Option<Vec<f64>> = self
                .coeffs
                .iter()
                .map(|c| c.to_f64().filter(|v| v.is_finite()))
                .collect();
            let size = self.size.to_f64().filter(|v| v.is_finite());
            match (fs, size) {
                (Some(fs), Some(size)) => {
                    let horner = fs.iter().rev().fold(0.0, |acc, &a| acc * zeta + a);
                    let p = (1.0 - gamma).powi(self.n as i32) / size * horner;
                    (p.is_finite() && p > 0.0).then_some(p)
                }
                _ => None,
            }
        } else {
            None
        };
        Ok(match direct {
            Some(p) => p,
            None => self.ln_collision_probability(gamma)?.exp(),
        })
    }

    /// Natural log of the collision probability, evaluated by log-sum-exp.
    pub fn ln_collision_probability(&self, gamma: f64) -> Result<f64> {
        check_gamma(gamma)?;
        if gamma == 0.0 {
            return Ok(0.0);
        }
        let ln_zeta = (gamma / (1.0 - gamma)).ln();
        let terms: Vec<f64> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(i, a)| ln_big(a) + i as f64 * ln_zeta)
            .collect();
        let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln();
        Ok(self.n as f64 * (1.0 - gamma).ln() - ln_big(&self.size) + lse)
    }

    /// Renders `A(S, x)` as e.g. `16+30x+210x^2`, skipping zero terms.
    pub fn poly_string(&self) -> String {
        let mut parts = Vec::new();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            parts.push(match i {
                0 => a.to_string(),
                1 => format!("{a}x"),
                _ => format!("{a}x^{i}"),
            });
        }
        parts.join("+")
    }
}

impl fmt::Display for DistDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.poly_string())
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..0.5).contains(&gamma) {
        return Err(Error::InvalidProbability(gamma));
    }
    Ok(())
}

pub(crate) fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

// Coefficients serialize as JSON numbers when they fit in u64, otherwise as
// decimal strings.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BigJson {
    Num(u64),
    Str(String),
}

impl From<&BigUint> for BigJson {
    fn from(b: &BigUint) -> Self {
        match b.to_u64() {
            Some(v) => BigJson::Num(v),
            None => BigJson::Str(b.to_string()),
        }
    }
}

impl BigJson {
    fn into_big(self) -> std::result::Result<BigUint, String> {
        match self {
            BigJson::Num(v) => Ok(BigUint::from(v)),
            BigJson::Str(s) => s.parse().map_err(|_| format!("bad integer {s:?}")),
        }
    }
}

impl Serialize for DistDist {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("DistDist", 3)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("size", &BigJson::from(&self.size))?;
        let coeffs: Vec<BigJson> = self.coeffs.iter().map(BigJson::from).collect();
        st.serialize_field("coeffs", &coeffs)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for DistDist {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            size: BigJson,
            coeffs: Vec<BigJson>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let size = raw.size.into_big().map_err(de::Error::custom)?;
        let coeffs = raw
            .coeffs
            .into_iter()
            .map(BigJson::into_big)
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(de::Error::custom)?;
        DistDist::new(raw.n, size, coeffs).map_err(de::Error::custom)
    }
}

/// Counts ordered pairs of `s` at each distance.
pub fn distance_distribution(s: &PointSet) -> DistDist {
    let n = s.n();
    let mut counts = vec![0u64; n + 1];
    if let Some(values) = s.to_u64s() {
        for (i, &x) in values.iter().enumerate() {
            for &y in &values[i + 1..] {
                counts[(x ^ y).count_ones() as usize] += 2;
            }
        }
    } else {
        let els = s.elements();
        for (i, x) in els.iter().enumerate() {
            for y in &els[i + 1..] {
                counts[hamming_distance(x, y).expect("same dimension")] += 2;
            }
        }
    }
    counts[0] = s.len() as u64;
    DistDist::from_counts(n, &counts).expect("pair counts satisfy the invariants")
}

pub fn collision_probability(s: &PointSet, gamma: f64) -> Result<f64> {
    distance_distribution(s).collision_probability(gamma)
}

/// `-(1/n) lg P`.
pub fn error_exponent(p: f64, n: usize) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    Ok(-p.log2() / n as f64)
}

/// `lg(1/p1) / lg(1/p2)`.
pub fn rho_exponent(p1: f64, p2: f64) -> Result<f64> {
    if !(p1 > 0.0 && p1 <= 1.0) {
        return Err(Error::InvalidProbability(p1));
    }
    if !(p2 > 0.0 && p2 < 1.0) {
        return Err(Error::InvalidProbability(p2));
    }
    Ok(p1.log2() / p2.log2())
}

/// Half the sum of pairwise distances.
pub fn distance_sum(s: &PointSet) -> u64 {
    distance_distribution(s)
        .distance_sum()
        .to_u64()
        .expect("distance sum of an enumerable set fits in u64")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ps(n: usize, v: &[u64]) -> PointSet {
        PointSet::from_u64s(n, v).unwrap()
    }

    /// Direct double sum over ordered pairs, independent of the coefficient
    /// route.
    fn pair_sum_probability(s: &PointSet, gamma: f64) -> f64 {
        let n = s.n() as i32;
        let mut total = 0.0;
        for x in s.elements() {
            for y in s.elements() {
                let d = hamming_distance(x, y).unwrap() as i32;
                total += gamma.powi(d) * (1.0 - gamma).powi(n - d);
            }
        }
        total / s.len() as f64
    }

    #[test]
    fn subcube_and_sphere_examples() {
        let cube = distance_distribution(&ps(2, &[0, 1, 2, 3]));
        assert_eq!(cube.coeffs_u64().unwrap(), vec![4, 8, 4]);
        assert_eq!(cube, DistDist::subcube(2, 2).unwrap());
        let sphere = distance_distribution(&ps(3, &[0, 1, 2, 4]));
        assert_eq!(sphere.coeffs(), DistDist::one_sphere(3).unwrap().coeffs());
        assert_eq!(sphere.coeffs_u64().unwrap(), vec![4, 6, 6]);
    }

    #[test]
    fn pointset_dedups_and_rejects_mixed_dims() {
        let s = ps(3, &[1, 1, 0]);
        assert_eq!(s.len(), 2);
        assert!(PointSet::new(vec![]).is_err());
        let mixed = vec![Word::zero(3), Word::zero(4)];
        assert!(matches!(
            PointSet::new(mixed),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn literal_roundtrip() {
        let s = PointSet::parse_literal("15:4003,0,1").unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.to_literal(), "15:0,1,4003");
        assert!(PointSet::parse_literal("15:").is_err());
        assert!(PointSet::parse_literal("nope").is_err());
    }

    #[test]
    fn zero_noise_probability_is_one() {
        let s = ps(5, &[0, 3, 9, 17, 30]);
        assert_eq!(collision_probability(&s, 0.0).unwrap(), 1.0);
        assert!(collision_probability(&s, 0.5).is_err());
    }

    #[test]
    fn subcube_probability_is_projection() {
        for &(n, k, g) in &[(23usize, 12usize, 0.3f64), (10, 2, 0.4999), (40, 35, 0.1)] {
            let p = DistDist::subcube(n, n - k).unwrap().collision_probability(g).unwrap();
            let want = (1.0 - g).powi(k as i32);
            assert!((p - want).abs() <= 1e-12 * want, "{n} {k} {g}: {p} vs {want}");
        }
        let p = DistDist::subcube(23, 11).unwrap().collision_probability(0.3).unwrap();
        assert!((p - 0.013841287201).abs() < 1e-9);
    }

    #[test]
    fn hamming_sphere_ties_projection_at_table_crossover() {
        let p = DistDist::one_sphere(15).unwrap().collision_probability(0.2826).unwrap();
        assert!((p - 0.7174f64.powi(11)).abs() < 1e-3);
    }

    #[test]
    fn large_dimension_uses_log_domain() {
        let d = DistDist::subcube(1000, 600).unwrap();
        let p = d.collision_probability(0.2).unwrap();
        let want = 0.8f64.powi(400);
        assert!(((p - want) / want).abs() < 1e-10, "{p} vs {want}");
    }

    #[test]
    fn exponents() {
        assert_eq!(error_exponent(1.0, 10).unwrap(), 0.0);
        assert!((error_exponent(2f64.powi(-20), 20).unwrap() - 1.0).abs() < 1e-15);
        let (n, k, g) = (30usize, 12usize, 0.2f64);
        let e = error_exponent((1.0 - g).powi(k as i32), n).unwrap();
        let r = k as f64 / n as f64;
        assert!((e + r * (1.0 - g).log2()).abs() < 1e-14);
        assert!(error_exponent(0.0, 3).is_err());

        assert_eq!(rho_exponent(0.3, 0.3).unwrap(), 1.0);
        assert!((rho_exponent(0.09, 0.3).unwrap() - 2.0).abs() < 1e-14);
        assert!(rho_exponent(0.3, 1.0).is_err());
        assert!(rho_exponent(0.0, 0.5).is_err());
        // Projection against p2 = 2^-k gives rho = E/R.
        let p1 = (1.0 - g).powi(k as i32);
        let rho = rho_exponent(p1, 2f64.powi(-(k as i32))).unwrap();
        assert!((rho - e / r).abs() < 1e-12);
    }

    #[test]
    fn distance_sums() {
        assert_eq!(distance_sum(&ps(2, &[0, 1, 2, 3])), 8);
        assert_eq!(distance_sum(&ps(3, &[0, 1, 2, 4])), 9);
        assert_eq!(distance_sum(&ps(7, &[5])), 0);
    }

    #[test]
    fn poly_string_and_json() {
        let d = DistDist::one_sphere(15).unwrap();
        assert_eq!(d.poly_string(), "16+30x+210x^2");
        let json = serde_json::to_string(&d).unwrap();
        assert!(json.starts_with(r#"{"n":15,"size":16,"coeffs":[16,30,210,0"#));
        let back: DistDist = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);

        let big = DistDist::subcube(100, 90).unwrap();
        let back: DistDist = serde_json::from_str(&serde_json::to_string(&big).unwrap()).unwrap();
        assert_eq!(back, big);
        assert!(serde_json::from_str::<DistDist>(r#"{"n":2,"size":4,"coeffs":[4,8,3]}"#).is_err());
    }

    #[test]
    fn invariants_enforced() {
        assert!(DistDist::from_counts(2, &[4, 8, 3]).is_err());
        assert!(DistDist::from_counts(2, &[3, 8, 5]).is_err());
        assert!(DistDist::from_counts(1, &[2, 1, 1]).is_err());
    }

    #[test]
    fn product_matches_product_set() {
        let a = ps(3, &[0, 1, 4]);
        let b = ps(2, &[0, 3]);
        let direct = distance_distribution(&a.product(&b).unwrap());
        let via = distance_distribution(&a)
            .product(&distance_distribution(&b))
            .unwrap();
        assert_eq!(direct, via);
    }

    #[test]
    fn first_order_expansion_near_half() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.gen_range(3..=12);
            let count = rng.gen_range(1..=20);
            let vals: Vec<u64> = (0..count).map(|_| rng.gen_range(0..1u64 << n)).collect();
            let d = distance_distribution(&ps(n, &vals));
            let s = d.size().to_f64().unwrap();
            let two_n = 2f64.powi(n as i32);
            let moment: f64 = d
                .coeffs()
                .iter()
                .enumerate()
                .map(|(i, a)| i as f64 * a.to_f64().unwrap())
                .sum();
            let mut errs = Vec::new();
            for eps in [1e-4, 1e-5] {
                let p = d.collision_probability(0.5 - eps).unwrap();
                let linear = s / two_n * (1.0 + 2.0 * n as f64 * eps) - 4.0 * eps / (s * two_n) * moment;
                errs.push((p - linear).abs() * two_n / s);
            }
            // Remainder is O(eps^2): shrinking eps tenfold shrinks it ~100x.
            assert!(errs[0] < 1e-5, "{errs:?}");
            assert!(errs[1] < errs[0] / 50.0 + 1e-12, "{errs:?}");
        }
    }

    proptest! {
        #[test]
        fn coefficient_route_matches_pair_sum(
            n in 1usize..=16,
            raw in proptest::collection::vec(any::<u64>(), 1..=64),
            gamma in 0.0f64..0.4999,
        ) {
            let vals: Vec<u64> = raw.iter().map(|v| v & ((1u64 << n) - 1)).collect();
            let s = ps(n, &vals);
            let d = distance_distribution(&s);
            let total: BigUint = d.coeffs().iter().sum();
            prop_assert_eq!(total, BigUint::from(s.len() * s.len()));
            prop_assert_eq!(d.coeff(0), &BigUint::from(s.len()));
            let fast = d.collision_probability(gamma).unwrap();
            let slow = pair_sum_probability(&s, gamma);
            prop_assert!((fast - slow).abs() <= 1e-12 * slow, "{} vs {}", fast, slow);
            let floor = (1.0 - gamma).powi(n as i32);
            if s.len() == 1 {
                prop_assert!((fast - floor).abs() <= 1e-12 * floor);
            } else if gamma > 0.0 {
                prop_assert!(fast > floor);
            }
        }
    }
}
