//! Points of the n-cube.
//!
//! A [`Word`] is a vector in F₂ⁿ. Coordinates are numbered `1..=n` and
//! coordinate 1 is the most significant bit of the integer encoding, so the
//! word with integer value `x` has `x_{n-i} = (x >> i) & 1`. Every generator
//! literal in the optimal-set tables decodes under this convention.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::distributions::{Bernoulli, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 1024;

/// Name of the generator used for every random draw in the crate.
pub const RNG_NAME: &str = "ChaCha8";

type Limbs = SmallVec<[u64; 1]>;

/// A binary vector of fixed dimension. Bits at integer positions `>= n` are
/// always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word {
    n: usize,
    limbs: Limbs,
}

fn limb_count(n: usize) -> usize {
    n.div_ceil(64)
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::InvalidParameter(format!(
            "dimension {n} not in 1..={MAX_DIM}"
        )));
    }
    Ok(())
}

impl Word {
    /// The zero vector.
    ///
    /// Panics if `n` is not in `1..=MAX_DIM`.
    pub fn zero(n: usize) -> Word {
        check_dim(n).expect("invalid dimension");
        Word {
            n,
            limbs: smallvec![0; limb_count(n)],
        }
    }

    pub fn from_u64(n: usize, value: u64) -> Result<Word> {
        check_dim(n)?;
        if n < 64 && value >> n != 0 {
            return Err(Error::InvalidParameter(format!(
                "value {value:#x} does not fit in {n} bits"
            )));
        }
        let mut w = Word::zero(n);
        w.limbs[0] = value;
        Ok(w)
    }

    /// Builds a word from little-endian 64-bit limbs of the integer encoding.
    pub fn from_limbs(n: usize, limbs: &[u64]) -> Result<Word> {
        check_dim(n)?;
        let mut w = Word::zero(n);
        for (i, &l) in limbs.iter().enumerate() {
            if i >= w.limbs.len() {
                if l != 0 {
                    return Err(Error::InvalidParameter(format!(
                        "value does not fit in {n} bits"
                    )));
                }
                continue;
            }
            w.limbs[i] = l;
        }
        if w.top_mask_violated() {
            return Err(Error::InvalidParameter(format!(
                "value does not fit in {n} bits"
            )));
        }
        Ok(w)
    }

    /// Unit vector with a one at coordinate `i`.
    pub fn unit(n: usize, i: usize) -> Result<Word> {
        let mut w = Word::zero(n);
        w.set(i, true)?;
        Ok(w)
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Word {
        let mut w = Word::zero(n);
        for l in w.limbs.iter_mut() {
            *l = rng.gen();
        }
        w.clear_top();
        w
    }

    fn top_mask_violated(&self) -> bool {
        let rem = self.n % 64;
        rem != 0 && self.limbs[self.limbs.len() - 1] >> rem != 0
    }

    fn clear_top(&mut self) {
        let rem = self.n % 64;
        if rem != 0 {
            let last = self.limbs.len() - 1;
            self.limbs[last] &= (1u64 << rem) - 1;
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Little-endian limbs of the integer encoding.
    #[inline]
    pub fn limbs(&self) -> &[u64] {
        &self.limbs
    }

    /// Integer encoding, if it fits a single machine word.
    #[inline]
    pub fn as_u64(&self) -> Option<u64> {
        (self.n <= 64).then(|| self.limbs[0])
    }

    fn check_coord(&self, i: usize) -> Result<usize> {
        if i == 0 || i > self.n {
            return Err(Error::IndexOutOfRange { index: i, n: self.n });
        }
        Ok(self.n - i)
    }

    #[inline]
    fn int_bit(&self, b: usize) -> bool {
        (self.limbs[b / 64] >> (b % 64)) & 1 == 1
    }

    #[inline]
    fn set_int_bit(&mut self, b: usize, v: bool) {
        let mask = 1u64 << (b % 64);
        if v {
            self.limbs[b / 64] |= mask;
        } else {
            self.limbs[b / 64] &= !mask;
        }
    }

    /// Value of coordinate `i` (1-based).
    pub fn get(&self, i: usize) -> Result<bool> {
        let b = self.check_coord(i)?;
        Ok(self.int_bit(b))
    }

    pub fn set(&mut self, i: usize, v: bool) -> Result<()> {
        let b = self.check_coord(i)?;
        self.set_int_bit(b, v);
        Ok(())
    }

    pub fn flip(&mut self, i: usize) -> Result<()> {
        let b = self.check_coord(i)?;
        self.limbs[b / 64] ^= 1u64 << (b % 64);
        Ok(())
    }

    pub fn weight(&self) -> usize {
        self.limbs.iter().map(|l| l.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&l| l == 0)
    }

    /// Coordinates (1-based, increasing) holding a one.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        let n = self.n;
        (0..n).rev().filter(move |&b| self.int_bit(b)).map(move |b| n - b)
    }

    /// Coordinate-wise sum over F₂.
    pub fn xor(&self, other: &Word) -> Result<Word> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    pub fn xor_assign(&mut self, other: &Word) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        for (a, b) in self.limbs.iter_mut().zip(other.limbs.iter()) {
            *a ^= b;
        }
        Ok(())
    }

    pub fn and(&self, other: &Word) -> Result<Word> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let mut out = self.clone();
        for (a, b) in out.limbs.iter_mut().zip(other.limbs.iter()) {
            *a &= b;
        }
        Ok(out)
    }

    /// Splits into the first `head` coordinates and the remaining ones.
    pub fn split(&self, head: usize) -> Result<(Word, Word)> {
        if head == 0 || head >= self.n {
            return Err(Error::IndexOutOfRange {
                index: head,
                n: self.n,
            });
        }
        let tail = self.n - head;
        let mut hi = Word::zero(head);
        let mut lo = Word::zero(tail);
        for b in 0..tail {
            if self.int_bit(b) {
                lo.set_int_bit(b, true);
            }
        }
        for b in 0..head {
            if self.int_bit(b + tail) {
                hi.set_int_bit(b, true);
            }
        }
        Ok((hi, lo))
    }

    /// Concatenation with `self` occupying the leading coordinates.
    pub fn concat(&self, tail: &Word) -> Result<Word> {
        let n = self.n + tail.n;
        check_dim(n)?;
        let mut out = Word::zero(n);
        for b in 0..tail.n {
            if tail.int_bit(b) {
                out.set_int_bit(b, true);
            }
        }
        for b in 0..self.n {
            if self.int_bit(b) {
                out.set_int_bit(b + tail.n, true);
            }
        }
        Ok(out)
    }

    /// Lowercase hex of the integer encoding, without the dimension prefix.
    pub fn hex(&self) -> String {
        let mut s = String::new();
        for (i, l) in self.limbs.iter().enumerate().rev() {
            if s.is_empty() {
                if *l != 0 || i == 0 {
                    s = format!("{l:x}");
                }
            } else {
                s.push_str(&format!("{l:016x}"));
            }
        }
        s
    }

    /// Parses a hex integer (no prefix) as a word of dimension `n`.
    pub fn from_hex(n: usize, hex: &str) -> Result<Word> {
        check_dim(n)?;
        let hex = hex.trim();
        if hex.is_empty() || !hex.chars().all(|c| c.is_ascii_hexdigit()) {
            return Err(Error::Parse(format!("bad hex literal {hex:?}")));
        }
        let digits: Vec<u64> = hex
            .chars()
            .rev()
            .map(|c| c.to_digit(16).unwrap() as u64)
            .collect();
        let mut limbs = vec![0u64; digits.len().div_ceil(16)];
        for (i, d) in digits.iter().enumerate() {
            limbs[i / 16] |= d << (4 * (i % 16));
        }
        Word::from_limbs(n, &limbs)
    }
}

impl Ord for Word {
    /// Orders by dimension, then by integer encoding.
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.limbs.iter().rev().cmp(other.limbs.iter().rev()))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.n, self.hex())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Parses `"n:hex"`, e.g. `"15:4003"`.
    fn from_str(s: &str) -> Result<Word> {
        let (n, hex) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected n:hex, got {s:?}")))?;
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad dimension in {s:?}")))?;
        Word::from_hex(n, hex)
    }
}

/// Number of coordinates in which `x` and `y` differ.
pub fn hamming_distance(x: &Word, y: &Word) -> Result<usize> {
    if x.n != y.n {
        return Err(Error::DimensionMismatch {
            left: x.n,
            right: y.n,
        });
    }
    Ok(x.limbs
        .iter()
        .zip(y.limbs.iter())
        .map(|(a, b)| (a ^ b).count_ones() as usize)
        .sum())
}

/// `x` with coordinate `i` cleared.
pub fn rho(x: &Word, i: usize) -> Result<Word> {
    let mut out = x.clone();
    out.set(i, false)?;
    Ok(out)
}

/// Swaps coordinates `i < j` when `x_i = 1`; otherwise returns `x`.
///
/// Only the first of the two coordinates is inspected, so a one moves from
/// the earlier coordinate to the later one and never the other way.
pub fn sigma(x: &Word, i: usize, j: usize) -> Result<Word> {
    let bi = x.check_coord(i)?;
    let bj = x.check_coord(j)?;
    if i >= j {
        return Err(Error::InvalidParameter(format!(
            "sigma needs i < j, got i={i}, j={j}"
        )));
    }
    let mut out = x.clone();
    if x.int_bit(bi) {
        let vj = x.int_bit(bj);
        out.set_int_bit(bi, vj);
        out.set_int_bit(bj, true);
    }
    Ok(out)
}

/// Binary symmetric channel parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorModel {
    gamma: f64,
    seed: u64,
}

impl ErrorModel {
    pub fn new(gamma: f64, seed: u64) -> Result<ErrorModel> {
        if !(0.0..0.5).contains(&gamma) {
            return Err(Error::InvalidProbability(gamma));
        }
        Ok(ErrorModel { gamma, seed })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Error vector whose bits are independently one with probability `gamma`.
pub fn sample_error<R: Rng + ?Sized>(n: usize, gamma: f64, rng: &mut R) -> Word {
    let mut e = Word::zero(n);
    if gamma <= 0.0 {
        return e;
    }
    let coin = Bernoulli::new(gamma).expect("gamma validated by caller");
    for b in 0..n {
        if coin.sample(rng) {
            e.set_int_bit(b, true);
        }
    }
    e
}

/// `x + e` for an error vector drawn from `model`. Pure in `(x, gamma, seed)`.
pub fn apply_error(x: &Word, model: &ErrorModel) -> Word {
    let mut rng = model.rng();
    let e = sample_error(x.n, model.gamma, &mut rng);
    x.xor(&e).expect("same dimension")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(n: usize, v: u64) -> Word {
        Word::from_u64(n, v).unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(hamming_distance(&w(4, 0), &w(4, 0)).unwrap(), 0);
        assert_eq!(hamming_distance(&w(4, 0b1010), &w(4, 0b0101)).unwrap(), 4);
        assert_eq!(hamming_distance(&w(4, 0b1100), &w(4, 0b1010)).unwrap(), 2);
        assert!(matches!(
            hamming_distance(&w(4, 0), &w(5, 0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn coordinate_one_is_most_significant() {
        let x = w(15, (1 << 14) + 3);
        assert!(x.get(1).unwrap());
        assert!(!x.get(2).unwrap());
        assert!(x.get(14).unwrap() && x.get(15).unwrap());
        assert_eq!(x.ones().collect::<Vec<_>>(), vec![1, 14, 15]);
        assert_eq!(x.to_string(), "15:4003");
        assert_eq!("15:4003".parse::<Word>().unwrap(), x);
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(&w(3, 0b111), 2).unwrap(), w(3, 0b101));
        assert_eq!(rho(&w(3, 0), 1).unwrap(), w(3, 0));
        assert!(matches!(
            rho(&w(3, 0), 4),
            Err(Error::IndexOutOfRange { index: 4, n: 3 })
        ));
        assert!(rho(&w(3, 0), 0).is_err());
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(&w(2, 0b10), 1, 2).unwrap(), w(2, 0b01));
        assert_eq!(sigma(&w(2, 0b01), 1, 2).unwrap(), w(2, 0b01));
        assert_eq!(sigma(&w(2, 0b11), 1, 2).unwrap(), w(2, 0b11));
        assert!(sigma(&w(2, 0b11), 2, 1).is_err());
        assert!(sigma(&w(2, 0b11), 1, 3).is_err());
    }

    #[test]
    fn zero_noise_is_identity() {
        let x = w(20, 0xabcde);
        for seed in 0..10 {
            let m = ErrorModel::new(0.0, seed).unwrap();
            assert_eq!(apply_error(&x, &m), x);
        }
    }

    #[test]
    fn error_model_rejects_half() {
        assert!(ErrorModel::new(0.5, 0).is_err());
        assert!(ErrorModel::new(-0.1, 0).is_err());
        assert!(ErrorModel::new(0.49, 0).is_ok());
    }

    #[test]
    fn error_is_deterministic() {
        let x = Word::zero(300);
        let m = ErrorModel::new(0.3, 99).unwrap();
        assert_eq!(apply_error(&x, &m), apply_error(&x, &m));
        let m2 = ErrorModel::new(0.3, 100).unwrap();
        assert_ne!(apply_error(&x, &m), apply_error(&x, &m2));
    }

    #[test]
    fn error_weight_concentrates() {
        // Binomial(1000, 1/4): mean 250, variance 187.5 per trial.
        let n = 1000;
        let trials = 10_000;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let total: usize = (0..trials)
            .map(|_| sample_error(n, 0.25, &mut rng).weight())
            .sum();
        let mean = total as f64 / trials as f64;
        let sigma_of_mean = (187.5f64 / trials as f64).sqrt();
        assert!((mean - 250.0).abs() < 4.0 * sigma_of_mean, "mean {mean}");
    }

    #[test]
    fn wide_words_roundtrip_and_split() {
        let mut x = Word::zero(130);
        x.set(1, true).unwrap();
        x.set(70, true).unwrap();
        x.set(130, true).unwrap();
        let s = x.to_string();
        assert_eq!(s.parse::<Word>().unwrap(), x);
        let (hi, lo) = x.split(100).unwrap();
        assert_eq!(hi.ones().collect::<Vec<_>>(), vec![1, 70]);
        assert_eq!(lo.ones().collect::<Vec<_>>(), vec![30]);
        assert_eq!(hi.concat(&lo).unwrap(), x);
    }

    #[test]
    fn parse_rejects_overflow() {
        assert!("3:8".parse::<Word>().is_err());
        assert!("3:7".parse::<Word>().is_ok());
        assert!("3:g".parse::<Word>().is_err());
        assert!("0:0".parse::<Word>().is_err());
    }

    proptest! {
        #[test]
        fn distance_is_a_metric(a in any::<u64>(), b in any::<u64>(), c in any::<u64>(), n in 1usize..=64) {
            let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            let (x, y, z) = (w(n, a & mask), w(n, b & mask), w(n, c & mask));
            let dxy = hamming_distance(&x, &y).unwrap();
            let dyz = hamming_distance(&y, &z).unwrap();
            let dxz = hamming_distance(&x, &z).unwrap();
            prop_assert_eq!(dxy, hamming_distance(&y, &x).unwrap());
            prop_assert_eq!(dxy == 0, x == y);
            prop_assert!(dxz <= dxy + dyz);
        }

        #[test]
        fn rho_and_sigma_weights(v in any::<u64>(), n in 2usize..=64, i in 1usize..=64, j in 1usize..=64) {
            let v = if n == 64 { v } else { v & ((1u64 << n) - 1) };
            let x = w(n, v);
            let i = 1 + (i - 1) % n;
            let j = 1 + (j - 1) % n;
            let r = rho(&x, i).unwrap();
            prop_assert!(r.weight() <= x.weight());
            prop_assert_eq!(rho(&r, i).unwrap(), r.clone());
            if i < j {
                prop_assert_eq!(sigma(&x, i, j).unwrap().weight(), x.weight());
            }
        }

        #[test]
        fn hex_roundtrip(limbs in proptest::collection::vec(any::<u64>(), 1..4), n in 1usize..=256) {
            let mut x = Word::zero(n);
            for (b, l) in limbs.iter().enumerate() {
                for bit in 0..64 {
                    let coord_bit = b * 64 + bit;
                    if coord_bit < n && (l >> bit) & 1 == 1 {
                        x.set(n - coord_bit, true).unwrap();
                    }
                }
            }
            prop_assert_eq!(x.to_string().parse::<Word>().unwrap(), x);
        }
    }
}
