//! Binary block codes with complete translation-invariant decoders, and the
//! hashes and zero-sets they induce.

pub mod gf2;
pub mod syndrome;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::distdist::{distance_distribution, DistDist, PointSet};
use crate::error::{Error, Result};
use crate::word::Word;

pub use syndrome::{SyndromeTable, MAX_REDUNDANCY};

/// Largest length for which a zero-set is materialized.
pub const MAX_ZERO_SET_N: usize = 28;

/// Generator polynomial of the binary Golay code, x^11+x^10+x^6+x^5+x^4+x^2+1.
pub const GOLAY_GENERATOR: u64 = 0xC75;

#[derive(Debug, Clone)]
pub enum Decoder {
    /// Zero every coordinate after the first `k`.
    Projection,
    /// Syndrome read directly as the index of the flipped coordinate.
    Hamming { m: usize },
    Syndrome(Box<SyndromeTable>),
    /// Blockwise decoding on a split after the first code's length.
    Concat(Box<BlockCode>, Box<BlockCode>),
}

#[derive(Debug, Clone)]
pub struct BlockCode {
    n: usize,
    k: usize,
    /// Generator in reduced row echelon form.
    generator: Vec<Word>,
    /// Pivot coordinate of each generator row.
    pivots: Vec<usize>,
    decoder: Decoder,
    label: String,
}

impl BlockCode {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn generator(&self) -> &[Word] {
        &self.generator
    }

    pub fn decoder(&self) -> &Decoder {
        &self.decoder
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> BlockCode {
        self.label = label.into();
        self
    }

    fn check_dim(&self, v: &Word) -> Result<()> {
        if v.n() != self.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: v.n(),
            });
        }
        Ok(())
    }

    /// Nearest codeword under this code's decoder.
    pub fn decode(&self, v: &Word) -> Result<Word> {
        self.check_dim(v)?;
        Ok(match &self.decoder {
            Decoder::Projection => {
                let mut c = v.clone();
                for i in self.k + 1..=self.n {
                    c.set(i, false)?;
                }
                c
            }
            Decoder::Hamming { .. } => {
                let s = v.ones().fold(0usize, |acc, c| acc ^ c);
                let mut c = v.clone();
                if s != 0 {
                    c.flip(s)?;
                }
                c
            }
            Decoder::Syndrome(t) => v.xor(t.leader(t.syndrome(v)))?,
            Decoder::Concat(a, b) => {
                let (hi, lo) = v.split(a.n)?;
                a.decode(&hi)?.concat(&b.decode(&lo)?)?
            }
        })
    }

    /// Information bits of a codeword: its values at the generator pivots.
    pub fn info(&self, c: &Word) -> Result<Word> {
        self.check_dim(c)?;
        let mut out = Word::zero(self.k);
        for (r, &p) in self.pivots.iter().enumerate() {
            if c.get(p)? {
                out.set(r + 1, true)?;
            }
        }
        Ok(out)
    }

    /// Codeword with the given information bits.
    pub fn encode(&self, info: &Word) -> Result<Word> {
        if info.n() != self.k {
            return Err(Error::DimensionMismatch {
                left: self.k,
                right: info.n(),
            });
        }
        let mut c = Word::zero(self.n);
        for r in info.ones() {
            c.xor_assign(&self.generator[r - 1])?;
        }
        Ok(c)
    }

    /// The k-bit hash label of `v`.
    pub fn hash(&self, v: &Word) -> Result<Word> {
        self.info(&self.decode(v)?)
    }

    pub fn is_codeword(&self, v: &Word) -> Result<bool> {
        Ok(self.encode(&self.info(v)?)? == *v)
    }

    /// Decoding on the integer encoding, for `n <= 64`.
    pub fn decode_u64(&self, v: u64) -> u64 {
        debug_assert!(self.n <= 64);
        match &self.decoder {
            Decoder::Projection => {
                let r = self.n - self.k;
                if r == 64 {
                    0
                } else {
                    v & !((1u64 << r) - 1)
                }
            }
            Decoder::Hamming { .. } => {
                let mut s = 0usize;
                let mut bits = v;
                while bits != 0 {
                    let b = bits.trailing_zeros() as usize;
                    s ^= self.n - b;
                    bits &= bits - 1;
                }
                if s == 0 {
                    v
                } else {
                    v ^ (1u64 << (self.n - s))
                }
            }
            Decoder::Syndrome(t) => v ^ t.leader_u64(t.syndrome_u64(v)),
            Decoder::Concat(a, b) => {
                let nb = b.n;
                let lo_mask = if nb == 64 { u64::MAX } else { (1u64 << nb) - 1 };
                let hi = if nb == 64 { 0 } else { v >> nb };
                let lo = v & lo_mask;
                let dh = a.decode_u64(hi);
                let dl = b.decode_u64(lo);
                if nb == 64 {
                    dl
                } else {
                    (dh << nb) | dl
                }
            }
        }
    }

    /// Hash label on the integer encoding, for `n <= 64`.
    pub fn hash_u64(&self, v: u64) -> u64 {
        let c = self.decode_u64(v);
        if let Decoder::Projection = self.decoder {
            return if self.k == 0 { 0 } else { c >> (self.n - self.k) };
        }
        let mut out = 0u64;
        for (r, &p) in self.pivots.iter().enumerate() {
            if (c >> (self.n - p)) & 1 == 1 {
                out |= 1u64 << (self.k - 1 - r);
            }
        }
        out
    }

    /// `{v : decode(v) = 0}`, built from the decoder's structure.
    pub fn zero_set(&self) -> Result<PointSet> {
        if self.n > MAX_ZERO_SET_N {
            return Err(Error::TooLarge {
                what: format!("zero-set of a length-{} code", self.n),
                limit: MAX_ZERO_SET_N as u64,
            });
        }
        self.zero_set_unchecked()
    }

    fn zero_set_unchecked(&self) -> Result<PointSet> {
        let n = self.n;
        match &self.decoder {
            Decoder::Projection => {
                let r = n - self.k;
                let v: Vec<u64> = (0..1u64 << r).collect();
                PointSet::from_u64s(n, &v)
            }
            Decoder::Hamming { .. } => {
                let mut v = vec![0u64];
                v.extend((0..n).map(|b| 1u64 << b));
                PointSet::from_u64s(n, &v)
            }
            Decoder::Syndrome(t) => PointSet::new(t.leaders().to_vec()),
            Decoder::Concat(a, b) => a.zero_set_unchecked()?.product(&b.zero_set_unchecked()?),
        }
    }

    /// Zero-set by decoding every vector; only for small `n`.
    pub fn zero_set_exhaustive(&self) -> Result<PointSet> {
        if self.n > 24 {
            return Err(Error::TooLarge {
                what: "exhaustive zero-set".into(),
                limit: 24,
            });
        }
        let v: Vec<u64> = (0..1u64 << self.n)
            .filter(|&v| self.decode_u64(v) == 0)
            .collect();
        PointSet::from_u64s(self.n, &v)
    }

    /// Pair-distance distribution of the zero-set.
    pub fn dist_dist(&self) -> Result<DistDist> {
        match &self.decoder {
            Decoder::Projection => DistDist::subcube(self.n, self.n - self.k),
            Decoder::Hamming { .. } => DistDist::one_sphere(self.n),
            Decoder::Syndrome(t) => {
                if t.redundancy() > 16 {
                    return Err(Error::TooLarge {
                        what: "pairwise distance distribution of a syndrome zero-set".into(),
                        limit: 1 << 16,
                    });
                }
                Ok(distance_distribution(&PointSet::new(t.leaders().to_vec())?))
            }
            Decoder::Concat(a, b) => a.dist_dist()?.product(&b.dist_dist()?),
        }
    }

    /// Collision probability of the hash for error probability `gamma`.
    pub fn collision_probability(&self, gamma: f64) -> Result<f64> {
        self.dist_dist()?.collision_probability(gamma)
    }
}

impl fmt::Display for BlockCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{},{}]", self.label, self.n, self.k)
    }
}

/// The code whose decoder keeps the first `k` coordinates.
pub fn projection_code(n: usize, k: usize) -> Result<BlockCode> {
    if k == 0 || k > n || n > 64 * 16 {
        return Err(Error::InvalidParameter(format!(
            "projection code needs 1 <= k <= n, got n={n}, k={k}"
        )));
    }
    let generator: Vec<Word> = (1..=k).map(|i| Word::unit(n, i)).collect::<Result<_>>()?;
    Ok(BlockCode {
        n,
        k,
        generator,
        pivots: (1..=k).collect(),
        decoder: Decoder::Projection,
        label: format!("projection({n},{k})"),
    })
}

/// Parity-check rows whose coordinate `c` column is the binary form of `c`.
fn hamming_parity_check(m: usize) -> Vec<Word> {
    let n = (1 << m) - 1;
    (0..m)
        .map(|r| {
            let mut h = Word::zero(n);
            for c in 1..=n {
                if (c >> r) & 1 == 1 {
                    h.set(c, true).unwrap();
                }
            }
            h
        })
        .collect()
}

pub fn hamming_code(m: usize) -> Result<BlockCode> {
    if !(2..=7).contains(&m) {
        return Err(Error::InvalidParameter(format!(
            "Hamming parameter m must lie in 2..=7, got {m}"
        )));
    }
    let n = (1 << m) - 1;
    let h = hamming_parity_check(m);
    let (hr, hp) = gf2::rref(&h)?;
    let (generator, pivots) = gf2::rref(&gf2::dual_basis(n, &hr, &hp))?;
    Ok(BlockCode {
        n,
        k: n - m,
        generator,
        pivots,
        decoder: Decoder::Hamming { m },
        label: format!("hamming({m})"),
    })
}

/// Generator rows of the cyclic code with generator polynomial `g`
/// (bit i = coefficient of x^i); coordinate j+1 carries x^j.
pub fn cyclic_generator(n: usize, g: u64) -> Result<Vec<Word>> {
    if g == 0 || g & 1 == 0 {
        return Err(Error::InvalidParameter(
            "cyclic generator polynomial must have a nonzero constant term".into(),
        ));
    }
    let deg = 63 - g.leading_zeros() as usize;
    if deg >= n {
        return Err(Error::InvalidParameter(format!(
            "generator degree {deg} must be below length {n}"
        )));
    }
    let k = n - deg;
    (0..k)
        .map(|shift| {
            let mut w = Word::zero(n);
            for j in 0..=deg {
                if (g >> j) & 1 == 1 {
                    w.set(j + shift + 1, true)?;
                }
            }
            Ok(w)
        })
        .collect()
}

pub fn golay_code() -> BlockCode {
    linear_code(&cyclic_generator(23, GOLAY_GENERATOR).unwrap())
        .unwrap()
        .with_label("golay")
}

/// Code with syndrome decoding for an arbitrary generator.
pub fn linear_code(generator: &[Word]) -> Result<BlockCode> {
    let Some(first) = generator.first() else {
        return Err(Error::InvalidParameter("generator has no rows".into()));
    };
    let n = first.n();
    let k = generator.len();
    if n - k.min(n) > MAX_REDUNDANCY {
        return Err(Error::TooLarge {
            what: format!("syndrome table for n-k = {}", n - k),
            limit: MAX_REDUNDANCY as u64,
        });
    }
    let (rows, pivots) = gf2::rref(generator)?;
    let h = gf2::dual_basis(n, &rows, &pivots);
    let table = SyndromeTable::new(n, h)?;
    Ok(BlockCode {
        n,
        k,
        generator: rows,
        pivots,
        decoder: Decoder::Syndrome(Box::new(table)),
        label: format!("linear({n},{k})"),
    })
}

pub fn concatenate(a: BlockCode, b: BlockCode) -> Result<BlockCode> {
    let n = a.n + b.n;
    let k = a.k + b.k;
    let mut generator = Vec::with_capacity(k);
    for g in &a.generator {
        generator.push(g.concat(&Word::zero(b.n))?);
    }
    for g in &b.generator {
        generator.push(Word::zero(a.n).concat(g)?);
    }
    let mut pivots = a.pivots.clone();
    pivots.extend(b.pivots.iter().map(|p| p + a.n));
    let label = format!("{}+{}", a.label, b.label);
    Ok(BlockCode {
        n,
        k,
        generator,
        pivots,
        decoder: Decoder::Concat(Box::new(a), Box::new(b)),
        label,
    })
}

/// Parses a generator matrix: a line "n k" followed by `k` rows of `n`
/// characters from {0,1}. Blank lines and `#` comments are ignored.
pub fn parse_generator(text: &str) -> Result<Vec<Word>> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty generator file".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad header {header:?}"))))
        .collect::<Result<_>>()?;
    let [n, k] = dims[..] else {
        return Err(Error::Parse(format!("header must be \"n k\", got {header:?}")));
    };
    let mut rows = Vec::with_capacity(k);
    for line in lines {
        if line.len() != n {
            return Err(Error::Parse(format!(
                "row {} has length {}, expected {n}",
                rows.len() + 1,
                line.len()
            )));
        }
        let mut w = Word::zero(n);
        for (i, ch) in line.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => w.set(i + 1, true)?,
                _ => return Err(Error::Parse(format!("invalid character {ch:?}"))),
            }
        }
        rows.push(w);
    }
    if rows.len() != k {
        return Err(Error::Parse(format!("expected {k} rows, found {}", rows.len())));
    }
    Ok(rows)
}

pub fn load_generator(path: &Path) -> Result<Vec<Word>> {
    parse_generator(&std::fs::read_to_string(path)?)
}

/// Renders a generator in the format read by [`parse_generator`].
pub fn format_generator(rows: &[Word]) -> String {
    let n = rows.first().map_or(0, Word::n);
    let mut s = format!("{n} {}\n", rows.len());
    for r in rows {
        for i in 1..=n {
            s.push(if r.get(i).unwrap() { '1' } else { '0' });
        }
        s.push('\n');
    }
    s
}

/// A textual code description: `projection:n,k`, `hamming:m`, `golay`,
/// `file:PATH`, or `concat:A+B+...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeSpec {
    Projection { n: usize, k: usize },
    Hamming { m: usize },
    Golay,
    File(String),
    Concat(Vec<CodeSpec>),
}

impl CodeSpec {
    pub fn build(&self) -> Result<BlockCode> {
        match self {
            CodeSpec::Projection { n, k } => projection_code(*n, *k),
            CodeSpec::Hamming { m } => hamming_code(*m),
            CodeSpec::Golay => Ok(golay_code()),
            CodeSpec::File(p) => Ok(linear_code(&load_generator(Path::new(p))?)?.with_label(p.clone())),
            CodeSpec::Concat(parts) => {
                let mut it = parts.iter();
                let mut acc = it
                    .next()
                    .ok_or_else(|| Error::Parse("empty concatenation".into()))?
                    .build()?;
                for p in it {
                    acc = concatenate(acc, p.build()?)?;
                }
                Ok(acc)
            }
        }
    }

    fn parse_simple(s: &str) -> Result<CodeSpec> {
        let bad = || Error::Parse(format!("unrecognised code spec {s:?}"));
        let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
        match kind.trim() {
            "golay" if arg.is_empty() => Ok(CodeSpec::Golay),
            "hamming" => Ok(CodeSpec::Hamming {
                m: arg.trim().parse().map_err(|_| bad())?,
            }),
            "projection" => {
                let (n, k) = arg.split_once(',').ok_or_else(bad)?;
                Ok(CodeSpec::Projection {
                    n: n.trim().parse().map_err(|_| bad())?,
                    k: k.trim().parse().map_err(|_| bad())?,
                })
            }
            "file" if !arg.is_empty() => Ok(CodeSpec::File(arg.to_string())),
            _ => Err(bad()),
        }
    }
}

impl FromStr for CodeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<CodeSpec> {
        let s = s.trim();
        match s.strip_prefix("concat:") {
            Some(rest) => Ok(CodeSpec::Concat(
                rest.split('+').map(CodeSpec::parse_simple).collect::<Result<_>>()?,
            )),
            None => CodeSpec::parse_simple(s),
        }
    }
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeSpec::Projection { n, k } => write!(f, "projection:{n},{k}"),
            CodeSpec::Hamming { m } => write!(f, "hamming:{m}"),
            CodeSpec::Golay => write!(f, "golay"),
            CodeSpec::File(p) => write!(f, "file:{p}"),
            CodeSpec::Concat(parts) => {
                write!(f, "concat:")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, "+")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
        }
    }
}

/// Minimum Hamming weight of a nonzero codeword, by enumerating all `2^k`
/// codewords.
pub fn minimum_distance(code: &BlockCode) -> Result<usize> {
    if code.k > 24 {
        return Err(Error::TooLarge {
            what: "codeword enumeration".into(),
            limit: 24,
        });
    }
    let mut best = code.n;
    let mut c = Word::zero(code.n);
    // Gray-code walk over the row space.
    for i in 1u64..1 << code.k {
        let row = i.trailing_zeros() as usize;
        c.xor_assign(&code.generator[row])?;
        best = best.min(c.weight());
    }
    Ok(best)
}

/// BCH generators shipped as data files, by name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("bch15_7", include_str!("../../data/bch15_7.gen")),
    ("bch15_5", include_str!("../../data/bch15_5.gen")),
    ("bch31_21", include_str!("../../data/bch31_21.gen")),
    ("bch31_16", include_str!("../../data/bch31_16.gen")),
];

pub fn bundled_code(name: &str) -> Result<BlockCode> {
    let (_, text) = BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::InvalidParameter(format!("no bundled code named {name:?}")))?;
    Ok(linear_code(&parse_generator(text)?)?.with_label(name))
}
