//! Exhaustive search over every point set of a given size in a tiny cube,
//! used to confirm that subcubes maximize collision probability when the
//! error rate is small.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest dimension the exhaustive search accepts.
pub const MAX_BRUTE_N: usize = 6;
/// Upper bound on the number of subsets examined.
pub const MAX_SUBSETS: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubcubeCheck {
    pub n: usize,
    pub k: usize,
    pub size: usize,
    /// Error rate as the fraction `gamma_num / gamma_den`.
    pub gamma_num: u64,
    pub gamma_den: u64,
    pub subsets: u64,
    /// Subsets attaining the maximum.
    pub maximizers: u64,
    /// Maximizers that are translates of coordinate subcubes.
    pub subcube_maximizers: u64,
    /// Number of translated coordinate subcubes of this size.
    pub subcubes: u64,
}

impl SubcubeCheck {
    /// Every maximizer is a subcube and every subcube is a maximizer.
    pub fn strict(&self) -> bool {
        self.maximizers == self.subcube_maximizers && self.maximizers == self.subcubes
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

fn is_translated_subcube(set: &[u64]) -> bool {
    let base = set[0];
    let span = set.iter().fold(0, |acc, &x| acc | (x ^ base));
    1usize << span.count_ones() == set.len()
}

/// Scores every subset of `2^(n-k)` points of F₂ⁿ by the exact value of
/// `sum_i A_i p^i (q-p)^(n-i)`, which orders sets by collision probability
/// at `gamma = p/q`.
pub fn subcube_optimality(n: usize, k: usize, gamma_num: u64, gamma_den: u64) -> Result<SubcubeCheck> {
    if n == 0 || n > MAX_BRUTE_N || k >= n {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= k < n <= {MAX_BRUTE_N}, got n={n}, k={k}"
        )));
    }
    if gamma_num == 0 || 2 * gamma_num >= gamma_den || gamma_den > 1 << 16 {
        return Err(Error::InvalidProbability(gamma_num as f64 / gamma_den as f64));
    }
    let points = 1u64 << n;
    let size = 1usize << (n - k);
    let subsets = binomial(points, size as u64);
    if subsets > MAX_SUBSETS {
        return Err(Error::TooLarge {
            what: "subsets to examine".into(),
            limit: MAX_SUBSETS,
        });
    }
    let weights: Vec<u128> = (0..=n)
        .map(|i| (gamma_num as u128).pow(i as u32) * ((gamma_den - gamma_num) as u128).pow((n - i) as u32))
        .collect();

    let mut idx: Vec<u64> = (0..size as u64).collect();
    let mut best = 0u128;
    let mut maximizers = 0;
    let mut subcube_maximizers = 0;
    loop {
        let mut value = 0u128;
        for (a, &x) in idx.iter().enumerate() {
            for &y in &idx[..a] {
                value += 2 * weights[(x ^ y).count_ones() as usize];
            }
        }
        if value >= best {
            if value > best {
                best = value;
                maximizers = 0;
                subcube_maximizers = 0;
            }
            maximizers += 1;
            subcube_maximizers += is_translated_subcube(&idx) as u64;
        }
        // Next combination in lexicographic order.
        let mut i = size;
        while i > 0 && idx[i - 1] == points - (size - i + 1) as u64 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        idx[i - 1] += 1;
        for j in i..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
    Ok(SubcubeCheck {
        n,
        k,
        size,
        gamma_num,
        gamma_den,
        subsets,
        maximizers,
        subcube_maximizers,
        subcubes: binomial(n as u64, (n - k) as u64) << k,
    })
}
