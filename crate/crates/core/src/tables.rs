//! Regeneration of the reference tables: Hamming crossovers, down-set
//! counts, and optimal sets of size 2^t.

use serde::Serialize;

use crate::analysis::crossover;
use crate::distdist::DistDist;
use crate::error::{Error, Result};
use crate::optsets::{count_rsds, optimal_table, GeneratorSet, OptimalRegimes};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HammingRow {
    pub m: usize,
    pub k: usize,
    pub gamma: f64,
}

/// Gamma above which the Hamming code of redundancy `m` beats projection
/// onto the same number of coordinates.
pub fn hamming_crossovers(ms: &[usize]) -> Result<Vec<HammingRow>> {
    ms.iter()
        .map(|&m| {
            let n = (1usize << m) - 1;
            let r = crossover(
                "hamming",
                &DistDist::one_sphere(n)?,
                "projection",
                &DistDist::subcube(n, m)?,
            )?;
            let first = r.first().ok_or_else(|| {
                Error::InvalidParameter(format!("no crossover found for m = {m}"))
            })?;
            Ok(HammingRow {
                m,
                k: n - m,
                gamma: first.gamma_cross,
            })
        })
        .collect()
}

pub fn table_i() -> Result<Vec<HammingRow>> {
    hamming_crossovers(&[4, 5, 6, 7])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CountRow {
    pub size: usize,
    pub count: u64,
}

/// Sizes listed in the count table; the last two take seconds rather than
/// milliseconds.
pub fn count_sizes(full: bool) -> Vec<usize> {
    let mut v: Vec<usize> = (2..=24).collect();
    v.push(32);
    if full {
        v.extend([48, 64]);
    }
    v
}

/// Right-shifted down-sets of each size, counted in dimension `size - 1`
/// where the counts stabilize.
pub fn table_iii(full: bool) -> Result<Vec<CountRow>> {
    count_sizes(full)
        .into_iter()
        .map(|size| {
            Ok(CountRow {
                size,
                count: count_rsds(size - 1, size)?,
            })
        })
        .collect()
}

/// One optimal distribution at one dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalRow {
    pub t: usize,
    pub n: usize,
    /// Start of the range of gamma on which this distribution is optimal.
    pub gamma_cross: f64,
    pub gamma_end: f64,
    pub ddf: DistDist,
    pub generators: Vec<GeneratorSet>,
    /// Not optimal anywhere in dimension `n - 1`.
    pub new: bool,
}

fn rows_for(table: &[OptimalRegimes], keep: impl Fn(usize) -> bool, full: bool) -> Vec<OptimalRow> {
    let mut out = Vec::new();
    let mut prev: Option<&OptimalRegimes> = None;
    for r in table {
        let seen = |d: &DistDist| {
            prev.is_some_and(|p| p.n + 1 == r.n && p.regimes.iter().any(|q| q.ddf.trimmed() == d.trimmed()))
        };
        if keep(r.n) {
            for g in &r.regimes {
                let new = !seen(&g.ddf);
                if full || new {
                    out.push(OptimalRow {
                        t: r.t,
                        n: r.n,
                        gamma_cross: g.gamma_lo,
                        gamma_end: g.gamma_hi,
                        ddf: g.ddf.clone(),
                        generators: g.representatives.clone(),
                        new,
                    });
                }
            }
        }
        prev = Some(r);
    }
    out
}

/// Optimal sets of size `2^t` for every `t <= n < 2^t`. Without `full`,
/// only distributions that are new at their dimension are listed.
pub fn optimal_rows(t: usize, full: bool) -> Result<Vec<OptimalRow>> {
    let dims: Vec<usize> = (t..1 << t).collect();
    Ok(rows_for(&optimal_table(t, &dims)?, |_| true, full))
}

/// Rows for selected dimensions only; each dimension's predecessor is
/// solved too so `new` is meaningful.
pub fn optimal_rows_at(t: usize, dims: &[usize], full: bool) -> Result<Vec<OptimalRow>> {
    let mut all: Vec<usize> = dims.iter().flat_map(|&n| [n.saturating_sub(1), n]).filter(|&n| n >= t).collect();
    all.sort_unstable();
    all.dedup();
    Ok(rows_for(&optimal_table(t, &all)?, |n| dims.contains(&n), full))
}

pub fn table_iv(full: bool) -> Result<Vec<OptimalRow>> {
    let mut out = Vec::new();
    for t in 1..=5 {
        out.extend(optimal_rows(t, full)?);
    }
    Ok(out)
}

/// Dimensions shown for size 64 unless the full table is requested. The
/// full table lists every regime at every dimension.
pub const TABLE_V_SPOT_DIMS: [usize; 4] = [12, 22, 28, 63];

pub fn table_v(full: bool) -> Result<Vec<OptimalRow>> {
    if full {
        optimal_rows(6, true)
    } else {
        optimal_rows_at(6, &TABLE_V_SPOT_DIMS, false)
    }
}

/// Dimensions at which some 64-point set beats every known code with the
/// same `k = n - 6`.
pub const TABLE_II_DIMS: [usize; 10] = [12, 13, 14, 15, 22, 23, 24, 25, 26, 27];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeatingRow {
    pub k: usize,
    pub n: usize,
    pub gamma_cross: f64,
    pub generators: Vec<GeneratorSet>,
}

/// The set optimal near gamma = 1/2 at each listed dimension.
pub fn table_ii() -> Result<Vec<BeatingRow>> {
    optimal_table(6, &TABLE_II_DIMS)?
        .into_iter()
        .map(|r| {
            let last = r.regimes.last().ok_or(Error::EmptySet)?;
            Ok(BeatingRow {
                k: r.n - 6,
                n: r.n,
                gamma_cross: last.gamma_lo,
                generators: last.representatives.clone(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamming_rows() {
        let rows = table_i().unwrap();
        let expect = [(4, 11, 0.2826), (5, 26, 0.1518), (6, 57, 0.0838), (7, 120, 0.0468)];
        for (r, (m, k, g)) in rows.iter().zip(expect) {
            assert_eq!((r.m, r.k), (m, k));
            assert!((r.gamma - g).abs() < 5e-5);
        }
    }

    #[test]
    fn small_counts() {
        let rows = table_iii(false).unwrap();
        assert_eq!(rows.len(), 24);
        assert_eq!(rows[0], CountRow { size: 2, count: 1 });
        assert_eq!(rows.last().unwrap(), &CountRow { size: 32, count: 3140 });
    }

    #[test]
    fn size_sixteen_rows() {
        let rows = optimal_rows(4, false).unwrap();
        let dims: Vec<usize> = rows.iter().map(|r| r.n).collect();
        assert_eq!(dims, vec![4, 12, 13, 14, 15]);
        assert_eq!(rows[0].gamma_cross, 0.0);
        assert_eq!(rows[1].generators.len(), 2);
        assert!((rows[4].gamma_cross - 0.2826).abs() < 5e-5);
        let full = optimal_rows(4, true).unwrap();
        assert!(full.len() > rows.len());
        assert!(full.iter().filter(|r| r.n == 11).all(|r| !r.new));
    }
}
