//! Which right-shifted down-sets maximize collision probability, and on
//! which ranges of the error probability.
//!
//! All sets of one size in one dimension share the factor `(1-g)^n / |S|`, so
//! they are ranked by their distance distribution polynomials `A(z)` alone.
//! Those polynomials do not depend on `n`, which lets a single enumeration in
//! the largest dimension serve every smaller one: a set lives in F₂ⁿ exactly
//! when its largest element has at most `n` bits.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use serde::Serialize;

use crate::distdist::{DistDist, PointSet};
use crate::error::{Error, Result};
use crate::optsets::genideal::{enumerate_rsds, enumerate_rsds_with_distances, generators_of, DISTANCE_SLOTS};
use crate::optsets::poset::MAX_TARGET;
use crate::optsets::GeneratorSet;
use crate::poly::{self, Bracket, IntPoly};

/// Largest exponent `t` for sets of size `2^t`.
pub const MAX_T: usize = 6;

/// Step of the scan that locates regime boundaries.
pub const REGIME_STEP: f64 = 1e-4;

/// Step of the coarse float scan that discards hopeless candidates.
const PREFILTER_STEP: f64 = 1e-3;

/// Slack below the pointwise maximum that still survives the prefilter, as a
/// fraction of the pointwise spread over all candidates.
const PREFILTER_SLACK: f64 = 1e-3;

const KEY_LEN: usize = DISTANCE_SLOTS;

/// Ordered-pair distance counts of a small set.
type Key = [u16; KEY_LEN];

fn ddf_key(elems: &[u64]) -> Key {
    let mut k = [0u16; KEY_LEN];
    k[0] = elems.len() as u16;
    for (i, &a) in elems.iter().enumerate() {
        for &b in &elems[i + 1..] {
            k[(a ^ b).count_ones() as usize] += 2;
        }
    }
    k
}

fn key_degree(k: &Key) -> usize {
    k.iter().rposition(|&c| c != 0).unwrap_or(0)
}

/// Difference of two keys, with a float sign test that falls back to exact
/// arithmetic when rounding could matter.
struct Diff {
    coeffs: Vec<i64>,
    exact: IntPoly,
}

impl Diff {
    fn new(a: &Key, b: &Key) -> Diff {
        let coeffs: Vec<i64> = a.iter().zip(b).map(|(&x, &y)| x as i64 - y as i64).collect();
        let exact = IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect());
        Diff { coeffs, exact }
    }

    fn sign_at(&self, p: u128) -> Ordering {
        let g = poly::from_dyadic(p);
        let z = g / (1.0 - g);
        let (mut v, mut mag) = (0.0f64, 0.0f64);
        for &c in self.coeffs.iter().rev() {
            v = v * z + c as f64;
            mag = mag * z + (c as f64).abs();
        }
        if v.abs() > mag * 1e-12 {
            v.partial_cmp(&0.0).unwrap()
        } else {
            self.exact.sign_at_gamma(p)
        }
    }
}

fn grid(step: f64) -> Vec<u128> {
    let steps = (0.5 / step).round() as usize;
    let mut g = vec![poly::to_dyadic(poly::EDGE)];
    g.extend((1..steps).map(|j| poly::to_dyadic(j as f64 * step)));
    g.push(poly::to_dyadic(0.5 - poly::EDGE));
    g
}

fn zeta_of(p: u128) -> f64 {
    let g = poly::from_dyadic(p);
    g / (1.0 - g)
}

/// Walks the upper envelope of `keys` from small to large gamma. Returns the
/// index of each successive winner and the bracket where it takes over.
fn envelope(keys: &[Key]) -> Vec<(usize, Option<Bracket>)> {
    let pts = grid(REGIME_STEP);
    let beats = |c: usize, w: usize, p: u128, next: u128| {
        let d = Diff::new(&keys[c], &keys[w]);
        match d.sign_at(p) {
            Ordering::Equal => d.sign_at(next) == Ordering::Greater,
            s => s == Ordering::Greater,
        }
    };
    let mut w = 0;
    for c in 1..keys.len() {
        if beats(c, w, pts[0], pts[1]) {
            w = c;
        }
    }
    let mut out = vec![(w, None)];
    let mut cur = pts[0];
    for _ in 0..4 * keys.len() + 4 {
        let mut found: Vec<(Bracket, usize)> = Vec::new();
        for c in (0..keys.len()).filter(|&c| c != w) {
            let d = Diff::new(&keys[c], &keys[w]);
            let sign = |p: u128| d.sign_at(p);
            let mut prev = (cur, sign(cur));
            for &g in pts.iter().filter(|&&g| g > cur) {
                let s = sign(g);
                if s == Ordering::Equal {
                    continue;
                }
                if prev.1 == Ordering::Equal {
                    prev = (g, s);
                    continue;
                }
                if prev.1 == Ordering::Less && s == Ordering::Greater {
                    found.push((poly::bisect(&sign, prev.0, g), c));
                    break;
                }
                prev = (g, s);
            }
        }
        let Some(first) = found.iter().map(|(b, _)| b.hi).min() else {
            break;
        };
        // Everything overtaking the incumbent within the first bracket
        // competes; the largest just after the crossing wins.
        let mut contenders: Vec<&(Bracket, usize)> =
            found.iter().filter(|(b, _)| b.lo <= first).collect();
        let at = contenders.iter().map(|(b, _)| b.hi).max().unwrap();
        let next_pt = pts.iter().copied().find(|&g| g > at).unwrap_or(at);
        contenders.sort_by_key(|(b, _)| b.lo);
        let mut best = contenders[0];
        for cand in &contenders[1..] {
            if beats(cand.1, best.1, at, next_pt) {
                best = cand;
            }
        }
        w = best.1;
        cur = at;
        out.push((w, Some(best.0)));
    }
    out
}

/// Indices of keys that come within [`PREFILTER_SLACK`] of the pointwise
/// maximum somewhere on a coarse grid. The curves all meet at both ends of
/// the range, so closeness is judged against the spread `max - floor`.
fn prefilter(keys: &[Key], ids: &[usize], zs: &[f64], max: &mut [f64], floor: &[f64]) -> Vec<usize> {
    let mut v = vec![0.0; zs.len()];
    for &i in ids {
        eval_grid(&keys[i], zs, &mut v);
        for (m, &x) in max.iter_mut().zip(&v) {
            *m = m.max(x);
        }
    }
    ids.iter()
        .copied()
        .filter(|&i| {
            eval_grid(&keys[i], zs, &mut v);
            v.iter()
                .zip(max.iter().zip(floor))
                .any(|(&x, (&m, &f))| x >= m - PREFILTER_SLACK * (m - f))
        })
        .collect()
}

/// `A(z)` at every grid point, Horner across the whole grid at once.
fn eval_grid(k: &Key, zs: &[f64], out: &mut [f64]) {
    out.fill(0.0);
    for &c in k[..=key_degree(k)].iter().rev() {
        let c = c as f64;
        for (o, &z) in out.iter_mut().zip(zs) {
            *o = *o * z + c;
        }
    }
}

/// One stretch of gamma on which a distance distribution is optimal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Regime {
    pub gamma_lo: f64,
    pub gamma_hi: f64,
    /// Certified crossing at `gamma_lo`; absent for the first regime.
    pub start: Option<(f64, f64)>,
    pub ddf: DistDist,
    /// Every right-shifted down-set with this distribution.
    pub representatives: Vec<GeneratorSet>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalRegimes {
    pub t: usize,
    pub n: usize,
    pub regimes: Vec<Regime>,
    /// Right-shifted down-sets of size `2^t` in F₂ⁿ.
    pub sets: u64,
    pub distinct_ddfs: usize,
}

/// An optimal set with every range on which it is optimal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalityProfile {
    pub set: PointSet,
    pub generators: GeneratorSet,
    pub ddf: DistDist,
    pub regimes: Vec<(f64, f64)>,
}

fn check_t_n(t: usize, n: usize) -> Result<()> {
    if !(1..=MAX_T).contains(&t) {
        return Err(Error::InvalidParameter(format!("t must lie in 1..={MAX_T}, got {t}")));
    }
    if n < t || n >= 1 << t {
        return Err(Error::InvalidParameter(format!(
            "n must lie in {t}..={} for t = {t}, got {n}",
            (1 << t) - 1
        )));
    }
    Ok(())
}

/// Optimal sets of size `2^t` for each requested dimension, from a single
/// enumeration in the largest one.
pub fn optimal_table(t: usize, dims: &[usize]) -> Result<Vec<OptimalRegimes>> {
    let mut dims: Vec<usize> = dims.to_vec();
    dims.sort_unstable();
    dims.dedup();
    for &n in &dims {
        check_t_n(t, n)?;
    }
    let Some(&top) = dims.last() else {
        return Ok(Vec::new());
    };
    let size = 1usize << t;

    let mut ids: HashMap<Key, u32> = HashMap::new();
    let mut keys: Vec<Key> = Vec::new();
    let mut key_dim: Vec<u8> = Vec::new();
    let mut per_set: Vec<(u32, u8)> = Vec::new();
    enumerate_rsds_with_distances(top, size, |ideal, &key| {
        let dim = ideal.min_dim() as u8;
        let id = *ids.entry(key).or_insert_with(|| {
            keys.push(key);
            key_dim.push(dim);
            (keys.len() - 1) as u32
        });
        key_dim[id as usize] = key_dim[id as usize].min(dim);
        per_set.push((id, dim));
    })?;

    let zs: Vec<f64> = grid(PREFILTER_STEP).into_iter().map(zeta_of).collect();
    let mut max = vec![0.0; zs.len()];
    let mut floor = vec![f64::INFINITY; zs.len()];
    let mut v = vec![0.0; zs.len()];
    for k in &keys {
        eval_grid(k, &zs, &mut v);
        for (f, &x) in floor.iter_mut().zip(&v) {
            *f = f.min(x);
        }
    }
    let mut by_dim: Vec<usize> = (0..keys.len()).collect();
    by_dim.sort_by_key(|&i| key_dim[i]);
    let mut next = 0;
    let mut survivors: Vec<usize> = Vec::new();

    let mut envelopes = Vec::with_capacity(dims.len());
    for &n in &dims {
        let start = next;
        while next < by_dim.len() && key_dim[by_dim[next]] as usize <= n {
            next += 1;
        }
        let mut pool = std::mem::take(&mut survivors);
        pool.extend_from_slice(&by_dim[start..next]);
        survivors = prefilter(&keys, &pool, &zs, &mut max, &floor);
        survivors.sort_unstable();
        let local: Vec<Key> = survivors.iter().map(|&i| keys[i]).collect();
        let env: Vec<(usize, Option<Bracket>)> = envelope(&local)
            .into_iter()
            .map(|(i, b)| (survivors[i], b))
            .collect();
        let count = per_set.iter().filter(|&&(_, d)| d as usize <= n).count() as u64;
        let distinct = key_dim.iter().filter(|&&d| d as usize <= n).count();
        envelopes.push((n, env, count, distinct));
    }

    // Second pass: gather every set whose distribution wins somewhere.
    let winners: HashSet<u32> = envelopes
        .iter()
        .flat_map(|(_, env, _, _)| env.iter().map(|&(i, _)| i as u32))
        .collect();
    let mut reps: HashMap<u32, Vec<(u8, Vec<u64>)>> = HashMap::new();
    let mut idx = 0;
    enumerate_rsds(top, size, |ideal| {
        let (id, dim) = per_set[idx];
        idx += 1;
        if winners.contains(&id) {
            reps.entry(id).or_default().push((dim, ideal.to_vec()));
        }
    })?;

    envelopes
        .into_iter()
        .map(|(n, env, sets, distinct_ddfs)| {
            let mut regimes: Vec<Regime> = Vec::with_capacity(env.len());
            for (j, &(id, bracket)) in env.iter().enumerate() {
                let k = &keys[id];
                let counts: Vec<u64> = k[..=key_degree(k)].iter().map(|&c| c as u64).collect();
                let mut representatives: Vec<GeneratorSet> = reps[&(id as u32)]
                    .iter()
                    .filter(|(d, _)| *d as usize <= n)
                    .map(|(_, e)| generators_of(e, n))
                    .collect();
                representatives.sort_by(|a, b| b.gens().cmp(a.gens()));
                regimes.push(Regime {
                    gamma_lo: bracket.map_or(0.0, |b| b.mid_f64()),
                    gamma_hi: env.get(j + 1).and_then(|e| e.1).map_or(0.5, |b| b.mid_f64()),
                    start: bracket.map(|b| (b.lo_f64(), b.hi_f64())),
                    ddf: DistDist::from_counts(n, &counts)?,
                    representatives,
                });
            }
            Ok(OptimalRegimes {
                t,
                n,
                regimes,
                sets,
                distinct_ddfs,
            })
        })
        .collect()
}

/// Optimal right-shifted down-sets of size `2^t` in F₂ⁿ, one profile per
/// set.
pub fn optimal_sets(t: usize, n: usize) -> Result<Vec<OptimalityProfile>> {
    let table = optimal_table(t, &[n])?.pop().expect("one dimension requested");
    let mut out: Vec<OptimalityProfile> = Vec::new();
    for r in &table.regimes {
        for g in &r.representatives {
            if let Some(p) = out.iter_mut().find(|p| p.generators == *g) {
                p.regimes.push((r.gamma_lo, r.gamma_hi));
                continue;
            }
            out.push(OptimalityProfile {
                set: crate::optsets::expand_generators(g, 1 << t)?,
                generators: g.clone(),
                ddf: r.ddf.clone(),
                regimes: vec![(r.gamma_lo, r.gamma_hi)],
            });
        }
    }
    Ok(out)
}

/// A right-shifted down-set of `s` points in F₂ⁿ with the least distance
/// sum. Ties go to the lexicographically largest list of elements in
/// descending order.
pub fn distance_sum_optimal(s: usize, n: usize) -> Result<PointSet> {
    if s == 0 || s > MAX_TARGET || n == 0 || n > 63 || (n < 7 && s > 1 << n) {
        return Err(Error::InvalidParameter(format!(
            "distance-sum optimum needs 1 <= s <= 64, s <= 2^n, n <= 63; got s={s}, n={n}"
        )));
    }
    let mut best: Option<(u64, Vec<u64>)> = None;
    enumerate_rsds(n, s, |ideal| {
        let mut e: Vec<u64> = ideal.to_vec();
        e.reverse();
        let k = ddf_key(&e);
        let sum: u64 = k.iter().enumerate().map(|(i, &c)| i as u64 * c as u64).sum::<u64>() / 2;
        let better = match &best {
            None => true,
            Some((b, be)) => sum < *b || (sum == *b && e > *be),
        };
        if better {
            best = Some((sum, e));
        }
    })?;
    let (_, e) = best.ok_or(Error::EmptySet)?;
    PointSet::from_u64s(n, &e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distdist::distance_distribution;

    fn gens(r: &Regime) -> Vec<Vec<u64>> {
        r.representatives.iter().map(|g| g.to_u64s().unwrap()).collect()
    }

    #[test]
    fn key_matches_distance_distribution() {
        let e = [0u64, 1, 2, 4, 8, 3];
        let k = ddf_key(&e);
        let d = distance_distribution(&PointSet::from_u64s(6, &e).unwrap());
        let c = d.coeffs_u64().unwrap();
        assert_eq!(&k[..c.len()], c.iter().map(|&x| x as u16).collect::<Vec<_>>().as_slice());
    }

    #[test]
    fn sixteen_points_in_fifteen_dimensions() {
        let r = optimal_table(4, &[15]).unwrap().pop().unwrap();
        assert_eq!(r.sets, 54);
        assert_eq!(r.regimes.len(), 2);
        assert_eq!(gens(&r.regimes[0]), vec![vec![15]]);
        assert_eq!(gens(&r.regimes[1]), vec![vec![1 << 14]]);
        assert_eq!(r.regimes[1].ddf.poly_string(), "16+30x+210x^2");
        assert!((r.regimes[1].gamma_lo - 0.2826).abs() < 5e-5);
        assert_eq!(r.regimes[1].gamma_hi, 0.5);
    }

    #[test]
    fn three_regimes_at_nineteen() {
        let r = optimal_table(5, &[19]).unwrap().pop().unwrap();
        let got: Vec<(Vec<Vec<u64>>, f64)> =
            r.regimes.iter().map(|g| (gens(g), g.gamma_lo)).collect();
        assert_eq!(got.len(), 3, "{got:?}");
        assert_eq!(got[0].0, vec![vec![31]]);
        assert_eq!(got[1].0, vec![vec![(1 << 15) + 1]]);
        assert_eq!(got[2].0, vec![vec![1 << 18, (1 << 12) + 1]]);
        assert!((got[1].1 - 0.2826).abs() < 5e-5);
        assert!((got[2].1 - 1.0 / 3.0).abs() < 5e-5);
    }

    #[test]
    fn ties_are_reported_together() {
        let r = optimal_table(4, &[12]).unwrap().pop().unwrap();
        let last = r.regimes.last().unwrap();
        assert_eq!(gens(last), vec![vec![1 << 11, 9], vec![1 << 11, 6]]);
        assert!((last.gamma_lo - 0.4560).abs() < 5e-5);
        let profiles = optimal_sets(4, 12).unwrap();
        assert_eq!(profiles.len(), 3);
        assert!(profiles.iter().all(|p| p.set.len() == 16));
    }

    #[test]
    fn cube_alone_in_small_dimensions() {
        let r = optimal_table(2, &[2, 3]).unwrap();
        assert_eq!(r[0].regimes.len(), 1);
        assert_eq!(gens(&r[0].regimes[0]), vec![vec![3]]);
        assert!(optimal_table(2, &[4]).is_err());
        assert!(optimal_table(7, &[8]).is_err());
    }

    #[test]
    fn one_enumeration_matches_separate_ones() {
        let joint = optimal_table(4, &[12, 13, 14]).unwrap();
        for r in joint {
            let alone = optimal_table(4, &[r.n]).unwrap().pop().unwrap();
            assert_eq!(r, alone);
        }
    }

    #[test]
    fn distance_sum_examples() {
        let s4 = distance_sum_optimal(4, 3).unwrap();
        assert_eq!(s4.to_u64s().unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(crate::distdist::distance_sum(&s4), 8);
        assert_eq!(distance_sum_optimal(8, 7).unwrap().to_u64s().unwrap(), (0..8).collect::<Vec<_>>());
        let s16 = distance_sum_optimal(16, 15).unwrap();
        assert_eq!(distance_distribution(&s16).poly_string(), "16+30x+210x^2");
        assert!(distance_sum_optimal(65, 63).is_err());
        assert!(distance_sum_optimal(9, 3).is_err());
    }
}
