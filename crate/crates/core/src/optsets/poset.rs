//! The shift/down order on small-down-set elements of F₂ⁿ, with precomputed
//! principal down-sets and up-sets as bitsets over a linear extension.

use std::collections::{HashMap, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const WORDS: usize = 5;

/// Capacity of [`Bits`]; comfortably above the 257 candidates of the largest
/// supported case.
pub const MAX_CANDIDATES: usize = WORDS * 64;

/// Largest target size for enumeration.
pub const MAX_TARGET: usize = 64;

/// Largest dimension handled with integer-encoded elements.
pub const MAX_N: usize = 63;

/// Fixed-width bitset over candidate indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Bits([u64; WORDS]);

impl Bits {
    #[inline]
    pub fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.0[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn and(&self, o: &Bits) -> Bits {
        Bits(std::array::from_fn(|i| self.0[i] & o.0[i]))
    }

    #[inline]
    pub fn or(&self, o: &Bits) -> Bits {
        Bits(std::array::from_fn(|i| self.0[i] | o.0[i]))
    }

    #[inline]
    pub fn and_not(&self, o: &Bits) -> Bits {
        Bits(std::array::from_fn(|i| self.0[i] & !o.0[i]))
    }

    /// Index of the `k`-th set bit (0-based) in increasing order.
    #[inline]
    pub fn nth_one(&self, mut k: usize) -> Option<usize> {
        for (wi, &w) in self.0.iter().enumerate() {
            let c = w.count_ones() as usize;
            if k < c {
                let mut w = w;
                for _ in 0..k {
                    w &= w - 1;
                }
                return Some(wi * 64 + w.trailing_zeros() as usize);
            }
            k -= c;
        }
        None
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                (w != 0).then(|| {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    wi * 64 + b
                })
            })
        })
    }
}

impl std::fmt::Debug for Bits {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.ones()).finish()
    }
}

/// Elements covered by `x` in the shift/down order: clear the lowest bit, or
/// move a one down into an empty neighbouring position.
pub fn down_covers(x: u64) -> impl Iterator<Item = u64> {
    let clear = (x & 1 == 1).then_some(x ^ 1);
    let moves = (1..64)
        .filter(move |b| (x >> b) & 1 == 1 && (x >> (b - 1)) & 1 == 0)
        .map(move |b| x ^ (0b11 << (b - 1)));
    clear.into_iter().chain(moves)
}

/// Elements covering `x` inside F₂ⁿ.
pub fn up_covers(x: u64, n: usize) -> impl Iterator<Item = u64> {
    let fill = (x & 1 == 0 && n > 0).then_some(x | 1);
    let moves = (0..n.saturating_sub(1))
        .filter(move |b| (x >> b) & 1 == 1 && (x >> (b + 1)) & 1 == 0)
        .map(move |b| x ^ (0b11 << b));
    fill.into_iter().chain(moves)
}

/// The principal down-set of `x`, failing once more than `budget` elements
/// have been reached.
pub fn downset_u64(x: u64, budget: usize) -> Result<Vec<u64>> {
    let mut seen = std::collections::HashSet::from([x]);
    let mut queue = VecDeque::from([x]);
    let mut out = Vec::new();
    while let Some(y) = queue.pop_front() {
        out.push(y);
        if out.len() > budget {
            return Err(Error::BudgetExceeded {
                budget,
                reached: out.len(),
            });
        }
        for z in down_covers(y) {
            if seen.insert(z) {
                queue.push_back(z);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Every element of F₂ⁿ whose principal down-set has at most `budget`
/// points, indexed along a linear extension.
#[derive(Debug, Clone)]
pub struct ShiftPoset {
    n: usize,
    budget: usize,
    elements: Vec<u64>,
    down_size: Vec<usize>,
    down: Vec<Bits>,
    up: Vec<Bits>,
}

impl ShiftPoset {
    pub fn new(n: usize, budget: usize) -> Result<ShiftPoset> {
        if n == 0 || n > MAX_N {
            return Err(Error::InvalidParameter(format!(
                "dimension must lie in 1..={MAX_N}, got {n}"
            )));
        }
        if budget == 0 || budget > MAX_TARGET {
            return Err(Error::TooLarge {
                what: format!("down-set budget {budget}"),
                limit: MAX_TARGET as u64,
            });
        }
        let mut found: HashMap<u64, usize> = HashMap::new();
        let mut rejected = std::collections::HashSet::new();
        let mut queue = VecDeque::from([0u64]);
        found.insert(0, 1);
        while let Some(x) = queue.pop_front() {
            for y in up_covers(x, n) {
                if found.contains_key(&y) || rejected.contains(&y) {
                    continue;
                }
                match downset_u64(y, budget) {
                    Ok(d) => {
                        found.insert(y, d.len());
                        queue.push_back(y);
                    }
                    Err(_) => {
                        rejected.insert(y);
                    }
                }
            }
        }
        let mut order: Vec<(usize, u64)> = found.into_iter().map(|(x, s)| (s, x)).collect();
        order.sort_unstable();
        Self::from_order(n, budget, order.into_iter().map(|(_, x)| x).collect())
    }

    /// Same poset indexed along a uniformly shuffled linear extension.
    pub fn with_random_extension(n: usize, budget: usize, seed: u64) -> Result<ShiftPoset> {
        let base = ShiftPoset::new(n, budget)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = base.len();
        // Kahn's algorithm with a random choice among the minimal elements.
        let mut pending: Vec<usize> = (0..p).map(|i| base.down[i].count() - 1).collect();
        let mut ready: Vec<usize> = (0..p).filter(|&i| pending[i] == 0).collect();
        let mut order = Vec::with_capacity(p);
        while !ready.is_empty() {
            ready.shuffle(&mut rng);
            let i = ready.pop().unwrap();
            order.push(base.elements[i]);
            for j in base.up[i].ones().filter(|&j| j != i) {
                pending[j] -= 1;
                if pending[j] == 0 {
                    ready.push(j);
                }
            }
        }
        Self::from_order(n, budget, order)
    }

    fn from_order(n: usize, budget: usize, elements: Vec<u64>) -> Result<ShiftPoset> {
        if elements.len() > MAX_CANDIDATES {
            return Err(Error::TooLarge {
                what: "candidate poset".into(),
                limit: MAX_CANDIDATES as u64,
            });
        }
        let index: HashMap<u64, usize> = elements.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let p = elements.len();
        let mut down = vec![Bits::default(); p];
        let mut up = vec![Bits::default(); p];
        let mut down_size = vec![0; p];
        for (i, &x) in elements.iter().enumerate() {
            let d = downset_u64(x, budget)?;
            down_size[i] = d.len();
            for y in d {
                let j = index[&y];
                debug_assert!(j <= i, "ordering is not a linear extension");
                down[i].set(j);
                up[j].set(i);
            }
        }
        Ok(ShiftPoset {
            n,
            budget,
            elements,
            down_size,
            down,
            up,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> u64 {
        self.elements[i]
    }

    pub fn down_size(&self, i: usize) -> usize {
        self.down_size[i]
    }

    pub fn down(&self, i: usize) -> &Bits {
        &self.down[i]
    }

    pub fn up(&self, i: usize) -> &Bits {
        &self.up[i]
    }
}

/// Number of elements of F₂ⁿ whose principal down-set has at most `budget`
/// points.
pub fn candidate_count(n: usize, budget: usize) -> Result<usize> {
    Ok(ShiftPoset::new(n, budget)?.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bits_selection() {
        let mut b = Bits::default();
        for i in [3, 70, 130, 319] {
            b.set(i);
        }
        assert_eq!(b.count(), 4);
        assert_eq!(b.nth_one(0), Some(3));
        assert_eq!(b.nth_one(2), Some(130));
        assert_eq!(b.nth_one(4), None);
        assert_eq!(b.ones().collect::<Vec<_>>(), vec![3, 70, 130, 319]);
    }

    #[test]
    fn covers_are_inverse() {
        for x in 0u64..256 {
            for y in down_covers(x) {
                assert!(up_covers(y, 8).any(|z| z == x));
            }
            for y in up_covers(x, 8) {
                assert!(down_covers(y).any(|z| z == x));
            }
        }
    }

    #[test]
    fn principal_downsets() {
        assert_eq!(downset_u64(0b1111, 64).unwrap(), (0..16).collect::<Vec<_>>());
        let mut sphere: Vec<u64> = (0..15).map(|b| 1 << b).collect();
        sphere.insert(0, 0);
        assert_eq!(downset_u64(1 << 14, 64).unwrap(), sphere);
        assert!(matches!(
            downset_u64(0b1111, 10),
            Err(Error::BudgetExceeded { budget: 10, .. })
        ));
    }

    #[test]
    fn closures_are_consistent() {
        let p = ShiftPoset::new(10, 16).unwrap();
        for i in 0..p.len() {
            assert_eq!(p.down(i).count(), p.down_size(i));
            for j in 0..p.len() {
                assert_eq!(p.down(i).get(j), p.up(j).get(i));
            }
        }
        let q = ShiftPoset::with_random_extension(10, 16, 3).unwrap();
        assert_eq!(q.len(), p.len());
        assert_ne!(q.elements(), p.elements());
    }

    #[test]
    fn small_candidate_counts() {
        // Everything in F₂³ has a down-set of at most 8 points.
        assert_eq!(candidate_count(3, 8).unwrap(), 8);
        assert!(ShiftPoset::new(64, 8).is_err());
        assert!(ShiftPoset::new(8, 65).is_err());
    }
}
