//! Ideal enumeration by recursive splitting on a pivot element, stopping as
//! soon as the ideal reaches the target size.

use crate::error::{Error, Result};
use crate::optsets::poset::{up_covers, Bits, ShiftPoset, MAX_TARGET};
use crate::optsets::GeneratorSet;
use crate::word::Word;

/// Maximal elements of a sorted down-set in F₂ⁿ.
pub(crate) fn generators_of(elems: &[u64], n: usize) -> GeneratorSet {
    let gens: Vec<Word> = elems
        .iter()
        .filter(|&&x| up_covers(x, n).all(|y| elems.binary_search(&y).is_err()))
        .map(|&x| Word::from_u64(n, x).unwrap())
        .collect();
    GeneratorSet::from_maximal(n, gens)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pivot {
    /// Middle remaining element along the linear extension.
    #[default]
    Middle,
    /// First remaining element along the linear extension.
    First,
}

/// An ideal of exactly the target size, as a bitset over a poset.
#[derive(Clone, Copy)]
pub struct Ideal<'a> {
    poset: &'a ShiftPoset,
    bits: &'a Bits,
}

impl<'a> Ideal<'a> {
    pub fn bits(&self) -> &Bits {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> + 'a {
        let poset = self.poset;
        let bits = *self.bits;
        (0..poset.len())
            .filter(move |&i| bits.get(i))
            .map(move |i| poset.element(i))
    }

    pub fn to_vec(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.elements().collect();
        v.sort_unstable();
        v
    }

    /// Minimal generators, as a set in the poset's dimension.
    pub fn generators(&self) -> GeneratorSet {
        generators_of(&self.to_vec(), self.poset.n())
    }

    /// Smallest dimension containing the ideal.
    pub fn min_dim(&self) -> usize {
        let max = self.elements().max().unwrap_or(0);
        (64 - max.leading_zeros()) as usize
    }
}

/// Per-node data carried down the search, updated whenever a batch of
/// elements joins the ideal.
trait Tracker {
    type State: Copy;
    fn root(&self) -> Self::State;
    fn grow(&self, poset: &ShiftPoset, s: &Self::State, inc: &Bits, added: &Bits) -> Self::State;
}

struct NoTracking;

impl Tracker for NoTracking {
    type State = ();
    fn root(&self) {}
    fn grow(&self, _: &ShiftPoset, _: &(), _: &Bits, _: &Bits) {}
}

/// Longest distance histogram kept by [`enumerate_rsds_with_distances`].
pub const DISTANCE_SLOTS: usize = 16;

/// `h[0]` is the set size and `h[d]` the number of ordered pairs at
/// distance `d`.
pub type DistanceCounts = [u16; DISTANCE_SLOTS];

struct PairCounts;

impl Tracker for PairCounts {
    type State = DistanceCounts;

    fn root(&self) -> DistanceCounts {
        [0; DISTANCE_SLOTS]
    }

    fn grow(&self, poset: &ShiftPoset, s: &DistanceCounts, inc: &Bits, added: &Bits) -> DistanceCounts {
        let mut h = *s;
        let old: Vec<u64> = inc.ones().map(|i| poset.element(i)).collect();
        let new: Vec<u64> = added.ones().map(|i| poset.element(i)).collect();
        h[0] += new.len() as u16;
        for (j, &a) in new.iter().enumerate() {
            for &b in old.iter().chain(&new[..j]) {
                h[(a ^ b).count_ones() as usize] += 2;
            }
        }
        h
    }
}

struct Search<'p, T, F> {
    poset: &'p ShiftPoset,
    target: usize,
    pivot: Pivot,
    tracker: T,
    emit: F,
    count: u64,
}

impl<T: Tracker, F: FnMut(Ideal<'_>, &T::State)> Search<'_, T, F> {
    fn run(&mut self, inc: Bits, inc_size: usize, q: Bits, state: T::State) {
        if inc_size == self.target {
            self.count += 1;
            (self.emit)(
                Ideal {
                    poset: self.poset,
                    bits: &inc,
                },
                &state,
            );
            return;
        }
        let qc = q.count();
        if qc == 0 || inc_size + qc < self.target {
            return;
        }
        let x = match self.pivot {
            Pivot::Middle => q.nth_one(qc / 2),
            Pivot::First => q.nth_one(0),
        }
        .unwrap();
        let down = self.poset.down(x);
        let added = down.and(&q);
        let grown = inc_size + added.count();
        if grown <= self.target {
            let next = self.tracker.grow(self.poset, &state, &inc, &added);
            self.run(inc.or(&added), grown, q.and_not(down), next);
        }
        self.run(inc, inc_size, q.and_not(self.poset.up(x)), state);
    }
}

fn search<T: Tracker, F: FnMut(Ideal<'_>, &T::State)>(
    poset: &ShiftPoset,
    target: usize,
    pivot: Pivot,
    tracker: T,
    emit: F,
) -> Result<u64> {
    if target == 0 || target > poset.budget() {
        return Err(Error::InvalidParameter(format!(
            "target {target} must lie in 1..={}",
            poset.budget()
        )));
    }
    let mut all = Bits::default();
    for i in 0..poset.len() {
        all.set(i);
    }
    let root = tracker.root();
    let mut s = Search {
        poset,
        target,
        pivot,
        tracker,
        emit,
        count: 0,
    };
    s.run(Bits::default(), 0, all, root);
    Ok(s.count)
}

/// Calls `emit` once for every ideal of `poset` with exactly `target`
/// elements and returns how many there were.
pub fn enumerate_ideals<F: FnMut(Ideal<'_>)>(
    poset: &ShiftPoset,
    target: usize,
    pivot: Pivot,
    mut emit: F,
) -> Result<u64> {
    search(poset, target, pivot, NoTracking, |i, _| emit(i))
}

fn check_target(target: usize) -> Result<()> {
    if target > MAX_TARGET {
        return Err(Error::TooLarge {
            what: format!("enumeration target {target}"),
            limit: MAX_TARGET as u64,
        });
    }
    Ok(())
}

/// Like [`enumerate_rsds`], also passing each set's distance histogram.
/// Pair counts are shared along the search tree rather than recomputed per
/// set.
pub fn enumerate_rsds_with_distances<F: FnMut(Ideal<'_>, &DistanceCounts)>(
    n: usize,
    target: usize,
    emit: F,
) -> Result<u64> {
    check_target(target)?;
    let poset = ShiftPoset::new(n, target)?;
    search(&poset, target, Pivot::Middle, PairCounts, emit)
}

/// Every right-shifted down-set of F₂ⁿ with exactly `target` points.
pub fn enumerate_rsds<F: FnMut(Ideal<'_>)>(n: usize, target: usize, emit: F) -> Result<u64> {
    check_target(target)?;
    let poset = ShiftPoset::new(n, target)?;
    enumerate_ideals(&poset, target, Pivot::Middle, emit)
}

pub fn count_rsds(n: usize, target: usize) -> Result<u64> {
    enumerate_rsds(n, target, |_| {})
}
