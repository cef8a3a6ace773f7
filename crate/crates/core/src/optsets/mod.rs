//! Right-shifted down-sets: the shift/down order, ideal enumeration, and
//! the search for sets maximizing collision probability.

pub mod brute;
pub mod genideal;
pub mod optimal;
pub mod poset;

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::distdist::{parse_literal_parts, PointSet};
use crate::error::{Error, Result};
use crate::word::Word;

pub use brute::{subcube_optimality, SubcubeCheck};
pub use genideal::{count_rsds, enumerate_ideals, enumerate_rsds, Ideal, Pivot};
pub use optimal::{
    distance_sum_optimal, optimal_sets, optimal_table, OptimalRegimes, OptimalityProfile, Regime,
};
pub use poset::{candidate_count, ShiftPoset};

/// Elements covered by `x`: clear coordinate n, or move a one from
/// coordinate i to an empty coordinate i+1.
pub fn down_covers(x: &Word) -> Vec<Word> {
    let n = x.n();
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    if x.get(n).unwrap() {
        let mut y = x.clone();
        y.set(n, false).unwrap();
        out.push(y);
    }
    for i in 1..n {
        if x.get(i).unwrap() && !x.get(i + 1).unwrap() {
            let mut y = x.clone();
            y.set(i, false).unwrap();
            y.set(i + 1, true).unwrap();
            out.push(y);
        }
    }
    out
}

/// Elements covering `x`.
pub fn up_covers(x: &Word) -> Vec<Word> {
    let n = x.n();
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    if !x.get(n).unwrap() {
        let mut y = x.clone();
        y.set(n, true).unwrap();
        out.push(y);
    }
    for i in 2..=n {
        if x.get(i).unwrap() && !x.get(i - 1).unwrap() {
            let mut y = x.clone();
            y.set(i, false).unwrap();
            y.set(i - 1, true).unwrap();
            out.push(y);
        }
    }
    out
}

fn close_down(seeds: &[Word], budget: usize) -> Result<PointSet> {
    let mut seen: HashSet<Word> = seeds.iter().cloned().collect();
    let mut queue: VecDeque<Word> = seeds.iter().cloned().collect();
    while let Some(y) = queue.pop_front() {
        for z in down_covers(&y) {
            if seen.insert(z.clone()) {
                if seen.len() > budget {
                    return Err(Error::BudgetExceeded {
                        budget,
                        reached: seen.len(),
                    });
                }
                queue.push_back(z);
            }
        }
    }
    if seen.len() > budget {
        return Err(Error::BudgetExceeded {
            budget,
            reached: seen.len(),
        });
    }
    PointSet::new(seen.into_iter().collect())
}

/// All elements below `x` in the shift/down order.
pub fn principal_downset(x: &Word, budget: usize) -> Result<PointSet> {
    close_down(std::slice::from_ref(x), budget)
}

/// Whether `s` is closed under clearing coordinates and shifting ones right.
pub fn is_rsds(s: &PointSet) -> bool {
    s.elements()
        .iter()
        .all(|x| down_covers(x).iter().all(|y| s.contains(y)))
}

/// Antichain of generators for a right-shifted down-set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneratorSet {
    n: usize,
    /// Descending.
    gens: Vec<Word>,
}

impl GeneratorSet {
    /// Builds a generator set, rejecting non-antichains.
    pub fn new(n: usize, mut gens: Vec<Word>) -> Result<GeneratorSet> {
        if let Some(bad) = gens.iter().find(|g| g.n() != n) {
            return Err(Error::DimensionMismatch {
                left: n,
                right: bad.n(),
            });
        }
        gens.sort_unstable_by(|a, b| b.cmp(a));
        gens.dedup();
        for g in &gens {
            let below = principal_downset(g, usize::MAX)?;
            if gens.iter().any(|h| h != g && below.contains(h)) {
                return Err(Error::InvalidParameter(format!(
                    "generator {g} lies below another generator"
                )));
            }
        }
        Ok(GeneratorSet { n, gens })
    }

    /// For callers that already hold the maximal elements of a down-set.
    pub(crate) fn from_maximal(n: usize, mut gens: Vec<Word>) -> GeneratorSet {
        gens.sort_unstable_by(|a, b| b.cmp(a));
        GeneratorSet { n, gens }
    }

    pub fn from_u64s(n: usize, values: &[u64]) -> Result<GeneratorSet> {
        GeneratorSet::new(
            n,
            values.iter().map(|&v| Word::from_u64(n, v)).collect::<Result<_>>()?,
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gens(&self) -> &[Word] {
        &self.gens
    }

    pub fn to_u64s(&self) -> Option<Vec<u64>> {
        self.gens.iter().map(Word::as_u64).collect()
    }

    /// Generators written as sums of powers of two, e.g. `2^11, 2^3+1`.
    pub fn power_notation(&self) -> String {
        self.gens
            .iter()
            .map(power_sum)
            .collect::<Vec<_>>()
            .join(", ")
    }
}

fn power_sum(w: &Word) -> String {
    let n = w.n();
    let terms: Vec<String> = w
        .ones()
        .map(|c| match n - c {
            0 => "1".to_string(),
            1 => "2".to_string(),
            b => format!("2^{b}"),
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

impl fmt::Display for GeneratorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.n)?;
        for (i, g) in self.gens.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", g.hex())?;
        }
        Ok(())
    }
}

impl serde::Serialize for GeneratorSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for GeneratorSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<GeneratorSet> {
        let (n, parts) = parse_literal_parts(s)?;
        GeneratorSet::new(
            n,
            parts
                .into_iter()
                .map(|h| Word::from_hex(n, h))
                .collect::<Result<_>>()?,
        )
    }
}

/// Union of the principal down-sets of the generators.
pub fn expand_generators(g: &GeneratorSet, budget: usize) -> Result<PointSet> {
    if g.gens.is_empty() {
        return Err(Error::EmptySet);
    }
    close_down(&g.gens, budget)
}

/// The maximal elements of a right-shifted down-set.
pub fn minimal_generators(s: &PointSet) -> Result<GeneratorSet> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    if !is_rsds(s) {
        return Err(Error::NotRightShiftedDownSet);
    }
    let gens = s
        .elements()
        .iter()
        .filter(|x| up_covers(x).iter().all(|y| !s.contains(y)))
        .cloned()
        .collect();
    GeneratorSet::new(s.n(), gens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distdist::distance_distribution;
    use crate::word::{rho, sigma};

    fn w(n: usize, v: u64) -> Word {
        Word::from_u64(n, v).unwrap()
    }

    /// Closure under every rho and sigma, not just covers.
    fn full_closure(x: &Word) -> HashSet<Word> {
        let n = x.n();
        let mut seen = HashSet::from([x.clone()]);
        let mut queue = vec![x.clone()];
        while let Some(y) = queue.pop() {
            let mut next = Vec::new();
            for i in 1..=n {
                next.push(rho(&y, i).unwrap());
                for j in i + 1..=n {
                    next.push(sigma(&y, i, j).unwrap());
                }
            }
            for z in next {
                if seen.insert(z.clone()) {
                    queue.push(z);
                }
            }
        }
        seen
    }

    #[test]
    fn covers_generate_the_full_order() {
        for n in 1..=8 {
            for v in 0..1u64 << n {
                let x = w(n, v);
                let covers: HashSet<Word> = principal_downset(&x, usize::MAX)
                    .unwrap()
                    .elements()
                    .iter()
                    .cloned()
                    .collect();
                assert_eq!(covers, full_closure(&x), "n={n} x={v:b}");
            }
        }
    }

    #[test]
    fn principal_examples() {
        assert_eq!(principal_downset(&w(4, 15), 64).unwrap().len(), 16);
        let s = principal_downset(&w(15, 1 << 14), 64).unwrap();
        assert_eq!(s.len(), 16);
        assert_eq!(distance_distribution(&s).poly_string(), "16+30x+210x^2");
        assert_eq!(principal_downset(&w(5, 0), 1).unwrap().len(), 1);
        assert!(matches!(
            principal_downset(&w(4, 15), 8),
            Err(Error::BudgetExceeded { budget: 8, .. })
        ));
    }

    #[test]
    fn generator_examples() {
        let a = GeneratorSet::from_u64s(12, &[1 << 11, (1 << 3) + 1]).unwrap();
        let b = GeneratorSet::from_u64s(12, &[1 << 11, 3 * 2]).unwrap();
        let sa = expand_generators(&a, 64).unwrap();
        let sb = expand_generators(&b, 64).unwrap();
        assert_eq!((sa.len(), sb.len()), (16, 16));
        assert_eq!(distance_distribution(&sa).poly_string(), "16+36x+144x^2+60x^3");
        assert_eq!(distance_distribution(&sa), distance_distribution(&sb));
        assert_ne!(sa, sb);
        let c = GeneratorSet::from_u64s(22, &[(1 << 21) + 2]).unwrap();
        assert_eq!(expand_generators(&c, 64).unwrap().len(), 64);
        assert_eq!(a.power_notation(), "2^11, 2^3+1");
    }

    #[test]
    fn rsds_membership() {
        let cube = PointSet::from_u64s(5, &(0..8).collect::<Vec<_>>()).unwrap();
        assert!(is_rsds(&cube));
        assert!(is_rsds(&PointSet::from_u64s(5, &[0, 1]).unwrap()));
        assert!(!is_rsds(&PointSet::from_u64s(5, &[16]).unwrap()));
        assert!(!is_rsds(&PointSet::from_u64s(5, &[0, 2]).unwrap()));
    }

    #[test]
    fn minimal_generator_examples() {
        let cube = PointSet::from_u64s(4, &(0..16).collect::<Vec<_>>()).unwrap();
        assert_eq!(minimal_generators(&cube).unwrap().to_u64s().unwrap(), vec![15]);
        let sphere = principal_downset(&w(15, 1 << 14), 64).unwrap();
        assert_eq!(minimal_generators(&sphere).unwrap().to_u64s().unwrap(), vec![1 << 14]);
        let zero = PointSet::from_u64s(3, &[0]).unwrap();
        assert_eq!(minimal_generators(&zero).unwrap().to_u64s().unwrap(), vec![0]);
        assert_eq!(
            minimal_generators(&PointSet::from_u64s(3, &[4]).unwrap()),
            Err(Error::NotRightShiftedDownSet)
        );
    }

    #[test]
    fn non_antichain_rejected() {
        assert!(GeneratorSet::from_u64s(4, &[15, 3]).is_err());
    }

    #[test]
    fn literal_round_trip() {
        let g: GeneratorSet = "12:800,9".parse().unwrap();
        assert_eq!(g.to_u64s().unwrap(), vec![0x800, 9]);
        assert_eq!(g.to_string(), "12:800,9");
    }

    #[test]
    fn generators_round_trip_on_enumerated_sets() {
        enumerate_rsds(12, 16, |ideal| {
            let s = PointSet::from_u64s(12, &ideal.to_vec()).unwrap();
            let g = minimal_generators(&s).unwrap();
            assert_eq!(expand_generators(&g, 64).unwrap(), s);
        })
        .unwrap();
    }
}
