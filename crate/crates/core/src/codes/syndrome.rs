//! Coset-leader tables for syndrome decoding.

use crate::codes::gf2::dot;
use crate::error::{Error, Result};
use crate::word::Word;

/// Largest supported redundancy `n - k`.
pub const MAX_REDUNDANCY: usize = 28;

/// Parity-check matrix together with a minimum-weight leader for every
/// syndrome. Among leaders of equal weight the one with the smallest integer
/// encoding is kept.
#[derive(Debug, Clone)]
pub struct SyndromeTable {
    n: usize,
    parity_check: Vec<Word>,
    /// Syndrome contribution of each coordinate, indexed by integer bit.
    column_syndromes: Vec<u32>,
    leaders: Vec<Word>,
    /// Byte-sliced syndrome tables for the single-limb fast path.
    byte_tables: Vec<[u32; 256]>,
    leaders_u64: Vec<u64>,
}

impl SyndromeTable {
    pub fn new(n: usize, parity_check: Vec<Word>) -> Result<SyndromeTable> {
        let r = parity_check.len();
        if r > MAX_REDUNDANCY {
            return Err(Error::TooLarge {
                what: format!("syndrome table for n-k = {r}"),
                limit: MAX_REDUNDANCY as u64,
            });
        }
        let mut column_syndromes = vec![0u32; n];
        for (row_idx, row) in parity_check.iter().enumerate() {
            for coord in row.ones() {
                column_syndromes[n - coord] |= 1 << row_idx;
            }
        }
        let leaders = fill_leaders(n, r, &column_syndromes)?;

        let (byte_tables, leaders_u64) = if n <= 64 {
            let chunks = n.div_ceil(8);
            let mut tables = vec![[0u32; 256]; chunks];
            for (c, table) in tables.iter_mut().enumerate() {
                for (byte, slot) in table.iter_mut().enumerate() {
                    let mut s = 0;
                    for bit in 0..8 {
                        let b = c * 8 + bit;
                        if b < n && (byte >> bit) & 1 == 1 {
                            s ^= column_syndromes[b];
                        }
                    }
                    *slot = s;
                }
            }
            let l64 = leaders.iter().map(|w| w.as_u64().unwrap()).collect();
            (tables, l64)
        } else {
            (Vec::new(), Vec::new())
        };

        Ok(SyndromeTable {
            n,
            parity_check,
            column_syndromes,
            leaders,
            byte_tables,
            leaders_u64,
        })
    }

    pub fn parity_check(&self) -> &[Word] {
        &self.parity_check
    }

    pub fn redundancy(&self) -> usize {
        self.parity_check.len()
    }

    pub fn leaders(&self) -> &[Word] {
        &self.leaders
    }

    pub fn leader(&self, syndrome: u32) -> &Word {
        &self.leaders[syndrome as usize]
    }

    pub fn syndrome(&self, v: &Word) -> u32 {
        debug_assert_eq!(v.n(), self.n);
        let mut s = 0;
        for (i, row) in self.parity_check.iter().enumerate() {
            if dot(row, v) {
                s |= 1 << i;
            }
        }
        s
    }

    #[inline]
    pub fn syndrome_u64(&self, v: u64) -> u32 {
        let mut s = 0;
        for (c, table) in self.byte_tables.iter().enumerate() {
            s ^= table[((v >> (8 * c)) & 0xff) as usize];
        }
        s
    }

    #[inline]
    pub fn leader_u64(&self, syndrome: u32) -> u64 {
        self.leaders_u64[syndrome as usize]
    }

    /// Syndrome contribution of the coordinate at integer bit `b`.
    pub fn column_syndrome(&self, b: usize) -> u32 {
        self.column_syndromes[b]
    }
}

/// Visits vectors in order of weight; within a weight every combination is
/// seen and the smallest integer encoding wins each syndrome.
fn fill_leaders(n: usize, r: usize, cols: &[u32]) -> Result<Vec<Word>> {
    let size = 1usize << r;
    let mut leaders: Vec<Option<Word>> = vec![None; size];
    leaders[0] = Some(Word::zero(n));
    let mut filled = 1;
    let mut weight = 0;
    while filled < size {
        weight += 1;
        if weight > n {
            return Err(Error::InvalidParameter(
                "parity-check rows do not span the syndrome space".into(),
            ));
        }
        let mut level: Vec<Option<Word>> = vec![None; size];
        // Integer bit positions, ascending.
        let mut idx: Vec<usize> = (0..weight).collect();
        loop {
            let s = idx.iter().fold(0u32, |acc, &b| acc ^ cols[b]) as usize;
            if leaders[s].is_none() {
                let mut w = Word::zero(n);
                for &b in &idx {
                    w.set(n - b, true).unwrap();
                }
                match &level[s] {
                    Some(cur) if *cur <= w => {}
                    _ => level[s] = Some(w),
                }
            }
            if !next_combination(&mut idx, n) {
                break;
            }
        }
        for (slot, cand) in leaders.iter_mut().zip(level) {
            if slot.is_none() && cand.is_some() {
                *slot = cand;
                filled += 1;
            }
        }
    }
    Ok(leaders.into_iter().map(Option::unwrap).collect())
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_are_exhaustive() {
        let mut idx = vec![0, 1, 2];
        let mut count = 1;
        while next_combination(&mut idx, 6) {
            count += 1;
        }
        assert_eq!(count, 20);
    }

    #[test]
    fn ties_choose_smallest_integer() {
        // Single parity check on 3 bits: every odd-weight vector has syndrome 1,
        // and the lightest such vectors are the three unit vectors.
        let h = vec![Word::from_u64(3, 0b111).unwrap()];
        let t = SyndromeTable::new(3, h).unwrap();
        assert_eq!(t.leader(0).as_u64(), Some(0));
        assert_eq!(t.leader(1).as_u64(), Some(1));
        assert_eq!(t.syndrome_u64(0b100), 1);
        assert_eq!(t.syndrome(&Word::from_u64(3, 0b110).unwrap()), 0);
    }

    #[test]
    fn oversized_table_rejected() {
        let rows: Vec<Word> = (1..=29).map(|i| Word::unit(40, i).unwrap()).collect();
        assert!(matches!(
            SyndromeTable::new(40, rows),
            Err(Error::TooLarge { limit: 28, .. })
        ));
    }
}
