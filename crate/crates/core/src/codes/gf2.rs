//! Row reduction over F₂ for generator and parity-check matrices.

use crate::error::{Error, Result};
use crate::word::Word;

/// Reduced row echelon form of `rows`, with pivot coordinates (1-based, one
/// per row). Fails if the rows are dependent.
pub fn rref(rows: &[Word]) -> Result<(Vec<Word>, Vec<usize>)> {
    let Some(first) = rows.first() else {
        return Ok((Vec::new(), Vec::new()));
    };
    let n = first.n();
    if let Some(bad) = rows.iter().find(|r| r.n() != n) {
        return Err(Error::DimensionMismatch {
            left: n,
            right: bad.n(),
        });
    }
    let mut m: Vec<Word> = rows.to_vec();
    let mut pivots = Vec::with_capacity(m.len());
    let mut next = 0;
    for coord in 1..=n {
        if next == m.len() {
            break;
        }
        let Some(p) = (next..m.len()).find(|&r| m[r].get(coord).unwrap()) else {
            continue;
        };
        m.swap(next, p);
        let pivot_row = m[next].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != next && row.get(coord).unwrap() {
                row.xor_assign(&pivot_row)?;
            }
        }
        pivots.push(coord);
        next += 1;
    }
    if next < m.len() {
        return Err(Error::DependentRows);
    }
    Ok((m, pivots))
}

/// Basis of the dual code of the row space of an RREF matrix with the given
/// pivots: one row per non-pivot coordinate.
pub fn dual_basis(n: usize, rref_rows: &[Word], pivots: &[usize]) -> Vec<Word> {
    let mut out = Vec::with_capacity(n - pivots.len());
    for free in (1..=n).filter(|c| !pivots.contains(c)) {
        let mut h = Word::zero(n);
        h.set(free, true).unwrap();
        for (row, &p) in rref_rows.iter().zip(pivots) {
            if row.get(free).unwrap() {
                h.set(p, true).unwrap();
            }
        }
        out.push(h);
    }
    out
}

/// Inner product over F₂.
pub fn dot(a: &Word, b: &Word) -> bool {
    a.limbs()
        .iter()
        .zip(b.limbs())
        .map(|(x, y)| (x & y).count_ones())
        .sum::<u32>()
        % 2
        == 1
}
