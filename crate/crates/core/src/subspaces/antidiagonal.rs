//! Placement of column data along strictly upper anti-diagonals of a
//! `d² × d²` grid, followed by the partial-trace corrections.

use nalgebra::DMatrix;

use crate::linalg::{ComplexMatrix, HermitianMatrix, C64, ZERO};

/// One strictly upper anti-diagonal `i + j = sum`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AntiSlot {
    pub sum: usize,
    /// Entries `(i, j)` with `i < j`, ordered from bottom-left to top-right.
    pub entries: Vec<(usize, usize)>,
    /// Indices into `entries` that survive the corrections.
    pub surviving: Vec<usize>,
    pub count: usize,
}

/// Entries of the strictly upper anti-diagonal `i + j = sum` of an `n × n` grid.
pub fn anti_diagonal_entries(n: usize, sum: usize) -> Vec<(usize, usize)> {
    let mut e: Vec<(usize, usize)> =
        (0..n).filter_map(|i| sum.checked_sub(i).filter(|&j| j < n && i < j).map(|j| (i, j))).collect();
    e.reverse();
    e
}

fn in_top_left(d: usize, (i, j): (usize, usize)) -> bool {
    i < d && j < d
}

fn is_block_corner(d: usize, (i, j): (usize, usize)) -> bool {
    i % d == 0 && j % d == 0 && i / d != j / d
}

/// Plans all anti-diagonals so that any nonzero element keeps at least
/// `q + 1` nonzero upper entries on its last nonzero anti-diagonal.
pub fn plan(d: usize, q: usize, unital: bool) -> Vec<AntiSlot> {
    let n = d * d;
    let mut slots = Vec::new();
    for sum in 1..2 * n - 2 {
        let entries = anti_diagonal_entries(n, sum);
        let surviving: Vec<usize> = (0..entries.len())
            .filter(|&k| !in_top_left(d, entries[k]) && !(unital && is_block_corner(d, entries[k])))
            .collect();
        let count = surviving.len().saturating_sub(q);
        if count > 0 {
            slots.push(AntiSlot { sum, entries, surviving, count });
        }
    }
    slots
}

pub fn element_count(slots: &[AntiSlot]) -> usize {
    slots.iter().map(|s| 2 * s.count).sum()
}

/// Places `values` on `entries` (reflecting below the diagonal), subtracts
/// `tr_Y` from the top-left block and, for `unital`, adds the negated block
/// trace to the top-left entry of every off-diagonal block.
pub fn element(d: usize, entries: &[(usize, usize)], values: &[C64], unital: bool) -> HermitianMatrix {
    let n = d * d;
    let mut m = DMatrix::<C64>::zeros(n, n);
    for (&(i, j), &v) in entries.iter().zip(values) {
        m[(i, j)] = v;
        m[(j, i)] = v.conj();
    }
    let try_ = DMatrix::<C64>::from_fn(d, d, |i, j| (0..d).map(|a| m[(a * d + i, a * d + j)]).sum());
    for i in 0..d {
        for j in 0..d {
            m[(i, j)] -= try_[(i, j)];
        }
    }
    if unital {
        let mut corrections = Vec::new();
        for a in 0..d {
            for b in 0..d {
                if a != b {
                    let t: C64 = (0..d).map(|i| m[(a * d + i, b * d + i)]).sum();
                    corrections.push((a * d, b * d, t));
                }
            }
        }
        for (r, c, t) in corrections {
            m[(r, c)] -= t;
        }
    }
    for k in 0..n {
        debug_assert_eq!(m[(k, k)], ZERO);
    }
    HermitianMatrix::new(ComplexMatrix::from_dmatrix(m).expect("finite")).expect("Hermitian")
}
