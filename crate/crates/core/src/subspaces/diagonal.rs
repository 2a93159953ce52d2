//! Placement of column data along the diagonals of an `n × n` grid.
//!
//! A diagonal of offset `t` has positions `p = 0 … n−t−1`, position `p`
//! being entry `(p, p+t)`. Viewing the grid as `d × d` blocks of size `d`,
//! some positions are tied together by partial-trace constraints; those
//! groups are found by enumeration.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::Rng;

use crate::linalg::{HermitianMatrix, C64, I, ONE};
use crate::tns::{both_tr0_block, random_block, tr0_block, RealMatrix};

/// Which partial traces every element must annihilate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Constraints {
    pub tr_x: bool,
    pub tr_y: bool,
}

/// Column source for one diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    /// Unconstrained generic columns.
    Free,
    /// Disjoint zero-sum groups of size `d`. Generator row `j·d + s` lands
    /// on position `layout[j·d + s]`; the remaining generator rows fill the
    /// unconstrained positions in increasing order.
    Tr0 { groups: usize, extra: usize, layout: Vec<usize> },
    /// Main diagonal with both consecutive and strided zero-sum groups.
    BothTr0,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalSlot {
    pub offset: usize,
    pub len: usize,
    pub source: Source,
    /// Number of columns (templates) used on this diagonal.
    pub count: usize,
    /// Row count `r` for which every `r × count` submatrix must be full rank.
    pub rows_required: usize,
}

/// Zero-sum position groups of the diagonal at `offset`.
pub fn constraint_groups(n: usize, d: usize, offset: usize, c: Constraints) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let mut by_block: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    let mut by_inner: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for p in 0..n - offset {
        let (r, col) = (p, p + offset);
        let (a, i) = (r / d, r % d);
        let (b, j) = (col / d, col % d);
        if c.tr_x && i == j {
            by_block.entry((a, b)).or_default().push(p);
        }
        if c.tr_y && a == b {
            by_inner.entry((i, j)).or_default().push(p);
        }
    }
    (by_block.into_values().collect(), by_inner.into_values().collect())
}

/// Plans every diagonal so that any nonzero element has at least
/// `min_nonzeros` nonzero entries on its upper-right-most nonzero diagonal.
pub fn plan(n: usize, d: usize, c: Constraints, min_nonzeros: usize) -> Vec<DiagonalSlot> {
    let mut slots = Vec::new();
    for offset in 0..n {
        let len = n - offset;
        if len < min_nonzeros {
            continue;
        }
        let r = len + 1 - min_nonzeros;
        let (consec, strided) = constraint_groups(n, d, offset, c);
        let (source, count) = match (consec.is_empty(), strided.is_empty()) {
            (true, true) => (Source::Free, r),
            (false, false) => {
                assert_eq!(len, d * d, "two constraint families only meet on the main diagonal");
                let f = (r - (r - 1) / (d - 1)).min((d - 1) * (d - 1));
                (Source::BothTr0, f)
            }
            _ => {
                let groups = if consec.is_empty() { strided } else { consec };
                debug_assert!(groups.iter().all(|g| g.len() == d));
                let k = groups.len();
                let mut layout: Vec<usize> = groups.concat();
                let mut used = vec![false; len];
                for &p in &layout {
                    used[p] = true;
                }
                layout.extend((0..len).filter(|&p| !used[p]));
                let f = r - (r / d).min(k);
                (Source::Tr0 { groups: k, extra: len - d * k, layout }, f)
            }
        };
        if count > 0 {
            slots.push(DiagonalSlot { offset, len, source, count, rows_required: r });
        }
    }
    slots
}

/// Number of real elements produced by a plan.
pub fn element_count(slots: &[DiagonalSlot]) -> usize {
    slots.iter().map(|s| if s.offset == 0 { s.count } else { 2 * s.count }).sum()
}

/// Random column data in position coordinates (`len × count`).
pub fn generate_columns<R: Rng + ?Sized>(slot: &DiagonalSlot, d: usize, rng: &mut R) -> RealMatrix {
    match &slot.source {
        Source::Free => random_block(slot.len, slot.count, rng),
        Source::BothTr0 => both_tr0_block(d, slot.count, rng),
        Source::Tr0 { groups, extra, layout } => {
            let g = tr0_block(d, *groups, *extra, slot.count, rng);
            let mut out = DMatrix::zeros(slot.len, slot.count);
            for (row, &p) in layout.iter().enumerate() {
                out.row_mut(p).copy_from(&g.row(row));
            }
            out
        }
    }
}

fn template(n: usize, offset: usize, values: &[f64], phase: C64) -> DMatrix<C64> {
    let mut m = DMatrix::<C64>::zeros(n, n);
    for (p, &v) in values.iter().enumerate() {
        let z = phase * v;
        m[(p, p + offset)] += z;
        if offset > 0 {
            m[(p + offset, p)] += z.conj();
        }
    }
    m
}

/// Hermitian elements from per-diagonal column data: main-diagonal
/// templates `D`, then `D + D†` for every off-diagonal template, then
/// `i(D − D†)` in the same order.
pub fn assemble(n: usize, columns: &[(usize, RealMatrix)]) -> Vec<HermitianMatrix> {
    let mut main = Vec::new();
    let mut sym = Vec::new();
    let mut imag = Vec::new();
    for (offset, cols) in columns {
        for j in 0..cols.ncols() {
            let v: Vec<f64> = cols.column(j).iter().copied().collect();
            if *offset == 0 {
                main.push(template(n, 0, &v, ONE));
            } else {
                sym.push(template(n, *offset, &v, ONE));
                imag.push(template(n, *offset, &v, I));
            }
        }
    }
    main.into_iter()
        .chain(sym)
        .chain(imag)
        .map(|m| HermitianMatrix::new(crate::linalg::ComplexMatrix::from_dmatrix(m).expect("finite")).expect("Hermitian"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{spectral_summary, unit_sphere, seeded_rng};
    use crate::tns::vandermonde;

    #[test]
    fn toy_pattern_on_four_by_four() {
        let none = Constraints { tr_x: false, tr_y: false };
        let slots = plan(4, 2, none, 2);
        assert_eq!(slots.iter().map(|s| (s.offset, s.count)).collect::<Vec<_>>(), vec![(0, 3), (1, 2), (2, 1)]);
        assert_eq!(element_count(&slots), 9);
        let columns: Vec<(usize, RealMatrix)> = slots
            .iter()
            .map(|s| {
                let nodes: Vec<f64> = (1..=s.len).map(|x| x as f64).collect();
                (s.offset, vandermonde(&nodes).unwrap().columns(0, s.count).into_owned())
            })
            .collect();
        let h = assemble(4, &columns);
        assert_eq!(h.len(), 9);
        let diag: Vec<f64> = (0..4).map(|i| h[2].get(i, i).re).collect();
        assert_eq!(diag, vec![1.0, 4.0, 9.0, 16.0]);
        assert_eq!(h[4].get(1, 2), C64::new(2.0, 0.0));
        assert_eq!(h[4].get(2, 1), C64::new(2.0, 0.0));
        assert_eq!(h[8].get(0, 2), C64::new(0.0, 1.0));
        assert_eq!(h[8].get(2, 0), C64::new(0.0, -1.0));

        let mut rng = seeded_rng(11);
        for _ in 0..1000 {
            let x = unit_sphere(9, &mut rng);
            let m = HermitianMatrix::combination(&x, &h).unwrap();
            assert!(spectral_summary(&m, 1e-8).unwrap().rank >= 2);
        }
    }

    #[test]
    fn groups_found_by_enumeration() {
        let both = Constraints { tr_x: true, tr_y: true };
        let (cx, cy) = constraint_groups(9, 3, 0, both);
        assert_eq!(cx, vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]]);
        assert_eq!(cy, vec![vec![0, 3, 6], vec![1, 4, 7], vec![2, 5, 8]]);
        let (cx, cy) = constraint_groups(9, 3, 1, both);
        assert!(cx.is_empty());
        assert_eq!(cy, vec![vec![0, 3, 6], vec![1, 4, 7]]);
        let (cx, cy) = constraint_groups(9, 3, 3, both);
        assert_eq!(cx, vec![vec![0, 1, 2], vec![3, 4, 5]]);
        assert!(cy.is_empty());
        let (cx, cy) = constraint_groups(9, 3, 4, both);
        assert!(cx.is_empty() && cy.is_empty());
    }

    #[test]
    fn strided_layout_for_near_diagonals() {
        let both = Constraints { tr_x: true, tr_y: true };
        let slots = plan(4, 2, both, 3);
        let s1 = slots.iter().find(|s| s.offset == 1).unwrap();
        assert_eq!(s1.source, Source::Tr0 { groups: 1, extra: 1, layout: vec![0, 2, 1] });
        assert_eq!(s1.count, 1);
        let s0 = slots.iter().find(|s| s.offset == 0).unwrap();
        assert_eq!((s0.source.clone(), s0.count), (Source::BothTr0, 1));
        assert_eq!(element_count(&slots), 3);
    }
}
