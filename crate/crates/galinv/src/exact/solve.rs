//! Homogeneous linear systems over exact complex rationals and their
//! nullspaces.
//!
//! Rows are gathered incrementally into a reduced echelon; the pivot rule is
//! leftmost nonzero column, first row to arrive. Everything here is exact, so
//! "nullspace is empty" is a theorem about the system, not a tolerance call.

use std::collections::HashSet;

use num_traits::{One, Zero};

use super::linform::LinFormCR;
use super::scalar::CRat;

/// Sparse row: (column, coefficient) sorted by column, no zero coefficients.
pub type SparseRow = Vec<(u32, CRat)>;

/// A finite homogeneous system `row . x = 0` over named unknowns.
#[derive(Clone, Debug, Default)]
pub struct ConstraintSystem {
    names: Vec<String>,
    rows: Vec<SparseRow>,
    emitted: usize,
    seen: HashSet<Vec<(u32, CRat)>>,
}

impl ConstraintSystem {
    pub fn new(names: Vec<String>) -> Self {
        ConstraintSystem {
            names,
            rows: Vec::new(),
            emitted: 0,
            seen: HashSet::new(),
        }
    }

    pub fn unknowns(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    /// Rows handed in, before duplicate removal.
    pub fn rows_emitted(&self) -> usize {
        self.emitted
    }

    /// Add one equation. Rows are normalised (leading coefficient one) so
    /// exact duplicates and scalar multiples are stored once.
    pub fn push_row(&mut self, mut row: SparseRow) {
        self.emitted += 1;
        row.retain(|(_, c)| !c.is_zero());
        if row.is_empty() {
            return;
        }
        row.sort_by_key(|(col, _)| *col);
        let lead = row[0].1.clone();
        if lead != CRat::one() {
            let inv = lead.inv().expect("nonzero leading coefficient");
            for (_, c) in row.iter_mut() {
                *c = &*c * &inv;
            }
        }
        if self.seen.insert(row.clone()) {
            self.rows.push(row);
        }
    }

    /// Add a collected linear form as a row; it must be homogeneous.
    pub fn push_linform(&mut self, lf: &LinFormCR) {
        assert!(
            lf.constant.is_zero(),
            "constraint rows must be homogeneous, got constant {}",
            lf.constant
        );
        let row: SparseRow = lf.coeffs.iter().map(|(k, v)| (*k, v.clone())).collect();
        self.push_row(row);
    }

    pub fn extend(&mut self, other: &ConstraintSystem) {
        assert_eq!(self.names.len(), other.names.len());
        for row in &other.rows {
            self.push_row(row.clone());
        }
    }

    /// Exact nullspace with audit data.
    pub fn nullspace(&self) -> Nullspace {
        let mut ech = Echelon::new(self.names.len());
        for row in &self.rows {
            ech.insert(row.clone());
        }
        ech.into_nullspace(self.rows.len(), self.emitted)
    }
}

/// Result of an exact elimination.
#[derive(Clone, Debug)]
pub struct Nullspace {
    /// Basis vectors, dense over the unknown order, each scaled so its first
    /// nonzero coordinate is one.
    pub basis: Vec<Vec<CRat>>,
    pub rank: usize,
    pub unknowns: usize,
    pub rows_used: usize,
    pub rows_emitted: usize,
}

impl Nullspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Exact membership test: does the vector lie in the span of the basis?
    pub fn contains(&self, v: &[CRat]) -> bool {
        let mut ech = Echelon::new(self.unknowns);
        for b in &self.basis {
            ech.insert(dense_to_sparse(b));
        }
        let before = ech.pivots.len();
        ech.insert(dense_to_sparse(v));
        ech.pivots.len() == before
    }

    /// Do two bases span the same subspace?
    pub fn same_span(&self, other: &Nullspace) -> bool {
        self.dim() == other.dim() && other.basis.iter().all(|v| self.contains(v))
    }
}

pub fn dense_to_sparse(v: &[CRat]) -> SparseRow {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (k as u32, c.clone()))
        .collect()
}

/// Incremental reduced echelon over `CRat`.
pub struct Echelon {
    cols: usize,
    /// (pivot column, row) sorted by pivot column; rows are fully reduced
    /// against each other and have leading coefficient one.
    pivots: Vec<(u32, SparseRow)>,
}

impl Echelon {
    pub fn new(cols: usize) -> Self {
        Echelon {
            cols,
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// The reduced rows, sorted by pivot column.
    pub fn pivot_rows(&self) -> impl Iterator<Item = &SparseRow> {
        self.pivots.iter().map(|(_, r)| r)
    }

    /// Canonical remainder of a row: every entry sitting at a pivot column
    /// is eliminated, not just the leading one. Pivot rows are themselves
    /// fully inter-reduced, so one pass suffices.
    pub fn reduce_row(&self, mut row: SparseRow) -> SparseRow {
        let mut k = 0;
        while k < row.len() {
            let col = row[k].0;
            match self.pivots.binary_search_by_key(&col, |(c, _)| *c) {
                Ok(p) => {
                    let coeff = row[k].1.clone();
                    // The pivot row's support starts at `col`, so entries
                    // before position k are untouched.
                    row = row_sub_scaled(&row, &self.pivots[p].1, &coeff);
                }
                Err(_) => k += 1,
            }
        }
        row
    }

    /// Insert a row; returns true if it increased the rank.
    pub fn insert(&mut self, row: SparseRow) -> bool {
        let mut row = self.reduce_row(row);
        let Some(&(lead_col, _)) = row.first() else {
            return false;
        };
        let inv = row[0].1.inv().expect("nonzero pivot");
        for (_, c) in row.iter_mut() {
            *c = &*c * &inv;
        }
        // Back-substitute the new pivot into the existing rows.
        for (_, prow) in self.pivots.iter_mut() {
            if let Some(k) = prow.iter().position(|(c, _)| *c == lead_col) {
                let coeff = prow[k].1.clone();
                *prow = row_sub_scaled(prow, &row, &coeff);
            }
        }
        let at = self
            .pivots
            .binary_search_by_key(&lead_col, |(c, _)| *c)
            .unwrap_err();
        self.pivots.insert(at, (lead_col, row));
        true
    }

    fn into_nullspace(self, rows_used: usize, rows_emitted: usize) -> Nullspace {
        let rank = self.pivots.len();
        let pivot_cols: Vec<u32> = self.pivots.iter().map(|(c, _)| *c).collect();
        let mut basis = Vec::new();
        for free in 0..self.cols as u32 {
            if pivot_cols.binary_search(&free).is_ok() {
                continue;
            }
            let mut v = vec![CRat::zero(); self.cols];
            v[free as usize] = CRat::one();
            for (pc, row) in &self.pivots {
                if let Some((_, c)) = row.iter().find(|(c, _)| *c == free) {
                    v[*pc as usize] = -c;
                }
            }
            normalize_first_nonzero(&mut v);
            basis.push(v);
        }
        Nullspace {
            basis,
            rank,
            unknowns: self.cols,
            rows_used,
            rows_emitted,
        }
    }
}

/// Scale every vector so its first nonzero coordinate is one.
pub fn normalize_first_nonzero(v: &mut [CRat]) {
    if let Some(first) = v.iter().find(|c| !c.is_zero()).cloned() {
        let inv = first.inv().expect("nonzero");
        for c in v.iter_mut() {
            *c = &*c * &inv;
        }
    }
}

fn row_sub_scaled(a: &SparseRow, b: &SparseRow, factor: &CRat) -> SparseRow {
    // a - factor * b, merging sorted sparse rows
    let mut out = SparseRow::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some((ca, va)), Some((cb, vb))) if ca == cb => {
                let v = va - &(factor * vb);
                if !v.is_zero() {
                    out.push((*ca, v));
                }
                i += 1;
                j += 1;
            }
            (Some((ca, va)), Some((cb, _))) if ca < cb => {
                out.push((*ca, va.clone()));
                i += 1;
            }
            (Some(_), Some((cb, vb))) => {
                out.push((*cb, -(factor * vb)));
                j += 1;
            }
            (Some((ca, va)), None) => {
                out.push((*ca, va.clone()));
                i += 1;
            }
            (None, Some((cb, vb))) => {
                out.push((*cb, -(factor * vb)));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// Span tracker for dense vectors; used to compare and reduce families.
pub struct Span {
    ech: Echelon,
    dim: usize,
}

impl Span {
    pub fn new(len: usize) -> Self {
        Span {
            ech: Echelon::new(len),
            dim: 0,
        }
    }

    pub fn insert(&mut self, v: &[CRat]) -> bool {
        let grew = self.ech.insert(dense_to_sparse(v));
        if grew {
            self.dim += 1;
        }
        grew
    }

    pub fn contains(&self, v: &[CRat]) -> bool {
        self.ech.reduce_row(dense_to_sparse(v)).is_empty()
    }

    /// v reduced modulo the span (exact remainder).
    pub fn reduce(&self, v: &[CRat]) -> Vec<CRat> {
        let len = self.ech.cols;
        let red = self.ech.reduce_row(dense_to_sparse(v));
        let mut out = vec![CRat::zero(); len];
        for (c, x) in red {
            out[c as usize] = x;
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|k| format!("x{k}")).collect()
    }

    #[test]
    fn full_rank_has_empty_basis() {
        let mut sys = ConstraintSystem::new(names(4));
        for k in 0..4u32 {
            sys.push_row(vec![(k, CRat::one())]);
        }
        let ns = sys.nullspace();
        assert_eq!(ns.rank, 4);
        assert!(ns.basis.is_empty());
    }

    #[test]
    fn no_rows_means_full_nullspace() {
        let sys = ConstraintSystem::new(names(3));
        let ns = sys.nullspace();
        assert_eq!(ns.dim(), 3);
        assert_eq!(ns.rank, 0);
    }

    #[test]
    fn single_difference_row() {
        // x1 - x2 = 0 over {x1, x2}: basis {(1,1)}.
        // Oracle: brute-force grid over small rationals, then span-compare.
        let mut sys = ConstraintSystem::new(names(2));
        sys.push_row(vec![(0, CRat::one()), (1, CRat::from_int(-1))]);
        let ns = sys.nullspace();
        assert_eq!(ns.dim(), 1);
        assert_eq!(ns.basis[0], vec![CRat::one(), CRat::one()]);

        let mut grid_solutions = Vec::new();
        for a in -2i64..=2 {
            for b in -2i64..=2 {
                let x = vec![CRat::from_int(a), CRat::from_int(b)];
                if &x[0] - &x[1] == CRat::zero() && !(a == 0 && b == 0) {
                    grid_solutions.push(x);
                }
            }
        }
        for sol in &grid_solutions {
            assert!(ns.contains(sol));
        }
    }

    #[test]
    fn basis_vectors_satisfy_all_rows() {
        let mut sys = ConstraintSystem::new(names(5));
        sys.push_row(vec![(0, CRat::from_int(2)), (2, CRat::from_int(-3))]);
        sys.push_row(vec![(1, CRat::one()), (3, CRat::one()), (4, CRat::one())]);
        sys.push_row(vec![(0, CRat::from_int(4)), (2, CRat::from_int(-6))]); // dependent
        let ns = sys.nullspace();
        assert_eq!(ns.rank, 2);
        assert_eq!(ns.dim(), 3);
        for b in &ns.basis {
            for row in sys.rows() {
                let mut acc = CRat::zero();
                for (c, v) in row {
                    acc = &acc + &(v * &b[*c as usize]);
                }
                assert!(acc.is_zero());
            }
        }
    }

    #[test]
    fn duplicate_and_scaled_rows_collapse() {
        let mut sys = ConstraintSystem::new(names(2));
        sys.push_row(vec![(0, CRat::one()), (1, CRat::one())]);
        sys.push_row(vec![(0, CRat::from_int(7)), (1, CRat::from_int(7))]);
        assert_eq!(sys.rows().len(), 1);
        assert_eq!(sys.rows_emitted(), 2);
    }
}
