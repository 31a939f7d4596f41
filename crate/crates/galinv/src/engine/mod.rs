//! Invariance machinery: transform a matrix-coefficient differential
//! operator under a Galilei element plus phase, extract exact linear
//! constraints, and solve for the space of invariant equations.

mod calibrate;
mod context;
mod family;

pub use calibrate::{calibrated_reps, levy_leblond, schroedinger_operator, Reps};
pub use context::{transform_operator, transform_concrete, CtxKind, TransformContext};
pub use family::{
    cascade, commutant, derive_constraints, invariant_family, invariant_family_with_reps,
    oracle_family_with_elements, same_operator_span, standard_contexts, verify_invariance,
    CascadeStage, Family, FamilyAudit,
};

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::exact::{Coeff, CRat, LinForm, Mat, UnknownTable};

/// Derivative multi-index: time order `dt` and space orders `dx`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct MultiIndex {
    pub dt: u8,
    pub dx: [u8; 3],
}

impl MultiIndex {
    pub const CONST: MultiIndex = MultiIndex { dt: 0, dx: [0, 0, 0] };

    pub fn new(dt: u8, dx: [u8; 3]) -> Self {
        MultiIndex { dt, dx }
    }

    pub fn time(dt: u8) -> Self {
        MultiIndex { dt, dx: [0, 0, 0] }
    }

    pub fn space(axis: usize, order: u8) -> Self {
        let mut dx = [0, 0, 0];
        dx[axis] = order;
        MultiIndex { dt: 0, dx }
    }

    pub fn space_order(&self) -> usize {
        self.dx.iter().map(|&b| b as usize).sum()
    }

    pub fn order(&self) -> usize {
        self.dt as usize + self.space_order()
    }

    /// Mixed time and space derivatives in one term.
    pub fn is_mixed(&self) -> bool {
        self.dt > 0 && self.space_order() > 0
    }

    pub fn merge(&self, rhs: &Self) -> Self {
        MultiIndex {
            dt: self.dt + rhs.dt,
            dx: [
                self.dx[0] + rhs.dx[0],
                self.dx[1] + rhs.dx[1],
                self.dx[2] + rhs.dx[2],
            ],
        }
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.order() == 0 {
            return write!(f, "1");
        }
        if self.dt > 0 {
            write!(f, "dt{}", if self.dt > 1 { format!("^{}", self.dt) } else { String::new() })?;
        }
        for (k, &b) in self.dx.iter().enumerate() {
            if b > 0 {
                write!(f, "dx{}{}", k + 1, if b > 1 { format!("^{}", b) } else { String::new() })?;
            }
        }
        Ok(())
    }
}

/// A matrix-coefficient differential operator with finite support.
#[derive(Clone, PartialEq)]
pub struct DiffOp<T> {
    ncomp: usize,
    terms: BTreeMap<MultiIndex, Mat<T>>,
}

pub type DiffOpCR = DiffOp<CRat>;
pub type DiffOpLF = DiffOp<LinForm>;

impl<T: Coeff> DiffOp<T> {
    pub fn new(ncomp: usize) -> Self {
        DiffOp {
            ncomp,
            terms: BTreeMap::new(),
        }
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Mat<T>)> {
        self.terms.iter()
    }

    pub fn term(&self, idx: &MultiIndex) -> Option<&Mat<T>> {
        self.terms.get(idx)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn order(&self) -> usize {
        self.terms.keys().map(|k| k.order()).max().unwrap_or(0)
    }

    /// Insert-or-accumulate a term; zero matrices are never stored.
    pub fn add_term(&mut self, idx: MultiIndex, m: Mat<T>) {
        assert!(m.nrows() == self.ncomp && m.ncols() == self.ncomp, "coefficient shape");
        use std::collections::btree_map::Entry;
        match self.terms.entry(idx) {
            Entry::Vacant(e) => {
                if !m.is_zero() {
                    e.insert(m);
                }
            }
            Entry::Occupied(mut e) => {
                let s = e.get().add(&m);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.ncomp, rhs.ncomp);
        let mut out = self.clone();
        for (idx, m) in &rhs.terms {
            out.add_term(*idx, m.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.ncomp, rhs.ncomp);
        let mut out = self.clone();
        for (idx, m) in &rhs.terms {
            out.add_term(*idx, m.neg());
        }
        out
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = DiffOp::new(self.ncomp);
        for (idx, m) in &self.terms {
            out.add_term(*idx, m.scale(c));
        }
        out
    }

    /// Left-multiply every coefficient matrix by `m`.
    pub fn scale_left(&self, m: &Mat<T>) -> Self {
        let mut out = DiffOp::new(self.ncomp);
        for (idx, coeff) in &self.terms {
            out.add_term(*idx, m.mul(coeff));
        }
        out
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U + Copy) -> DiffOp<U> {
        let mut out = DiffOp::new(self.ncomp);
        for (idx, m) in &self.terms {
            out.add_term(*idx, m.map(f));
        }
        out
    }

    /// Every term with both time and space derivatives and a nonzero matrix.
    pub fn mixed_terms(&self) -> Vec<MultiIndex> {
        self.terms
            .keys()
            .filter(|idx| idx.is_mixed())
            .copied()
            .collect()
    }
}

impl DiffOpCR {
    pub fn to_lf(&self) -> DiffOpLF {
        self.map(|c| LinForm::from_scalar(c.clone()))
    }

    /// Flatten onto the coordinate layout `slots x ncomp^2` (row-major).
    pub fn to_coords(&self, slots: &[MultiIndex]) -> Vec<CRat> {
        let n = self.ncomp;
        let mut out = vec![CRat::zero(); slots.len() * n * n];
        for (idx, m) in &self.terms {
            let pos = slots
                .iter()
                .position(|s| s == idx)
                .expect("operator term outside slot layout");
            for ((r, c), e) in m.entries() {
                out[pos * n * n + r * n + c] = e.clone();
            }
        }
        out
    }

    pub fn from_coords(ncomp: usize, slots: &[MultiIndex], coords: &[CRat]) -> Self {
        let n = ncomp;
        let mut out = DiffOp::new(ncomp);
        for (pos, idx) in slots.iter().enumerate() {
            let m = Mat::from_fn(n, n, |r, c| coords[pos * n * n + r * n + c].clone());
            out.add_term(*idx, m);
        }
        out
    }

    /// Operator product: multi-indices merge additively because coefficient
    /// matrices are constant in space and time.
    pub fn compose(&self, rhs: &Self) -> Self {
        assert_eq!(self.ncomp, rhs.ncomp, "composing operators of different spinor dimension");
        let mut out = DiffOp::new(self.ncomp);
        for (ia, ma) in &self.terms {
            for (ib, mb) in &rhs.terms {
                out.add_term(ia.merge(ib), ma.mul(mb));
            }
        }
        out
    }

    pub fn power(&self, n: usize) -> Self {
        assert!(n >= 1, "power expects n >= 1");
        let mut out = self.clone();
        for _ in 1..n {
            out = out.compose(self);
        }
        out
    }

    /// Some(c) with `self = c * rhs` for a nonzero scalar, if proportional.
    pub fn proportional_to(&self, rhs: &Self) -> Option<CRat> {
        if self.ncomp != rhs.ncomp || self.is_zero() || rhs.is_zero() {
            return None;
        }
        let keys_a: Vec<_> = self.terms.keys().collect();
        let keys_b: Vec<_> = rhs.terms.keys().collect();
        if keys_a != keys_b {
            return None;
        }
        let (idx, ma) = self.terms.iter().next().unwrap();
        let mb = rhs.terms.get(idx).unwrap();
        let mut ratio = None;
        for ((r, c), e) in ma.entries() {
            if !e.is_zero() {
                let d = &mb[(r, c)];
                if d.is_zero() {
                    return None;
                }
                ratio = Some(e.checked_div(d).unwrap());
                break;
            }
        }
        let ratio = ratio?;
        for (idx, ma) in &self.terms {
            let mb = rhs.terms.get(idx).unwrap();
            if *ma != mb.scale(&ratio) {
                return None;
            }
        }
        Some(ratio)
    }
}

impl DiffOpLF {
    /// Some(concrete operator) iff every entry is a plain scalar.
    pub fn as_concrete(&self) -> Option<DiffOpCR> {
        let mut out = DiffOp::new(self.ncomp);
        for (idx, m) in &self.terms {
            let mut conc = Mat::zeros(self.ncomp, self.ncomp);
            for ((r, c), e) in m.entries() {
                let p = e.as_poly()?;
                conc[(r, c)] = p.as_constant()?;
            }
            out.add_term(*idx, conc);
        }
        Some(out)
    }
}

impl<T: Coeff + fmt::Display> fmt::Debug for DiffOp<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DiffOp(ncomp={})", self.ncomp)?;
        for (idx, m) in &self.terms {
            writeln!(f, "  {} *\n{}", idx, m)?;
        }
        Ok(())
    }
}

/// Slot layout for the general ansatz of the given order: every multi-index
/// with `dt + |dx| <= order`, including the constant slot, dropping mixed
/// time-space terms when `forbid_mixed` is set.
pub fn ansatz_slots(order: usize, forbid_mixed: bool) -> Vec<MultiIndex> {
    let mut slots = Vec::new();
    let ord = order as u8;
    for dt in 0..=ord {
        for b1 in 0..=ord {
            for b2 in 0..=ord {
                for b3 in 0..=ord {
                    let idx = MultiIndex::new(dt, [b1, b2, b3]);
                    if idx.order() > order {
                        continue;
                    }
                    if forbid_mixed && idx.is_mixed() {
                        continue;
                    }
                    slots.push(idx);
                }
            }
        }
    }
    slots.sort();
    slots
}

/// Build the all-unknown ansatz over the slot layout. Unknown names are
/// `B<dt><b1><b2><b3>_<row><col>` with 1-based entry indices.
pub fn ansatz(ncomp: usize, order: usize, forbid_mixed: bool) -> (DiffOpLF, UnknownTable, Vec<MultiIndex>) {
    let slots = ansatz_slots(order, forbid_mixed);
    let mut table = UnknownTable::default();
    let mut op = DiffOp::new(ncomp);
    for idx in &slots {
        let m = Mat::from_fn(ncomp, ncomp, |r, c| {
            LinForm::unknown(table.push(format!(
                "B{}{}{}{}_{}{}",
                idx.dt,
                idx.dx[0],
                idx.dx[1],
                idx.dx[2],
                r + 1,
                c + 1
            )))
        });
        op.add_term(*idx, m);
    }
    (op, table, slots)
}
