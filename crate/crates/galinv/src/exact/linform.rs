//! Linear forms in named unknowns with polynomial coefficients.
//!
//! Ansatz matrices start out with independent unknown entries; transforming
//! them produces entries that are linear combinations of those unknowns with
//! `VPoly` coefficients. Unknowns are addressed by a dense index into an
//! [`UnknownTable`] that remembers the reproducible display name.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::scalar::CRat;
use super::vpoly::{Mono, VPoly};

/// Registry of unknown names; index order is the column order used by
/// constraint systems and reported bases.
#[derive(Clone, Debug, Default)]
pub struct UnknownTable {
    names: Vec<String>,
}

impl UnknownTable {
    pub fn push(&mut self, name: String) -> u32 {
        let id = self.names.len() as u32;
        self.names.push(name);
        id
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// `constant + sum_k coeffs[k] * unknown_k`, linear in the unknowns.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct LinForm {
    pub constant: VPoly,
    coeffs: BTreeMap<u32, VPoly>,
}

impl LinForm {
    pub fn from_poly(p: VPoly) -> Self {
        LinForm {
            constant: p,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_scalar(c: CRat) -> Self {
        Self::from_poly(VPoly::constant(c))
    }

    /// The bare unknown with coefficient one.
    pub fn unknown(id: u32) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(id, VPoly::one());
        LinForm {
            constant: VPoly::zero(),
            coeffs,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coeffs.is_empty()
    }

    pub fn has_unknowns(&self) -> bool {
        !self.coeffs.is_empty()
    }

    /// Some(poly) iff no unknowns appear.
    pub fn as_poly(&self) -> Option<&VPoly> {
        if self.coeffs.is_empty() {
            Some(&self.constant)
        } else {
            None
        }
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&u32, &VPoly)> {
        self.coeffs.iter()
    }

    fn add_coeff(&mut self, id: u32, p: VPoly) {
        if p.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(id) {
            Entry::Vacant(e) => {
                e.insert(p);
            }
            Entry::Occupied(mut e) => {
                let s = e.get() + &p;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn scale_poly(&self, p: &VPoly) -> LinForm {
        if p.is_zero() {
            return LinForm::default();
        }
        let mut out = LinForm::from_poly(&self.constant * p);
        for (id, c) in &self.coeffs {
            out.add_coeff(*id, c * p);
        }
        out
    }

    /// Substitute an exact assignment for every unknown, yielding a polynomial.
    pub fn substitute(&self, assignment: &[CRat]) -> VPoly {
        let mut acc = self.constant.clone();
        for (id, c) in &self.coeffs {
            acc = &acc + &c.scale(&assignment[*id as usize]);
        }
        acc
    }

    /// Group by monomial: for each monomial appearing anywhere, the linear
    /// form (over `CRat` coefficients) multiplying it. Reassembling the map
    /// reproduces the input exactly.
    pub fn collect(&self) -> BTreeMap<Mono, LinFormCR> {
        let mut out: BTreeMap<Mono, LinFormCR> = BTreeMap::new();
        for (m, c) in self.constant.terms() {
            out.entry(*m).or_default().constant = c.clone();
        }
        for (id, p) in &self.coeffs {
            for (m, c) in p.terms() {
                out.entry(*m).or_default().coeffs.insert(*id, c.clone());
            }
        }
        out
    }
}

/// Linear form with plain `CRat` coefficients: one monomial's worth of a
/// collected [`LinForm`]. Also the row type of constraint systems.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct LinFormCR {
    pub constant: CRat,
    pub coeffs: BTreeMap<u32, CRat>,
}

impl LinFormCR {
    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coeffs.is_empty()
    }
}

/// Reassemble a collected map back into a `LinForm` (inverse of `collect`).
pub fn reassemble(parts: &BTreeMap<Mono, LinFormCR>) -> LinForm {
    let mut out = LinForm::default();
    for (m, lf) in parts {
        if !lf.constant.is_zero() {
            out.constant = &out.constant + &VPoly::monomial(*m, lf.constant.clone());
        }
        for (id, c) in &lf.coeffs {
            out.add_coeff(*id, VPoly::monomial(*m, c.clone()));
        }
    }
    out
}

impl Add<&LinForm> for &LinForm {
    type Output = LinForm;
    fn add(self, rhs: &LinForm) -> LinForm {
        let mut out = self.clone();
        out.constant = &out.constant + &rhs.constant;
        for (id, c) in &rhs.coeffs {
            out.add_coeff(*id, c.clone());
        }
        out
    }
}

impl Sub<&LinForm> for &LinForm {
    type Output = LinForm;
    fn sub(self, rhs: &LinForm) -> LinForm {
        let mut out = self.clone();
        out.constant = &out.constant - &rhs.constant;
        for (id, c) in &rhs.coeffs {
            out.add_coeff(*id, -c);
        }
        out
    }
}

/// Defined when at most one side carries unknowns; the product of two
/// unknown-bearing forms would be quadratic, which the engine never forms.
impl Mul<&LinForm> for &LinForm {
    type Output = LinForm;
    fn mul(self, rhs: &LinForm) -> LinForm {
        match (self.as_poly(), rhs.as_poly()) {
            (Some(p), _) => rhs.scale_poly(p),
            (_, Some(p)) => self.scale_poly(p),
            (None, None) => panic!("product of two unknown-bearing linear forms"),
        }
    }
}

impl Neg for &LinForm {
    type Output = LinForm;
    fn neg(self) -> LinForm {
        let mut out = LinForm::from_poly(-&self.constant);
        for (id, c) in &self.coeffs {
            out.coeffs.insert(*id, -c);
        }
        out
    }
}

macro_rules! forward_lf_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for LinForm {
            type Output = LinForm;
            fn $method(self, rhs: LinForm) -> LinForm {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_lf_binop!(Add, add);
forward_lf_binop!(Sub, sub);
forward_lf_binop!(Mul, mul);

impl Neg for LinForm {
    type Output = LinForm;
    fn neg(self) -> LinForm {
        -&self
    }
}

impl Zero for LinForm {
    fn zero() -> Self {
        LinForm::default()
    }
    fn is_zero(&self) -> bool {
        LinForm::is_zero(self)
    }
}

impl One for LinForm {
    fn one() -> Self {
        LinForm::from_poly(VPoly::one())
    }
}

impl From<VPoly> for LinForm {
    fn from(p: VPoly) -> Self {
        LinForm::from_poly(p)
    }
}

impl From<CRat> for LinForm {
    fn from(c: CRat) -> Self {
        LinForm::from_scalar(c)
    }
}

impl fmt::Display for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        if !self.constant.is_zero() {
            write!(f, "{}", self.constant)?;
            first = false;
        }
        for (id, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "[{}]*#{}", c, id)?;
        }
        Ok(())
    }
}

impl fmt::Debug for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::vpoly::{V1, V2};

    #[test]
    fn collect_trivial_cases() {
        // constant entry -> single monomial (0,0,...)
        let lf = LinForm::from_scalar(CRat::from_int(3));
        let parts = lf.collect();
        assert_eq!(parts.len(), 1);
        assert_eq!(
            parts.get(&crate::exact::vpoly::MONO_ONE).unwrap().constant,
            CRat::from_int(3)
        );

        // x1*v1^2 + x2 -> {(2,0,0)->x1, ()->x2}
        let mut m = crate::exact::vpoly::MONO_ONE;
        m[V1] = 2;
        let lf = &LinForm::unknown(0).scale_poly(&VPoly::monomial(m, CRat::one()))
            + &LinForm::unknown(1);
        let parts = lf.collect();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts.get(&m).unwrap().coeffs.get(&0), Some(&CRat::one()));
        assert_eq!(
            parts
                .get(&crate::exact::vpoly::MONO_ONE)
                .unwrap()
                .coeffs
                .get(&1),
            Some(&CRat::one())
        );
    }

    #[test]
    fn collect_reassemble_roundtrip() {
        let p1 = &VPoly::var(V1) + &VPoly::constant(CRat::ratio(2, 3));
        let p2 = &VPoly::var(V2) * &VPoly::var(V2);
        let lf = &(&LinForm::unknown(4).scale_poly(&p1) + &LinForm::unknown(7).scale_poly(&p2))
            + &LinForm::from_poly(&p1 * &p2);
        assert_eq!(reassemble(&lf.collect()), lf);
    }

    #[test]
    fn substitution_is_linear() {
        let lf = &LinForm::unknown(0).scale_poly(&VPoly::var(V1)) + &LinForm::unknown(1);
        let assignment = vec![CRat::from_int(2), CRat::from_int(-5)];
        let p = lf.substitute(&assignment);
        let expected = &VPoly::var(V1).scale(&CRat::from_int(2)) + &VPoly::constant(CRat::from_int(-5));
        assert_eq!(p, expected);
    }

    #[test]
    #[should_panic(expected = "unknown-bearing")]
    fn quadratic_product_rejected() {
        let a = LinForm::unknown(0);
        let b = LinForm::unknown(1);
        let _ = &a * &b;
    }
}
