//! Minimal coupling and the noncommutative elimination that turns the
//! four-component first-order equation into the two-component magnetic
//! equation.
//!
//! Potentials are opaque symbols with formal first derivatives; no function
//! spaces or field dynamics are modelled. Normal form moves every derivative
//! symbol right past every field symbol with the product rule, emitting
//! field-derivative symbols, and then sorts the commuting segments. Second
//! derivatives of fields cannot arise on the elimination path, and the
//! rewriter guards that with a hard assertion.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Zero};

use crate::engine::{DiffOpCR, MultiIndex};
use crate::error::{Error, Result};
use crate::exact::{pauli, pauli_decompose, CRat, Mat, MatCR, Rat};

/// Derivative axis: time or one of the three space directions.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum Axis {
    T,
    X(usize),
}

/// Field symbol: the scalar potential or a vector-potential component.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum Field {
    V,
    A(usize),
}

/// Word letters of the noncommutative algebra.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum NCSymbol {
    /// Scalar potential.
    Pot(Field),
    /// First derivative of a field; atomic, never rewritten further.
    FieldDeriv(Axis, Field),
    /// Time derivative.
    Dt,
    /// Space derivative.
    Dx(usize),
}

impl NCSymbol {
    fn is_function(&self) -> bool {
        matches!(self, NCSymbol::Pot(_) | NCSymbol::FieldDeriv(..))
    }

    fn is_derivative(&self) -> bool {
        matches!(self, NCSymbol::Dt | NCSymbol::Dx(_))
    }

    fn axis(&self) -> Axis {
        match self {
            NCSymbol::Dt => Axis::T,
            NCSymbol::Dx(j) => Axis::X(*j),
            _ => unreachable!("axis of a non-derivative symbol"),
        }
    }
}

/// One term: a 2x2 exact matrix coefficient times an ordered symbol word.
#[derive(Clone, PartialEq, Debug)]
pub struct NCTerm {
    pub coeff: MatCR,
    pub word: Vec<NCSymbol>,
}

/// Sum of noncommutative terms over 2x2 matrix coefficients.
#[derive(Clone, PartialEq, Default, Debug)]
pub struct NCExpr {
    terms: Vec<NCTerm>,
}

impl NCExpr {
    pub fn zero() -> Self {
        NCExpr::default()
    }

    pub fn term(coeff: MatCR, word: Vec<NCSymbol>) -> Self {
        NCExpr {
            terms: vec![NCTerm { coeff, word }],
        }
        .merged()
    }

    pub fn scalar(c: CRat) -> Self {
        Self::term(Mat::identity(2).scale(&c), vec![])
    }

    pub fn symbol(s: NCSymbol) -> Self {
        Self::term(Mat::identity(2), vec![s])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[NCTerm] {
        &self.terms
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(rhs.terms.clone());
        NCExpr { terms }.merged()
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(&CRat::from_int(-1)))
    }

    pub fn scale(&self, c: &CRat) -> Self {
        NCExpr {
            terms: self
                .terms
                .iter()
                .map(|t| NCTerm {
                    coeff: t.coeff.scale(c),
                    word: t.word.clone(),
                })
                .collect(),
        }
        .merged()
    }

    /// Product: matrix coefficients multiply, words concatenate.
    pub fn mul(&self, rhs: &Self) -> Self {
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &rhs.terms {
                let mut word = a.word.clone();
                word.extend(b.word.iter().copied());
                terms.push(NCTerm {
                    coeff: a.coeff.mul(&b.coeff),
                    word,
                });
            }
        }
        NCExpr { terms }.merged()
    }

    /// Merge identical words and drop zero coefficients; words are compared
    /// as ordered sequences.
    fn merged(self) -> Self {
        let mut map: BTreeMap<Vec<NCSymbol>, MatCR> = BTreeMap::new();
        for t in self.terms {
            if t.coeff.is_zero() {
                continue;
            }
            match map.entry(t.word) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(t.coeff);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let s = e.get().add(&t.coeff);
                    if s.is_zero() {
                        e.remove();
                    } else {
                        *e.get_mut() = s;
                    }
                }
            }
        }
        NCExpr {
            terms: map
                .into_iter()
                .map(|(word, coeff)| NCTerm { coeff, word })
                .collect(),
        }
    }
}

/// Rewrite every derivative symbol right past every field symbol via the
/// product rule `D f = f D + (Df)`, then sort the commuting function and
/// derivative segments. Idempotent and linear.
///
/// Panics if the product rule would need a second field derivative; the
/// coupling alphabet stops at first derivatives by construction.
pub fn nc_normal_form(e: &NCExpr) -> NCExpr {
    let mut work: Vec<NCTerm> = e.terms.clone();
    let mut done: Vec<NCTerm> = Vec::new();
    while let Some(t) = work.pop() {
        // find an adjacent (derivative, function) pair
        let pos = t
            .word
            .windows(2)
            .position(|w| w[0].is_derivative() && w[1].is_function());
        match pos {
            None => done.push(t),
            Some(p) => {
                let d = t.word[p];
                let f = t.word[p + 1];
                // swapped: ... f d ...
                let mut w1 = t.word.clone();
                w1.swap(p, p + 1);
                work.push(NCTerm {
                    coeff: t.coeff.clone(),
                    word: w1,
                });
                // contracted: ... (df) ...
                let df = match f {
                    NCSymbol::Pot(field) => NCSymbol::FieldDeriv(d.axis(), field),
                    NCSymbol::FieldDeriv(..) => {
                        panic!("second field derivative produced during normal form")
                    }
                    _ => unreachable!(),
                };
                let mut w2 = t.word.clone();
                w2.remove(p + 1);
                w2[p] = df;
                work.push(NCTerm {
                    coeff: t.coeff,
                    word: w2,
                });
            }
        }
    }
    // Functions commute with functions, derivatives with derivatives: sort
    // each segment for a canonical word.
    for t in &mut done {
        let split = t.word.iter().position(|s| s.is_derivative()).unwrap_or(t.word.len());
        t.word[..split].sort();
        t.word[split..].sort();
    }
    NCExpr { terms: done }.merged()
}

/// The coupled pair on `(phi, chi)` obtained by splitting a four-component
/// equation into upper and lower 2x2 block rows.
#[derive(Clone, Debug, PartialEq)]
pub struct CoupledPair {
    /// Upper block rows: `upper_phi . phi + upper_chi . chi = 0`.
    pub upper_phi: NCExpr,
    pub upper_chi: NCExpr,
    /// Lower block rows: `lower_phi . phi + lower_chi . chi = 0`.
    pub lower_phi: NCExpr,
    pub lower_chi: NCExpr,
}

/// Substitute `i dt -> i dt - V` and `-i dx_j -> -i dx_j - A_j` (that is,
/// `dt -> dt + iV`, `dx_j -> dx_j - i A_j`) into a first-order
/// four-component operator and split it into the coupled pair.
pub fn minimal_substitute(op: &DiffOpCR) -> Result<CoupledPair> {
    if op.ncomp() != 4 {
        return Err(Error::UnsupportedNcomp(op.ncomp()));
    }
    if op.order() > 1 {
        return Err(Error::UnsupportedOrder(
            op.order(),
            "minimal coupling is defined on first-order operators".into(),
        ));
    }
    let dt_sub = NCExpr::symbol(NCSymbol::Dt).add(&NCExpr::term(
        Mat::identity(2).scale(&CRat::i()),
        vec![NCSymbol::Pot(Field::V)],
    ));
    let dx_sub: Vec<NCExpr> = (0..3)
        .map(|j| {
            NCExpr::symbol(NCSymbol::Dx(j)).add(&NCExpr::term(
                Mat::identity(2).scale(&-CRat::i()),
                vec![NCSymbol::Pot(Field::A(j))],
            ))
        })
        .collect();

    let mut pair = CoupledPair {
        upper_phi: NCExpr::zero(),
        upper_chi: NCExpr::zero(),
        lower_phi: NCExpr::zero(),
        lower_chi: NCExpr::zero(),
    };
    for (idx, m) in op.terms() {
        let factor = if *idx == MultiIndex::time(1) {
            dt_sub.clone()
        } else if *idx == MultiIndex::CONST {
            NCExpr::scalar(CRat::one())
        } else {
            let axis = (0..3).find(|&j| idx.dx[j] == 1).unwrap();
            dx_sub[axis].clone()
        };
        let blocks = [
            (m.block(2, 0, 0), 0),
            (m.block(2, 0, 1), 1),
            (m.block(2, 1, 0), 2),
            (m.block(2, 1, 1), 3),
        ];
        for (blk, which) in blocks {
            if blk.is_zero() {
                continue;
            }
            let contrib = NCExpr::term(blk, vec![]).mul(&factor);
            match which {
                0 => pair.upper_phi = pair.upper_phi.add(&contrib),
                1 => pair.upper_chi = pair.upper_chi.add(&contrib),
                2 => pair.lower_phi = pair.lower_phi.add(&contrib),
                _ => pair.lower_chi = pair.lower_chi.add(&contrib),
            }
        }
    }
    Ok(pair)
}

/// Eliminate `chi` from the pair: requires the upper equation to fix `chi`
/// through an invertible constant coefficient, as the first-order
/// four-component equation does. Returns the two-component equation on
/// `phi`, normalised so the bare time-derivative word carries coefficient
/// `i`.
pub fn eliminate_lower(pair: &CoupledPair, mass: &Rat) -> Result<NCExpr> {
    if mass.is_zero() {
        return Err(Error::BadMass("0".into()));
    }
    // upper_chi must be c * I with constant nonzero c
    let c = {
        let t = pair.upper_chi.terms();
        if t.len() != 1 || !t[0].word.is_empty() {
            return Err(Error::NotSolvableForLower(
                "upper chi coefficient is not a constant".into(),
            ));
        }
        let m = &t[0].coeff;
        let c = m[(0, 0)].clone();
        if m != &Mat::identity(2).scale(&c) || c.is_zero() {
            return Err(Error::NotSolvableForLower(
                "upper chi coefficient is not an invertible scalar".into(),
            ));
        }
        c
    };
    // chi = -(1/c) upper_phi . phi
    let chi = pair.upper_phi.scale(&(-CRat::one()).checked_div(&c)?);
    let raw = pair.lower_phi.add(&pair.lower_chi.mul(&chi));
    let normal = nc_normal_form(&raw);

    // scale so the bare [Dt] word has coefficient i * I
    let dt_coeff = normal
        .terms()
        .iter()
        .find(|t| t.word == vec![NCSymbol::Dt])
        .map(|t| t.coeff.clone())
        .ok_or_else(|| Error::NotSolvableForLower("no time derivative after elimination".into()))?;
    let c0 = dt_coeff[(0, 0)].clone();
    if dt_coeff != Mat::identity(2).scale(&c0) || c0.is_zero() {
        return Err(Error::NotSolvableForLower(
            "time-derivative coefficient is not scalar".into(),
        ));
    }
    Ok(normal.scale(&CRat::i().checked_div(&c0)?))
}

/// The expected two-component equation as a left-hand side equal to zero:
/// `i dt - V - (1/2m) [ (i dx + A)^2 + i sigma . (i dx + A) x (i dx + A) ]`,
/// built independently from the Pauli structure.
pub fn pauli_schroedinger_reference(mass: &Rat) -> NCExpr {
    let i = CRat::i();
    // p_j = i dx_j + A_j
    let p: Vec<NCExpr> = (0..3)
        .map(|j| {
            NCExpr::term(Mat::identity(2).scale(&i), vec![NCSymbol::Dx(j)]).add(&NCExpr::symbol(
                NCSymbol::Pot(Field::A(j)),
            ))
        })
        .collect();
    // (i dx + A)^2
    let mut p2 = NCExpr::zero();
    for j in 0..3 {
        p2 = p2.add(&p[j].mul(&p[j]));
    }
    // i sigma . (p x p)
    let mut spin = NCExpr::zero();
    for l in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let e = crate::galilei::epsilon(l + 1, j + 1, k + 1);
                if e != 0 {
                    let sig = pauli(l + 1).unwrap().scale(&CRat::int_i(e));
                    spin = spin.add(&NCExpr::term(sig, vec![]).mul(&p[j]).mul(&p[k]));
                }
            }
        }
    }
    let bracket = p2.add(&spin);
    let inv_2m = CRat::from_rat(Rat::one() / (Rat::from_integer(2.into()) * mass));
    NCExpr::term(Mat::identity(2).scale(&CRat::i()), vec![NCSymbol::Dt])
        .sub(&NCExpr::symbol(NCSymbol::Pot(Field::V)))
        .sub(&bracket.scale(&inv_2m))
}

fn symbol_latex(s: &NCSymbol) -> String {
    match s {
        NCSymbol::Dt => r"\partial_t".into(),
        NCSymbol::Dx(j) => format!(r"\partial_{}", j + 1),
        NCSymbol::Pot(Field::V) => "V".into(),
        NCSymbol::Pot(Field::A(j)) => format!("A_{}", j + 1),
        NCSymbol::FieldDeriv(Axis::T, Field::V) => r"(\partial_t V)".into(),
        NCSymbol::FieldDeriv(Axis::X(j), Field::V) => format!(r"(\partial_{} V)", j + 1),
        NCSymbol::FieldDeriv(Axis::T, Field::A(k)) => format!(r"(\partial_t A_{})", k + 1),
        NCSymbol::FieldDeriv(Axis::X(j), Field::A(k)) => {
            format!(r"(\partial_{} A_{})", j + 1, k + 1)
        }
    }
}

fn coeff_latex(m: &MatCR) -> String {
    let c = pauli_decompose(m).expect("2x2 coefficient");
    let mut parts = Vec::new();
    let names = ["", r"\sigma_1", r"\sigma_2", r"\sigma_3"];
    for (k, name) in names.iter().enumerate() {
        if c[k].is_zero() {
            continue;
        }
        if name.is_empty() {
            parts.push(format!("({})", c[k]));
        } else if c[k] == CRat::one() {
            parts.push(name.to_string());
        } else {
            parts.push(format!("({}){}", c[k], name));
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// Render an expression as LaTeX for the derivation transcript.
pub fn nc_to_latex(e: &NCExpr) -> String {
    if e.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (n, t) in e.terms().iter().enumerate() {
        if n > 0 {
            out.push_str(" + ");
        }
        let _ = write!(out, r"\left[{}\right]", coeff_latex(&t.coeff));
        for s in &t.word {
            let _ = write!(out, r"\,{}", symbol_latex(s));
        }
    }
    out
}
