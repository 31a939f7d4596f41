//! Sparse multivariate polynomials in the boost-velocity indeterminates.
//!
//! The engine works with polynomials in `v1, v2, v3` (components of a
//! symbolic boost velocity). Two auxiliary blocks extend the variable set:
//! `u1, u2, u3` name a second symbolic velocity for algebraic identities
//! such as `B(u)B(v) = B(v)B(u)`, and `eps` is the first-order flow
//! parameter used to linearise rotations at the identity.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::scalar::CRat;

/// Number of indeterminates.
pub const NVARS: usize = 7;

/// Variable indices.
pub const V1: usize = 0;
pub const V2: usize = 1;
pub const V3: usize = 2;
pub const U1: usize = 3;
pub const EPS: usize = 6;

pub const VAR_NAMES: [&str; NVARS] = ["v1", "v2", "v3", "u1", "u2", "u3", "eps"];

/// Monomial exponent vector.
pub type Mono = [u8; NVARS];

pub const MONO_ONE: Mono = [0; NVARS];

fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    let mut out = [0u8; NVARS];
    for k in 0..NVARS {
        out[k] = a[k].checked_add(b[k]).expect("monomial degree overflow");
    }
    out
}

/// Sparse polynomial; the map never stores zero coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct VPoly {
    terms: BTreeMap<Mono, CRat>,
}

impl VPoly {
    pub fn constant(c: CRat) -> Self {
        let mut p = VPoly::default();
        if !c.is_zero() {
            p.terms.insert(MONO_ONE, c);
        }
        p
    }

    /// The indeterminate with the given index.
    pub fn var(idx: usize) -> Self {
        assert!(idx < NVARS);
        let mut m = MONO_ONE;
        m[idx] = 1;
        VPoly::monomial(m, CRat::one())
    }

    pub fn monomial(m: Mono, c: CRat) -> Self {
        let mut p = VPoly::default();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Some(c) iff the polynomial is the constant c (including zero).
    pub fn as_constant(&self) -> Option<CRat> {
        match self.terms.len() {
            0 => Some(CRat::zero()),
            1 => self.terms.get(&MONO_ONE).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &CRat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Mono) -> CRat {
        self.terms.get(m).cloned().unwrap_or_else(CRat::zero)
    }

    pub fn total_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|m| m.iter().map(|&e| e as usize).sum())
            .max()
            .unwrap_or(0)
    }

    fn add_term(&mut self, m: Mono, c: CRat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn scale(&self, c: &CRat) -> VPoly {
        if c.is_zero() {
            return VPoly::default();
        }
        VPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (*m, a * c))
                .collect(),
        }
    }

    /// Substitute exact values for all indeterminates.
    pub fn eval(&self, vals: &[CRat; NVARS]) -> CRat {
        let mut acc = CRat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for k in 0..NVARS {
                for _ in 0..m[k] {
                    t = &t * &vals[k];
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Keep only terms whose `eps` degree equals `deg`, dividing out eps^deg.
    pub fn eps_coefficient(&self, deg: u8) -> VPoly {
        let mut out = VPoly::default();
        for (m, c) in &self.terms {
            if m[EPS] == deg {
                let mut m2 = *m;
                m2[EPS] = 0;
                out.add_term(m2, c.clone());
            }
        }
        out
    }

    /// Largest eps exponent present.
    pub fn eps_degree(&self) -> u8 {
        self.terms.keys().map(|m| m[EPS]).max().unwrap_or(0)
    }
}

impl Zero for VPoly {
    fn zero() -> Self {
        VPoly::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for VPoly {
    fn one() -> Self {
        VPoly::constant(CRat::one())
    }
}

impl Add<&VPoly> for &VPoly {
    type Output = VPoly;
    fn add(self, rhs: &VPoly) -> VPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub<&VPoly> for &VPoly {
    type Output = VPoly;
    fn sub(self, rhs: &VPoly) -> VPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c);
        }
        out
    }
}

impl Mul<&VPoly> for &VPoly {
    type Output = VPoly;
    fn mul(self, rhs: &VPoly) -> VPoly {
        let mut out = VPoly::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(mono_mul(ma, mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &VPoly {
    type Output = VPoly;
    fn neg(self) -> VPoly {
        VPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

macro_rules! forward_poly_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for VPoly {
            type Output = VPoly;
            fn $method(self, rhs: VPoly) -> VPoly {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_poly_binop!(Add, add);
forward_poly_binop!(Sub, sub);
forward_poly_binop!(Mul, mul);

impl Neg for VPoly {
    type Output = VPoly;
    fn neg(self) -> VPoly {
        -&self
    }
}

impl From<CRat> for VPoly {
    fn from(c: CRat) -> Self {
        VPoly::constant(c)
    }
}

impl fmt::Display for VPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", c)?;
            for k in 0..NVARS {
                match m[k] {
                    0 => {}
                    1 => write!(f, "*{}", VAR_NAMES[k])?,
                    e => write!(f, "*{}^{}", VAR_NAMES[k], e)?,
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for VPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::scalar::rat;

    #[test]
    fn ring_basics() {
        let v1 = VPoly::var(V1);
        let v2 = VPoly::var(V2);
        let p = &v1 + &v2;
        let q = &v1 - &v2;
        // (v1+v2)(v1-v2) = v1^2 - v2^2
        let prod = &p * &q;
        let mut m1 = MONO_ONE;
        m1[V1] = 2;
        let mut m2 = MONO_ONE;
        m2[V2] = 2;
        assert_eq!(prod.coeff(&m1), CRat::one());
        assert_eq!(prod.coeff(&m2), CRat::from_int(-1));
        assert_eq!(prod.terms().count(), 2);
    }

    #[test]
    fn zero_coefficients_never_stored() {
        let v1 = VPoly::var(V1);
        let z = &v1 - &v1;
        assert!(z.is_zero());
        assert_eq!(z.terms().count(), 0);
        assert!(VPoly::constant(CRat::zero()).is_zero());
    }

    #[test]
    fn eps_extraction() {
        let e = VPoly::var(EPS);
        let v = VPoly::var(V1);
        let p = &(&e * &v) + &VPoly::constant(CRat::one());
        assert_eq!(p.eps_coefficient(1), v);
        assert_eq!(p.eps_coefficient(0), VPoly::one());
        assert_eq!(p.eps_degree(), 1);
    }

    #[test]
    fn eval_matches_structure() {
        // p = 2 v1^2 v3 - 1/2
        let mut m = MONO_ONE;
        m[V1] = 2;
        m[V3] = 1;
        let p = &VPoly::monomial(m, CRat::from_int(2)) + &VPoly::constant(CRat::ratio(-1, 2));
        let mut vals: [CRat; NVARS] = Default::default();
        vals[V1] = CRat::ratio(1, 2);
        vals[V3] = CRat::from_int(3);
        // 2 * 1/4 * 3 - 1/2 = 1
        assert_eq!(p.eval(&vals), CRat::from_rat(rat(1, 1)));
    }
}
