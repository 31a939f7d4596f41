//! Exact complex rationals: the ground field for the whole engine.
//!
//! Every conclusion downstream is an exact rank statement, so coefficients
//! are never floats. `CRat` stores real and imaginary parts as reduced
//! `BigRational`s; equality is exact.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number.
pub type Rat = BigRational;

/// Build a rational from an integer pair, panicking on zero denominator.
pub fn rat(n: i64, d: i64) -> Rat {
    assert!(d != 0, "zero denominator");
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Exact complex rational `re + im*i`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct CRat {
    pub re: Rat,
    pub im: Rat,
}

impl CRat {
    pub fn new(re: Rat, im: Rat) -> Self {
        CRat { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        CRat::new(Rat::from_integer(BigInt::from(n)), Rat::zero())
    }

    pub fn from_rat(re: Rat) -> Self {
        CRat::new(re, Rat::zero())
    }

    /// `n/d`, exact.
    pub fn ratio(n: i64, d: i64) -> Self {
        CRat::from_rat(rat(n, d))
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        CRat::new(Rat::zero(), Rat::one())
    }

    /// `c * i` for integer `c`.
    pub fn int_i(c: i64) -> Self {
        CRat::new(Rat::zero(), Rat::from_integer(BigInt::from(c)))
    }

    pub fn conj(&self) -> Self {
        CRat::new(self.re.clone(), -self.im.clone())
    }

    /// |z|^2 as an exact rational.
    pub fn norm_sqr(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(CRat::new(&self.re / &n, -(&self.im / &n)))
    }

    /// Exact division; errors on zero divisor.
    pub fn checked_div(&self, rhs: &CRat) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }
}

impl Zero for CRat {
    fn zero() -> Self {
        CRat::new(Rat::zero(), Rat::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for CRat {
    fn one() -> Self {
        CRat::from_int(1)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for CRat {
            type Output = CRat;
            fn $method(self, rhs: CRat) -> CRat {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&CRat> for CRat {
            type Output = CRat;
            fn $method(self, rhs: &CRat) -> CRat {
                (&self).$method(rhs)
            }
        }
        impl $trait<CRat> for &CRat {
            type Output = CRat;
            fn $method(self, rhs: CRat) -> CRat {
                self.$method(&rhs)
            }
        }
    };
}

impl Add<&CRat> for &CRat {
    type Output = CRat;
    fn add(self, rhs: &CRat) -> CRat {
        CRat::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}
forward_binop!(Add, add);

impl Sub<&CRat> for &CRat {
    type Output = CRat;
    fn sub(self, rhs: &CRat) -> CRat {
        CRat::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}
forward_binop!(Sub, sub);

impl Mul<&CRat> for &CRat {
    type Output = CRat;
    fn mul(self, rhs: &CRat) -> CRat {
        CRat::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}
forward_binop!(Mul, mul);

/// Panics on a zero divisor; use [`CRat::checked_div`] where the divisor is
/// not known to be nonzero.
impl Div<&CRat> for &CRat {
    type Output = CRat;
    fn div(self, rhs: &CRat) -> CRat {
        self.checked_div(rhs).expect("division by zero")
    }
}
forward_binop!(Div, div);

impl Neg for &CRat {
    type Output = CRat;
    fn neg(self) -> CRat {
        CRat::new(-self.re.clone(), -self.im.clone())
    }
}
impl Neg for CRat {
    type Output = CRat;
    fn neg(self) -> CRat {
        -&self
    }
}

impl fmt::Display for CRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        if !self.re.is_zero() {
            write!(f, "{}", self.re)?;
            first = false;
        }
        if !self.im.is_zero() {
            if !first && self.im.is_positive() {
                write!(f, "+")?;
            }
            if self.im == Rat::one() {
                write!(f, "i")?;
            } else if self.im == -Rat::one() {
                write!(f, "-i")?;
            } else {
                write!(f, "{}i", self.im)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Parse a positive rational such as `1`, `3/2`. Used for mass flags.
pub fn parse_positive_rat(s: &str) -> Result<Rat> {
    let r = Rat::from_str(s.trim()).map_err(|_| Error::BadMass(s.to_string()))?;
    if r.is_positive() {
        Ok(r)
    } else {
        Err(Error::BadMass(s.to_string()))
    }
}
