//! Dense matrices over the engine's coefficient rings.

use std::fmt;

use num_traits::{One, Zero};

use super::linform::LinForm;
use super::scalar::CRat;
use super::vpoly::VPoly;
use crate::error::{Error, Result};

/// Coefficient ring: the operations matrices need.
pub trait Coeff: Clone + PartialEq + Zero + One + std::ops::Neg<Output = Self> {
    fn add_ref(&self, rhs: &Self) -> Self;
    fn sub_ref(&self, rhs: &Self) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
}

macro_rules! impl_coeff {
    ($t:ty) => {
        impl Coeff for $t {
            fn add_ref(&self, rhs: &Self) -> Self {
                self + rhs
            }
            fn sub_ref(&self, rhs: &Self) -> Self {
                self - rhs
            }
            fn mul_ref(&self, rhs: &Self) -> Self {
                self * rhs
            }
        }
    };
}
impl_coeff!(CRat);
impl_coeff!(VPoly);
impl_coeff!(LinForm);

/// Rectangular dense matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type MatCR = Mat<CRat>;
pub type MatVP = Mat<VPoly>;
pub type MatLF = Mat<LinForm>;

impl<T: Coeff> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Mat { rows, cols, data }
    }

    /// Assemble a square matrix from 2x2 blocks of equal size.
    pub fn from_blocks(ul: &Self, ur: &Self, ll: &Self, lr: &Self) -> Self {
        let n = ul.rows;
        for b in [ul, ur, ll, lr] {
            assert!(b.rows == n && b.cols == n, "blocks must be square and equal");
        }
        Self::from_fn(2 * n, 2 * n, |r, c| {
            let (br, r0) = (r / n, r % n);
            let (bc, c0) = (c / n, c % n);
            match (br, bc) {
                (0, 0) => ul[(r0, c0)].clone(),
                (0, 1) => ur[(r0, c0)].clone(),
                (1, 0) => ll[(r0, c0)].clone(),
                _ => lr[(r0, c0)].clone(),
            }
        })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &T)> {
        self.data
            .iter()
            .enumerate()
            .map(move |(k, x)| ((k / self.cols, k % self.cols), x))
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "shape mismatch in add");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.add_ref(b))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "shape mismatch in sub");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.sub_ref(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a.clone()).collect(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.mul_ref(c)).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert!(
            self.cols == rhs.rows,
            "shape mismatch in mul: {}x{} * {}x{}",
            self.rows,
            self.cols,
            rhs.rows,
            rhs.cols
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = &rhs[(k, c)];
                    if b.is_zero() {
                        continue;
                    }
                    let p = a.mul_ref(b);
                    out[(r, c)] = out[(r, c)].add_ref(&p);
                }
            }
        }
        out
    }

    /// `AB - BA`; both must be square of the same size.
    pub fn commutator(&self, rhs: &Self) -> Self {
        assert!(self.is_square() && rhs.is_square() && self.rows == rhs.rows);
        self.mul(rhs).sub(&rhs.mul(self))
    }

    /// `AB + BA`.
    pub fn anticommutator(&self, rhs: &Self) -> Self {
        assert!(self.is_square() && rhs.is_square() && self.rows == rhs.rows);
        self.mul(rhs).add(&rhs.mul(self))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn trace(&self) -> T {
        assert!(self.is_square());
        let mut acc = T::zero();
        for k in 0..self.rows {
            acc = acc.add_ref(&self[(k, k)]);
        }
        acc
    }

    /// Extract the `n x n` block at block position (br, bc) of a matrix
    /// partitioned into equal square blocks.
    pub fn block(&self, n: usize, br: usize, bc: usize) -> Self {
        Self::from_fn(n, n, |r, c| self[(br * n + r, bc * n + c)].clone())
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}

impl MatCR {
    pub fn conj_transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    /// Determinant by exact cofactor expansion; fine for the 3x3 and 4x4
    /// matrices this engine meets.
    pub fn det(&self) -> CRat {
        assert!(self.is_square());
        let n = self.rows;
        match n {
            0 => CRat::one(),
            1 => self[(0, 0)].clone(),
            _ => {
                let mut acc = CRat::zero();
                for c in 0..n {
                    if self[(0, c)].is_zero() {
                        continue;
                    }
                    let minor = Mat::from_fn(n - 1, n - 1, |r2, c2| {
                        self[(r2 + 1, if c2 < c { c2 } else { c2 + 1 })].clone()
                    });
                    let term = &self[(0, c)] * &minor.det();
                    acc = if c % 2 == 0 { &acc + &term } else { &acc - &term };
                }
                acc
            }
        }
    }

    pub fn to_vp(&self) -> MatVP {
        self.map(|c| VPoly::constant(c.clone()))
    }

    pub fn to_lf(&self) -> MatLF {
        self.map(|c| LinForm::from_scalar(c.clone()))
    }
}

impl MatVP {
    pub fn to_lf(&self) -> MatLF {
        self.map(|p| LinForm::from_poly(p.clone()))
    }
}

impl MatLF {
    /// Some(matrix of polynomials) iff no entry carries unknowns.
    pub fn as_vp(&self) -> Option<MatVP> {
        if self.data.iter().any(|e| e.has_unknowns()) {
            None
        } else {
            Some(self.map(|e| e.as_poly().unwrap().clone()))
        }
    }
}

/// The standard 2x2 Pauli matrix `sigma_j`, `j` in 1..=3.
pub fn pauli(j: usize) -> Result<MatCR> {
    let z = CRat::zero;
    let o = CRat::one;
    let m = match j {
        1 => Mat::from_rows(vec![vec![z(), o()], vec![o(), z()]]),
        2 => Mat::from_rows(vec![vec![z(), -CRat::i()], vec![CRat::i(), z()]]),
        3 => Mat::from_rows(vec![vec![o(), z()], vec![z(), -o()]]),
        _ => return Err(Error::PauliIndex(j)),
    };
    Ok(m)
}

/// Decompose a 2x2 complex matrix over the basis {I, sigma1, sigma2, sigma3}:
/// returns `[c0, c1, c2, c3]` with `M = c0 I + sum cj sigma_j`.
pub fn pauli_decompose(m: &MatCR) -> Result<[CRat; 4]> {
    if m.nrows() != 2 || m.ncols() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "pauli_decompose expects 2x2, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let half = CRat::ratio(1, 2);
    let mut out = [CRat::zero(), CRat::zero(), CRat::zero(), CRat::zero()];
    out[0] = &m.trace() * &half;
    for j in 1..=3 {
        out[j] = &pauli(j).unwrap().mul(m).trace() * &half;
    }
    Ok(out)
}

impl<T: Coeff + fmt::Display> fmt::Display for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            write!(f, "[")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(r, c)])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

impl<T: Coeff + fmt::Display> fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_i() -> CRat {
        CRat::int_i(2)
    }

    #[test]
    fn pauli_commutators() {
        let s1 = pauli(1).unwrap();
        let s2 = pauli(2).unwrap();
        let s3 = pauli(3).unwrap();
        // [s1, s2] = 2i s3
        assert_eq!(s1.commutator(&s2), s3.scale(&two_i()));
        // {s1, s2} = 0
        assert!(s1.anticommutator(&s2).is_zero());
        // s3^2 = I
        assert_eq!(s3.mul(&s3), Mat::identity(2));
        assert!(pauli(0).is_err());
        assert!(pauli(4).is_err());
    }

    #[test]
    fn pauli_product_identity() {
        // sigma_j sigma_k = delta_jk I + i eps_jkl sigma_l, all 9 pairs
        let sig: Vec<MatCR> = (1..=3).map(|j| pauli(j).unwrap()).collect();
        let eps = |j: usize, k: usize, l: usize| -> i64 {
            match (j, k, l) {
                (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1,
                (3, 2, 1) | (2, 1, 3) | (1, 3, 2) => -1,
                _ => 0,
            }
        };
        for j in 1..=3usize {
            for k in 1..=3usize {
                let mut expect = if j == k {
                    Mat::identity(2)
                } else {
                    Mat::zeros(2, 2)
                };
                for l in 1..=3usize {
                    let e = eps(j, k, l);
                    if e != 0 {
                        expect = expect.add(&sig[l - 1].scale(&CRat::int_i(e)));
                    }
                }
                assert_eq!(sig[j - 1].mul(&sig[k - 1]), expect, "pair ({j},{k})");
            }
        }
    }

    #[test]
    fn pauli_decomposition_roundtrip() {
        let m = Mat::from_rows(vec![
            vec![CRat::ratio(1, 2), CRat::new(crate::exact::scalar::rat(2, 1), crate::exact::scalar::rat(-1, 3))],
            vec![CRat::i(), CRat::from_int(-4)],
        ]);
        let c = pauli_decompose(&m).unwrap();
        let mut back = Mat::identity(2).scale(&c[0]);
        for j in 1..=3 {
            back = back.add(&pauli(j).unwrap().scale(&c[j]));
        }
        assert_eq!(back, m);
    }

    #[test]
    fn block_roundtrip() {
        let s1 = pauli(1).unwrap();
        let s3 = pauli(3).unwrap();
        let z = Mat::zeros(2, 2);
        let m = Mat::from_blocks(&s1, &z, &s3, &Mat::identity(2));
        assert_eq!(m.block(2, 0, 0), s1);
        assert_eq!(m.block(2, 1, 0), s3);
        assert_eq!(m.block(2, 1, 1), Mat::identity(2));
        assert!(m.block(2, 0, 1).is_zero());
    }

    #[test]
    fn det_small() {
        let m = Mat::from_rows(vec![
            vec![CRat::from_int(2), CRat::from_int(1)],
            vec![CRat::from_int(7), CRat::from_int(4)],
        ]);
        assert_eq!(m.det(), CRat::from_int(1));
    }
}
