//! Extended Galilei group elements, spinor representations, and the
//! commutation-relation solver for boost generators.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{
    pauli, ConstraintSystem, CRat, LinForm, Mat, MatCR, MatLF, MatVP, Rat, UnknownTable, VPoly,
};

/// Rational 3-vector.
pub type Vec3 = [Rat; 3];

pub fn vec3_zero() -> Vec3 {
    [Rat::zero(), Rat::zero(), Rat::zero()]
}

/// Levi-Civita symbol with 1-based indices.
pub fn epsilon(i: usize, j: usize, k: usize) -> i64 {
    match (i, j, k) {
        (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1,
        (3, 2, 1) | (2, 1, 3) | (1, 3, 2) => -1,
        _ => 0,
    }
}

/// One proper Galilei transformation `x' = Rx + vt + a`, `t' = t + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct GalileiElement {
    pub r: MatCR,
    pub v: Vec3,
    pub a: Vec3,
    pub b: Rat,
}

fn is_rotation(r: &MatCR) -> bool {
    r.nrows() == 3
        && r.ncols() == 3
        && r.entries().all(|(_, e)| e.is_real())
        && r.transpose().mul(r) == Mat::identity(3)
        && r.det() == CRat::one()
}

fn apply_rot(r: &MatCR, x: &Vec3) -> Vec3 {
    let mut out = vec3_zero();
    for i in 0..3 {
        for j in 0..3 {
            out[i] += &r[(i, j)].re * &x[j];
        }
    }
    out
}

impl GalileiElement {
    pub fn new(r: MatCR, v: Vec3, a: Vec3, b: Rat) -> Result<Self> {
        if !is_rotation(&r) {
            return Err(Error::NotARotation);
        }
        Ok(GalileiElement { r, v, a, b })
    }

    pub fn identity() -> Self {
        GalileiElement {
            r: Mat::identity(3),
            v: vec3_zero(),
            a: vec3_zero(),
            b: Rat::zero(),
        }
    }

    pub fn boost(v: Vec3) -> Self {
        GalileiElement {
            r: Mat::identity(3),
            v,
            a: vec3_zero(),
            b: Rat::zero(),
        }
    }

    pub fn rotation(r: MatCR) -> Result<Self> {
        Self::new(r, vec3_zero(), vec3_zero(), Rat::zero())
    }

    pub fn translation(a: Vec3, b: Rat) -> Self {
        GalileiElement {
            r: Mat::identity(3),
            v: vec3_zero(),
            a,
            b,
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// Group product `g2 * g1` (apply `g1` first). Componentwise:
    /// `(R2 R1, R2 v1 + v2, R2 a1 + a2 + v2 b1, b1 + b2)`.
    pub fn compose(g2: &Self, g1: &Self) -> Self {
        let r = g2.r.mul(&g1.r);
        let mut v = apply_rot(&g2.r, &g1.v);
        let mut a = apply_rot(&g2.r, &g1.a);
        for k in 0..3 {
            v[k] += &g2.v[k];
            a[k] += &g2.a[k] + &g2.v[k] * &g1.b;
        }
        GalileiElement {
            r,
            v,
            a,
            b: &g1.b + &g2.b,
        }
    }

    /// Exact inverse: `(R^-1, -R^-1 v, -R^-1 (a - v b), -b)`.
    pub fn inverse(&self) -> Self {
        let rinv = self.r.transpose(); // orthogonal
        let v = apply_rot(&rinv, &self.v);
        let mut avb = vec3_zero();
        for k in 0..3 {
            avb[k] = &self.a[k] - &self.v[k] * &self.b;
        }
        let a = apply_rot(&rinv, &avb);
        GalileiElement {
            r: rinv,
            v: [-v[0].clone(), -v[1].clone(), -v[2].clone()],
            a: [-a[0].clone(), -a[1].clone(), -a[2].clone()],
            b: -self.b.clone(),
        }
    }
}

/// Unnormalised spinor representative: conjugation by `V / sqrt(norm2)` is
/// realised exactly as `B -> V B V^dagger / norm2`, keeping entries rational.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorRep {
    pub v: MatCR,
    pub norm2: Rat,
}

impl SpinorRep {
    /// Requires `V V^dagger = norm2 I` exactly.
    pub fn new(v: MatCR) -> Result<Self> {
        if !v.is_square() {
            return Err(Error::DimensionMismatch("spinor representative must be square".into()));
        }
        let prod = v.mul(&v.conj_transpose());
        let n = prod[(0, 0)].clone();
        if !n.is_real() || !n.re.is_positive() {
            return Err(Error::Internal("representative has non-positive norm".into()));
        }
        if prod != Mat::<CRat>::identity(v.nrows()).scale(&n) {
            return Err(Error::Internal(
                "V V^dagger is not a multiple of the identity".into(),
            ));
        }
        Ok(SpinorRep {
            v,
            norm2: n.re,
        })
    }

    pub fn identity(n: usize) -> Self {
        SpinorRep {
            v: Mat::identity(n),
            norm2: Rat::one(),
        }
    }

    pub fn dim(&self) -> usize {
        self.v.nrows()
    }

    /// `V B V^dagger / norm2`, exact.
    pub fn conjugate(&self, b: &MatCR) -> Result<MatCR> {
        if b.nrows() != self.dim() || b.ncols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "conjugating {}x{} by a {}-dim representative",
                b.nrows(),
                b.ncols(),
                self.dim()
            )));
        }
        let scale = CRat::from_rat(Rat::one() / &self.norm2);
        Ok(self.v.mul(b).mul(&self.v.conj_transpose()).scale(&scale))
    }

    pub fn inverse_matrix(&self) -> MatCR {
        let scale = CRat::from_rat(Rat::one() / &self.norm2);
        self.v.conj_transpose().scale(&scale)
    }

    /// Block-diagonal doubling `diag(V, V)`.
    pub fn doubled(&self) -> Self {
        let z = Mat::zeros(self.dim(), self.dim());
        SpinorRep {
            v: Mat::from_blocks(&self.v, &z, &z, &self.v),
            norm2: self.norm2.clone(),
        }
    }
}

/// 2x2 spinor representative of a rotation from a nonzero rational
/// quaternion `(a, b, c, d)`: `V = a I - i (b s1 + c s2 + d s3)`.
pub fn spinor_from_quaternion(q: &[Rat; 4]) -> Result<SpinorRep> {
    let mut m = Mat::identity(2).scale(&CRat::from_rat(q[0].clone()));
    for j in 1..=3 {
        let c = CRat::new(Rat::zero(), -q[j].clone());
        m = m.add(&pauli(j)?.scale(&c));
    }
    SpinorRep::new(m)
}

/// The spatial rotation matched to a 2x2 representative: the exact matrix
/// `R` with `V s_i V^dagger / norm2 = sum_k R[k][i] s_k` (columns from the
/// adjoint action). This is the pairing the invariance machinery expects.
pub fn adjoint_rotation(rep: &SpinorRep) -> Result<MatCR> {
    if rep.dim() != 2 {
        return Err(Error::DimensionMismatch("adjoint_rotation expects 2x2".into()));
    }
    let mut r = Mat::zeros(3, 3);
    for i in 1..=3 {
        let img = rep.conjugate(&pauli(i)?)?;
        let coeffs = crate::exact::pauli_decompose(&img)?;
        if !coeffs[0].is_zero() {
            return Err(Error::Internal("adjoint image has an identity component".into()));
        }
        for k in 1..=3 {
            r[(k - 1, i - 1)] = coeffs[k].clone();
        }
    }
    if !is_rotation(&r) {
        return Err(Error::Internal("adjoint action is not a rotation".into()));
    }
    Ok(r)
}

/// Rotation generators per spinor dimension: `0` for scalars, `s_j / 2` for
/// two components, `diag(s_j, s_j) / 2` for four.
pub fn rotation_generators(ncomp: usize) -> Result<[MatCR; 3]> {
    let half = CRat::ratio(1, 2);
    match ncomp {
        1 => Ok([Mat::zeros(1, 1), Mat::zeros(1, 1), Mat::zeros(1, 1)]),
        2 => {
            let g = |j: usize| pauli(j).map(|s| s.scale(&half));
            Ok([g(1)?, g(2)?, g(3)?])
        }
        4 => {
            let z = Mat::zeros(2, 2);
            let g = |j: usize| -> Result<MatCR> {
                let s = pauli(j)?;
                Ok(Mat::from_blocks(&s, &z, &z, &s).scale(&half))
            };
            Ok([g(1)?, g(2)?, g(3)?])
        }
        n => Err(Error::UnsupportedNcomp(n)),
    }
}

/// Check `[X_i, X_j] = i eps_ijk X_k` for a triple.
pub fn satisfies_rotation_algebra(x: &[MatCR; 3]) -> bool {
    for i in 1..=3usize {
        for j in 1..=3usize {
            let mut expect = Mat::zeros(x[0].nrows(), x[0].ncols());
            for k in 1..=3usize {
                let e = epsilon(i, j, k);
                if e != 0 {
                    expect = expect.add(&x[k - 1].scale(&CRat::int_i(e)));
                }
            }
            if x[i - 1].commutator(&x[j - 1]) != expect {
                return false;
            }
        }
    }
    true
}

/// A candidate triple of boost generators.
pub type GeneratorTriple = [MatCR; 3];

/// Output of [`solve_boost_generators`]: the linear solution space of the
/// rotation-commutation constraints, split by the quadratic commuting check.
#[derive(Clone, Debug)]
pub struct BoostGeneratorSolution {
    /// Basis of the linear system `[X_vi, X_tj] = i eps_ijk X_vk`.
    pub linear_basis: Vec<GeneratorTriple>,
    /// Basis elements that also satisfy `[X_vi, X_vj] = 0` exactly.
    pub commuting: Vec<GeneratorTriple>,
    /// Basis elements that fail the commuting check; reported, not dropped.
    pub noncommuting: Vec<GeneratorTriple>,
}

impl BoostGeneratorSolution {
    /// True iff the only valid boost generators are the zero triple.
    pub fn only_zero(&self) -> bool {
        self.commuting.is_empty()
    }
}

/// Solve `[X_vi, X_tj] = i eps_ijk X_vk` exactly over the `3 N^2` unknown
/// entries, then verify `[X_vi, X_vj] = 0` on each basis element.
pub fn solve_boost_generators(rot: &[MatCR; 3]) -> Result<BoostGeneratorSolution> {
    if !satisfies_rotation_algebra(rot) {
        return Err(Error::BadRotationGenerators(
            "[X_ti, X_tj] != i eps_ijk X_tk".into(),
        ));
    }
    let n = rot[0].nrows();
    let mut table = UnknownTable::default();
    let mut x: Vec<MatLF> = Vec::new();
    for i in 1..=3 {
        x.push(Mat::from_fn(n, n, |r, c| {
            LinForm::unknown(table.push(format!("Xv{i}_{r}{c}", r = r + 1, c = c + 1)))
        }));
    }

    let mut sys = ConstraintSystem::new(table.names().to_vec());
    let rot_lf: Vec<MatLF> = rot.iter().map(|m| m.to_lf()).collect();
    for i in 1..=3usize {
        for j in 1..=3usize {
            // [X_vi, X_tj] - i eps_ijk X_vk = 0
            let mut delta = x[i - 1].mul(&rot_lf[j - 1]).sub(&rot_lf[j - 1].mul(&x[i - 1]));
            for k in 1..=3usize {
                let e = epsilon(i, j, k);
                if e != 0 {
                    delta = delta.sub(&x[k - 1].scale(&LinForm::from_scalar(CRat::int_i(e))));
                }
            }
            for (_, entry) in delta.entries() {
                for (_, lf) in entry.collect() {
                    sys.push_linform(&lf);
                }
            }
        }
    }

    let ns = sys.nullspace();
    let mut linear_basis = Vec::new();
    for vecv in &ns.basis {
        let triple: GeneratorTriple = std::array::from_fn(|i| {
            Mat::from_fn(n, n, |r, c| vecv[i * n * n + r * n + c].clone())
        });
        linear_basis.push(triple);
    }

    let mut commuting = Vec::new();
    let mut noncommuting = Vec::new();
    for triple in &linear_basis {
        let ok = (0..3).all(|i| {
            (0..3).all(|j| triple[i].commutator(&triple[j]).is_zero())
        });
        if ok {
            commuting.push(triple.clone());
        } else {
            noncommuting.push(triple.clone());
        }
    }

    Ok(BoostGeneratorSolution {
        linear_basis,
        commuting,
        noncommuting,
    })
}

/// Exact terminating exponential `exp(i sum_j X_j v_j)`; errors unless the
/// argument is nilpotent.
pub fn boost_matrix(gens: &GeneratorTriple, v: &[VPoly; 3]) -> Result<MatVP> {
    let n = gens[0].nrows();
    let mut arg: MatVP = Mat::zeros(n, n);
    for j in 0..3 {
        arg = arg.add(&gens[j].to_vp().scale(&v[j].scale(&CRat::i())));
    }
    let mut out: MatVP = Mat::identity(n);
    let mut power: MatVP = Mat::identity(n);
    let mut factorial = Rat::one();
    for k in 1..=n {
        power = power.mul(&arg);
        if power.is_zero() {
            return Ok(out);
        }
        if k == n {
            // A nilpotent n x n matrix vanishes by the n-th power.
            return Err(Error::NonNilpotentBoost);
        }
        factorial *= Rat::from_integer(k.into());
        let inv = CRat::from_rat(Rat::one() / &factorial);
        out = out.add(&power.map(|p| p.scale(&inv)));
    }
    Ok(out)
}

/// Concrete boost matrix for a rational velocity.
pub fn boost_matrix_concrete(gens: &GeneratorTriple, v: &Vec3) -> Result<MatCR> {
    let vp: [VPoly; 3] = std::array::from_fn(|j| VPoly::constant(CRat::from_rat(v[j].clone())));
    let m = boost_matrix(gens, &vp)?;
    Ok(m.map(|p| p.as_constant().expect("constant polynomial")))
}
