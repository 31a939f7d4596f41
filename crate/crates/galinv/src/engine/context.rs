//! Transformation of differential operators under group elements.
//!
//! A context packages the spinor matrix `S` of an element, its exact
//! inverse, the spatial rotation `R`, the boost velocity `v` (rational or
//! symbolic) and the phase mass. Transforming
//! `sum D_ab dt^a dx^b` substitutes
//!
//! ```text
//!   dt   ->  k1 + dt + k2_i dx_i          k1 = -(i/2) m v.v,  k2 = R v
//!   dx_i ->  k3_i + k4_ji dx_j            k3_i = -i m R_ji v_k R_jk,  k4_ji = R_ji
//! ```
//!
//! and conjugates each coefficient matrix by `S`. The scalar substitution is
//! the composite of a pure boost followed by a pure rotation, so a context
//! with both `R` and `v` set represents the group element
//! `rotation . boost`. Space and time translations act trivially on
//! constant-coefficient operators and carry no context data.
//!
//! Rotation-generator contexts replace `S` and `R` by their first-order
//! expansions `I + i eps X` and `I + eps A`; only the coefficient of `eps`
//! in the transformed-minus-original operator is meaningful, which is
//! exactly the Lie-algebra constraint.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{DiffOp, DiffOpCR, DiffOpLF, MultiIndex};
use crate::error::{Error, Result};
use crate::exact::vpoly::{EPS, V1};
use crate::exact::{CRat, LinForm, Mat, MatVP, Rat, VPoly};
use crate::galilei::{boost_matrix, epsilon, GalileiElement, GeneratorTriple, SpinorRep, Vec3};

/// How constraint extraction should read the transformed operator.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CtxKind {
    /// `S` and `R` are exact; every monomial of the difference is a constraint.
    Exact,
    /// First-order flow at the identity; only the `eps`-linear part counts.
    GeneratorLinear,
}

#[derive(Clone)]
pub struct TransformContext {
    pub ncomp: usize,
    pub kind: CtxKind,
    pub label: String,
    s: MatVP,
    s_inv: MatVP,
    r: MatVP,
    v: [VPoly; 3],
    mass: Rat,
}

fn identity_r() -> MatVP {
    Mat::<CRat>::identity(3).to_vp()
}

fn zero_v() -> [VPoly; 3] {
    [VPoly::zero(), VPoly::zero(), VPoly::zero()]
}

impl TransformContext {
    pub fn identity(ncomp: usize, mass: Rat) -> Self {
        TransformContext {
            ncomp,
            kind: CtxKind::Exact,
            label: "identity".into(),
            s: Mat::<CRat>::identity(ncomp).to_vp(),
            s_inv: Mat::<CRat>::identity(ncomp).to_vp(),
            r: identity_r(),
            v: zero_v(),
            mass,
        }
    }

    /// First-order rotation flow about the given axis (1..=3).
    pub fn rotation_generator(rot_gens: &[Mat<CRat>; 3], axis: usize, mass: Rat) -> Self {
        let ncomp = rot_gens[0].nrows();
        let eps = VPoly::var(EPS);
        let x = &rot_gens[axis - 1];
        let i_eps = eps.scale(&CRat::i());
        let s = Mat::<CRat>::identity(ncomp)
            .to_vp()
            .add(&x.to_vp().map(|p| p * &i_eps));
        let s_inv = Mat::<CRat>::identity(ncomp)
            .to_vp()
            .sub(&x.to_vp().map(|p| p * &i_eps));
        // Spatial flow paired with X via the adjoint-column convention:
        // R_ki = delta_ki - eps * eps_{axis,i,k}.
        let mut r = identity_r();
        for i in 1..=3usize {
            for k in 1..=3usize {
                let e = epsilon(axis, i, k);
                if e != 0 {
                    r[(k - 1, i - 1)] = &r[(k - 1, i - 1)] - &eps.scale(&CRat::from_int(e));
                }
            }
        }
        TransformContext {
            ncomp,
            kind: CtxKind::GeneratorLinear,
            label: format!("rotation-generator axis {axis}"),
            s,
            s_inv,
            r,
            v: zero_v(),
            mass,
        }
    }

    /// Pure boost with symbolic velocity along one axis (1..=3): `v_axis` is
    /// the corresponding polynomial indeterminate.
    pub fn boost_axis_symbolic(boost_gens: &GeneratorTriple, axis: usize, mass: Rat) -> Result<Self> {
        let mut v = zero_v();
        v[axis - 1] = VPoly::var(V1 + axis - 1);
        Self::boost_from_v(boost_gens, v, mass, format!("symbolic boost axis {axis}"))
    }

    /// Pure boost with a fully symbolic velocity vector `(v1, v2, v3)`.
    pub fn boost_symbolic(boost_gens: &GeneratorTriple, mass: Rat) -> Result<Self> {
        let v: [VPoly; 3] = std::array::from_fn(|j| VPoly::var(V1 + j));
        Self::boost_from_v(boost_gens, v, mass, "symbolic boost".into())
    }

    /// Pure boost with an exact rational velocity.
    pub fn boost_concrete(boost_gens: &GeneratorTriple, v: &Vec3, mass: Rat) -> Result<Self> {
        let vp: [VPoly; 3] =
            std::array::from_fn(|j| VPoly::constant(CRat::from_rat(v[j].clone())));
        Self::boost_from_v(boost_gens, vp, mass, format!("boost v=({}, {}, {})", v[0], v[1], v[2]))
    }

    fn boost_from_v(gens: &GeneratorTriple, v: [VPoly; 3], mass: Rat, label: String) -> Result<Self> {
        let ncomp = gens[0].nrows();
        let s = boost_matrix(gens, &v)?;
        let neg: [VPoly; 3] = std::array::from_fn(|j| -&v[j]);
        let s_inv = boost_matrix(gens, &neg)?;
        if s.mul(&s_inv) != Mat::<CRat>::identity(ncomp).to_vp() {
            return Err(Error::Internal("boost matrix inverse is not exact".into()));
        }
        Ok(TransformContext {
            ncomp,
            kind: CtxKind::Exact,
            label,
            s,
            s_inv,
            r: identity_r(),
            v,
            mass,
        })
    }

    /// Finite rational rotation given by a 2x2 unnormalised representative.
    pub fn rotation_finite(ncomp: usize, rep2: &SpinorRep, mass: Rat) -> Result<Self> {
        let r = crate::galilei::adjoint_rotation(rep2)?;
        let rep = match ncomp {
            1 => SpinorRep::identity(1),
            2 => rep2.clone(),
            4 => rep2.doubled(),
            n => return Err(Error::UnsupportedNcomp(n)),
        };
        Ok(TransformContext {
            ncomp,
            kind: CtxKind::Exact,
            label: "finite rotation".into(),
            s: rep.v.to_vp(),
            s_inv: rep.inverse_matrix().to_vp(),
            r: r.to_vp(),
            v: zero_v(),
            mass,
        })
    }

    /// General concrete element `rotation . boost` (translations act
    /// trivially here). The 2x2 representative must match `g.r` under the
    /// adjoint action.
    pub fn element(
        boost_gens: &GeneratorTriple,
        g: &GalileiElement,
        rep2: &SpinorRep,
        mass: Rat,
    ) -> Result<Self> {
        let ncomp = boost_gens[0].nrows();
        let rot = Self::rotation_finite(ncomp, rep2, mass.clone())?;
        if rot.r != g.r.to_vp() {
            return Err(Error::Internal(
                "spinor representative does not match the element's rotation".into(),
            ));
        }
        let boost = Self::boost_concrete(boost_gens, &g.v, mass.clone())?;
        Ok(TransformContext {
            ncomp,
            kind: CtxKind::Exact,
            label: "concrete element".into(),
            s: rot.s.mul(&boost.s),
            s_inv: boost.s_inv.mul(&rot.s_inv),
            r: g.r.to_vp(),
            v: boost.v,
            mass,
        })
    }

    pub fn mass(&self) -> &Rat {
        &self.mass
    }

    fn k_constants(&self) -> (VPoly, [VPoly; 3], [VPoly; 3]) {
        let m = CRat::from_rat(self.mass.clone());
        let minus_i_m = CRat::new(Rat::zero(), -self.mass.clone());
        // k1 = -(i/2) m v.v
        let mut vv = VPoly::zero();
        for j in 0..3 {
            vv = &vv + &(&self.v[j] * &self.v[j]);
        }
        let k1 = vv.scale(&(&CRat::new(Rat::zero(), -rat_half()) * &m));
        // k2_i = R_ij v_j: the rotated boost velocity. This is the
        // coefficient pattern of the first-order expansion and the one the
        // composite rotation-after-boost substitution produces; for a pure
        // boost it reduces to v_i.
        let k2: [VPoly; 3] = std::array::from_fn(|i| {
            let mut acc = VPoly::zero();
            for j in 0..3 {
                acc = &acc + &(&self.r[(i, j)] * &self.v[j]);
            }
            acc
        });
        // k3_i = -i m R_ji v_k R_jk
        let k3: [VPoly; 3] = std::array::from_fn(|i| {
            let mut acc = VPoly::zero();
            for j in 0..3 {
                for k in 0..3 {
                    acc = &acc + &(&(&self.r[(j, i)] * &self.v[k]) * &self.r[(j, k)]);
                }
            }
            acc.scale(&minus_i_m)
        });
        (k1, k2, k3)
    }
}

fn rat_half() -> Rat {
    Rat::new(1.into(), 2.into())
}

/// Scalar differential polynomial: derivative monomial -> coefficient.
type ScalarOp = BTreeMap<MultiIndex, VPoly>;

fn scalar_one() -> ScalarOp {
    let mut m = ScalarOp::new();
    m.insert(MultiIndex::CONST, VPoly::one());
    m
}

fn scalar_mul(a: &ScalarOp, b: &ScalarOp) -> ScalarOp {
    let mut out = ScalarOp::new();
    for (ia, ca) in a {
        for (ib, cb) in b {
            let idx = ia.merge(ib);
            let c = ca * cb;
            if c.is_zero() {
                continue;
            }
            match out.entry(idx) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(c);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let s = e.get() + &c;
                    if s.is_zero() {
                        e.remove();
                    } else {
                        *e.get_mut() = s;
                    }
                }
            }
        }
    }
    out
}

fn scalar_pow(base: &ScalarOp, n: u8) -> ScalarOp {
    let mut out = scalar_one();
    for _ in 0..n {
        out = scalar_mul(&out, base);
    }
    out
}

/// Transform an operator with linear-form entries under a context.
///
/// For [`CtxKind::GeneratorLinear`] contexts the result is only meaningful
/// through its eps-linear part; constraint extraction handles that.
pub fn transform_operator(op: &DiffOpLF, ctx: &TransformContext) -> DiffOpLF {
    assert_eq!(op.ncomp(), ctx.ncomp, "operator/context dimension mismatch");
    let (k1, k2, k3) = ctx.k_constants();

    // Image of dt: k1 + dt + k2_i dx_i.
    let mut t_img = ScalarOp::new();
    t_img.insert(MultiIndex::time(1), VPoly::one());
    if !k1.is_zero() {
        t_img.insert(MultiIndex::CONST, k1);
    }
    for i in 0..3 {
        if !k2[i].is_zero() {
            t_img.insert(MultiIndex::space(i, 1), k2[i].clone());
        }
    }
    // Image of dx_i: k3_i + R_ji dx_j.
    let x_img: [ScalarOp; 3] = std::array::from_fn(|i| {
        let mut m = ScalarOp::new();
        if !k3[i].is_zero() {
            m.insert(MultiIndex::CONST, k3[i].clone());
        }
        for j in 0..3 {
            let c = ctx.r[(j, i)].clone();
            if !c.is_zero() {
                m.insert(MultiIndex::space(j, 1), c);
            }
        }
        m
    });

    let s_lf = ctx.s.to_lf();
    let s_inv_lf = ctx.s_inv.to_lf();

    let mut out = DiffOp::new(op.ncomp());
    for (idx, m) in op.terms() {
        let conj = s_lf.mul(m).mul(&s_inv_lf);
        let mut scal = scalar_pow(&t_img, idx.dt);
        for i in 0..3 {
            if idx.dx[i] > 0 {
                scal = scalar_mul(&scal, &scalar_pow(&x_img[i], idx.dx[i]));
            }
        }
        for (idx2, c) in &scal {
            out.add_term(*idx2, conj.scale(&LinForm::from_poly(c.clone())));
        }
    }
    out
}

/// Transform a concrete operator under an exact context; entries come back
/// as polynomials in the context's symbolic velocity (constants when the
/// context is fully concrete).
pub fn transform_concrete(op: &DiffOpCR, ctx: &TransformContext) -> Result<DiffOp<VPoly>> {
    if ctx.kind != CtxKind::Exact {
        return Err(Error::Internal(
            "transform_concrete needs an exact context".into(),
        ));
    }
    let lf = transform_operator(&op.to_lf(), ctx);
    let mut out = DiffOp::new(op.ncomp());
    for (idx, m) in lf.terms() {
        out.add_term(
            *idx,
            m.map(|e| e.as_poly().expect("no unknowns in concrete transform").clone()),
        );
    }
    Ok(out)
}
