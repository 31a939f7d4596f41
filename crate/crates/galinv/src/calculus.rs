//! Operator powers, plane-wave reduction, and finite-transformation
//! covariance checks on explicit solutions.

use num_traits::{One, Zero};

use crate::engine::{transform_concrete, DiffOpCR, Reps, TransformContext};
use crate::error::{Error, Result};
use crate::exact::{CRat, ConstraintSystem, Mat, MatCR, Rat};
use crate::galilei::{boost_matrix_concrete, GalileiElement, SpinorRep, Vec3};

/// Operator product with constant matrix coefficients.
pub fn op_compose(lhs: &DiffOpCR, rhs: &DiffOpCR) -> DiffOpCR {
    lhs.compose(rhs)
}

/// `L^n`, `n >= 1`.
pub fn op_power(l: &DiffOpCR, n: usize) -> DiffOpCR {
    l.power(n)
}

/// Exact invariance report for `L^n` under one context.
#[derive(Clone, Debug)]
pub struct PowerInvariance {
    pub n: usize,
    pub context: String,
    pub invariant: bool,
}

/// Check `transform(L^n) = L^n` exactly under an exact context.
pub fn invariance_of_power(l: &DiffOpCR, n: usize, ctx: &TransformContext) -> Result<PowerInvariance> {
    let p = l.power(n);
    let out = transform_concrete(&p, ctx)?;
    let same = out == p.map(|c| crate::exact::VPoly::constant(c.clone()));
    Ok(PowerInvariance {
        n,
        context: ctx.label.clone(),
        invariant: same,
    })
}

/// A spinor plane wave `psi = spinor * exp(i(k.x - omega t))` with mass `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneWave {
    pub k: Vec3,
    pub omega: Rat,
    pub spinor: Vec<CRat>,
    pub m: Rat,
}

impl PlaneWave {
    pub fn on_shell(&self) -> bool {
        let k2: Rat = self.k.iter().map(|x| x * x).sum();
        &self.omega * (Rat::from_integer(2.into()) * &self.m) == k2
    }
}

/// Substitute `dt -> -i omega`, `dx_j -> i k_j` into a concrete operator:
/// the matrix a plane wave must be annihilated by, plus its exact kernel.
pub fn plane_wave_reduce(op: &DiffOpCR, k: &Vec3, omega: &Rat) -> (MatCR, Vec<Vec<CRat>>) {
    let n = op.ncomp();
    let minus_i_omega = CRat::new(Rat::zero(), -omega.clone());
    let ik: [CRat; 3] = std::array::from_fn(|j| CRat::new(Rat::zero(), k[j].clone()));
    let mut m = Mat::zeros(n, n);
    for (idx, coeff) in op.terms() {
        let mut scalar = CRat::one();
        for _ in 0..idx.dt {
            scalar = &scalar * &minus_i_omega;
        }
        for j in 0..3 {
            for _ in 0..idx.dx[j] {
                scalar = &scalar * &ik[j];
            }
        }
        m = m.add(&coeff.scale(&scalar));
    }
    let mut sys = ConstraintSystem::new((0..n).map(|c| format!("psi{c}")).collect());
    for r in 0..n {
        let row: Vec<(u32, CRat)> = (0..n)
            .map(|c| (c as u32, m[(r, c)].clone()))
            .filter(|(_, x)| !x.is_zero())
            .collect();
        sys.push_row(row);
    }
    let kernel = sys.nullspace().basis;
    (m, kernel)
}

/// Does the plane wave solve the operator exactly?
pub fn solves(op: &DiffOpCR, pw: &PlaneWave) -> bool {
    let (m, _) = plane_wave_reduce(op, &pw.k, &pw.omega);
    let n = op.ncomp();
    (0..n).all(|r| {
        let mut acc = CRat::zero();
        for c in 0..n {
            acc = &acc + &(&m[(r, c)] * &pw.spinor[c]);
        }
        acc.is_zero()
    })
}

/// Result of transporting a plane-wave solution through a finite group
/// element `translation . rotation . boost`.
#[derive(Clone, Debug)]
pub struct CovarianceReport {
    pub input_solves: bool,
    pub k_prime: Vec3,
    pub omega_prime: Rat,
    /// Constant phase exponent picked up from the translation part; a global
    /// phase, irrelevant to solving.
    pub phase_exponent: Rat,
    /// Image spinor up to a positive scalar (rotation representatives are
    /// kept unnormalised to stay rational).
    pub spinor_prime: Vec<CRat>,
    pub output_solves: bool,
    pub output_on_shell: bool,
    /// The boost adds `+m v` to the wave vector under this engine's phase
    /// convention.
    pub boost_sign: i8,
}

fn apply_matrix(m: &MatCR, v: &[CRat]) -> Vec<CRat> {
    (0..m.nrows())
        .map(|r| {
            let mut acc = CRat::zero();
            for c in 0..m.ncols() {
                acc = &acc + &(&m[(r, c)] * &v[c]);
            }
            acc
        })
        .collect()
}

/// Transport a plane wave through `g` with the matching 2x2 rotation
/// representative, then verify the image still solves the operator.
///
/// With this engine's phase convention a pure boost maps
/// `k -> k + m v`, `omega -> omega + k.v + m v^2 / 2`, which preserves the
/// dispersion relation exactly; the opposite sign does not.
pub fn covariance_check(
    op: &DiffOpCR,
    pw: &PlaneWave,
    g: &GalileiElement,
    rep2: &SpinorRep,
    reps: &Reps,
) -> Result<CovarianceReport> {
    if crate::galilei::adjoint_rotation(rep2)? != g.r {
        return Err(Error::Internal(
            "spinor representative does not match the element's rotation".into(),
        ));
    }
    let input_solves = solves(op, pw);

    // Boost: k1 = k + m v, omega1 = omega + k.v + m v^2/2, spinor by B(v).
    let mut k1 = crate::galilei::vec3_zero();
    let mut kv = Rat::zero();
    let mut v2 = Rat::zero();
    for j in 0..3 {
        k1[j] = &pw.k[j] + &pw.m * &g.v[j];
        kv += &pw.k[j] * &g.v[j];
        v2 += &g.v[j] * &g.v[j];
    }
    let omega1 = &pw.omega + kv + &pw.m * v2 / Rat::from_integer(2.into());
    let bmat = boost_matrix_concrete(&reps.boost, &g.v)?;
    let spinor1 = apply_matrix(&bmat, &pw.spinor);

    // Rotation: k2 = R k1, spinor by the (unnormalised) representative.
    let mut k2 = crate::galilei::vec3_zero();
    for i in 0..3 {
        for j in 0..3 {
            k2[i] += &g.r[(i, j)].re * &k1[j];
        }
    }
    let srot = match op.ncomp() {
        1 => SpinorRep::identity(1),
        2 => rep2.clone(),
        4 => rep2.doubled(),
        n => return Err(Error::UnsupportedNcomp(n)),
    };
    let spinor2 = apply_matrix(&srot.v, &spinor1);

    // Translation: a pure global phase exp(i(-k2.a + omega1 b)).
    let mut phase = Rat::zero();
    for j in 0..3 {
        phase -= &k2[j] * &g.a[j];
    }
    phase += &omega1 * &g.b;

    let out = PlaneWave {
        k: k2.clone(),
        omega: omega1.clone(),
        spinor: spinor2.clone(),
        m: pw.m.clone(),
    };
    Ok(CovarianceReport {
        input_solves,
        k_prime: k2,
        omega_prime: omega1,
        phase_exponent: phase,
        spinor_prime: spinor2,
        output_solves: solves(op, &out),
        output_on_shell: out.on_shell(),
        boost_sign: 1,
    })
}

/// One row of a dispersion scan: exact kernel dimension of `op` at (k, omega).
#[derive(Clone, Debug)]
pub struct ScanRow {
    pub k: Vec3,
    pub omega: Rat,
    pub nullity: usize,
}

/// Scan the plane-wave kernel over a list of wave vectors and frequencies.
pub fn dispersion_scan(op: &DiffOpCR, ks: &[Vec3], omegas: &[Rat]) -> Vec<ScanRow> {
    let mut rows = Vec::new();
    for k in ks {
        for omega in omegas {
            let (_, kernel) = plane_wave_reduce(op, k, omega);
            rows.push(ScanRow {
                k: k.clone(),
                omega: omega.clone(),
                nullity: kernel.len(),
            });
        }
    }
    rows
}

/// Frequencies around the dispersion shell of `k` for scan tables: the exact
/// shell value plus nearby off-shell rationals.
pub fn scan_omegas(k: &Vec3, m: &Rat) -> Vec<Rat> {
    let k2: Rat = k.iter().map(|x| x * x).sum();
    let shell = k2 / (Rat::from_integer(2.into()) * m);
    let step = Rat::new(1.into(), 2.into());
    let mut out = Vec::new();
    for d in -2i64..=2 {
        out.push(&shell + &step * Rat::from_integer(d.into()));
    }
    out
}

impl std::fmt::Display for ScanRow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{},{},{},{},{}",
            self.k[0], self.k[1], self.k[2], self.omega, self.nullity
        )
    }
}

/// CSV table `k1,k2,k3,omega,nullity` for plotting.
pub fn scan_to_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from("k1,k2,k3,omega,nullity\n");
    for r in rows {
        out.push_str(&r.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{calibrated_reps, levy_leblond, schroedinger_operator, MultiIndex};
    use crate::exact::rat;

    #[test]
    fn ll_squared_is_schroedinger() {
        let m = Rat::one();
        let l = levy_leblond(m.clone());
        let l2 = op_power(&l, 2);
        assert_eq!(l2, schroedinger_operator(4, m.clone()));
        assert_eq!(op_power(&l, 1), l);
        // No block mixing: off-diagonal blocks vanish, diagonal blocks equal.
        for (_, coeff) in l2.terms() {
            assert!(coeff.block(2, 0, 1).is_zero());
            assert!(coeff.block(2, 1, 0).is_zero());
            assert_eq!(coeff.block(2, 0, 0), coeff.block(2, 1, 1));
        }
    }

    #[test]
    fn ll_cubed_has_mixed_terms() {
        let l = levy_leblond(Rat::one());
        let l3 = op_power(&l, 3);
        let mixed = l3.mixed_terms();
        assert!(!mixed.is_empty());
        assert!(mixed.contains(&MultiIndex::new(1, [2, 0, 0])));
        assert!(mixed.iter().all(|i| i.dt > 0 && i.space_order() > 0));
    }

    #[test]
    fn plane_wave_kernel_on_shell() {
        // k = (1,0,0), m = 1, omega = 1/2: two-dimensional kernel with the
        // lower pair fixed by the upper pair; frozen witness (1,0,0,-1/2).
        let l = levy_leblond(Rat::one());
        let k = [Rat::one(), Rat::zero(), Rat::zero()];
        let omega = rat(1, 2);
        let (_, kernel) = plane_wave_reduce(&l, &k, &omega);
        assert_eq!(kernel.len(), 2);
        let witness = PlaneWave {
            k: k.clone(),
            omega: omega.clone(),
            spinor: vec![
                CRat::one(),
                CRat::zero(),
                CRat::zero(),
                CRat::ratio(-1, 2),
            ],
            m: Rat::one(),
        };
        assert!(witness.on_shell());
        assert!(solves(&l, &witness));

        // off shell: only the zero spinor
        let (_, kernel) = plane_wave_reduce(&l, &k, &rat(3, 2));
        assert!(kernel.is_empty());

        // k = 0, omega = 0: kernel is exactly the vanishing-lower-pair space
        let (_, kernel) = plane_wave_reduce(&l, &crate::galilei::vec3_zero(), &Rat::zero());
        assert_eq!(kernel.len(), 2);
        for v in &kernel {
            assert!(v[2].is_zero() && v[3].is_zero());
        }
    }

    #[test]
    fn covariance_under_rotation_and_boost() {
        let m = Rat::one();
        let reps = calibrated_reps(4, m.clone()).unwrap();
        let l = levy_leblond(m.clone());
        let pw = PlaneWave {
            k: [Rat::one(), Rat::zero(), Rat::zero()],
            omega: rat(1, 2),
            spinor: vec![CRat::one(), CRat::zero(), CRat::zero(), CRat::ratio(-1, 2)],
            m: m.clone(),
        };

        // identity: same wave
        let id = GalileiElement::identity();
        let rep_id = crate::galilei::spinor_from_quaternion(&[Rat::one(), Rat::zero(), Rat::zero(), Rat::zero()]).unwrap();
        let rep = covariance_check(&l, &pw, &id, &rep_id, &reps).unwrap();
        assert!(rep.input_solves && rep.output_solves);
        assert_eq!(rep.k_prime, pw.k);
        assert_eq!(rep.omega_prime, pw.omega);

        // pure rotation: k rotates, omega fixed
        let q = [rat(2, 1), Rat::zero(), Rat::zero(), Rat::one()];
        let rep2 = crate::galilei::spinor_from_quaternion(&q).unwrap();
        let r = crate::galilei::adjoint_rotation(&rep2).unwrap();
        let g = GalileiElement::rotation(r.clone()).unwrap();
        let out = covariance_check(&l, &pw, &g, &rep2, &reps).unwrap();
        assert!(out.output_solves);
        assert_eq!(out.omega_prime, pw.omega);
        assert_eq!(out.k_prime, [rat(3, 5), rat(4, 5), Rat::zero()]);

        // pure boost: k -> k + m v, omega shifted to stay on shell
        let v = [rat(1, 3), rat(-1, 2), Rat::one()];
        let g = GalileiElement::boost(v.clone());
        let out = covariance_check(&l, &pw, &g, &rep_id, &reps).unwrap();
        assert!(out.output_solves && out.output_on_shell);
        for j in 0..3 {
            assert_eq!(out.k_prime[j], &pw.k[j] + &v[j]);
        }

        // the opposite boost sign breaks the solution property
        let wrong = PlaneWave {
            k: [&pw.k[0] - &v[0], -v[1].clone(), -v[2].clone()],
            omega: out.omega_prime.clone(),
            spinor: out.spinor_prime.clone(),
            m: m.clone(),
        };
        assert!(!solves(&l, &wrong));
    }

    #[test]
    fn dispersion_scan_counts() {
        let l = levy_leblond(Rat::one());
        let k = [Rat::one(), Rat::zero(), Rat::zero()];
        let omegas = scan_omegas(&k, &Rat::one());
        let rows = dispersion_scan(&l, &[k], &omegas);
        let hits: Vec<_> = rows.iter().filter(|r| r.nullity > 0).collect();
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].omega, rat(1, 2));
        assert_eq!(hits[0].nullity, 2);
        let csv = scan_to_csv(&rows);
        assert!(csv.starts_with("k1,k2,k3,omega,nullity\n"));
        assert_eq!(csv.lines().count(), rows.len() + 1);
    }
}
