//! Property suites: exact algebraic invariants on randomized inputs.
//! Randomness is seeded, so every run checks the same instances.

use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use galinv::calculus::{
    covariance_check, dispersion_scan, invariance_of_power, op_compose, plane_wave_reduce,
    scan_omegas, PlaneWave,
};
use galinv::coupling::{nc_normal_form, Field, NCExpr, NCSymbol};
use galinv::engine::{
    ansatz, ansatz_slots, calibrated_reps, derive_constraints, invariant_family,
    invariant_family_with_reps, levy_leblond, oracle_family_with_elements, same_operator_span,
    verify_invariance, DiffOpCR, MultiIndex, TransformContext,
};
use galinv::exact::{
    pauli, rat, CRat, ConstraintSystem, Mat, Rat, Span,
};
use galinv::galilei::{
    adjoint_rotation, spinor_from_quaternion, vec3_zero, GalileiElement, SpinorRep,
};

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x47414c49)
}

fn rand_rat(r: &mut ChaCha8Rng) -> Rat {
    rat(r.gen_range(-9..=9), r.gen_range(1..=5))
}

fn rand_crat(r: &mut ChaCha8Rng) -> CRat {
    CRat::new(rand_rat(r), rand_rat(r))
}

fn rand_vec3(r: &mut ChaCha8Rng) -> [Rat; 3] {
    [rand_rat(r), rand_rat(r), rand_rat(r)]
}

/// Random rational rotation (from a quaternion) combined with a random boost
/// and translation.
fn rand_element(r: &mut ChaCha8Rng) -> (GalileiElement, SpinorRep) {
    let q = loop {
        let q = [rand_rat(r), rand_rat(r), rand_rat(r), rand_rat(r)];
        if q.iter().any(|x| !x.is_zero()) {
            break q;
        }
    };
    let rep = spinor_from_quaternion(&q).unwrap();
    let rot = adjoint_rotation(&rep).unwrap();
    let g = GalileiElement::new(rot, rand_vec3(r), rand_vec3(r), rand_rat(r)).unwrap();
    (g, rep)
}

fn crat_strategy() -> impl Strategy<Value = CRat> {
    (-20i64..20, 1i64..8, -20i64..20, 1i64..8)
        .prop_map(|(a, b, c, d)| CRat::new(rat(a, b), rat(c, d)))
}

proptest! {
    #[test]
    fn field_axioms(a in crat_strategy(), b in crat_strategy(), c in crat_strategy()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), CRat::one());
        }
    }

    #[test]
    fn collect_reassemble_identity(
        parts in proptest::collection::vec(
            (0u32..6, 0u8..3, 0u8..3, crat_strategy()), 0..8),
        constant in crat_strategy(),
    ) {
        use galinv::exact::{reassemble, LinForm, VPoly};
        let mut lf = LinForm::from_scalar(constant);
        for (id, e1, e2, c) in parts {
            let mut mono = galinv::exact::MONO_ONE;
            mono[0] = e1;
            mono[2] = e2;
            lf = &lf + &LinForm::unknown(id).scale_poly(&VPoly::monomial(mono, c));
        }
        prop_assert_eq!(reassemble(&lf.collect()), lf);
    }
}

#[test]
fn nullspace_soundness_on_random_systems() {
    let mut r = rng();
    for _ in 0..30 {
        let n = r.gen_range(3..=8);
        let mut sys = ConstraintSystem::new((0..n).map(|k| format!("x{k}")).collect());
        for _ in 0..r.gen_range(0..=n + 2) {
            let mut row: Vec<(u32, CRat)> = Vec::new();
            for c in 0..n as u32 {
                if r.gen_bool(0.5) {
                    row.push((c, rand_crat(&mut r)));
                }
            }
            sys.push_row(row);
        }
        let ns = sys.nullspace();
        if ns.dim() + ns.rank != n {
            eprintln!("n={} rank={} dim={} rows:", n, ns.rank, ns.dim());
            for row in sys.rows() { eprintln!("  {:?}", row); }
        }
        assert_eq!(ns.dim() + ns.rank, n);
        // every basis vector satisfies every row exactly
        for b in &ns.basis {
            for row in sys.rows() {
                let mut acc = CRat::zero();
                for (c, v) in row {
                    acc = &acc + &(v * &b[*c as usize]);
                }
                assert!(acc.is_zero());
            }
        }
        // appending a basis vector as a row never changes the dimension
        if let Some(b) = ns.basis.first() {
            let mut sys2 = sys.clone();
            sys2.push_row(
                b.iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(k, c)| (k as u32, c.clone()))
                    .collect(),
            );
            assert_eq!(sys2.nullspace().dim(), ns.dim());
        }
    }
}

#[test]
fn group_axioms_on_random_elements() {
    let mut r = rng();
    let id = GalileiElement::identity();
    for _ in 0..20 {
        let (g1, _) = rand_element(&mut r);
        let (g2, _) = rand_element(&mut r);
        let (g3, _) = rand_element(&mut r);
        let left = GalileiElement::compose(&GalileiElement::compose(&g3, &g2), &g1);
        let right = GalileiElement::compose(&g3, &GalileiElement::compose(&g2, &g1));
        assert_eq!(left, right);
        assert_eq!(GalileiElement::compose(&id, &g1), g1);
        assert_eq!(GalileiElement::compose(&g1, &id), g1);
        assert!(GalileiElement::compose(&g1.inverse(), &g1).is_identity());
        assert!(GalileiElement::compose(&g1, &g1.inverse()).is_identity());
    }
}

#[test]
fn adjoint_action_is_special_orthogonal_on_random_quaternions() {
    let mut r = rng();
    for _ in 0..15 {
        let (g, rep) = rand_element(&mut r);
        let rot = adjoint_rotation(&rep).unwrap();
        assert_eq!(rot, g.r);
        assert_eq!(rot.transpose().mul(&rot), Mat::identity(3));
        assert_eq!(rot.det(), CRat::one());
    }
}

#[test]
fn family_elements_survive_random_concrete_transforms() {
    let mut r = rng();
    let mass = Rat::one();
    let reps = calibrated_reps(4, mass.clone()).unwrap();
    for (order, forbid) in [(1, false), (2, true)] {
        let fam = invariant_family_with_reps(&reps, order, forbid).unwrap();
        let mut ctxs = Vec::new();
        for _ in 0..5 {
            let (g, rep2) = rand_element(&mut r);
            ctxs.push(TransformContext::element(&reps.boost, &g, &rep2, mass.clone()).unwrap());
        }
        for op in fam.raw_basis.iter().chain(fam.ops.iter()) {
            assert_eq!(verify_invariance(op, &ctxs), None);
        }
        // scale invariance: the family is a linear space
        for op in &fam.ops {
            let scaled = op.scale(&rand_nonzero(&mut r));
            assert_eq!(verify_invariance(&scaled, &ctxs), None);
        }
    }
}

fn rand_nonzero(r: &mut ChaCha8Rng) -> CRat {
    loop {
        let c = rand_crat(r);
        if !c.is_zero() {
            return c;
        }
    }
}

#[test]
fn two_component_completeness_against_sampled_elements() {
    let mut r = rng();
    let mass = Rat::one();
    let reps = calibrated_reps(2, mass.clone()).unwrap();
    let symbolic = invariant_family_with_reps(&reps, 1, false).unwrap();
    let elements: Vec<_> = (0..20).map(|_| rand_element(&mut r)).collect();
    let oracle = oracle_family_with_elements(&reps, 1, false, &elements).unwrap();
    let slots = ansatz_slots(1, false);
    assert_eq!(oracle.raw_dim(), symbolic.raw_dim());
    assert!(same_operator_span(&oracle.raw_basis, &symbolic.raw_basis, &slots, 2));
    assert_eq!(oracle.dim(), 0);
    assert_eq!(symbolic.dim(), 0);
}

#[test]
fn generator_and_finite_rotation_constraints_agree() {
    let mass = Rat::one();
    for ncomp in [2usize, 4] {
        let reps = calibrated_reps(ncomp, mass.clone()).unwrap();
        let (op, table, slots) = ansatz(ncomp, 1, false);

        let gen_ctxs: Vec<_> = (1..=3)
            .map(|axis| TransformContext::rotation_generator(&reps.rot, axis, mass.clone()))
            .collect();
        let gen_ns = derive_constraints(&op, &table, &gen_ctxs).unwrap().nullspace();

        // three axis representatives plus two skew ones
        let quats = [
            [2i64, 1, 0, 0],
            [2, 0, 1, 0],
            [2, 0, 0, 1],
            [1, 1, 1, 0],
            [3, 1, -2, 1],
        ];
        let fin_ctxs: Vec<_> = quats
            .iter()
            .map(|q| {
                let rep2 =
                    spinor_from_quaternion(&[rat(q[0], 1), rat(q[1], 1), rat(q[2], 1), rat(q[3], 1)])
                        .unwrap();
                TransformContext::rotation_finite(ncomp, &rep2, mass.clone()).unwrap()
            })
            .collect();
        let fin_ns = derive_constraints(&op, &table, &fin_ctxs).unwrap().nullspace();

        assert_eq!(gen_ns.dim(), fin_ns.dim(), "ncomp={ncomp}");
        let len = slots.len() * ncomp * ncomp;
        let mut span = Span::new(len);
        for b in &gen_ns.basis {
            span.insert(b);
        }
        for b in &fin_ns.basis {
            assert!(span.contains(b), "ncomp={ncomp}");
        }
    }
}

#[test]
fn power_sweep_invariance_and_mixed_terms() {
    let mass = Rat::one();
    let l = levy_leblond(mass.clone());
    let reps = calibrated_reps(4, mass.clone()).unwrap();
    let boost = TransformContext::boost_symbolic(&reps.boost, mass.clone()).unwrap();
    let rep2 = spinor_from_quaternion(&[rat(2, 1), Rat::zero(), rat(1, 1), Rat::zero()]).unwrap();
    let finrot = TransformContext::rotation_finite(4, &rep2, mass.clone()).unwrap();
    for n in 1..=5 {
        assert!(invariance_of_power(&l, n, &boost).unwrap().invariant, "N={n}");
        assert!(invariance_of_power(&l, n, &finrot).unwrap().invariant, "N={n}");
        let mixed = l.power(n).mixed_terms();
        assert_eq!(mixed.is_empty(), n <= 2, "N={n}");
    }
}

#[test]
fn dispersion_rank_on_random_wave_vectors() {
    let mut r = rng();
    let mass = rat(2, 1);
    let l = levy_leblond(mass.clone());
    let mut tested = 0;
    while tested < 10 {
        let k = rand_vec3(&mut r);
        if k.iter().all(|x| x.is_zero()) {
            continue;
        }
        tested += 1;
        let k2: Rat = k.iter().map(|x| x * x).sum();
        let shell = k2 / (Rat::from_integer(2.into()) * &mass);
        let (_, on) = plane_wave_reduce(&l, &k, &shell);
        assert_eq!(on.len(), 2);
        for delta in [rat(1, 2), rat(-1, 3), rat(2, 1)] {
            let (_, off) = plane_wave_reduce(&l, &k, &(&shell + delta));
            assert!(off.is_empty());
        }
    }
    // scan helper agrees
    let k = [rat(1, 1), rat(1, 1), Rat::zero()];
    let rows = dispersion_scan(&l, &[k.clone()], &scan_omegas(&k, &mass));
    assert_eq!(rows.iter().filter(|row| row.nullity > 0).count(), 1);
}

#[test]
fn covariance_round_trips_on_random_elements() {
    let mut r = rng();
    let mass = Rat::one();
    let reps = calibrated_reps(4, mass.clone()).unwrap();
    let l = levy_leblond(mass.clone());
    for _ in 0..10 {
        // random on-shell plane wave from the exact kernel
        let k = rand_vec3(&mut r);
        let k2: Rat = k.iter().map(|x| x * x).sum();
        let omega = k2 / (Rat::from_integer(2.into()) * &mass);
        let (_, kernel) = plane_wave_reduce(&l, &k, &omega);
        assert_eq!(kernel.len(), 2);
        let pw = PlaneWave {
            k: k.clone(),
            omega,
            spinor: kernel[0].clone(),
            m: mass.clone(),
        };
        let (g, rep2) = rand_element(&mut r);
        let report = covariance_check(&l, &pw, &g, &rep2, &reps).unwrap();
        assert!(report.input_solves);
        assert!(report.output_solves);
        assert!(report.output_on_shell);
    }
}

#[test]
fn operator_composition_is_associative() {
    let mut r = rng();
    for _ in 0..10 {
        let mut ops = Vec::new();
        for _ in 0..3 {
            let mut op = DiffOpCR::new(2);
            for _ in 0..r.gen_range(1..=3) {
                let idx = MultiIndex::new(
                    r.gen_range(0..=1),
                    [r.gen_range(0..=1), r.gen_range(0..=1), 0],
                );
                let m = Mat::from_fn(2, 2, |_, _| rand_crat(&mut r));
                op.add_term(idx, m);
            }
            ops.push(op);
        }
        let (a, b, c) = (&ops[0], &ops[1], &ops[2]);
        assert_eq!(
            op_compose(a, &op_compose(b, c)),
            op_compose(&op_compose(a, b), c)
        );
    }
}

#[test]
fn normal_form_is_linear() {
    let mut r = rng();
    for _ in 0..10 {
        let e1 = random_nc(&mut r);
        let e2 = random_nc(&mut r);
        let c = rand_nonzero(&mut r);
        let lhs = nc_normal_form(&e1.scale(&c).add(&e2));
        let rhs = nc_normal_form(&e1).scale(&c).add(&nc_normal_form(&e2));
        assert_eq!(lhs, rhs);
        // idempotence
        assert_eq!(nc_normal_form(&lhs), lhs);
    }
}

/// Random expression inside the coupling alphabet's domain: products where
/// at most one derivative crosses each potential.
fn random_nc(r: &mut ChaCha8Rng) -> NCExpr {
    let symbols = [
        NCSymbol::Dt,
        NCSymbol::Dx(0),
        NCSymbol::Dx(1),
        NCSymbol::Dx(2),
    ];
    let fields = [
        NCSymbol::Pot(Field::V),
        NCSymbol::Pot(Field::A(0)),
        NCSymbol::Pot(Field::A(1)),
        NCSymbol::Pot(Field::A(2)),
    ];
    let mut e = NCExpr::zero();
    for _ in 0..r.gen_range(1..=4) {
        let coeff = pauli(r.gen_range(1..=3)).unwrap().scale(&rand_crat(r));
        let mut word = Vec::new();
        if r.gen_bool(0.5) {
            word.push(fields[r.gen_range(0..4)]);
        }
        word.push(symbols[r.gen_range(0..4)]);
        if r.gen_bool(0.5) {
            word.push(fields[r.gen_range(0..4)]);
        }
        e = e.add(&NCExpr::term(coeff, word));
    }
    e
}

#[test]
fn coupling_round_trip_matches_squared_operator() {
    use galinv::coupling::{eliminate_lower, minimal_substitute};
    // with vanishing potentials the eliminated equation is the upper block
    // of L^2, projectively
    let mass = rat(5, 3);
    let l = levy_leblond(mass.clone());
    let pair = minimal_substitute(&l).unwrap();
    let free = galinv::coupling::CoupledPair {
        upper_phi: keep_free(&pair.upper_phi),
        upper_chi: keep_free(&pair.upper_chi),
        lower_phi: keep_free(&pair.lower_phi),
        lower_chi: keep_free(&pair.lower_chi),
    };
    let out = eliminate_lower(&free, &mass).unwrap();

    let l2 = l.power(2);
    // upper-left block of L^2 as an NC expression over derivative words
    let mut expect = NCExpr::zero();
    for (idx, m) in l2.terms() {
        let blk = m.block(2, 0, 0);
        assert!(m.block(2, 0, 1).is_zero() && m.block(2, 1, 0).is_zero());
        let mut word = Vec::new();
        for _ in 0..idx.dt {
            word.push(NCSymbol::Dt);
        }
        for j in 0..3 {
            for _ in 0..idx.dx[j] {
                word.push(NCSymbol::Dx(j));
            }
        }
        expect = expect.add(&NCExpr::term(blk, word));
    }
    // projective comparison: normalise both at the bare time-derivative word
    let scale_of = |e: &NCExpr| -> CRat {
        e.terms()
            .iter()
            .find(|t| t.word == vec![NCSymbol::Dt])
            .map(|t| t.coeff[(0, 0)].clone())
            .unwrap()
    };
    let a = scale_of(&out);
    let b = scale_of(&expect);
    assert_eq!(out.scale(&b), nc_normal_form(&expect).scale(&a));
}

fn keep_free(e: &NCExpr) -> NCExpr {
    let mut out = NCExpr::zero();
    for t in e.terms() {
        if t.word.iter().all(|s| matches!(s, NCSymbol::Dt | NCSymbol::Dx(_))) {
            out = out.add(&NCExpr::term(t.coeff.clone(), t.word.clone()));
        }
    }
    out
}

#[test]
fn boosts_commute_for_symbolic_velocities() {
    use galinv::exact::VPoly;
    let mass = Rat::one();
    let reps = calibrated_reps(4, mass).unwrap();
    let v: [VPoly; 3] = std::array::from_fn(|j| VPoly::var(j));
    let u: [VPoly; 3] = std::array::from_fn(|j| VPoly::var(galinv::exact::U1 + j));
    let bv = galinv::galilei::boost_matrix(&reps.boost, &v).unwrap();
    let bu = galinv::galilei::boost_matrix(&reps.boost, &u).unwrap();
    assert_eq!(bv.mul(&bu), bu.mul(&bv));
}

#[test]
fn plane_wave_k_zero_needs_omega_zero() {
    let mass = Rat::one();
    let l = levy_leblond(mass);
    let (_, kernel) = plane_wave_reduce(&l, &vec3_zero(), &Rat::zero());
    assert_eq!(kernel.len(), 2);
    let (_, kernel) = plane_wave_reduce(&l, &vec3_zero(), &rat(1, 3));
    assert!(kernel.is_empty());
}

#[test]
fn scalar_family_regression() {
    // one component, order two: exactly the diagonal second-order operator
    let fam = invariant_family(1, 2, true, Rat::one()).unwrap();
    assert_eq!(fam.dim(), 1);
    let schr = galinv::engine::schroedinger_operator(1, Rat::one());
    assert!(fam.ops[0].proportional_to(&schr).is_some());
}
