//! Constraint derivation and the invariant-family solver.
//!
//! The generating set for full invariance is three rotation-generator
//! contexts plus three axis boosts with symbolic velocity: boosts are
//! abelian, so axiswise invariance for all velocities gives all boosts, the
//! rotation flow gives the connected rotation group, and products follow
//! because operator transformation composes as a group action. Space and
//! time translations act trivially on constant-coefficient operators.
//!
//! The raw nullspace of the constraint system contains, besides the
//! equations of interest, two kinds of degenerate invariants: operators with
//! no derivative term at all (they constrain without evolving anything) and
//! left multiples of other invariants by nilpotent elements of the
//! commutant (they reproduce a subset of another equation's rows). The
//! reported family is a canonical complement of that degenerate subspace;
//! pivots for the degenerate part prefer constant and spatial coordinates so
//! the representatives keep their time-evolution terms.

use num_traits::Zero;

use super::calibrate::{calibrated_reps, Reps};
use super::context::{transform_operator, CtxKind, TransformContext};
use super::{ansatz, DiffOpCR, DiffOpLF, MultiIndex};
use crate::error::{Error, Result};
use crate::exact::vpoly::EPS;
use crate::exact::{
    CRat, ConstraintSystem, Echelon, LinFormCR, Mat, MatCR, Nullspace, Rat, Span, UnknownTable,
};
use crate::galilei::{GalileiElement, SpinorRep};

/// Slot-tagged constraint rows from one context: transformed minus original,
/// collected coefficientwise in the velocity monomials.
pub fn constraint_rows(
    op: &DiffOpLF,
    ctx: &TransformContext,
) -> Result<Vec<(MultiIndex, LinFormCR)>> {
    let delta = transform_operator(op, ctx).sub(op);
    let mut rows = Vec::new();
    for (idx, m) in delta.terms() {
        for (_, entry) in m.entries() {
            for (mono, lf) in entry.collect() {
                match ctx.kind {
                    CtxKind::Exact => rows.push((*idx, lf)),
                    CtxKind::GeneratorLinear => match mono[EPS] {
                        0 => {
                            return Err(Error::Internal(format!(
                                "generator context '{}' produced a nonzero eps^0 part",
                                ctx.label
                            )))
                        }
                        1 => rows.push((*idx, lf)),
                        _ => {}
                    },
                }
            }
        }
    }
    Ok(rows)
}

/// Assemble the homogeneous constraint system for a list of contexts.
pub fn derive_constraints(
    op: &DiffOpLF,
    table: &UnknownTable,
    ctxs: &[TransformContext],
) -> Result<ConstraintSystem> {
    let mut sys = ConstraintSystem::new(table.names().to_vec());
    for ctx in ctxs {
        for (_, row) in constraint_rows(op, ctx)? {
            sys.push_linform(&row);
        }
    }
    Ok(sys)
}

/// The standard generating set: rotation generators about each axis plus a
/// symbolic boost along each axis.
pub fn standard_contexts(reps: &Reps) -> Result<Vec<TransformContext>> {
    let mut ctxs = Vec::new();
    for axis in 1..=3 {
        ctxs.push(TransformContext::rotation_generator(
            &reps.rot,
            axis,
            reps.mass.clone(),
        ));
    }
    for axis in 1..=3 {
        ctxs.push(TransformContext::boost_axis_symbolic(
            &reps.boost,
            axis,
            reps.mass.clone(),
        )?);
    }
    Ok(ctxs)
}

/// Constant matrices invariant under every context: the commutant algebra
/// of the representation. Computed as the order-zero invariant family.
pub fn commutant(reps: &Reps) -> Result<Vec<MatCR>> {
    let (op, table, _) = ansatz(reps.ncomp, 0, false);
    let ctxs = standard_contexts(reps)?;
    let sys = derive_constraints(&op, &table, &ctxs)?;
    let ns = sys.nullspace();
    let n = reps.ncomp;
    Ok(ns
        .basis
        .iter()
        .map(|v| Mat::from_fn(n, n, |r, c| v[r * n + c].clone()))
        .collect())
}

/// Nilpotent part of a matrix algebra over the exact complex rationals via
/// the trace form: `x` is radical iff `tr(x y) = 0` for every basis `y`.
fn radical(basis: &[MatCR]) -> Vec<MatCR> {
    if basis.is_empty() {
        return Vec::new();
    }
    let k = basis.len();
    let mut sys = ConstraintSystem::new((0..k).map(|j| format!("c{j}")).collect());
    for i in 0..k {
        let row: Vec<(u32, CRat)> = (0..k)
            .map(|j| (j as u32, basis[i].mul(&basis[j]).trace()))
            .filter(|(_, t)| !t.is_zero())
            .collect();
        sys.push_row(row);
    }
    let ns = sys.nullspace();
    ns.basis
        .iter()
        .map(|coefs| {
            let mut m = Mat::zeros(basis[0].nrows(), basis[0].ncols());
            for (j, c) in coefs.iter().enumerate() {
                m = m.add(&basis[j].scale(c));
            }
            m
        })
        .collect()
}

/// Coordinate order that eliminates degenerate directions: constant entries
/// first, then pure-space slots with higher total order first, time-bearing
/// slots last.
fn degenerate_pivot_key(slots: &[MultiIndex], ncomp: usize, coord: usize) -> (u8, u8, usize, usize) {
    let n2 = ncomp * ncomp;
    let slot = slots[coord / n2];
    let entry = coord % n2;
    let cat = if slot == MultiIndex::CONST {
        0
    } else if slot.dt == 0 {
        1
    } else {
        2
    };
    let sub = if cat == 1 {
        u8::MAX - slot.space_order() as u8
    } else {
        0
    };
    (cat, sub, coord / n2, entry)
}

/// Reporting order: time-bearing slots first, then space, constant last;
/// representatives are normalised so their leading coefficient here is one.
fn report_key(slots: &[MultiIndex], ncomp: usize, coord: usize) -> (u8, usize, usize) {
    let n2 = ncomp * ncomp;
    let slot = slots[coord / n2];
    let cat = if slot.dt > 0 {
        0
    } else if slot.space_order() > 0 {
        1
    } else {
        2
    };
    (cat, coord / n2, coord % n2)
}

/// Echelon over a permuted coordinate order.
struct OrderedSpan {
    to_new: Vec<usize>,
    to_old: Vec<usize>,
    ech: Echelon,
}

impl OrderedSpan {
    fn new<K: Ord>(len: usize, key: impl Fn(usize) -> K) -> Self {
        let mut order: Vec<usize> = (0..len).collect();
        order.sort_by_key(|&c| key(c));
        let mut to_new = vec![0usize; len];
        for (new, &old) in order.iter().enumerate() {
            to_new[old] = new;
        }
        OrderedSpan {
            to_new,
            to_old: order,
            ech: Echelon::new(len),
        }
    }

    fn permute(&self, v: &[CRat]) -> Vec<(u32, CRat)> {
        let mut row: Vec<(u32, CRat)> = v
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(old, c)| (self.to_new[old] as u32, c.clone()))
            .collect();
        row.sort_by_key(|(c, _)| *c);
        row
    }

    fn insert(&mut self, v: &[CRat]) -> bool {
        let row = self.permute(v);
        self.ech.insert(row)
    }

    /// Remainder of `v` modulo the span, in original coordinates.
    fn reduce(&self, v: &[CRat]) -> Vec<CRat> {
        let row = self.permute(v);
        let red = self.ech.reduce_row(row);
        let mut out = vec![CRat::zero(); v.len()];
        for (c, x) in red {
            out[self.to_old[c as usize]] = x;
        }
        out
    }

    /// The reduced basis rows, in original coordinates, normalised with
    /// leading coefficient one in the permuted order.
    fn basis(&self) -> Vec<Vec<CRat>> {
        let len = self.to_old.len();
        self.ech
            .pivot_rows()
            .map(|row| {
                let mut out = vec![CRat::zero(); len];
                for (c, x) in row {
                    out[self.to_old[*c as usize]] = x.clone();
                }
                out
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct FamilyAudit {
    pub contexts: Vec<String>,
    pub unknowns: usize,
    pub rows_emitted: usize,
    pub rows_used: usize,
    pub rank: usize,
}

/// The solved invariant family for one ansatz.
#[derive(Clone)]
pub struct Family {
    pub ncomp: usize,
    pub order: usize,
    pub forbid_mixed: bool,
    pub mass: Rat,
    pub slots: Vec<MultiIndex>,
    /// Basis of the full space of invariant operators.
    pub raw_basis: Vec<DiffOpCR>,
    /// Dimension of the degenerate subspace that was quotiented away.
    pub degenerate_dim: usize,
    /// Canonical representatives of the invariant dynamical equations.
    pub ops: Vec<DiffOpCR>,
    pub audit: FamilyAudit,
    pub lambda: Option<CRat>,
}

impl Family {
    pub fn raw_dim(&self) -> usize {
        self.raw_basis.len()
    }

    pub fn dim(&self) -> usize {
        self.ops.len()
    }
}

/// Solve for the invariant family with calibrated representations.
pub fn invariant_family(ncomp: usize, order: usize, forbid_mixed: bool, mass: Rat) -> Result<Family> {
    let reps = calibrated_reps(ncomp, mass)?;
    invariant_family_with_reps(&reps, order, forbid_mixed)
}

/// Solve for the invariant family with explicit representations.
pub fn invariant_family_with_reps(reps: &Reps, order: usize, forbid_mixed: bool) -> Result<Family> {
    let ctxs = standard_contexts(reps)?;
    let (op, table, slots) = ansatz(reps.ncomp, order, forbid_mixed);
    let sys = derive_constraints(&op, &table, &ctxs)?;
    let ns = sys.nullspace();
    let audit = FamilyAudit {
        contexts: ctxs.iter().map(|c| c.label.clone()).collect(),
        unknowns: table.len(),
        rows_emitted: ns.rows_emitted,
        rows_used: ns.rows_used,
        rank: ns.rank,
    };
    reduce_family(reps, order, forbid_mixed, slots, ns, audit)
}

fn reduce_family(
    reps: &Reps,
    order: usize,
    forbid_mixed: bool,
    slots: Vec<MultiIndex>,
    ns: Nullspace,
    audit: FamilyAudit,
) -> Result<Family> {
    let ncomp = reps.ncomp;
    let ncoords = slots.len() * ncomp * ncomp;
    let raw_basis: Vec<DiffOpCR> = ns
        .basis
        .iter()
        .map(|v| DiffOpCR::from_coords(ncomp, &slots, v))
        .collect();

    // Degenerate subspace: (a) invariants with no derivative term, solved in
    // family coordinates; (b) nilpotent-commutant left multiples of
    // invariants.
    let fdim = ns.basis.len();
    let mut w_gens: Vec<Vec<CRat>> = Vec::new();
    if fdim > 0 {
        let const_pos = slots
            .iter()
            .position(|s| *s == MultiIndex::CONST)
            .expect("constant slot always present");
        let mut dsys = ConstraintSystem::new((0..fdim).map(|k| format!("f{k}")).collect());
        for coord in 0..ncoords {
            if coord / (ncomp * ncomp) == const_pos {
                continue;
            }
            let row: Vec<(u32, CRat)> = (0..fdim)
                .map(|i| (i as u32, ns.basis[i][coord].clone()))
                .filter(|(_, c)| !c.is_zero())
                .collect();
            dsys.push_row(row);
        }
        for coefs in dsys.nullspace().basis {
            let mut v = vec![CRat::zero(); ncoords];
            for (i, c) in coefs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (k, x) in ns.basis[i].iter().enumerate() {
                    v[k] = &v[k] + &(x * c);
                }
            }
            w_gens.push(v);
        }

        let cbasis = commutant(reps)?;
        for r in radical(&cbasis) {
            for f in &raw_basis {
                let prod = f.scale_left(&r);
                if !prod.is_zero() {
                    w_gens.push(prod.to_coords(&slots));
                }
            }
        }
    }

    // Degenerate generators must themselves be invariant.
    let mut fspan = Span::new(ncoords);
    for b in &ns.basis {
        fspan.insert(b);
    }
    for w in &w_gens {
        if !fspan.contains(w) {
            return Err(Error::Internal(
                "degenerate generator escaped the invariant space".into(),
            ));
        }
    }

    let mut wspan = OrderedSpan::new(ncoords, |c| degenerate_pivot_key(&slots, ncomp, c));
    for w in &w_gens {
        wspan.insert(w);
    }
    let degenerate_dim = wspan.ech.rank();

    let mut reported = OrderedSpan::new(ncoords, |c| report_key(&slots, ncomp, c));
    for b in &ns.basis {
        let red = wspan.reduce(b);
        if red.iter().any(|c| !c.is_zero()) {
            reported.insert(&red);
        }
    }
    let ops: Vec<DiffOpCR> = reported
        .basis()
        .iter()
        .map(|v| DiffOpCR::from_coords(ncomp, &slots, v))
        .collect();

    if ops.len() + degenerate_dim != fdim {
        return Err(Error::Internal(
            "family reduction dimensions are inconsistent".into(),
        ));
    }

    Ok(Family {
        ncomp,
        order,
        forbid_mixed,
        mass: reps.mass.clone(),
        slots,
        raw_basis,
        degenerate_dim,
        ops,
        audit,
        lambda: reps.lambda.clone(),
    })
}

/// Raw invariant space sampled from concrete group elements instead of the
/// symbolic generating set; the independent route used to cross-validate
/// the engine.
pub fn oracle_family_with_elements(
    reps: &Reps,
    order: usize,
    forbid_mixed: bool,
    elements: &[(GalileiElement, SpinorRep)],
) -> Result<Family> {
    let (op, table, slots) = ansatz(reps.ncomp, order, forbid_mixed);
    let mut ctxs = Vec::new();
    for (g, rep2) in elements {
        ctxs.push(TransformContext::element(
            &reps.boost,
            g,
            rep2,
            reps.mass.clone(),
        )?);
    }
    let sys = derive_constraints(&op, &table, &ctxs)?;
    let ns = sys.nullspace();
    let audit = FamilyAudit {
        contexts: ctxs.iter().map(|c| c.label.clone()).collect(),
        unknowns: table.len(),
        rows_emitted: ns.rows_emitted,
        rows_used: ns.rows_used,
        rank: ns.rank,
    };
    reduce_family(reps, order, forbid_mixed, slots, ns, audit)
}

/// Exact invariance check of a concrete operator under a set of contexts.
/// Returns the label of the first failing context, if any.
pub fn verify_invariance(op: &DiffOpCR, ctxs: &[TransformContext]) -> Option<String> {
    let lf = op.to_lf();
    for ctx in ctxs {
        let delta = transform_operator(&lf, ctx).sub(&lf);
        for (_, m) in delta.terms() {
            for (_, entry) in m.entries() {
                let poly = entry.as_poly().expect("concrete operator");
                let bad = match ctx.kind {
                    CtxKind::Exact => !poly.is_zero(),
                    CtxKind::GeneratorLinear => !poly.eps_coefficient(1).is_zero(),
                };
                if bad {
                    return Some(ctx.label.clone());
                }
            }
        }
    }
    None
}

/// Do two operator lists span the same subspace over a common slot layout?
pub fn same_operator_span(a: &[DiffOpCR], b: &[DiffOpCR], slots: &[MultiIndex], ncomp: usize) -> bool {
    let len = slots.len() * ncomp * ncomp;
    let mut sa = Span::new(len);
    for op in a {
        sa.insert(&op.to_coords(slots));
    }
    let mut sb = Span::new(len);
    for op in b {
        sb.insert(&op.to_coords(slots));
    }
    sa.dim() == sb.dim() && b.iter().all(|op| sa.contains(&op.to_coords(slots)))
}

/// One stage of the first-order constraint cascade.
pub struct CascadeStage {
    pub label: String,
    pub nullspace: Nullspace,
    pub basis_ops: Vec<DiffOpCR>,
}

/// The staged first-order analysis for four components: rotations first,
/// then the boost conditions slot by slot (time coefficient, space
/// coefficients, zeroth term), finally the canonical reduction.
pub fn cascade(mass: Rat) -> Result<(Vec<CascadeStage>, Family)> {
    let reps = calibrated_reps(4, mass)?;
    let (op, table, slots) = ansatz(4, 1, false);

    let mut rot_rows = Vec::new();
    for axis in 1..=3 {
        let ctx = TransformContext::rotation_generator(&reps.rot, axis, reps.mass.clone());
        rot_rows.extend(constraint_rows(&op, &ctx)?);
    }
    let mut boost_rows = Vec::new();
    for axis in 1..=3 {
        let ctx = TransformContext::boost_axis_symbolic(&reps.boost, axis, reps.mass.clone())?;
        boost_rows.extend(constraint_rows(&op, &ctx)?);
    }

    let filters: [(&str, Box<dyn Fn(&MultiIndex) -> bool>); 4] = [
        ("rotations only", Box::new(|_idx| false)),
        (
            "rotations + boost time-coefficient",
            Box::new(|idx: &MultiIndex| idx.dt == 1 && idx.space_order() == 0),
        ),
        (
            "rotations + boost time and space coefficients",
            Box::new(|idx: &MultiIndex| {
                (idx.dt == 1 && idx.space_order() == 0) || (idx.dt == 0 && idx.space_order() == 1)
            }),
        ),
        ("rotations + all boost conditions", Box::new(|_idx| true)),
    ];

    let mut stages = Vec::new();
    for (label, keep_boost) in filters {
        let mut sys = ConstraintSystem::new(table.names().to_vec());
        for (_, row) in &rot_rows {
            sys.push_linform(row);
        }
        for (idx, row) in &boost_rows {
            if keep_boost(idx) {
                sys.push_linform(row);
            }
        }
        let ns = sys.nullspace();
        let basis_ops = ns
            .basis
            .iter()
            .map(|v| DiffOpCR::from_coords(4, &slots, v))
            .collect();
        stages.push(CascadeStage {
            label: label.to_string(),
            nullspace: ns,
            basis_ops,
        });
    }

    let family = invariant_family_with_reps(&reps, 1, false)?;
    Ok((stages, family))
}
