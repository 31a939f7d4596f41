//! Serialisable report types with the `galinv/1` schema. Matrices are
//! arrays of arrays of exact rational strings; everything is byte-stable
//! across runs for a fixed configuration.

use serde::{Deserialize, Serialize};

use crate::calculus::{PowerInvariance, ScanRow};
use crate::coupling::{nc_to_latex, CoupledPair, NCExpr, NCSymbol};
use crate::engine::{DiffOpCR, Family, MultiIndex};
use crate::exact::{CRat, MatCR};

pub const SCHEMA: &str = "galinv/1";

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct CRatJson {
    pub re: String,
    pub im: String,
}

impl From<&CRat> for CRatJson {
    fn from(c: &CRat) -> Self {
        CRatJson {
            re: c.re.to_string(),
            im: c.im.to_string(),
        }
    }
}

pub type MatrixJson = Vec<Vec<CRatJson>>;

pub fn matrix_json(m: &MatCR) -> MatrixJson {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| CRatJson::from(&m[(r, c)])).collect())
        .collect()
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct TermJson {
    pub dt: u8,
    pub dx: [u8; 3],
    pub matrix: MatrixJson,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct DiffOpJson {
    pub ncomp: usize,
    pub terms: Vec<TermJson>,
}

impl From<&DiffOpCR> for DiffOpJson {
    fn from(op: &DiffOpCR) -> Self {
        DiffOpJson {
            ncomp: op.ncomp(),
            terms: op
                .terms()
                .map(|(idx, m)| TermJson {
                    dt: idx.dt,
                    dx: idx.dx,
                    matrix: matrix_json(m),
                })
                .collect(),
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct AuditJson {
    pub contexts: Vec<String>,
    pub unknowns: usize,
    pub rows_emitted: usize,
    pub rows_used: usize,
    pub rank: usize,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct FamilyReportJson {
    pub schema: String,
    pub ncomp: usize,
    pub order: usize,
    pub forbid_mixed: bool,
    pub mass: String,
    /// Dimension of the full invariant space.
    pub raw_dimension: usize,
    /// Dimension of the degenerate subspace (derivative-free invariants and
    /// nilpotent-commutant multiples) removed from the report.
    pub degenerate_dimension: usize,
    /// Dimension of the reported family.
    pub family_dimension: usize,
    pub family: Vec<DiffOpJson>,
    pub family_parameter: Option<CRatJson>,
    pub audit: AuditJson,
}

impl From<&Family> for FamilyReportJson {
    fn from(f: &Family) -> Self {
        FamilyReportJson {
            schema: SCHEMA.into(),
            ncomp: f.ncomp,
            order: f.order,
            forbid_mixed: f.forbid_mixed,
            mass: f.mass.to_string(),
            raw_dimension: f.raw_dim(),
            degenerate_dimension: f.degenerate_dim,
            family_dimension: f.dim(),
            family: f.ops.iter().map(DiffOpJson::from).collect(),
            family_parameter: f.lambda.as_ref().map(CRatJson::from),
            audit: AuditJson {
                contexts: f.audit.contexts.clone(),
                unknowns: f.audit.unknowns,
                rows_emitted: f.audit.rows_emitted,
                rows_used: f.audit.rows_used,
                rank: f.audit.rank,
            },
        }
    }
}

/// Claim / status / witness triple for verification runs.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct VerificationJson {
    pub claim: String,
    pub status: String,
    pub witness: serde_json::Value,
}

impl VerificationJson {
    pub fn pass(claim: impl Into<String>, witness: serde_json::Value) -> Self {
        VerificationJson {
            claim: claim.into(),
            status: "pass".into(),
            witness,
        }
    }

    pub fn fail(claim: impl Into<String>, witness: serde_json::Value) -> Self {
        VerificationJson {
            claim: claim.into(),
            status: "fail".into(),
            witness,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct GeneratorSetJson {
    pub schema: String,
    pub rotation: Vec<MatrixJson>,
    pub boost: Vec<MatrixJson>,
    pub family_parameter: Option<CRatJson>,
}

pub fn generator_set_json(
    rot: &[MatCR; 3],
    boost: &[MatCR; 3],
    lambda: Option<&CRat>,
) -> GeneratorSetJson {
    GeneratorSetJson {
        schema: SCHEMA.into(),
        rotation: rot.iter().map(matrix_json).collect(),
        boost: boost.iter().map(matrix_json).collect(),
        family_parameter: lambda.map(CRatJson::from),
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct PowerReportJson {
    pub schema: String,
    pub n: usize,
    pub mass: String,
    pub operator: DiffOpJson,
    pub mixed_terms: Vec<(u8, [u8; 3])>,
    pub invariance: Vec<VerificationJson>,
    pub schroedinger_projective: Option<VerificationJson>,
}

pub fn mixed_terms_json(idx: &[MultiIndex]) -> Vec<(u8, [u8; 3])> {
    idx.iter().map(|i| (i.dt, i.dx)).collect()
}

pub fn power_invariance_json(p: &PowerInvariance) -> VerificationJson {
    let claim = format!("transform(L^{}) = L^{} under {}", p.n, p.n, p.context);
    if p.invariant {
        VerificationJson::pass(claim, serde_json::json!({ "n": p.n }))
    } else {
        VerificationJson::fail(claim, serde_json::json!({ "n": p.n }))
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ScanReportJson {
    pub schema: String,
    pub mass: String,
    pub rows: Vec<ScanRowJson>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ScanRowJson {
    pub k: [String; 3],
    pub omega: String,
    pub nullity: usize,
}

pub fn scan_report_json(mass: &crate::exact::Rat, rows: &[ScanRow]) -> ScanReportJson {
    ScanReportJson {
        schema: SCHEMA.into(),
        mass: mass.to_string(),
        rows: rows
            .iter()
            .map(|r| ScanRowJson {
                k: [r.k[0].to_string(), r.k[1].to_string(), r.k[2].to_string()],
                omega: r.omega.to_string(),
                nullity: r.nullity,
            })
            .collect(),
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct NCTermJson {
    pub coeff: MatrixJson,
    pub word: Vec<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct NCExprJson {
    pub terms: Vec<NCTermJson>,
    pub latex: String,
}

fn symbol_name(s: &NCSymbol) -> String {
    use crate::coupling::{Axis, Field};
    match s {
        NCSymbol::Dt => "dt".into(),
        NCSymbol::Dx(j) => format!("dx{}", j + 1),
        NCSymbol::Pot(Field::V) => "V".into(),
        NCSymbol::Pot(Field::A(j)) => format!("A{}", j + 1),
        NCSymbol::FieldDeriv(axis, field) => {
            let a = match axis {
                Axis::T => "t".into(),
                Axis::X(j) => format!("x{}", j + 1),
            };
            let f = match field {
                Field::V => "V".into(),
                Field::A(j) => format!("A{}", j + 1),
            };
            format!("d({f})/d{a}")
        }
    }
}

pub fn nc_expr_json(e: &NCExpr) -> NCExprJson {
    NCExprJson {
        terms: e
            .terms()
            .iter()
            .map(|t| NCTermJson {
                coeff: matrix_json(&t.coeff),
                word: t.word.iter().map(symbol_name).collect(),
            })
            .collect(),
        latex: nc_to_latex(e),
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct CoupleReportJson {
    pub schema: String,
    pub mass: String,
    /// phi and chi coefficients of the two coupled equations.
    pub upper_phi: NCExprJson,
    pub upper_chi: NCExprJson,
    pub lower_phi: NCExprJson,
    pub lower_chi: NCExprJson,
    pub eliminated: NCExprJson,
    pub matches_reference: VerificationJson,
    pub notes: Vec<String>,
}

pub fn couple_report_json(
    mass: &crate::exact::Rat,
    pair: &CoupledPair,
    eliminated: &NCExpr,
    matches: VerificationJson,
    notes: Vec<String>,
) -> CoupleReportJson {
    CoupleReportJson {
        schema: SCHEMA.into(),
        mass: mass.to_string(),
        upper_phi: nc_expr_json(&pair.upper_phi),
        upper_chi: nc_expr_json(&pair.upper_chi),
        lower_phi: nc_expr_json(&pair.lower_phi),
        lower_chi: nc_expr_json(&pair.lower_chi),
        eliminated: nc_expr_json(eliminated),
        matches_reference: matches,
        notes,
    }
}

/// Plain-text rendering of a concrete operator for the text format.
pub fn diffop_text(op: &DiffOpCR) -> String {
    let mut out = String::new();
    for (idx, m) in op.terms() {
        out.push_str(&format!("term {}:\n", idx));
        for r in 0..m.nrows() {
            out.push_str("  [");
            for c in 0..m.ncols() {
                if c > 0 {
                    out.push_str(", ");
                }
                out.push_str(&m[(r, c)].to_string());
            }
            out.push_str("]\n");
        }
    }
    if out.is_empty() {
        out.push_str("0\n");
    }
    out
}

/// LaTeX rendering of a concrete operator.
pub fn diffop_latex(op: &DiffOpCR) -> String {
    let mut parts = Vec::new();
    for (idx, m) in op.terms() {
        let mut mat = String::from(r"\begin{pmatrix}");
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if c > 0 {
                    mat.push_str(" & ");
                }
                mat.push_str(&m[(r, c)].to_string());
            }
            if r + 1 < m.nrows() {
                mat.push_str(r" \\ ");
            }
        }
        mat.push_str(r"\end{pmatrix}");
        let deriv = if idx.order() == 0 {
            String::new()
        } else {
            let mut d = String::new();
            if idx.dt > 0 {
                d.push_str(&format!(
                    r"\partial_t{}",
                    if idx.dt > 1 { format!("^{}", idx.dt) } else { String::new() }
                ));
            }
            for (j, &b) in idx.dx.iter().enumerate() {
                if b > 0 {
                    d.push_str(&format!(
                        r"\partial_{}{}",
                        j + 1,
                        if b > 1 { format!("^{}", b) } else { String::new() }
                    ));
                }
            }
            d
        };
        parts.push(format!("{mat}{deriv}"));
    }
    parts.join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::levy_leblond;
    use crate::exact::Rat;
    use num_traits::One;

    #[test]
    fn diffop_json_schema_shape() {
        let op = levy_leblond(Rat::one());
        let json = serde_json::to_value(DiffOpJson::from(&op)).unwrap();
        assert_eq!(json["ncomp"], 4);
        let terms = json["terms"].as_array().unwrap();
        assert_eq!(terms.len(), 5);
        // constant term sorts first and has the exact 2i entry
        assert_eq!(terms[0]["dt"], 0);
        assert_eq!(terms[0]["dx"], serde_json::json!([0, 0, 0]));
        assert_eq!(terms[0]["matrix"][0][2]["im"], "2");
        assert_eq!(terms[0]["matrix"][0][2]["re"], "0");
    }

    #[test]
    fn reports_are_byte_stable() {
        let op = levy_leblond(Rat::one());
        let a = serde_json::to_string(&DiffOpJson::from(&op)).unwrap();
        let b = serde_json::to_string(&DiffOpJson::from(&op)).unwrap();
        assert_eq!(a, b);
    }
}
