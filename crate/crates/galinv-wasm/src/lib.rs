//! Browser bindings: three interactive views onto the exact engine, each
//! returning a JSON string for the static demo page to render.

use wasm_bindgen::prelude::wasm_bindgen;

use galinv::calculus::{dispersion_scan, invariance_of_power, op_power, scan_omegas};
use galinv::coupling::{
    eliminate_lower, minimal_substitute, nc_normal_form, pauli_schroedinger_reference,
};
use galinv::engine::{
    calibrated_reps, invariant_family, levy_leblond, schroedinger_operator, TransformContext,
};
use galinv::exact::{parse_positive_rat, Rat};
use galinv::report::{
    couple_report_json, mixed_terms_json, nc_expr_json, power_invariance_json, scan_report_json,
    DiffOpJson, FamilyReportJson, VerificationJson, SCHEMA,
};

fn err_json(msg: impl std::fmt::Display) -> String {
    serde_json::json!({ "error": msg.to_string() }).to_string()
}

/// Solve for the invariant family; ncomp in {1, 2, 4}.
#[wasm_bindgen]
pub fn derive_family(ncomp: usize, order: usize, forbid_mixed: bool, mass: &str) -> String {
    let mass = match parse_positive_rat(mass) {
        Ok(m) => m,
        Err(e) => return err_json(e),
    };
    match invariant_family(ncomp, order, forbid_mixed, mass) {
        Ok(f) => serde_json::to_string(&FamilyReportJson::from(&f)).unwrap(),
        Err(e) => err_json(e),
    }
}

/// Expand `L^n`, list its mixed time-space terms, and verify invariance
/// under a fully symbolic boost.
#[wasm_bindgen]
pub fn power_report(n: usize, mass: &str) -> String {
    let mass = match parse_positive_rat(mass) {
        Ok(m) => m,
        Err(e) => return err_json(e),
    };
    if n == 0 || n > 6 {
        return err_json("n must be between 1 and 6");
    }
    let inner = || -> Result<String, galinv::Error> {
        let l = levy_leblond(mass.clone());
        let p = op_power(&l, n);
        let reps = calibrated_reps(4, mass.clone())?;
        let ctx = TransformContext::boost_symbolic(&reps.boost, mass.clone())?;
        let inv = power_invariance_json(&invariance_of_power(&l, n, &ctx)?);
        let schr = if n == 2 {
            let prop = p.proportional_to(&schroedinger_operator(4, mass.clone()));
            Some(match prop {
                Some(c) => VerificationJson::pass(
                    "equals the Schroedinger operator (projective)",
                    serde_json::json!({ "scale": format!("{c}") }),
                ),
                None => VerificationJson::fail(
                    "equals the Schroedinger operator (projective)",
                    serde_json::Value::Null,
                ),
            })
        } else {
            None
        };
        Ok(serde_json::json!({
            "schema": SCHEMA,
            "n": n,
            "operator": DiffOpJson::from(&p),
            "mixed_terms": mixed_terms_json(&p.mixed_terms()),
            "invariance": inv,
            "schroedinger_projective": schr,
        })
        .to_string())
    };
    inner().unwrap_or_else(err_json)
}

/// Dispersion scan of the first-order operator at one wave vector: exact
/// kernel dimension across frequencies around the shell.
#[wasm_bindgen]
pub fn planewave_scan(k1: &str, k2: &str, k3: &str, mass: &str) -> String {
    let mass = match parse_positive_rat(mass) {
        Ok(m) => m,
        Err(e) => return err_json(e),
    };
    let parse = |s: &str| s.trim().parse::<Rat>();
    let (k1, k2, k3) = match (parse(k1), parse(k2), parse(k3)) {
        (Ok(a), Ok(b), Ok(c)) => (a, b, c),
        _ => return err_json("wave-vector components must be rationals like 1 or -3/2"),
    };
    let k = [k1, k2, k3];
    let l = levy_leblond(mass.clone());
    let rows = dispersion_scan(&l, &[k.clone()], &scan_omegas(&k, &mass));
    let mut json = serde_json::to_value(scan_report_json(&mass, &rows)).unwrap();
    let k2sum: Rat = k.iter().map(|x| x * x).sum();
    let shell = k2sum / (Rat::from_integer(2.into()) * &mass);
    json["shell_omega"] = serde_json::json!(shell.to_string());
    json.to_string()
}

/// Minimal coupling of the first-order operator and elimination of the
/// lower pair, with the exact match against the reference form.
#[wasm_bindgen]
pub fn couple_report(mass: &str) -> String {
    let mass = match parse_positive_rat(mass) {
        Ok(m) => m,
        Err(e) => return err_json(e),
    };
    let inner = || -> Result<String, galinv::Error> {
        let pair = minimal_substitute(&levy_leblond(mass.clone()))?;
        let eliminated = eliminate_lower(&pair, &mass)?;
        let reference = nc_normal_form(&pauli_schroedinger_reference(&mass));
        let matches = if eliminated == reference {
            VerificationJson::pass("matches the two-component magnetic form", serde_json::Value::Null)
        } else {
            VerificationJson::fail(
                "matches the two-component magnetic form",
                serde_json::json!({ "reference": nc_expr_json(&reference) }),
            )
        };
        Ok(
            serde_json::to_string(&couple_report_json(&mass, &pair, &eliminated, matches, vec![]))
                .unwrap(),
        )
    };
    inner().unwrap_or_else(err_json)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derive_family_json() {
        let out = derive_family(4, 1, false, "1");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["family_dimension"], 1);
        assert_eq!(v["schema"], "galinv/1");

        let out = derive_family(2, 1, false, "1");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["family_dimension"], 0);
    }

    #[test]
    fn bad_inputs_are_reported() {
        let v: serde_json::Value = serde_json::from_str(&derive_family(3, 1, false, "1")).unwrap();
        assert!(v["error"].is_string());
        let v: serde_json::Value = serde_json::from_str(&power_report(0, "1")).unwrap();
        assert!(v["error"].is_string());
        let v: serde_json::Value =
            serde_json::from_str(&planewave_scan("x", "0", "0", "1")).unwrap();
        assert!(v["error"].is_string());
    }

    #[test]
    fn power_and_scan() {
        let v: serde_json::Value = serde_json::from_str(&power_report(2, "1")).unwrap();
        assert_eq!(v["schroedinger_projective"]["status"], "pass");
        assert_eq!(v["invariance"]["status"], "pass");

        let v: serde_json::Value =
            serde_json::from_str(&planewave_scan("1", "0", "0", "1")).unwrap();
        assert_eq!(v["shell_omega"], "1/2");
        let rows = v["rows"].as_array().unwrap();
        assert!(rows.iter().any(|r| r["nullity"] == 2));
    }

    #[test]
    fn couple_matches() {
        let v: serde_json::Value = serde_json::from_str(&couple_report("1")).unwrap();
        assert_eq!(v["matches_reference"]["status"], "pass");
    }
}
