//! Command implementations behind the `galinv` binary.
//!
//! Every command writes its machine-readable report atomically into the
//! output directory and prints a short summary. Reports are byte-stable
//! across runs for a fixed configuration.
//!
//! Exit codes: 0 success, 1 proposition mismatch, 2 configuration error,
//! 3 internal inconsistency.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use galinv::calculus::{
    dispersion_scan, invariance_of_power, op_power, scan_omegas, scan_to_csv,
};
use galinv::coupling::{
    eliminate_lower, minimal_substitute, nc_normal_form, nc_to_latex, pauli_schroedinger_reference,
};
use galinv::engine::{
    ansatz_slots, calibrated_reps, invariant_family, levy_leblond, oracle_family_with_elements,
    same_operator_span, schroedinger_operator, TransformContext,
};

use num_traits::Zero;
use galinv::exact::{parse_positive_rat, rat, Rat};
use galinv::galilei::{adjoint_rotation, spinor_from_quaternion, GalileiElement};
use galinv::report::{
    couple_report_json, diffop_latex, diffop_text, mixed_terms_json, power_invariance_json,
    scan_report_json, generator_set_json, DiffOpJson, FamilyReportJson, PowerReportJson,
    VerificationJson, SCHEMA,
};
use galinv::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Format {
    Json,
    Text,
    Latex,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            "latex" => Ok(Format::Latex),
            other => Err(format!("unknown format '{other}'")),
        }
    }

    fn ext(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Text => "txt",
            Format::Latex => "tex",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub mass: String,
    pub output_dir: PathBuf,
    pub format: Format,
}

#[derive(Clone, Debug)]
pub enum Command {
    Derive {
        ncomp: usize,
        order: usize,
        forbid_mixed: bool,
    },
    Power {
        n: usize,
    },
    Planewave {
        k: Option<[String; 3]>,
    },
    Couple,
    PropSuite,
}

/// Write a file atomically: temp file in the same directory, then rename.
fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().and_then(|s| s.to_str()).unwrap_or("report")
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

fn classify(err: &Error) -> i32 {
    match err {
        Error::BadMass(_) | Error::UnsupportedNcomp(_) | Error::UnsupportedOrder(..) => EXIT_CONFIG,
        _ => EXIT_INTERNAL,
    }
}

pub fn run(config: &RunConfig) -> i32 {
    let mass = match parse_positive_rat(&config.mass) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let out = match &config.command {
        Command::Derive {
            ncomp,
            order,
            forbid_mixed,
        } => cmd_derive(*ncomp, *order, *forbid_mixed, mass, config),
        Command::Power { n } => cmd_power(*n, mass, config),
        Command::Planewave { k } => cmd_planewave(k.as_ref(), mass, config),
        Command::Couple => cmd_couple(mass, config),
        Command::PropSuite => cmd_prop_suite(mass, config),
    };
    match out {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            classify(&e)
        }
    }
}

fn report_path(config: &RunConfig, stem: &str) -> PathBuf {
    config
        .output_dir
        .join(format!("{stem}.{}", config.format.ext()))
}

fn io_fail(e: std::io::Error) -> Error {
    Error::Internal(format!("report write failed: {e}"))
}

fn cmd_derive(
    ncomp: usize,
    order: usize,
    forbid_mixed: bool,
    mass: Rat,
    config: &RunConfig,
) -> Result<i32, Error> {
    let family = invariant_family(ncomp, order, forbid_mixed, mass)?;
    let json = FamilyReportJson::from(&family);
    let stem = format!(
        "derive_ncomp{}_order{}{}",
        ncomp,
        order,
        if forbid_mixed { "_nomixed" } else { "" }
    );
    let rendered = match config.format {
        Format::Json => serde_json::to_string_pretty(&json).unwrap(),
        Format::Text => {
            let mut s = format!(
                "invariant family ncomp={} order={} forbid_mixed={}\nraw dimension: {}\ndegenerate dimension: {}\nfamily dimension: {}\n",
                ncomp, order, forbid_mixed, family.raw_dim(), family.degenerate_dim, family.dim()
            );
            for (k, op) in family.ops.iter().enumerate() {
                s.push_str(&format!("-- basis element {k}:\n{}", diffop_text(op)));
            }
            s
        }
        Format::Latex => {
            let mut s = String::new();
            for op in &family.ops {
                s.push_str(&format!("\\[ {} \\]\n", diffop_latex(op)));
            }
            s
        }
    };
    write_atomic(&report_path(config, &stem), &rendered).map_err(io_fail)?;
    // the generator data behind the family, for reproducibility
    let reps = calibrated_reps(ncomp, family.mass.clone())?;
    let gens = generator_set_json(&reps.rot, &reps.boost, reps.lambda.as_ref());
    write_atomic(
        &config.output_dir.join(format!("{stem}_generators.json")),
        &serde_json::to_string_pretty(&gens).unwrap(),
    )
    .map_err(io_fail)?;
    println!(
        "family dimension: {} (raw {}, degenerate {})",
        family.dim(),
        family.raw_dim(),
        family.degenerate_dim
    );
    Ok(EXIT_OK)
}

fn power_contexts(mass: &Rat) -> Result<Vec<TransformContext>, Error> {
    let reps = calibrated_reps(4, mass.clone())?;
    let mut ctxs = vec![TransformContext::boost_symbolic(&reps.boost, mass.clone())?];
    for axis in 1..=3 {
        ctxs.push(TransformContext::rotation_generator(&reps.rot, axis, mass.clone()));
    }
    let rep2 = spinor_from_quaternion(&[rat(2, 1), Rat::zero(), Rat::zero(), rat(1, 1)])
        .map_err(|e| Error::Internal(e.to_string()))?;
    ctxs.push(TransformContext::rotation_finite(4, &rep2, mass.clone())?);
    Ok(ctxs)
}

fn cmd_power(n: usize, mass: Rat, config: &RunConfig) -> Result<i32, Error> {
    if n == 0 {
        return Err(Error::UnsupportedOrder(0, "power expects N >= 1".into()));
    }
    let l = levy_leblond(mass.clone());
    let p = op_power(&l, n);
    let mixed = p.mixed_terms();
    let mut verifications = Vec::new();
    for ctx in power_contexts(&mass)? {
        if ctx.kind == galinv::engine::CtxKind::Exact {
            verifications.push(power_invariance_json(&invariance_of_power(&l, n, &ctx)?));
        }
    }
    let schr = if n == 2 {
        let reference = schroedinger_operator(4, mass.clone());
        let prop = p.proportional_to(&reference);
        Some(match prop {
            Some(c) => VerificationJson::pass(
                "L^2 equals the Schroedinger operator (projective)",
                serde_json::json!({ "scale": format!("{c}") }),
            ),
            None => VerificationJson::fail(
                "L^2 equals the Schroedinger operator (projective)",
                serde_json::Value::Null,
            ),
        })
    } else {
        None
    };
    let report = PowerReportJson {
        schema: SCHEMA.into(),
        n,
        mass: mass.to_string(),
        operator: DiffOpJson::from(&p),
        mixed_terms: mixed_terms_json(&mixed),
        invariance: verifications.clone(),
        schroedinger_projective: schr.clone(),
    };
    let stem = format!("power_n{n}");
    let rendered = match config.format {
        Format::Json => serde_json::to_string_pretty(&report).unwrap(),
        Format::Text => {
            let mut s = format!("L^{n}:\n{}", diffop_text(&p));
            s.push_str(&format!("mixed terms: {:?}\n", report.mixed_terms));
            for v in &verifications {
                s.push_str(&format!("{}: {}\n", v.claim, v.status));
            }
            s
        }
        Format::Latex => format!("\\[ {} \\]\n", diffop_latex(&p)),
    };
    write_atomic(&report_path(config, &stem), &rendered).map_err(io_fail)?;
    let all_ok = verifications.iter().all(|v| v.passed())
        && schr.as_ref().map_or(true, |v| v.passed());
    println!(
        "L^{n}: {} mixed terms, invariance {}{}",
        report.mixed_terms.len(),
        if all_ok { "pass" } else { "FAIL" },
        match &schr {
            Some(v) if v.passed() => ", equals Schroedinger operator (projective)",
            Some(_) => ", does NOT equal the Schroedinger operator",
            None => "",
        }
    );
    Ok(if all_ok { EXIT_OK } else { EXIT_MISMATCH })
}

fn parse_k(k: &[String; 3]) -> Result<[Rat; 3], Error> {
    let mut out = [Rat::zero(), Rat::zero(), Rat::zero()];
    for (j, s) in k.iter().enumerate() {
        out[j] = s
            .trim()
            .parse::<Rat>()
            .map_err(|_| Error::BadMass(format!("bad wave-vector component '{s}'")))?;
    }
    Ok(out)
}

fn cmd_planewave(k: Option<&[String; 3]>, mass: Rat, config: &RunConfig) -> Result<i32, Error> {
    let l = levy_leblond(mass.clone());
    let ks: Vec<[Rat; 3]> = match k {
        Some(k) => vec![parse_k(k)?],
        None => vec![
            [rat(1, 1), Rat::zero(), Rat::zero()],
            [Rat::zero(), rat(1, 1), Rat::zero()],
            [Rat::zero(), Rat::zero(), rat(1, 1)],
            [rat(1, 1), rat(1, 1), Rat::zero()],
            [rat(1, 2), rat(1, 3), rat(1, 1)],
        ],
    };
    let mut rows = Vec::new();
    for kv in &ks {
        rows.extend(dispersion_scan(&l, &[kv.clone()], &scan_omegas(kv, &mass)));
    }
    let csv = scan_to_csv(&rows);
    write_atomic(&config.output_dir.join("planewave_scan.csv"), &csv).map_err(io_fail)?;
    let json = scan_report_json(&mass, &rows);
    write_atomic(
        &report_path(config, "planewave_scan"),
        &match config.format {
            Format::Json => serde_json::to_string_pretty(&json).unwrap(),
            _ => csv.clone(),
        },
    )
    .map_err(io_fail)?;
    let hits = rows.iter().filter(|r| r.nullity > 0).count();
    println!(
        "scanned {} (k, omega) points, {} on the dispersion shell",
        rows.len(),
        hits
    );
    Ok(EXIT_OK)
}

fn cmd_couple(mass: Rat, config: &RunConfig) -> Result<i32, Error> {
    let l = levy_leblond(mass.clone());
    let pair = minimal_substitute(&l)?;
    let eliminated = eliminate_lower(&pair, &mass)?;
    let reference = nc_normal_form(&pauli_schroedinger_reference(&mass));
    let matches = if eliminated == reference {
        VerificationJson::pass(
            "eliminated equation matches the two-component magnetic form",
            serde_json::Value::Null,
        )
    } else {
        VerificationJson::fail(
            "eliminated equation matches the two-component magnetic form",
            serde_json::json!({ "got": nc_to_latex(&eliminated) }),
        )
    };
    let notes = vec![
        "upper pair: sigma_j (dx_j - i A_j) phi + 2im chi = 0".into(),
        "lower pair: (dt + i V) phi - sigma_j (dx_j - i A_j) chi = 0".into(),
        "normalised so the bare time-derivative word carries coefficient i".into(),
    ];
    let report = couple_report_json(&mass, &pair, &eliminated, matches.clone(), notes);
    let stem = "couple";
    let rendered = match config.format {
        Format::Json => serde_json::to_string_pretty(&report).unwrap(),
        Format::Text => format!(
            "eliminated: {}\nstatus: {}\n",
            nc_to_latex(&eliminated),
            matches.status
        ),
        Format::Latex => format!(
            "\\[ \\left[{}\\right]\\,\\varphi = 0 \\]\n",
            nc_to_latex(&eliminated)
        ),
    };
    write_atomic(&report_path(config, stem), &rendered).map_err(io_fail)?;
    println!("elimination: {}", matches.status);
    Ok(if matches.passed() { EXIT_OK } else { EXIT_MISMATCH })
}

/// Twenty fixed rational group elements mixing rotations and boosts, for the
/// prop-suite cross-check.
fn sample_elements(
    count: usize,
) -> Result<Vec<(GalileiElement, galinv::galilei::SpinorRep)>, Error> {
    let quats: [[i64; 4]; 5] = [
        [1, 0, 0, 0],
        [2, 1, 0, 0],
        [2, 0, 1, 0],
        [2, 0, 0, 1],
        [1, 1, -1, 2],
    ];
    let vels: [[(i64, i64); 3]; 4] = [
        [(0, 1), (0, 1), (0, 1)],
        [(1, 1), (0, 1), (0, 1)],
        [(1, 2), (-1, 3), (0, 1)],
        [(2, 3), (1, 1), (-1, 2)],
    ];
    let mut out = Vec::new();
    for q in quats {
        for v in vels {
            let qr = [rat(q[0], 1), rat(q[1], 1), rat(q[2], 1), rat(q[3], 1)];
            let rep = spinor_from_quaternion(&qr)?;
            let r = adjoint_rotation(&rep)?;
            let vel = [rat(v[0].0, v[0].1), rat(v[1].0, v[1].1), rat(v[2].0, v[2].1)];
            let g = GalileiElement::new(r, vel, galinv::galilei::vec3_zero(), Rat::zero())?;
            out.push((g, rep));
            if out.len() == count {
                return Ok(out);
            }
        }
    }
    Ok(out)
}

fn cmd_prop_suite(mass: Rat, config: &RunConfig) -> Result<i32, Error> {
    let mut checks: Vec<VerificationJson> = Vec::new();

    // 1: no two-component equations
    let rot2 = galinv::galilei::rotation_generators(2)?;
    let sol2 = galinv::galilei::solve_boost_generators(&rot2)?;
    let fam2 = invariant_family(2, 1, false, mass.clone())?;
    checks.push(verdict(
        "two components: only the zero boost generators and an empty family",
        sol2.only_zero() && fam2.dim() == 0,
        serde_json::json!({ "family_dimension": fam2.dim(), "raw_dimension": fam2.raw_dim() }),
    ));

    // 2: the unique first-order four-component equation
    let fam4 = invariant_family(4, 1, false, mass.clone())?;
    let ll = levy_leblond(mass.clone());
    checks.push(verdict(
        "four components, first order: exactly the reference equation",
        fam4.dim() == 1 && fam4.ops[0] == ll,
        serde_json::json!({ "family_dimension": fam4.dim(), "raw_dimension": fam4.raw_dim() }),
    ));

    // 3: L^2 is the Schroedinger operator
    let l2 = op_power(&ll, 2);
    let schr = schroedinger_operator(4, mass.clone());
    checks.push(verdict(
        "L^2 equals the Schroedinger operator (projective)",
        l2.proportional_to(&schr).is_some(),
        serde_json::Value::Null,
    ));

    // 4: all powers stay invariant
    let mut all_powers = true;
    for ctx in power_contexts(&mass)? {
        if ctx.kind != galinv::engine::CtxKind::Exact {
            continue;
        }
        for n in 1..=5 {
            all_powers &= invariance_of_power(&ll, n, &ctx)?.invariant;
        }
    }
    checks.push(verdict(
        "L^N invariant for N = 1..5 under symbolic boosts and rotations",
        all_powers,
        serde_json::Value::Null,
    ));

    // 5: no further families free of mixed derivatives
    let mut mixed_ok = true;
    for n in 3..=5 {
        mixed_ok &= !op_power(&ll, n).mixed_terms().is_empty();
    }
    let fam42 = invariant_family(4, 2, true, mass.clone())?;
    let slots2 = ansatz_slots(2, true);
    let expected = vec![ll.clone(), schr.clone()];
    let span_ok = same_operator_span(&fam42.ops, &expected, &slots2, 4);
    // cross-validate against twenty concrete group elements
    let reps = calibrated_reps(4, mass.clone())?;
    let oracle = oracle_family_with_elements(&reps, 2, true, &sample_elements(20)?)?;
    let oracle_ok = oracle.raw_dim() == fam42.raw_dim()
        && same_operator_span(&oracle.raw_basis, &fam42.raw_basis, &slots2, 4)
        && same_operator_span(&oracle.ops, &fam42.ops, &slots2, 4);
    checks.push(verdict(
        "second order without mixed terms: span is exactly the two reference operators",
        mixed_ok && span_ok && oracle_ok,
        serde_json::json!({
            "family_dimension": fam42.dim(),
            "raw_dimension": fam42.raw_dim(),
            "oracle_raw_dimension": oracle.raw_dim(),
        }),
    ));

    // 6: coupling elimination
    let pair = minimal_substitute(&ll)?;
    let eliminated = eliminate_lower(&pair, &mass)?;
    let reference = nc_normal_form(&pauli_schroedinger_reference(&mass));
    checks.push(verdict(
        "minimal coupling eliminates to the two-component magnetic form",
        eliminated == reference,
        serde_json::Value::Null,
    ));

    let all = checks.iter().all(|c| c.passed());
    for c in &checks {
        println!("{} {}", if c.passed() { "PASS" } else { "FAIL" }, c.claim);
    }
    write_atomic(
        &report_path(config, "prop_suite"),
        &serde_json::to_string_pretty(&serde_json::json!({
            "schema": SCHEMA,
            "mass": mass.to_string(),
            "checks": checks,
        }))
        .unwrap(),
    )
    .map_err(io_fail)?;
    Ok(if all { EXIT_OK } else { EXIT_MISMATCH })
}

fn verdict(claim: &str, ok: bool, witness: serde_json::Value) -> VerificationJson {
    if ok {
        VerificationJson::pass(claim, witness)
    } else {
        VerificationJson::fail(claim, witness)
    }
}

// Convenience re-exports used by tests.
pub use galinv::report::CRatJson;

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn config(dir: &std::path::Path, command: Command) -> RunConfig {
        RunConfig {
            command,
            mass: "1".into(),
            output_dir: dir.to_path_buf(),
            format: Format::Json,
        }
    }

    #[test]
    fn derive_two_components_reports_empty_family() {
        let dir = tempdir().unwrap();
        let cfg = config(
            dir.path(),
            Command::Derive {
                ncomp: 2,
                order: 1,
                forbid_mixed: false,
            },
        );
        assert_eq!(run(&cfg), EXIT_OK);
        let data: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join("derive_ncomp2_order1.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(data["schema"], "galinv/1");
        assert_eq!(data["family_dimension"], 0);
    }

    #[test]
    fn derive_four_components_reports_dimension_one() {
        let dir = tempdir().unwrap();
        let cfg = config(
            dir.path(),
            Command::Derive {
                ncomp: 4,
                order: 1,
                forbid_mixed: false,
            },
        );
        assert_eq!(run(&cfg), EXIT_OK);
        let path = dir.path().join("derive_ncomp4_order1.json");
        let data: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(data["family_dimension"], 1);
        // byte stability across runs
        let first = std::fs::read(&path).unwrap();
        assert_eq!(run(&cfg), EXIT_OK);
        assert_eq!(std::fs::read(&path).unwrap(), first);
    }

    #[test]
    fn bad_mass_is_a_config_error() {
        let dir = tempdir().unwrap();
        let mut cfg = config(dir.path(), Command::Couple);
        cfg.mass = "-3".into();
        assert_eq!(run(&cfg), EXIT_CONFIG);
    }

    #[test]
    fn power_two_passes() {
        let dir = tempdir().unwrap();
        let cfg = config(dir.path(), Command::Power { n: 2 });
        assert_eq!(run(&cfg), EXIT_OK);
        let data: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join("power_n2.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(data["schroedinger_projective"]["status"], "pass");
        assert!(data["mixed_terms"].as_array().unwrap().is_empty());
    }

    #[test]
    fn planewave_writes_csv() {
        let dir = tempdir().unwrap();
        let cfg = config(
            dir.path(),
            Command::Planewave {
                k: Some(["1".into(), "0".into(), "0".into()]),
            },
        );
        assert_eq!(run(&cfg), EXIT_OK);
        let csv = std::fs::read_to_string(dir.path().join("planewave_scan.csv")).unwrap();
        assert!(csv.starts_with("k1,k2,k3,omega,nullity\n"));
        assert!(csv.contains(",1/2,2"));
    }

    #[test]
    fn couple_passes() {
        let dir = tempdir().unwrap();
        let cfg = config(dir.path(), Command::Couple);
        assert_eq!(run(&cfg), EXIT_OK);
    }
}
