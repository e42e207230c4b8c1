use std::path::{Path, PathBuf};
use std::process::Command;

use g2_cli::{run, Outcome, EXIT_INVALID, EXIT_OK, EXIT_PARSE};
use g2_core::catalog::{catalog, names};
use serde_json::Value;

fn g2(args: &[&str]) -> Outcome {
    let argv = std::iter::once("g2").chain(args.iter().copied());
    run(argv, None)
}

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn corpus(kind: &str) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(manifest_dir().join("tests/corpus").join(kind))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "g2"))
        .collect();
    files.sort();
    assert!(!files.is_empty());
    files
}

fn validator() -> jsonschema::Validator {
    let text = std::fs::read_to_string(manifest_dir().join("schema/report.schema.json")).unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn assert_valid(v: &jsonschema::Validator, report: &Value, what: &str) {
    let errors: Vec<String> = v.iter_errors(report).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{what}: {errors:?}");
}

fn report(out: &Outcome) -> Value {
    out.report()
        .unwrap_or_else(|| panic!("no report; stderr: {}", out.stderr))
}

const COMMANDS: [&str; 11] = [
    "check", "metric", "torsion", "classify", "ricci", "soliton", "einstein", "su3", "flow",
    "catalog", "oracle",
];

#[test]
fn every_report_matches_the_schema() {
    let v = validator();
    for name in names() {
        for cmd in COMMANDS {
            let mut args = vec![cmd, "--catalog", name];
            if cmd == "flow" {
                args.extend(["--t-end", "0.01"]);
            }
            let out = g2(&args);
            assert!(
                out.code == EXIT_OK || out.code == EXIT_INVALID,
                "{cmd} {name}: {}",
                out.stderr
            );
            assert_valid(&v, &report(&out), &format!("{cmd} --catalog {name}"));
        }
    }
    for cmd in ["catalog", "oracle"] {
        let out = g2(&[cmd]);
        assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
        assert_valid(&v, &report(&out), cmd);
    }
    for f in corpus("broken") {
        let out = g2(&["check", f.to_str().unwrap()]);
        assert_valid(&v, &report(&out), &f.display().to_string());
    }
}

#[test]
fn check_accepts_the_catalog() {
    for name in names() {
        let out = g2(&["check", "--catalog", name]);
        assert_eq!(out.code, EXIT_OK, "{name}: {}", out.stderr);
        assert_eq!(report(&out)["results"]["valid"], Value::Bool(true));
    }
}

#[test]
fn check_rejects_the_broken_corpus() {
    for f in corpus("broken") {
        let out = g2(&["check", f.to_str().unwrap()]);
        assert_eq!(out.code, EXIT_INVALID, "{}: {}", f.display(), out.stdout);
        let r = report(&out);
        assert_eq!(r["status"], "invalid");
        assert!(!r["errors"].as_array().unwrap().is_empty());
    }
}

#[test]
fn parse_errors_exit_one_without_a_report() {
    for f in corpus("parse") {
        for cmd in ["check", "metric"] {
            let out = g2(&[cmd, f.to_str().unwrap()]);
            assert_eq!(out.code, EXIT_PARSE, "{}", f.display());
            assert!(out.stdout.is_empty());
            assert!(out.stderr.contains("parse error at "), "{}", out.stderr);
        }
    }
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &[][..],
        &["frobnicate"],
        &["metric"],
        &["metric", "--catalog", "no_such_entry"],
        &["metric", "--catalog", "n2", "--tol", "-1"],
        &["metric", "--catalog", "n2", "--bogus"],
        &["metric", "--catalog", "n2", "missing_file.g2"],
        &["metric", "does/not/exist.g2"],
        &["flow", "--catalog", "n2", "--dt", "fast"],
    ] {
        let out = g2(args);
        assert_eq!(out.code, EXIT_PARSE, "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn help_exits_zero() {
    let out = g2(&["--help"]);
    assert_eq!(out.code, EXIT_OK);
    for cmd in COMMANDS {
        assert!(out.stdout.contains(cmd));
    }
}

#[test]
fn soliton_on_n2() {
    let out = g2(&["soliton", "--catalog", "n2"]);
    assert_eq!(out.code, EXIT_OK);
    let r = report(&out);
    let res = &r["results"];
    assert!((res["lambda"].as_f64().unwrap() + 2.0).abs() < 1e-12);
    let diag: Vec<f64> = res["derivation_diagonal"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    let expected = [1.0, 1.5, 1.5, 2.0, 2.5, 2.5, 2.0];
    assert!(
        diag.iter()
            .zip(expected)
            .all(|(a, b)| (a - b).abs() < 1e-12),
        "{diag:?}"
    );
    assert!(r["residuals"]["soliton"].as_f64().unwrap() < 1e-9);
    assert_eq!(res["is_soliton"], true);
    assert_eq!(res["kind"], "expanding");
}

#[test]
fn torsion_on_the_einstein_extension() {
    let out = g2(&["torsion", "--catalog", "s_ext_h2"]);
    assert_eq!(out.code, EXIT_OK);
    let res = report(&out)["results"].clone();
    let tau1 = res["tau1"]["terms"].as_object().unwrap();
    assert_eq!(tau1.len(), 1);
    assert!((tau1["e7"].as_f64().unwrap() + 1.0 / 3.0).abs() < 1e-12);
    assert_eq!(res["class"]["label"], "locally conformal calibrated");
}

#[test]
fn flow_with_oracle_on_n2() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("n2.csv");
    let out = g2(&[
        "flow",
        "--catalog",
        "n2",
        "--t-end",
        "1",
        "--dt",
        "1e-3",
        "--oracle",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let r = report(&out);
    assert!(r["residuals"]["oracle"].as_f64().unwrap() < 1e-6);
    assert_eq!(r["results"]["oracle"]["catalog"], "n2");
    assert_eq!(r["results"]["termination"], "reached t_end");

    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header.len(), 1 + 35 + 5);
    assert_eq!(header[0], "t");
    assert_eq!(header[1], "e123");
    assert_eq!(header[35], "e567");
    assert_eq!(
        &header[36..],
        [
            "closedness",
            "tau2_norm",
            "scal",
            "volume_density",
            "laplacian_norm"
        ]
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 1001);
    let last = rows.last().unwrap();
    assert_eq!(last[0], 1.0);
    assert!((last[1] - (10.0f64 / 3.0 + 1.0).powf(0.6)).abs() < 1e-6);
}

#[test]
fn flow_oracle_needs_a_known_start() {
    let out = g2(&["flow", "--catalog", "n4", "--t-end", "0.01", "--oracle"]);
    assert_eq!(out.code, EXIT_INVALID);
    let out = g2(&["flow", "--catalog", "s_ext_h2", "--t-end", "0.01"]);
    assert_eq!(out.code, EXIT_INVALID, "the lcc form is not closed");
}

#[test]
fn oracle_command() {
    let out = g2(&["oracle"]);
    assert_eq!(out.code, EXIT_OK);
    let r = report(&out);
    assert_eq!(r["results"]["solutions"].as_array().unwrap().len(), 2);
    for key in ["n2", "n12_modified_basis"] {
        assert!(r["residuals"][key].as_f64().unwrap() < 1e-9);
    }
    let out = g2(&["oracle", "--catalog", "n12_modified_basis"]);
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(
        report(&out)["results"]["solutions"][0]["catalog"],
        "n12_modified_basis"
    );
    assert_eq!(g2(&["oracle", "--catalog", "n6"]).code, EXIT_INVALID);
}

#[test]
fn tolerance_override_order() {
    let tol = |out: &Outcome| report(out)["tolerances"]["tol"].as_f64().unwrap();
    let argv = ["g2", "classify", "--catalog", "n2"];
    assert_eq!(tol(&run(argv, None)), 1e-8);
    assert_eq!(tol(&run(argv, Some("1e-3"))), 1e-3);
    let with_flag = ["g2", "classify", "--catalog", "n2", "--tol", "1e-5"];
    assert_eq!(tol(&run(with_flag, Some("1e-3"))), 1e-5);
    assert_eq!(run(argv, Some("zero")).code, EXIT_PARSE);
    // a loose tolerance turns the Jacobi failure into a pass
    let broken = manifest_dir().join("tests/corpus/broken/jacobi_failure.g2");
    let argv = ["g2", "check", broken.to_str().unwrap()];
    assert_eq!(run(argv, None).code, EXIT_INVALID);
    assert_eq!(run(argv, Some("10")).code, EXIT_OK);
}

#[test]
fn numbers_survive_the_report() {
    let out = g2(&["metric", "--catalog", "n12_modified_basis"]);
    let r = report(&out);
    let entry = catalog("n12_modified_basis").unwrap();
    let g2s = g2_core::g2::G2Structure::new(
        std::sync::Arc::new(entry.algebra().unwrap()),
        entry.form("phi").unwrap().clone(),
    )
    .unwrap();
    assert_eq!(
        r["results"]["volume_density"].as_f64().unwrap().to_bits(),
        g2s.volume_density().to_bits()
    );
    let g = g2s.metric().matrix();
    for i in 0..7 {
        for j in 0..7 {
            let x = r["results"]["metric"][i][j].as_f64().unwrap();
            assert_eq!(x.to_bits(), g[(i, j)].to_bits());
        }
    }
}

#[test]
fn catalog_listing_and_round_trip() {
    let out = g2(&["catalog"]);
    let entries = report(&out)["results"]["entries"]
        .as_array()
        .unwrap()
        .clone();
    assert_eq!(entries.len(), names().count());
    let dir = tempfile::tempdir().unwrap();
    for name in names() {
        let out = g2(&["catalog", "--catalog", name]);
        assert_eq!(out.code, EXIT_OK);
        let r = report(&out);
        assert_eq!(r["results"]["round_trip"], true);
        // the canonical text, fed back as a file, is recognised
        let path = dir.path().join(format!("{name}.g2"));
        std::fs::write(&path, r["results"]["text"].as_str().unwrap()).unwrap();
        let again = report(&g2(&["catalog", path.to_str().unwrap()]));
        assert_eq!(again["results"]["text"], r["results"]["text"]);
        assert!(again["results"]["name"].is_string(), "{name}");
    }
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_g2"))
}

#[test]
fn binary_reads_stdin_and_env() {
    use std::io::Write;
    let text = "algebra { dim 7 d e5 = e12 d e6 = e13 }\n\
                form phi { e147 + e267 + e357 + e123 + e156 + e245 - e346 }\n";
    let mut child = binary()
        .args(["classify", "-"])
        .env("G2_TOL", "1e-7")
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(text.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["input"]["source"], "stdin");
    assert_eq!(r["tolerances"]["tol"], 1e-7);
    assert_eq!(r["results"]["class"]["label"], "closed, calibrated");
}

#[test]
fn binary_exit_codes() {
    let dir = manifest_dir().join("tests/corpus");
    let code = |args: &[&Path]| {
        binary()
            .arg("check")
            .args(args)
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(
        code(&[&dir.join("broken/degenerate_phi.g2")]),
        Some(EXIT_INVALID)
    );
    assert_eq!(
        code(&[&dir.join("parse/unclosed_block.g2")]),
        Some(EXIT_PARSE)
    );
    let ok = binary()
        .args(["check", "--catalog", "n2"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
}
