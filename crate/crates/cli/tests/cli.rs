use std::io::Write;
use std::process::{Command, Output};

use endowed::{Instance, Rational};
use serde_json::Value;

fn endowed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_endowed")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn temp_file(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

fn rational(v: &Value) -> Rational {
    v.as_str().expect("rationals are strings").parse().unwrap()
}

#[test]
fn gap_on_feige_vondrak() {
    let out = endowed(&["gap", "--gen", "feige-vondrak"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = json(&out);
    assert_eq!(report["integrality_gap"], "6/5");
    assert_eq!(report["lp_value"], "4/1");
    assert_eq!(report["integral_opt"], "10/3");
    let entry = report["allocations"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["allocation"] == serde_json::json!([0, 0, 1, 1]))
        .expect("({ab},{cd}) is listed");
    assert_eq!(entry["min_alpha"]["status"], "supported");
    assert_eq!(entry["min_alpha"]["alpha"], "3/2");
}

#[test]
fn gap_table_mirrors_json() {
    let out = endowed(&["--format", "table", "gap", "--gen", "feige-vondrak"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("integrality gap   6/5"), "{text}");
    assert!(text.contains("endowment gap     3/2"), "{text}");
}

#[test]
fn verify_on_empty_instance_is_valid() {
    let inst = temp_file(r#"{"m":0,"players":[{"class":"additive","payload":{"values":[]}}],"label":"empty"}"#);
    let path = inst.path().to_str().unwrap();
    let out = endowed(&[
        "equilibrium", "verify", "--instance", path, "--allocation", "[]", "--prices", "[]", "--alpha", "1",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(json(&out)["verdict"], "valid");
}

#[test]
fn verify_reads_a_certificate_file() {
    let cert = temp_file(r#"{"allocation":[0,0,1,1],"prices":["1","1","1/2","1/2"],"alpha":"3/2"}"#);
    let path = cert.path().to_str().unwrap();
    let out = endowed(&["equilibrium", "verify", "--gen", "feige-vondrak", "--certificate", path]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    // Flags override the file; a smaller intensity breaks the certificate.
    let out = endowed(&["equilibrium", "verify", "--gen", "feige-vondrak", "--certificate", path, "--alpha", "5/4"]);
    assert_eq!(code(&out), 1);
    let report = json(&out);
    assert_eq!(report["verdict"], "invalid");
    assert_eq!(report["witness"]["kind"], "deviation");
}

#[test]
fn alpha_min_on_feige_vondrak() {
    let out = endowed(&["alpha-min", "--gen", "feige-vondrak", "--allocation", "0,0,1,1"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["alpha"], "3/2");
    assert_eq!(report["attained"], true);

    // Alice's marginals in the grand bundle are all zero while Bob values it,
    // so the allocation is not maximal and no intensity supports it.
    let out = endowed(&["alpha-min", "--gen", "feige-vondrak", "--allocation", "0,0,0,0"]);
    assert_eq!(code(&out), 1);
    let report = json(&out);
    assert_eq!(report["status"], "unsupportable");
    assert_eq!(report["maximal"], false);
}

#[test]
fn generate_round_trips_byte_for_byte() {
    for (name, extra) in [
        ("feige-vondrak", vec![]),
        ("budget-additive", vec!["--param", "epsilon=1/100"]),
        ("local-opt-tightness", vec!["-p", "k=3"]),
        ("random-subadditive", vec!["--seed", "7", "-p", "m=5"]),
        ("maxcut", vec!["--seed", "2"]),
    ] {
        let mut args = vec!["generate", name];
        args.extend(extra);
        let out = endowed(&args);
        assert_eq!(code(&out), 0, "{name}: {}", stderr(&out));
        let text = String::from_utf8(out.stdout).unwrap();
        let inst: Instance = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string_pretty(&inst).unwrap() + "\n", text, "{name}");

        let file = temp_file(&text);
        let checked = endowed(&["check", "--instance", file.path().to_str().unwrap()]);
        assert_eq!(code(&checked), 0, "{name}: {}", stderr(&checked));
    }
}

#[test]
fn check_reports_classes() {
    let out = endowed(&["check", "--gen", "xos-three-items", "--param", "alpha=2"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    let players = report["players"].as_array().unwrap();
    assert!(players.iter().all(|p| p["class"] == "xos" && p["subadditive"] == true && p["monotone"] == true));
}

#[test]
fn lp_solve_and_round() {
    let out = endowed(&["lp", "solve", "--gen", "feige-vondrak"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["objective"], "4/1");
    assert_eq!(report["integral"], false);

    let out = endowed(&["round", "--gen", "feige-vondrak"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = json(&out);
    assert!(rational(&report["expected_welfare"]) >= rational(&report["guarantee"]));
}

#[test]
fn perturb_on_feige_vondrak() {
    let out = endowed(&["perturb", "--gen", "feige-vondrak", "--delta", "1/10"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = json(&out);
    assert_eq!(report["perturbed_integrality_gap"], "33/28");
    assert_eq!(report["holds"], true);
}

#[test]
fn local_search_and_support() {
    let out = endowed(&["local-search", "--gen", "random-submodular", "--seed", "5", "--trace"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["trace"].as_array().unwrap().len() as u64, report["moves"].as_u64().unwrap());

    let out = endowed(&["equilibrium", "support", "--gen", "random-submodular", "--seed", "5", "--method", "local-opt"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(json(&out)["verdict"], "valid");

    let out = endowed(&["equilibrium", "support", "--gen", "feige-vondrak", "--method", "maximal"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(json(&out)["verdict"], "valid");

    let out = endowed(&["equilibrium", "support", "--gen", "feige-vondrak", "--method", "maximal", "--allocation", "0,0,0,0"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["status"], "not_maximal");

    let out = endowed(&["equilibrium", "support", "--gen", "feige-vondrak", "--method", "local-opt", "--allocation", "-1,0,1,1"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["status"], "not_local_optimum");
}

#[test]
fn input_errors_exit_two() {
    let bad = temp_file("{\"m\": 2, \"players\": [");
    let out = endowed(&["check", "--instance", bad.path().to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("malformed instance JSON"), "{}", stderr(&out));

    let nonmonotone = temp_file(r#"{"m":1,"players":[{"class":"explicit","payload":{"table":{"0":"0","1":"-1"}}}]}"#);
    let out = endowed(&["check", "--instance", nonmonotone.path().to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("not monotone"), "{}", stderr(&out));

    let out = endowed(&["generate", "no-such-thing"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("unknown generator"));

    let out = endowed(&["alpha-min", "--gen", "feige-vondrak", "--allocation", "0,1"]);
    assert_eq!(code(&out), 2);

    let out = endowed(&["equilibrium", "verify", "--gen", "feige-vondrak", "--allocation", "0,0,1,1", "--prices", "1,1,-1,0", "--alpha", "1"]);
    assert_eq!(code(&out), 2);

    let out = endowed(&["gap"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn exit_codes_are_deterministic() {
    let args = ["equilibrium", "verify", "--gen", "feige-vondrak", "--allocation", "0,0,1,1", "--prices", "1,1,2/3,2/3", "--alpha", "3/2"];
    let first = endowed(&args);
    let second = endowed(&args);
    assert_eq!(code(&first), code(&second));
    assert_eq!(first.stdout, second.stdout);
}
