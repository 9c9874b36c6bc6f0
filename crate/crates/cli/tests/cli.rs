use gcorner_cli::{parse_spec, run, run_source, Command, JobSpec, Options};
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn job(cmd: Command, name: &str, opts: Options) -> (Value, i32) {
    let out = run(&JobSpec {
        command: cmd,
        input_path: fixture(name),
        options: opts,
    });
    let v: Value = serde_json::from_str(&out.report.to_json()).unwrap();
    (v, out.exit_code)
}

#[test]
fn monoid_analyze_on_the_rank_two_example() {
    let (v, code) = job(Command::MonoidAnalyze, "rank2.toml", Options::default());
    assert_eq!(code, 0);
    let r = &v["results"];
    assert_eq!(r["face_count"], 4);
    assert_eq!(r["toric"], true);
    assert_eq!(r["gp_rank"], 2);
    assert_eq!(r["dual"]["eta_isomorphism"], true);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "monoid-analyze");
}

#[test]
fn embed_equations() {
    let (v, _) = job(Command::Embed, "rank3.toml", Options::default());
    assert_eq!(v["results"]["text"], serde_json::json!(["x1*x2 = x3*x4"]));
    assert_eq!(
        v["results"]["equations"][0]["lhs"],
        serde_json::json!([1, 1, 0, 0])
    );
    let (v, _) = job(Command::Embed, "rank2.toml", Options::default());
    assert_eq!(v["results"]["text"], serde_json::json!(["x1*x2 = x3^2"]));
}

#[test]
fn strata_classifies_points() {
    let (v, code) = job(Command::Strata, "rank3.toml", Options::default());
    assert_eq!(code, 0);
    assert_eq!(v["results"]["strata"].as_array().unwrap().len(), 10);
    let depths: Vec<u64> = v["results"]["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["depth"].as_u64().unwrap())
        .collect();
    assert_eq!(depths, vec![3, 2, 0]);
}

#[test]
fn nn_correct_reaches_order_four() {
    for name in ["seeded_automorphism.toml", "seeded_automorphism_rank2.toml"] {
        let (v, code) = job(
            Command::NnCorrect,
            name,
            Options {
                order: Some(4),
                ..Options::default()
            },
        );
        assert_eq!(code, 0, "{name}");
        assert_eq!(v["results"]["verified"], true);
        for r in v["results"]["residuals"].as_array().unwrap() {
            let ok = r["order"] == "inf" || r["order"].as_u64().unwrap() >= 4;
            assert!(ok, "{name}: {r}");
        }
    }
}

#[test]
fn domain_errors_exit_two_with_the_library_name() {
    let (v, code) = job(Command::NnCorrect, "twist.toml", Options::default());
    assert_eq!(code, 2);
    assert_eq!(v["status"], "error");
    assert_eq!(v["error"]["name"], "NotIntegrable");
    let (v, code) = job(Command::Nijenhuis, "twist.toml", Options::default());
    assert_eq!(code, 0);
    assert_eq!(v["results"]["integrable"], false);
    let src = "[monoid]\nambient_rank = 1\ngenerators = [[2], [3]]\n";
    let out = run_source(
        Command::MonoidAnalyze,
        "inline",
        src.as_bytes(),
        &Options::default(),
    );
    assert_eq!(out.exit_code, 2);
    assert_eq!(out.report.error.as_ref().unwrap().name, "NotSaturated");
}

#[test]
fn input_errors_exit_one() {
    let out = run(&JobSpec {
        command: Command::Embed,
        input_path: fixture("missing.toml"),
        options: Options::default(),
    });
    assert_eq!(
        (out.exit_code, out.report.error.unwrap().name.as_str()),
        (1, "Io")
    );
    let out = run_source(Command::Embed, "empty", b"", &Options::default());
    assert_eq!(out.exit_code, 1);
    assert!(out.report.error.unwrap().message.contains("no sections"));
    let (v, code) = job(
        Command::Embed,
        "rank2.toml",
        Options {
            order: Some(3),
            ..Options::default()
        },
    );
    assert_eq!(
        (code, v["error"]["name"].as_str().unwrap()),
        (1, "InvalidOption")
    );
    let (v, code) = job(Command::Bracket, "rank2.toml", Options::default());
    assert_eq!(
        (code, v["error"]["name"].as_str().unwrap()),
        (1, "MissingSection")
    );
    let (v, code) = job(Command::Nijenhuis, "rank2.toml", Options::default());
    assert_eq!((code, &v["results"]["integrable"]), (0, &Value::Bool(true)));
}

#[test]
fn parse_errors_carry_locations() {
    let e = parse_spec("").unwrap_err();
    assert_eq!(
        (e.line, e.column, e.message.as_str()),
        (1, 1, "no sections")
    );
    let src = "[monoid]\nambient_rank = 2\ngenerators = [[1, 0], [1, 2], [1, 1]]\nrelations = [[[1, 1], [0, 0, 2]]]\n";
    let e = parse_spec(src).unwrap_err();
    assert!(e.message.contains("relation row 1"), "{e}");
    assert_eq!(e.line, 4);
    let e = parse_spec("[monoid]\nambient_rank = 1\ngenerators = [[1]]\n\n[extra]\nx = 1\n")
        .unwrap_err();
    assert!(e.message.contains("unknown field `extra`"), "{e}");
    let e = parse_spec("[bacs]\nkind = \"standard\"\ncolour = 1\n").unwrap_err();
    assert_eq!(e.line, 3, "{e}");
    let e = parse_spec("[monoid]\nambient_rank = 2\ngenerators = [[1, 0], [1]]\n").unwrap_err();
    assert!(e.message.contains("generator row 2"), "{e}");
    assert_eq!((e.line, e.column), (3, 23));
}

#[test]
fn monoid_section_round_trips() {
    for name in [
        "rank2.toml",
        "rank3.toml",
        "rank2_standard.toml",
        "seeded_automorphism_rank2.toml",
        "twist.toml",
    ] {
        let spec = parse_spec(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap();
        let text = spec.to_toml();
        let back = parse_spec(&text).unwrap();
        assert_eq!(back, spec, "{name}");
        assert_eq!(back.to_toml(), text);
    }
}

fn binary(args: &[&str]) -> (Vec<u8>, i32) {
    let out = process::Command::new(env!("CARGO_BIN_EXE_gcorner"))
        .args(args)
        .output()
        .unwrap();
    (out.stdout, out.status.code().unwrap())
}

#[test]
fn binary_output_is_byte_identical_across_runs() {
    let f = fixture("seeded_automorphism_rank2.toml");
    let f = f.to_str().unwrap();
    for cmd in ["nn-correct", "nijenhuis", "dbar", "normal-form"] {
        let a = binary(&[cmd, f, "--json"]);
        let b = binary(&[cmd, f, "--json"]);
        assert_eq!(a, b, "{cmd}");
        assert_eq!(a.1, 0);
    }
    let a = binary(&["nijenhuis", f, "--seed", "7", "--samples", "4"]);
    assert_eq!(
        a,
        binary(&["nijenhuis", f, "--seed", "7", "--samples", "4"])
    );
    let (_, code) = binary(&["nn-correct", fixture("twist.toml").to_str().unwrap()]);
    assert_eq!(code, 2);
    let (_, code) = binary(&["embed", f, "--samples", "3"]);
    assert_eq!(code, 1);
}

#[test]
fn thread_count_does_not_change_results() {
    for cmd in [
        Command::Nijenhuis,
        Command::NnCorrect,
        Command::MonoidAnalyze,
    ] {
        let name = "seeded_automorphism_rank2.toml";
        let (a, _) = job(cmd, name, Options::default());
        let (b, _) = job(
            cmd,
            name,
            Options {
                threads: 4,
                ..Options::default()
            },
        );
        assert_eq!(a["results"], b["results"], "{cmd:?}");
    }
}
