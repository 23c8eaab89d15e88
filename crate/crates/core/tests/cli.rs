mod common;

use common::{cli, fixture};
use dnsglue::cli::exit;
use serde_json::Value;

fn json(run: &common::Run) -> Value {
    serde_json::from_str(&run.stdout).unwrap_or_else(|e| panic!("{e}: {}", run.stdout))
}

#[test]
fn analyze_lists_required_and_redundant() {
    let r = cli(&[
        "analyze",
        &fixture("glue-policy-com.zone"),
        &fixture("glue-policy-foo.zone"),
        "--format",
        "json",
    ]);
    assert_eq!(r.code, exit::SUCCESS, "{}", r.stderr);
    let v = json(&r);
    let entries = |key: &str| -> Vec<u64> {
        v["report"][key]
            .as_array()
            .unwrap()
            .iter()
            .map(|e| e["entry"].as_u64().unwrap())
            .collect()
    };
    assert_eq!(entries("required"), vec![5, 6]);
    assert_eq!(entries("redundant"), vec![7, 8]);
    assert!(entries("absent_required").is_empty());
}

#[test]
fn analyze_text_and_json_agree() {
    let files = [fixture("glue-policy-com.zone"), fixture("glue-policy-foo.zone")];
    let text = cli(&["analyze", &files[0], &files[1], "--format", "text"]);
    let v = json(&cli(&["analyze", &files[0], &files[1], "--format", "json"]));
    let mut section = "";
    let mut parsed: Vec<(String, u64)> = Vec::new();
    for line in text.stdout.lines() {
        if !line.starts_with(' ') {
            section = line.trim_end_matches(':');
            continue;
        }
        if matches!(section, "required" | "redundant" | "absent_required") && line.contains('#') {
            let entry = line.split('#').nth(1).unwrap().split_whitespace().next().unwrap();
            parsed.push((section.to_string(), entry.parse().unwrap()));
        }
    }
    let mut from_json = Vec::new();
    for key in ["required", "redundant", "absent_required"] {
        for e in v["report"][key].as_array().unwrap() {
            from_json.push((key.to_string(), e["entry"].as_u64().unwrap()));
        }
    }
    assert_eq!(parsed, from_json);
}

#[test]
fn analyze_policy_sets() {
    let files = [fixture("glue-policy-com.zone"), fixture("glue-policy-foo.zone")];
    for (policy, expected) in [
        ("narrow", vec![5, 6]),
        ("moderate", vec![5, 6, 8]),
        ("mandatory", vec![5, 6, 7, 8]),
    ] {
        let v = json(&cli(&[
            "analyze", &files[0], &files[1], "--policy", policy, "--format", "json",
        ]));
        let com: Vec<u64> = v["allowed"]["com."]
            .as_array()
            .unwrap()
            .iter()
            .map(|e| e.as_u64().unwrap())
            .collect();
        assert_eq!(com, expected, "{policy}");
    }
}

#[test]
fn analyze_stripped_cycle_exits_2() {
    let r = cli(&[
        "analyze",
        &fixture("cycle2-com.zone"),
        &fixture("cycle2-net.zone"),
        "--strip-glue",
        "--format",
        "json",
    ]);
    assert_eq!(r.code, exit::ABSENT_REQUIRED_GLUE);
    assert!(!json(&r)["report"]["absent_required"].as_array().unwrap().is_empty());
}

#[test]
fn analyze_malformed_exits_1_with_line() {
    let r = cli(&["analyze", &fixture("malformed.zone")]);
    assert_eq!(r.code, exit::INPUT_ERROR);
    assert!(r.stderr.contains("malformed.zone:"), "{}", r.stderr);
}

#[test]
fn nsec3_hash_vectors() {
    for (n, h) in [
        ("example", "0p9mhaveqvm6t7vbl5lop2u3t2rp3tom"),
        ("c.example", "4g6p9u5gvfshp30pqecj98b3maqbn1ck"),
    ] {
        let r = cli(&[
            "nsec3-hash",
            n,
            "--salt",
            "aabbccdd",
            "--iterations",
            "12",
            "--format",
            "text",
        ]);
        assert_eq!(r.code, 0);
        assert_eq!(r.stdout.trim(), h);
    }
    assert_eq!(cli(&["nsec3-hash", "example", "--salt", "zz"]).code, exit::INPUT_ERROR);
}

#[test]
fn unknown_flag_is_input_error() {
    assert_eq!(cli(&["analyze", "--bogus"]).code, exit::INPUT_ERROR);
    assert_eq!(cli(&["--help"]).code, exit::SUCCESS);
}

fn verdict(scenario: &str, extra: &[&str]) -> (i32, Value) {
    let path = fixture(&format!("scenarios/{scenario}.json"));
    let mut args = vec!["simulate", path.as_str(), "--format", "json"];
    args.extend_from_slice(extra);
    let r = cli(&args);
    (r.code, json(&r))
}

#[test]
fn simulate_verdicts_and_expectations() {
    let (code, v) = verdict("hijack-improved", &[]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"]["poisoned"], true);

    assert_eq!(verdict("hijack-dnssec-aware", &["--expect", "clean"]).0, exit::SUCCESS);
    assert_eq!(
        verdict("kashpureff-bind", &["--expect", "poisoned"]).0,
        exit::EXPECTATION_MISMATCH
    );
    assert_eq!(verdict("kashpureff-mara", &["--expect", "poisoned"]).0, exit::SUCCESS);
}

#[test]
fn simulate_text_ends_with_verdict_line() {
    let r = cli(&[
        "simulate",
        &fixture("scenarios/hijack-improved.json"),
        "--format",
        "text",
    ]);
    let last = r.stdout.lines().last().unwrap();
    assert!(last.starts_with("poisoned=true"), "{last}");
    for line in r.stdout.lines().filter(|l| l.starts_with('{')) {
        serde_json::from_str::<Value>(line).unwrap();
    }
}

#[test]
fn simulate_invalid_scenario_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"name\": 3}").unwrap();
    assert_eq!(cli(&["simulate", bad.to_str().unwrap()]).code, exit::INPUT_ERROR);
}

#[test]
fn scan_ground_truth_corpus() {
    let r = cli(&["scan", &fixture("audit"), "--format", "json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(&r);
    let expected: Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("audit/expected.json")).unwrap()).unwrap();
    assert_eq!(v["table1"], expected);
    assert_eq!(
        cli(&["scan", &fixture("audit"), "--fail-on-forgeable"]).code,
        exit::FORGEABLE
    );
}

#[test]
fn scan_text_table_matches_json() {
    let text = cli(&["scan", &fixture("audit"), "--format", "text"]).stdout;
    let v = json(&cli(&["scan", &fixture("audit"), "--format", "json"]));
    let rows = [
        ("Self-contained", "self_contained"),
        ("Cyclic dependency", "cyclic_dependency"),
        ("Out-of-bailiwick", "out_of_bailiwick"),
    ];
    for (label, key) in rows {
        let line = text.lines().find(|l| l.starts_with(label)).unwrap();
        let counts: Vec<u64> = line[label.len()..]
            .split_whitespace()
            .map(|n| n.parse().unwrap())
            .collect();
        let t = &v["table1"][key];
        assert_eq!(
            counts,
            vec![
                t["present_redundant"].as_u64().unwrap(),
                t["minimum"].as_u64().unwrap(),
                t["absence"].as_u64().unwrap()
            ],
            "{label}"
        );
    }
}

#[test]
fn scan_empty_directory_is_zeroed() {
    let dir = tempfile::tempdir().unwrap();
    let r = cli(&[
        "scan",
        dir.path().to_str().unwrap(),
        "--format",
        "json",
        "--fail-on-forgeable",
    ]);
    assert_eq!(r.code, 0);
    let v = json(&r);
    assert_eq!(v["metadata"]["domains"], 0);
    assert_eq!(v["security"]["signed_domains"], 0);
}

#[test]
fn scan_manifest_mismatch_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.json");
    std::fs::write(
        &manifest,
        r#"{"key_seed": 1, "zones": {"nowhere.example.": {"signed": true}}}"#,
    )
    .unwrap();
    let r = cli(&[
        "scan",
        &fixture("glue-policy-com.zone"),
        "--manifest",
        manifest.to_str().unwrap(),
    ]);
    assert_eq!(r.code, exit::INPUT_ERROR);
}

#[test]
fn scan_sample_corpus_single_domain() {
    let v = json(&cli(&[
        "scan",
        &fixture("glue-policy-com.zone"),
        &fixture("glue-policy-foo.zone"),
        "--format",
        "json",
    ]));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(v["table1"]["self_contained"]["present_redundant"], 1);
    assert_eq!(v["table1"]["out_of_bailiwick"]["present_redundant"], 1);
}

#[test]
fn forge_kinds_and_gate() {
    let dir = tempfile::tempdir().unwrap();
    let signed = fixture("example.signed");
    let out = dir.path().join("pos2del.bin");
    let r = cli(&[
        "forge",
        "pos2del",
        &signed,
        "a.c.example",
        "192.0.2.66",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let wire = std::fs::read(&out).unwrap();
    let msg = dnsglue::message::decode_message(&wire).unwrap();
    let text = std::fs::read_to_string(dir.path().join("pos2del.bin.txt")).unwrap();
    assert!(text.contains("c.example. 3600 IN NS ns1.c.example."), "{text}");
    assert!(msg.answer.is_empty());

    let r = cli(&[
        "forge",
        "nxd2del",
        &signed,
        "a.c.x.w.example",
        "192.0.2.7",
        "--format",
        "text",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("c.x.w.example. 3600 IN NS ns1.c.x.w.example."));
    assert!(r.stdout.contains("c.x.w.example. 3600 IN NS ns2.c.x.w.example."));

    let r = cli(&[
        "forge",
        "del2nxd",
        &signed,
        "www.b.example",
        "192.0.2.7",
        "--format",
        "text",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("NXDOMAIN"));

    assert_eq!(
        cli(&["forge", "pos2del", &signed, "xx.example", "192.0.2.66"]).code,
        exit::PRECONDITION_UNMET
    );
    assert_eq!(
        cli(&[
            "forge",
            "pos2del",
            &fixture("malformed.zone"),
            "a.example",
            "192.0.2.66"
        ])
        .code,
        1
    );
}

#[test]
fn signed_fixture_is_reproducible() {
    let r = cli(&[
        "sign",
        &fixture("example.zone"),
        "--ds-child",
        "a.example",
        "--seed",
        "1",
        "--format",
        "text",
    ]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout, std::fs::read_to_string(fixture("example.signed")).unwrap());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let signed = fixture("example.signed");
    let cases: Vec<Vec<String>> = vec![
        vec!["scan".into(), fixture("audit")],
        vec!["simulate".into(), fixture("scenarios/kashpureff-mara.json")],
        vec![
            "forge".into(),
            "del2nxd".into(),
            signed.clone(),
            "www.b.example".into(),
            "192.0.2.7".into(),
        ],
        vec!["sign".into(), fixture("example.zone"), "--seed".into(), "42".into()],
    ];
    for args in cases {
        for format in ["json", "text"] {
            let mut a: Vec<&str> = args.iter().map(String::as_str).collect();
            a.extend(["--format", format]);
            assert_eq!(cli(&a).stdout, cli(&a).stdout, "{a:?}");
        }
    }
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hash.txt");
    let r = cli(&[
        "nsec3-hash",
        "example",
        "--salt",
        "aabbccdd",
        "--iterations",
        "12",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.is_empty());
    assert!(std::fs::read_to_string(path)
        .unwrap()
        .contains("0p9mhaveqvm6t7vbl5lop2u3t2rp3tom"));
}

fn schema(file: &str) -> jsonschema::Validator {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(file);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&v).unwrap()
}

fn assert_valid(validator: &jsonschema::Validator, doc: &Value, what: &str) {
    let errors: Vec<String> = validator
        .iter_errors(doc)
        .map(|e| format!("{} at {}", e, e.instance_path()))
        .collect();
    assert!(errors.is_empty(), "{what}: {errors:?}");
}

#[test]
fn json_outputs_match_schemas() {
    let signed = fixture("example.signed");
    let cycle = [fixture("cycle2-com.zone"), fixture("cycle2-net.zone")];
    let runs: Vec<(&str, Vec<String>)> = vec![
        (
            "analyze",
            vec![
                fixture("glue-policy-com.zone"),
                fixture("glue-policy-foo.zone"),
                "--policy".into(),
                "moderate".into(),
            ],
        ),
        (
            "analyze",
            vec![cycle[0].clone(), cycle[1].clone(), "--strip-glue".into()],
        ),
        ("scan", vec![fixture("audit")]),
        (
            "sign",
            vec![fixture("example.zone"), "--ds-child".into(), "a.example".into()],
        ),
        (
            "forge",
            vec![
                "del2nxd".into(),
                signed.clone(),
                "www.b.example".into(),
                "192.0.2.7".into(),
            ],
        ),
        (
            "forge",
            vec!["pos2del".into(), signed, "a.c.example".into(), "192.0.2.66".into()],
        ),
        (
            "nsec3-hash",
            vec![
                "c.example".into(),
                "--salt".into(),
                "aabbccdd".into(),
                "--iterations".into(),
                "12".into(),
            ],
        ),
    ];
    for (command, rest) in &runs {
        let mut args = vec![*command];
        args.extend(rest.iter().map(String::as_str));
        args.extend(["--format", "json"]);
        let r = cli(&args);
        assert_valid(
            &schema(&format!("{command}.schema.json")),
            &json(&r),
            &format!("{args:?}"),
        );
    }

    let sim = schema("simulate.schema.json");
    let event = schema("trace-event.schema.json");
    let dir = tempfile::tempdir().unwrap();
    for entry in std::fs::read_dir(fixture("scenarios")).unwrap() {
        let path = entry.unwrap().path();
        let trace = dir.path().join("trace.jsonl");
        let r = cli(&[
            "simulate",
            path.to_str().unwrap(),
            "--format",
            "json",
            "--trace",
            trace.to_str().unwrap(),
        ]);
        assert_valid(&sim, &json(&r), path.to_str().unwrap());
        for line in std::fs::read_to_string(&trace).unwrap().lines() {
            assert_valid(&event, &serde_json::from_str(line).unwrap(), line);
        }
    }
}
