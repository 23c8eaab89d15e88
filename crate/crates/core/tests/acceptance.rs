// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on failure.

mod common;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use common::props::{self, nsec3_reference, TAMPER_CLOCK};
use common::{cli, dnssec_fixtures, fixture};
use dnsglue::authority::answer;
use dnsglue::cli::sign_with_seed;
use dnsglue::dnssec::{
    nsec3_hash, nsec3_hash_text, verify_nsec3_denial, Nsec3Params, ProofKind, SignedZone, ValidationResult,
};
use dnsglue::glue::oracle::{check_minimum_glue, minimum_glue_corpus, resolve_in};
use dnsglue::glue::{allowed_glue, compute_minimum_glue, GluePolicy};
use dnsglue::master::{read_corpus, read_zone_file};
use dnsglue::scan::{
    check_convertibility, forge_delegation_to_nxdomain, forge_nxdomain_to_delegation, forge_positive_to_delegation,
    ConvertVerdict, ForgeContext, RogueDelegation, ZoneOracle,
};
use dnsglue::sim::{run_scenario, BailiwickPolicy, Outcome, Scenario};
use dnsglue::{name, Corpus, DnsMessage, RecordType};

type Check = Result<(), String>;
type Forged = Result<(ValidationResult, Option<ProofKind>), String>;
type Criterion = (&'static str, Option<Duration>, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn corpus(files: &[&str]) -> Corpus {
    read_corpus(&files.iter().map(|f| PathBuf::from(fixture(f))).collect::<Vec<_>>()).unwrap()
}

fn signed(rel: &str, opt_out: bool) -> SignedZone {
    let zone = read_zone_file(Path::new(&fixture(rel))).unwrap();
    sign_with_seed(&zone, &[name("a.example")], opt_out, 1).unwrap()
}

fn nsec3_vectors() -> Check {
    let params = Nsec3Params::new(12, hex::decode("aabbccdd").unwrap());
    for (n, h) in [
        ("example", "0p9mhaveqvm6t7vbl5lop2u3t2rp3tom"),
        ("c.example", "4g6p9u5gvfshp30pqecj98b3maqbn1ck"),
    ] {
        let got = nsec3_hash_text(&name(n), &params).map_err(|e| e.to_string())?;
        ensure(got == h, || format!("H({n}) = {got}, want {h}"))?;
    }

    // Every name of the signed example zone, empty non-terminals included.
    let sz = SignedZone::from_zone(&read_zone_file(Path::new(&fixture("example.signed"))).unwrap())
        .ok_or("example.signed is not signed")?;
    let mut names = BTreeSet::new();
    for rr in sz.base.records() {
        for a in rr.owner.ancestors() {
            if a.is_subdomain_of(sz.zone.apex()) {
                names.insert(a);
            }
        }
    }
    let mut hashes = BTreeSet::new();
    for n in &names {
        let labels: Vec<String> = n
            .labels()
            .iter()
            .map(|l| String::from_utf8_lossy(l).into_owned())
            .collect();
        let want = nsec3_reference(&labels, &sz.nsec3_params.salt, sz.nsec3_params.iterations);
        let got = nsec3_hash_text(n, &sz.nsec3_params).map_err(|e| e.to_string())?;
        ensure(got == want, || format!("H({n}) = {got}, reference {want}"))?;
        hashes.insert(nsec3_hash(n, &sz.nsec3_params).unwrap().to_vec());
    }
    for r in &sz.nsec3_chain {
        ensure(hashes.contains(&r.owner_hash), || {
            "chain owner hash matches no zone name".into()
        })?;
    }
    props::nsec3_oracle(200)
}

fn policy_table() -> Check {
    let c = corpus(&["glue-policy-com.zone", "glue-policy-foo.zone"]);
    let com = c.get(&name("com")).ok_or("com. missing")?;
    for (policy, want) in [
        (GluePolicy::Narrow, vec![5, 6]),
        (GluePolicy::Moderate, vec![5, 6, 8]),
        (GluePolicy::Mandatory, vec![5, 6, 7, 8]),
    ] {
        let got: Vec<usize> = allowed_glue(com, policy).into_iter().map(|i| i + 1).collect();
        ensure(got == want, || format!("{policy:?}: {got:?}, want {want:?}"))?;
    }
    Ok(())
}

fn cycles_and_minimum_glue() -> Check {
    for (files, size) in [
        (&["cycle2-com.zone", "cycle2-net.zone"][..], 2),
        (&["cycle3-com.zone", "cycle3-net.zone", "cycle3-org.zone"][..], 3),
    ] {
        let c = corpus(files);
        let cycles = compute_minimum_glue(&c).cycles;
        ensure(cycles.len() == 1 && cycles[0].len() == size, || {
            format!("{files:?}: cycles {cycles:?}")
        })?;
        let report = check_minimum_glue(&c);
        ensure(report.sufficient, || format!("{files:?}: minimum glue insufficient"))?;
        ensure(report.minimal, || {
            format!("{files:?}: a required record is unnecessary")
        })?;
    }
    let c = corpus(&["cycle2-com.zone", "cycle2-net.zone"]);
    let target = name("ns.foo.com");
    let bare = resolve_in(&c.without_glue(), &c, &target, BailiwickPolicy::Improved);
    ensure(bare == Outcome::CyclicDependencyFailure, || {
        format!("without glue: {bare}")
    })?;
    let min = resolve_in(&minimum_glue_corpus(&c), &c, &target, BailiwickPolicy::Improved);
    ensure(min.is_answer(), || format!("with minimum glue: {min}"))
}

fn policy_matrix() -> Check {
    for (file, policy, poisoned) in [
        ("kashpureff-mara.json", BailiwickPolicy::MaraDnsLike, true),
        ("kashpureff-bind.json", BailiwickPolicy::BindLike, false),
        ("kashpureff-unbound.json", BailiwickPolicy::UnboundLike, false),
        ("hijack-improved.json", BailiwickPolicy::Improved, true),
        ("hijack-dnssec-aware.json", BailiwickPolicy::DnssecAware, false),
        ("hijack-dnssec-unsigned.json", BailiwickPolicy::DnssecAware, true),
    ] {
        let s = Scenario::load(Path::new(&fixture(&format!("scenarios/{file}")))).map_err(|e| e.to_string())?;
        ensure(s.policy == policy, || format!("{file}: policy {:?}", s.policy))?;
        let v = run_scenario(&s).map_err(|e| e.to_string())?;
        ensure(v.poisoned == poisoned, || format!("{file}: poisoned={}", v.poisoned))?;
    }
    Ok(())
}

fn denial(msg: &DnsMessage, ctx: &ForgeContext) -> (ValidationResult, Option<ProofKind>) {
    let q = msg.question.as_ref().expect("question");
    let v = verify_nsec3_denial(msg, &q.name, &ctx.apex, Some(&ctx.params), &ctx.zone_keys, ctx.clock);
    (v.result, v.proof)
}

/// Runs the three forgers; each result is the validator's verdict or the
/// forger's refusal.
fn forge_all(sz: &SignedZone) -> Vec<(&'static str, Forged)> {
    let ctx = ForgeContext::for_zone(sz, TAMPER_CLOCK);
    let mut oracle = ZoneOracle::new(&sz.zone);
    let rogue = "192.0.2.66".parse().unwrap();
    let mut out = Vec::new();

    let pos = check_convertibility(sz, &name("a.c.example"), &mut oracle)
        .map_err(|e| e.to_string())
        .and_then(|conv| {
            let cut = conv.witness_suffix.clone().unwrap_or_else(|| name("c.example"));
            forge_positive_to_delegation(&conv, &RogueDelegation::under(&cut, 1, rogue)).map_err(|e| e.to_string())
        });
    out.push(("positive to delegation", pos.map(|m| denial(&m, &ctx))));

    let honest = answer(&sz.zone, &name("a.c.x.w.example"), RecordType::A);
    let nxd = forge_nxdomain_to_delegation(&honest, &RogueDelegation::under(&name("c.x.w.example"), 2, rogue), &ctx);
    out.push((
        "NXDOMAIN to delegation",
        nxd.map(|m| denial(&m, &ctx)).map_err(|e| e.to_string()),
    ));

    let referral = answer(&sz.zone, &name("www.b.example"), RecordType::A);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let del = forge_delegation_to_nxdomain(&referral, &mut oracle, &ctx, &mut rng);
    out.push((
        "delegation to NXDOMAIN",
        del.map(|m| denial(&m, &ctx)).map_err(|e| e.to_string()),
    ));
    out
}

fn opt_out_forgeries() -> Check {
    let results = forge_all(&signed("example.zone", true));
    let want = [
        (ValidationResult::Insecure, ProofKind::OptOutInsecureDelegation),
        (ValidationResult::Insecure, ProofKind::OptOutInsecureDelegation),
        (ValidationResult::Secure, ProofKind::NxDomainProof),
    ];
    for ((label, got), (result, proof)) in results.into_iter().zip(want) {
        let got = got.map_err(|e| format!("{label}: refused: {e}"))?;
        ensure(got == (result, Some(proof)), || format!("{label}: {got:?}"))?;
    }
    for (label, got) in forge_all(&signed("example.zone", false)) {
        if let Ok((result, _)) = got {
            ensure(matches!(result, ValidationResult::Bogus(_)), || {
                format!("{label} accepted without Opt-Out")
            })?;
        }
    }
    Ok(())
}

fn negated_conditions() -> Check {
    let base = signed("example.zone", true);
    let conv = check_convertibility(&base, &name("a.c.example"), &mut ZoneOracle::new(&base.zone))
        .map_err(|e| e.to_string())?;
    ensure(conv.verdict == ConvertVerdict::Convertible, || {
        "baseline is not convertible".into()
    })?;
    for (file, victim) in [
        ("convertibility/existent.zone", "a.c.example"),
        ("convertibility/endpoint.zone", "v2.c.example"),
        ("convertibility/encloser.zone", "v3.c.example"),
    ] {
        let sz = signed(file, true);
        let v = check_convertibility(&sz, &name(victim), &mut ZoneOracle::new(&sz.zone))
            .map_err(|e| format!("{file}: {e}"))?
            .verdict;
        ensure(v == ConvertVerdict::Inconvertible, || format!("{file}: {v:?}"))?;
    }
    Ok(())
}

fn property_suites() -> Check {
    let stats = props::minimum_glue(200)?;
    ensure(stats.checked >= 150, || {
        format!("only {} corpora were resolvable", stats.checked)
    })?;
    props::nsec3_chain(50)?;
    props::wire_roundtrip(1000)?;
    let zones = dnssec_fixtures();
    let trials = props::tamper_detection(&zones, TAMPER_CLOCK)?;
    ensure(trials > 0, || "no tamper trials".into())
}

/// Every command over every fixture, writing reports and traces under `dir`.
fn full_run(dir: &Path) -> Check {
    let out = |f: &str| dir.join(f).to_string_lossy().into_owned();
    let signed = fixture("example.signed");
    let mut runs: Vec<Vec<String>> = vec![
        vec![
            "analyze".into(),
            fixture("glue-policy-com.zone"),
            fixture("glue-policy-foo.zone"),
            "--policy".into(),
            "mandatory".into(),
        ],
        vec!["analyze".into(), fixture("cycle2-com.zone"), fixture("cycle2-net.zone")],
        vec![
            "analyze".into(),
            fixture("cycle3-com.zone"),
            fixture("cycle3-net.zone"),
            fixture("cycle3-org.zone"),
        ],
        vec![
            "analyze".into(),
            fixture("delegation-com.zone"),
            fixture("delegation-foo.zone"),
        ],
        vec!["scan".into(), fixture("audit")],
        vec![
            "sign".into(),
            fixture("example.zone"),
            "--ds-child".into(),
            "a.example".into(),
        ],
        vec![
            "forge".into(),
            "pos2del".into(),
            signed.clone(),
            "a.c.example".into(),
            "192.0.2.66".into(),
        ],
        vec![
            "forge".into(),
            "nxd2del".into(),
            signed.clone(),
            "a.c.x.w.example".into(),
            "192.0.2.7".into(),
        ],
        vec![
            "forge".into(),
            "del2nxd".into(),
            signed,
            "www.b.example".into(),
            "192.0.2.7".into(),
        ],
        vec![
            "nsec3-hash".into(),
            "c.example".into(),
            "--salt".into(),
            "aabbccdd".into(),
            "--iterations".into(),
            "12".into(),
        ],
    ];
    let mut scenarios: Vec<PathBuf> = std::fs::read_dir(fixture("scenarios"))
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .collect();
    scenarios.sort();
    for (i, s) in scenarios.iter().enumerate() {
        runs.push(vec![
            "simulate".into(),
            s.to_string_lossy().into_owned(),
            "--trace".into(),
            out(&format!("trace{i}.jsonl")),
        ]);
    }
    for (i, args) in runs.iter().enumerate() {
        for format in ["json", "text"] {
            let mut a: Vec<&str> = args.iter().map(String::as_str).collect();
            let report = out(&format!("report{i}.{format}"));
            a.extend(["--seed", "1", "--format", format, "-o", &report]);
            let wire = out(&format!("wire{i}.{format}"));
            if a[0] == "forge" {
                a.extend(["--out", &wire]);
            }
            let r = cli(&a);
            ensure(r.code == 0, || format!("{a:?} exited {}: {}", r.code, r.stderr))?;
        }
    }
    Ok(())
}

fn directory_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Check {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    full_run(a.path())?;
    full_run(b.path())?;
    let (fa, fb) = (directory_bytes(a.path()), directory_bytes(b.path()));
    ensure(fa.len() == fb.len() && !fa.is_empty(), || {
        format!("{} vs {} files", fa.len(), fb.len())
    })?;
    for ((na, ba), (nb, bb)) in fa.iter().zip(&fb) {
        ensure(na == nb && ba == bb, || format!("{na} differs between runs"))?;
    }
    Ok(())
}

fn synthetic_audit() -> Check {
    let r = cli(&["scan", &fixture("audit"), "--format", "json"]);
    ensure(r.code == 0, || r.stderr.clone())?;
    let got: Value = serde_json::from_str(&r.stdout).map_err(|e| e.to_string())?;
    let want: Value = serde_json::from_str(&std::fs::read_to_string(fixture("audit/expected.json")).unwrap())
        .map_err(|e| e.to_string())?;
    ensure(got["table1"] == want, || format!("table {} want {want}", got["table1"]))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("NSEC3 hash vectors", Some(Duration::from_secs(1)), nsec3_vectors),
        ("glue policy table", Some(Duration::from_secs(1)), policy_table),
        (
            "minimum glue and cycles",
            Some(Duration::from_secs(5)),
            cycles_and_minimum_glue,
        ),
        ("bailiwick policy matrix", Some(Duration::from_secs(10)), policy_matrix),
        (
            "Opt-Out transformations",
            Some(Duration::from_secs(5)),
            opt_out_forgeries,
        ),
        (
            "convertibility conditions",
            Some(Duration::from_secs(5)),
            negated_conditions,
        ),
        ("property suites", Some(Duration::from_secs(60)), property_suites),
        ("determinism", None, determinism),
        ("synthetic audit", None, synthetic_audit),
    ];
    let mut failed = 0;
    for (i, (label, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut result = check();
        let elapsed = start.elapsed();
        if let (Ok(()), Some(limit)) = (&result, limit) {
            if elapsed > *limit {
                result = Err(format!("took {elapsed:.2?}, limit {limit:?}"));
            }
        }
        match result {
            Ok(()) => println!("criterion {}: PASS {label} ({elapsed:.2?})", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {}: FAIL {label} ({elapsed:.2?}): {e}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
