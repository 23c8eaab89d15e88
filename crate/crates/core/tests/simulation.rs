use std::collections::BTreeSet;
use std::path::PathBuf;

use dnsglue::message::decode_message;
use dnsglue::name::{name, DomainName};
use dnsglue::sim::*;
use dnsglue::RecordType;

const SCENARIOS: [&str; 7] = [
    "delegation-improved.json",
    "hijack-improved.json",
    "hijack-dnssec-aware.json",
    "hijack-dnssec-unsigned.json",
    "kashpureff-bind.json",
    "kashpureff-mara.json",
    "kashpureff-unbound.json",
];

fn scenario(file: &str) -> Scenario {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures/scenarios")
        .join(file);
    Scenario::load(&path).unwrap()
}

fn verdict(file: &str) -> Verdict {
    run_scenario(&scenario(file)).unwrap()
}

#[test]
fn policy_matrix() {
    for (file, poisoned) in [
        ("kashpureff-mara.json", true),
        ("kashpureff-bind.json", false),
        ("kashpureff-unbound.json", false),
        ("hijack-improved.json", true),
        ("hijack-dnssec-aware.json", false),
        ("hijack-dnssec-unsigned.json", true),
    ] {
        let v = verdict(file);
        assert_eq!(
            v.poisoned,
            poisoned,
            "{file}: {} tainted {:?}",
            v.summary_line(),
            v.tainted
        );
    }
}

#[test]
fn delegation_clean_resolution() {
    let v = verdict("delegation-improved.json");
    assert!(!v.poisoned);
    assert_eq!(
        v.outcome.addresses(),
        vec!["192.0.1.80".parse::<std::net::IpAddr>().unwrap()]
    );
}

/// Referral from com, provisional glue, counterpart fetch from the child,
/// confirmation, then the final query to the confirmed server.
#[test]
fn improved_resolution_step_sequence() {
    let v = verdict("delegation-improved.json");
    let com = name("com");
    let foo = name("foo.com");
    let www = name("www.foo.com");
    let ns = name("ns.foo.com");
    let ns_addr: std::net::IpAddr = "192.0.1.1".parse().unwrap();

    type Check<'a> = Box<dyn Fn(&TraceEvent) -> bool + 'a>;
    let expected: Vec<(&str, Check)> = vec![
        (
            "query com for www",
            Box::new(|e| matches!(e, TraceEvent::Sent { zone, qname, .. } if zone == &com && qname == &www)),
        ),
        (
            "provisional glue",
            Box::new(|e| matches!(e, TraceEvent::Glue { owner, action: GlueAction::Provisional, .. } if owner == &ns)),
        ),
        (
            "counterpart fetch",
            Box::new(
                |e| matches!(e, TraceEvent::Sent { to, zone, qname, qtype: RecordType::A, .. } if *to == ns_addr && zone == &foo && qname == &ns),
            ),
        ),
        (
            "glue confirmed",
            Box::new(|e| matches!(e, TraceEvent::Glue { owner, action: GlueAction::Confirmed, .. } if owner == &ns)),
        ),
        (
            "query child for www",
            Box::new(
                |e| matches!(e, TraceEvent::Sent { to, zone, qname, .. } if *to == ns_addr && zone == &foo && qname == &www),
            ),
        ),
    ];
    let mut events = v.trace.events.iter();
    for (label, check) in &expected {
        assert!(events.any(check), "missing step: {label}");
    }
    assert!(matches!(
        v.trace.events.last(),
        Some(TraceEvent::Verdict { poisoned: false, .. })
    ));
}

#[test]
fn runs_are_deterministic() {
    for file in SCENARIOS {
        let a = verdict(file);
        let b = verdict(file);
        assert_eq!(a.trace.to_json_lines(), b.trace.to_json_lines(), "{file}");
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}

#[test]
fn trace_json_lines_roundtrip() {
    for file in SCENARIOS {
        let t = verdict(file).trace;
        assert_eq!(
            ResolutionTrace::from_json_lines(&t.to_json_lines()).unwrap(),
            t,
            "{file}"
        );
    }
}

#[test]
fn cache_rank_never_downgraded() {
    for file in SCENARIOS {
        assert_eq!(verdict(file).rank_violations, 0, "{file}");
    }
}

struct Received {
    residing: DomainName,
    qname: DomainName,
    qtype: RecordType,
    sanitized: Result<SanitizedResponse, PolicyError>,
}

fn sanitize(v: &Verdict, e: &TraceEvent) -> Option<(usize, Received)> {
    let TraceEvent::Received {
        step,
        residing,
        qname,
        qtype,
        message,
        ..
    } = e
    else {
        return None;
    };
    let msg = decode_message(&hex::decode(message).unwrap()).unwrap();
    let sanitized = apply_bailiwick_policy(v.policy, residing, (qname, *qtype), &msg);
    Some((
        *step,
        Received {
            residing: residing.clone(),
            qname: qname.clone(),
            qtype: *qtype,
            sanitized,
        },
    ))
}

/// Every cache insertion and mapping in a trace is reproduced by running the
/// recorded message for that step back through the sanitizer.
#[test]
fn trace_replay_reproduces_cache_transitions() {
    for file in SCENARIOS {
        let v = verdict(file);
        // Steps restart with each resolution; the latest message per step wins.
        let mut received = std::collections::BTreeMap::new();
        for e in &v.trace.events {
            if let Some((step, r)) = sanitize(&v, e) {
                received.insert(step, r);
                continue;
            }
            match e {
                TraceEvent::CacheInsert {
                    step,
                    owner,
                    rtype,
                    rank,
                    ..
                } => {
                    let r = received
                        .get(step)
                        .unwrap_or_else(|| panic!("{file}: no message for step {step}"));
                    let s = r.sanitized.as_ref().unwrap();
                    let found = s
                        .cacheable
                        .iter()
                        .map(|(rr, rk)| (rr, rk))
                        .chain(s.provisional_glue.iter().map(|g| (g, &TrustRank::GlueAdditional)))
                        .any(|(rr, rk)| &rr.owner == owner && rr.rtype() == *rtype && rk == rank)
                        || (r.qname == *owner && r.qtype == *rtype && *rank == TrustRank::AuthoritativeAnswer);
                    assert!(
                        found,
                        "{file}: step {step} {owner} {rtype} {rank:?} not in sanitized output"
                    );
                }
                TraceEvent::Mapping {
                    step, name, address, ..
                } => {
                    let r = &received[step];
                    let s = r.sanitized.as_ref().unwrap();
                    assert!(
                        s.synthesized_mappings.contains(&(name.clone(), *address)),
                        "{file}: {name}"
                    );
                }
                _ => {}
            }
        }
    }
}

#[test]
fn unbound_answers_stay_in_bailiwick() {
    let v = verdict("kashpureff-unbound.json");
    assert_eq!(v.policy, BailiwickPolicy::UnboundLike);
    let mut accepted = BTreeSet::new();
    for (_, r) in v.trace.events.iter().filter_map(|e| sanitize(&v, e)) {
        let Ok(s) = &r.sanitized else { continue };
        for rr in s.cacheable.iter().map(|(rr, _)| rr).chain(&s.answer) {
            assert!(
                rr.owner.is_subdomain_of(&r.residing),
                "{rr} kept outside {}",
                r.residing
            );
            accepted.insert(rr.to_string());
        }
    }
    for (_, _, outcome) in &v.answers {
        if let Outcome::Answer(rrs) = outcome {
            for rr in rrs {
                assert!(accepted.contains(&rr.to_string()), "{rr} was never in bailiwick");
            }
        }
    }
}

#[test]
fn kaminsky_rate_matches_closed_form() {
    let attempts = 1 << 10;
    let expected = kaminsky_closed_form(attempts, 16);
    let measured = kaminsky_success_rate(attempts, 16, 10_000, 7);
    assert!(
        (measured - expected).abs() <= 0.2 * expected,
        "measured {measured} expected {expected}"
    );
}
