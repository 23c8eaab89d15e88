//! Seeded property suites shared by the property tests and the acceptance run.

use std::collections::{BTreeMap, BTreeSet};
use std::net::{Ipv4Addr, Ipv6Addr};

use proptest::collection::{btree_set, vec};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestRunner};
use sha1::{Digest, Sha1};

use dnsglue::dnssec::{
    nsec3_hash, nsec3_hash_text, sign_zone, verify_rrset, KeyPair, KeyRole, Nsec3Params, SignedZone, SigningOptions,
    ValidationResult, DEFAULT_CLOCK,
};
use dnsglue::glue::oracle::{check_minimum_glue, resolution_checks};
use dnsglue::message::{decode_message, encode_message, Flags, Question};
use dnsglue::rr::{Dnskey, Ds, Nsec3, Nsec3Param, Rrsig, Soa};
use dnsglue::wire::WireReader;
use dnsglue::{parse_zone_text, Corpus, DnsMessage, DomainName, RData, RecordType, ResourceRecord, ResponseCode, Zone};

pub fn runner(cases: u32, seed: u64) -> TestRunner {
    TestRunner::new(Config {
        cases,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: None,
        max_shrink_iters: 64,
        ..Config::default()
    })
}

fn label() -> impl Strategy<Value = String> {
    "[a-zA-Z0-9][a-zA-Z0-9-]{0,9}"
}

pub fn domain_name(max_labels: usize) -> impl Strategy<Value = DomainName> {
    vec(label(), 0..=max_labels).prop_map(|ls| DomainName::from_labels(ls.iter().map(|l| l.as_bytes())).unwrap())
}

/// Unpadded lowercase base32 with the extended-hex alphabet.
fn base32hex(data: &[u8]) -> String {
    const ALPHABET: &[u8; 32] = b"0123456789abcdefghijklmnopqrstuv";
    let mut out = String::new();
    let (mut acc, mut bits) = (0u32, 0u32);
    for &b in data {
        acc = (acc << 8) | b as u32;
        bits += 8;
        while bits >= 5 {
            bits -= 5;
            out.push(ALPHABET[((acc >> bits) & 31) as usize] as char);
        }
    }
    if bits > 0 {
        out.push(ALPHABET[((acc << (5 - bits)) & 31) as usize] as char);
    }
    out
}

/// Iterated SHA-1 over the lowercased uncompressed wire name.
pub fn nsec3_reference(labels: &[String], salt: &[u8], iterations: u16) -> String {
    let mut wire = Vec::new();
    for l in labels {
        wire.push(l.len() as u8);
        wire.extend(l.to_ascii_lowercase().as_bytes());
    }
    wire.push(0);
    let mut h = Sha1::new().chain_update(&wire).chain_update(salt).finalize().to_vec();
    for _ in 0..iterations {
        h = Sha1::new().chain_update(&h).chain_update(salt).finalize().to_vec();
    }
    base32hex(&h)
}

pub fn nsec3_oracle(cases: u32) -> Result<(), String> {
    let strategy = (vec(label(), 0..5), vec(any::<u8>(), 0..9), 0u16..40);
    runner(cases, 0x5eed_0001)
        .run(&strategy, |(labels, salt, iterations)| {
            let name = DomainName::from_labels(labels.iter().map(|l| l.as_bytes())).unwrap();
            let got = nsec3_hash_text(&name, &Nsec3Params::new(iterations, salt.clone())).unwrap();
            prop_assert_eq!(got.len(), 32);
            prop_assert_eq!(got, nsec3_reference(&labels, &salt, iterations));
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn record_type() -> impl Strategy<Value = RecordType> {
    prop::sample::select(vec![
        RecordType::A,
        RecordType::AAAA,
        RecordType::NS,
        RecordType::SOA,
        RecordType::MX,
        RecordType::TXT,
        RecordType::DS,
        RecordType::DNSKEY,
        RecordType::NSEC3PARAM,
    ])
}

fn bytes(max: usize) -> impl Strategy<Value = Vec<u8>> {
    vec(any::<u8>(), 0..=max)
}

fn rdata() -> impl Strategy<Value = RData> {
    prop_oneof![
        any::<u32>().prop_map(|a| RData::A(Ipv4Addr::from(a))),
        any::<u128>().prop_map(|a| RData::AAAA(Ipv6Addr::from(a))),
        domain_name(4).prop_map(RData::NS),
        (domain_name(3), domain_name(3), any::<[u32; 5]>()).prop_map(|(mname, rname, n)| RData::SOA(Soa {
            mname,
            rname,
            serial: n[0],
            refresh: n[1],
            retry: n[2],
            expire: n[3],
            minimum: n[4],
        })),
        (any::<u16>(), domain_name(3)).prop_map(|(preference, exchange)| RData::MX { preference, exchange }),
        vec(bytes(40), 1..4).prop_map(RData::TXT),
        (any::<u16>(), any::<u8>(), any::<u8>(), bytes(32)).prop_map(|(key_tag, algorithm, digest_type, digest)| {
            RData::DS(Ds {
                key_tag,
                algorithm,
                digest_type,
                digest,
            })
        }),
        (any::<u16>(), any::<u8>(), bytes(48)).prop_map(|(flags, algorithm, public_key)| {
            RData::DNSKEY(Dnskey {
                flags,
                protocol: 3,
                algorithm,
                public_key,
            })
        }),
        (
            record_type(),
            any::<u8>(),
            0u8..8,
            any::<[u32; 3]>(),
            any::<u16>(),
            domain_name(3),
            bytes(48)
        )
            .prop_map(|(type_covered, algorithm, labels, t, key_tag, signer, signature)| {
                RData::RRSIG(Rrsig {
                    type_covered,
                    algorithm,
                    labels,
                    original_ttl: t[0],
                    expiration: t[1],
                    inception: t[2],
                    key_tag,
                    signer,
                    signature,
                })
            }),
        (
            any::<u8>(),
            any::<u16>(),
            bytes(8),
            prop::array::uniform20(any::<u8>()),
            btree_set(record_type(), 0..6)
        )
            .prop_map(|(flags, iterations, salt, next, types)| {
                RData::NSEC3(Nsec3 {
                    hash_algorithm: 1,
                    flags,
                    iterations,
                    salt,
                    next_hashed: next.to_vec(),
                    types: types.into_iter().collect(),
                })
            }),
        (any::<u8>(), any::<u16>(), bytes(8)).prop_map(|(flags, iterations, salt)| {
            RData::NSEC3PARAM(Nsec3Param {
                hash_algorithm: 1,
                flags,
                iterations,
                salt,
            })
        }),
        (65280u16..65535, bytes(30)).prop_map(|(rtype, data)| RData::Unknown { rtype, data }),
    ]
}

fn resource_record() -> impl Strategy<Value = ResourceRecord> {
    (domain_name(4), any::<u32>(), rdata()).prop_map(|(owner, ttl, rdata)| ResourceRecord::new(owner, ttl, rdata))
}

pub fn message() -> impl Strategy<Value = DnsMessage> {
    (
        any::<u16>(),
        any::<[bool; 5]>(),
        prop::sample::select(vec![
            ResponseCode::NoError,
            ResponseCode::FormErr,
            ResponseCode::ServFail,
            ResponseCode::NxDomain,
        ]),
        prop::option::of((domain_name(4), record_type())),
        vec(resource_record(), 0..5),
        vec(resource_record(), 0..5),
        vec(resource_record(), 0..5),
    )
        .prop_map(|(id, f, rcode, q, answer, authority, additional)| DnsMessage {
            id,
            flags: Flags {
                response: f[0],
                authoritative: f[1],
                recursion_desired: f[2],
                recursion_available: f[3],
                authenticated: f[4],
            },
            rcode,
            question: q.map(|(n, t)| Question::new(n, t)),
            answer,
            authority,
            additional,
        })
}

pub fn wire_roundtrip(cases: u32) -> Result<(), String> {
    runner(cases, 0x5eed_0002)
        .run(&message(), |m| {
            let wire = encode_message(&m);
            let back = decode_message(&wire).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert_eq!(&back, &m);
            prop_assert_eq!(encode_message(&back), wire);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// A zone under `example.` with the given relative owners, some of them
/// unsigned delegations.
fn random_zone(owners: &BTreeSet<String>, cuts: &BTreeSet<String>) -> Zone {
    let mut text =
        String::from("$ORIGIN example.\n@ SOA ns1 admin 1 3600 300 3600000 3600\n@ NS ns1\nns1 A 192.0.2.1\n");
    for (i, o) in owners.iter().enumerate() {
        if cuts.contains(o) {
            text.push_str(&format!("{o} NS ns.{o}\nns.{o} A 192.0.2.{}\n", 10 + i % 200));
        } else {
            text.push_str(&format!("{o} A 192.0.2.{}\n", 10 + i % 200));
        }
    }
    parse_zone_text(&text).unwrap()
}

fn owner_strategy() -> impl Strategy<Value = String> {
    vec("[a-z][a-z0-9]{0,5}", 1..4).prop_map(|ls| ls.join("."))
}

pub fn nsec3_chain(cases: u32) -> Result<(), String> {
    let strategy = (
        btree_set(owner_strategy(), 1..25),
        any::<bool>(),
        0u16..15,
        bytes(6),
        vec(domain_name(3), 10),
        any::<u64>(),
    );
    runner(cases, 0x5eed_0003)
        .run(&strategy, |(owners, opt_out, iterations, salt, probes, cut_bits)| {
            // Only single-label owners may become delegations, so no name sits below a cut.
            let cuts: BTreeSet<String> = owners
                .iter()
                .enumerate()
                .filter(|(i, o)| !o.contains('.') && cut_bits >> (i % 64) & 1 == 1)
                .map(|(_, o)| o.clone())
                .collect();
            let owners: BTreeSet<String> = owners
                .into_iter()
                .filter(|o| cuts.contains(o) || !cuts.iter().any(|c| o.ends_with(&format!(".{c}"))))
                .collect();
            let zone = random_zone(&owners, &cuts);
            let apex = zone.apex().clone();
            let opts = SigningOptions {
                nsec3: Nsec3Params::new(iterations, salt),
                opt_out,
                ..Default::default()
            };
            let sz = sign_zone(
                &zone,
                &KeyPair::derive(&apex, KeyRole::Ksk, 1),
                &KeyPair::derive(&apex, KeyRole::Zsk, 1),
                &BTreeMap::new(),
                &opts,
            )
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
            check_chain(&sz, &probes)
        })
        .map_err(|e| e.to_string())
}

fn check_chain(sz: &SignedZone, probes: &[DomainName]) -> Result<(), TestCaseError> {
    let chain = &sz.nsec3_chain;
    prop_assert!(!chain.is_empty());
    for (i, r) in chain.iter().enumerate() {
        let next = &chain[(i + 1) % chain.len()];
        prop_assert_eq!(&r.next_hash, &next.owner_hash, "chain must close");
        if i + 1 < chain.len() {
            prop_assert!(r.owner_hash < next.owner_hash, "chain must be sorted");
        }
    }
    let apex = sz.apex();
    let mut names: Vec<DomainName> = sz.zone.records().iter().map(|r| r.owner.clone()).collect();
    names.extend(probes.iter().map(|p| p.concat(apex).unwrap()));
    for n in names {
        let h = nsec3_hash(&n, &sz.nsec3_params).unwrap().to_vec();
        let matches = chain.iter().filter(|r| r.matches(&h)).count();
        let covers = chain.iter().filter(|r| r.covers(&h)).count();
        prop_assert_eq!(matches + covers, 1, "{} matched {} covered {}", n, matches, covers);
    }
    Ok(())
}

/// Plan for one random delegation corpus: which second-level zones exist
/// under which top-level zones, their NS targets, and optional sibling glue.
#[derive(Debug, Clone)]
pub struct CorpusPlan {
    tlds: Vec<&'static str>,
    slds: Vec<(String, Vec<String>, Vec<bool>)>,
}

const TLDS: [&str; 3] = ["com", "net", "org"];

fn address_of(name: &str) -> Ipv4Addr {
    let h = Sha1::digest(name.as_bytes());
    Ipv4Addr::new(10, h[0], h[1], h[2].max(1))
}

pub fn corpus_plan() -> impl Strategy<Value = CorpusPlan> {
    let sld_pool: Vec<String> = TLDS
        .iter()
        .flat_map(|t| ["a", "b", "c"].iter().map(move |s| format!("{s}.{t}")))
        .collect();
    (
        prop::sample::subsequence(vec!["com", "net", "org"], 1..=2),
        prop::sample::subsequence(sld_pool, 1..=6),
    )
        .prop_flat_map(|(tlds, slds)| {
            let n = slds.len();
            let per_sld = vec((vec((any::<bool>(), 0..n), 1..=2), vec(any::<bool>(), 2)), n);
            (Just(tlds), Just(slds), per_sld)
        })
        .prop_map(|(tlds, slds, per_sld)| {
            let slds = slds
                .iter()
                .zip(per_sld)
                .enumerate()
                .map(|(i, (sld, (targets, glue)))| {
                    let mut ts: Vec<String> = targets
                        .iter()
                        .enumerate()
                        .map(|(k, (own, other))| {
                            if *own || *other == i {
                                format!("ns{}.{sld}", k + 1)
                            } else {
                                format!("ns1.{}", slds[*other])
                            }
                        })
                        .collect();
                    ts.sort();
                    ts.dedup();
                    (sld.clone(), ts, glue)
                })
                .collect();
            CorpusPlan { tlds, slds }
        })
}

impl CorpusPlan {
    pub fn zone_count(&self) -> usize {
        self.tlds.len() + self.slds.len()
    }

    pub fn build(&self) -> Corpus {
        let mut zones = Vec::new();
        for tld in &self.tlds {
            let mut text = format!(
                "$ORIGIN {tld}.\n@ SOA ns.nic admin 1 3600 300 3600000 3600\n@ NS ns.nic\nns.nic A {}\n",
                address_of(&format!("ns.nic.{tld}"))
            );
            for (sld, targets, glue) in self.slds.iter().filter(|(s, _, _)| s.ends_with(&format!(".{tld}"))) {
                for (k, t) in targets.iter().enumerate() {
                    text.push_str(&format!("{sld}. NS {t}.\n"));
                    let in_child = t.ends_with(&format!(".{sld}"));
                    let sibling = !in_child && t.ends_with(&format!(".{tld}"));
                    if in_child || (sibling && glue[k % glue.len()]) {
                        text.push_str(&format!("{t}. A {}\n", address_of(t)));
                    }
                }
            }
            zones.push(parse_zone_text(&text).unwrap());
        }
        for (sld, targets, _) in &self.slds {
            let mut text = format!("$ORIGIN {sld}.\n@ SOA {} admin 1 3600 300 3600000 3600\n", targets[0]);
            for t in targets {
                text.push_str(&format!("@ NS {t}.\n"));
            }
            let mut own: BTreeSet<String> = targets
                .iter()
                .filter(|t| t.ends_with(&format!(".{sld}")))
                .cloned()
                .collect();
            for (other, ts, _) in &self.slds {
                if other != sld {
                    own.extend(ts.iter().filter(|t| t.ends_with(&format!(".{sld}"))).cloned());
                }
            }
            own.insert(format!("ns1.{sld}"));
            for n in own {
                text.push_str(&format!("{n}. A {}\n", address_of(&n)));
            }
            text.push_str(&format!("www A {}\n", address_of(&format!("www.{sld}"))));
            zones.push(parse_zone_text(&text).unwrap());
        }
        Corpus::new(zones).unwrap()
    }
}

/// Outcome counts for the minimum-glue property: corpora checked and
/// corpora skipped because even their full glue does not resolve.
#[derive(Debug, Default, Clone, Copy)]
pub struct GlueStats {
    pub checked: usize,
    pub unresolvable: usize,
}

pub fn minimum_glue(cases: u32) -> Result<GlueStats, String> {
    let stats = std::cell::Cell::new(GlueStats::default());
    runner(cases, 0x5eed_0004)
        .run(&corpus_plan(), |plan| {
            prop_assert!(plan.zone_count() <= 8);
            let corpus = plan.build();
            let mut s = stats.get();
            if !resolution_checks(&corpus, &corpus).iter().all(|c| c.passed()) {
                s.unresolvable += 1;
                stats.set(s);
                return Ok(());
            }
            let report = check_minimum_glue(&corpus);
            prop_assert!(report.sufficient, "insufficient: {:?}", report.checks);
            prop_assert!(report.minimal, "not minimal: {:?}", report.necessity);
            s.checked += 1;
            stats.set(s);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(stats.get())
}

/// Flips one octet of every signed record's rdata, and of every signature,
/// in turn; each change must make the RRset fail validation.
pub fn tamper_detection(zones: &[SignedZone], clock: u32) -> Result<usize, String> {
    let mut trials = 0;
    for sz in zones {
        let records = sz.zone.records();
        let mut rrsets: BTreeMap<(DomainName, RecordType), Vec<ResourceRecord>> = BTreeMap::new();
        let mut sigs: BTreeMap<(DomainName, RecordType), Vec<ResourceRecord>> = BTreeMap::new();
        for rr in records {
            match rr.covered_type() {
                Some(t) => sigs.entry((rr.owner.clone(), t)).or_default().push(rr.clone()),
                None => rrsets
                    .entry((rr.owner.clone(), rr.rtype()))
                    .or_default()
                    .push(rr.clone()),
            }
        }
        for (key, set) in &rrsets {
            let Some(sig) = sigs.get(key) else { continue };
            if verify_rrset(set, sig, &sz.dnskeys, clock) != ValidationResult::Secure {
                return Err(format!("{} {:?} does not validate before tampering", key.0, key.1));
            }
            for (i, rr) in set.iter().enumerate() {
                let wire = rr.rdata.canonical_wire();
                for pos in 0..wire.len() {
                    let mut w = wire.clone();
                    w[pos] ^= 0x5a;
                    let Ok(rdata) = RData::decode(rr.rtype(), &mut WireReader::new(&w), w.len()) else {
                        trials += 1;
                        continue;
                    };
                    if rdata.canonical_wire() == wire {
                        continue;
                    }
                    let mut tampered = set.clone();
                    tampered[i] = ResourceRecord::new(rr.owner.clone(), rr.ttl, rdata);
                    trials += 1;
                    if verify_rrset(&tampered, sig, &sz.dnskeys, clock) == ValidationResult::Secure {
                        return Err(format!("undetected flip at octet {pos} of {rr}"));
                    }
                }
            }
            // Each signature alone, since one intact signature suffices.
            for s in sig {
                let RData::RRSIG(r) = &s.rdata else { continue };
                for pos in 0..r.signature.len() {
                    let mut forged = r.clone();
                    forged.signature[pos] ^= 0x01;
                    let tampered = ResourceRecord::new(s.owner.clone(), s.ttl, RData::RRSIG(forged));
                    trials += 1;
                    if verify_rrset(set, &[tampered], &sz.dnskeys, clock) == ValidationResult::Secure {
                        return Err(format!("undetected signature flip at octet {pos} over {}", key.0));
                    }
                }
            }
        }
    }
    Ok(trials)
}

pub const TAMPER_CLOCK: u32 = DEFAULT_CLOCK + 3600;
