// Sign root, com and foo.com, then walk the chain of trust from the root
// key down to www.foo.com, before and after tampering with the answer.

use std::collections::BTreeSet;

use dnsglue::dnssec::{
    build_trust_chain, sign_corpus, SigningOptions, StaticFetcher, TrustAnchor, ValidationResult, DEFAULT_CLOCK,
};
use dnsglue::rr::RData;
use dnsglue::{name, parse_zone_text, Corpus, DomainName, RecordType, Zone};

const ROOT: &str = "$ORIGIN .
@ SOA a.root. admin.root. 1 3600 300 3600000 3600
@ NS a.root.
a.root A 192.0.2.1
com NS a.gtld.com.
a.gtld.com. A 192.0.2.2
";
const COM: &str = "$ORIGIN com.
@ SOA a.gtld.com. admin.com. 1 3600 300 3600000 3600
@ NS a.gtld.com.
a.gtld A 192.0.2.2
foo NS ns.foo.com.
ns.foo A 192.0.2.10
";
const FOO: &str = "$ORIGIN foo.com.
@ SOA ns admin 1 3600 300 3600000 3600
@ NS ns
ns A 192.0.2.10
www A 192.0.2.80
";

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = Corpus::new([parse_zone_text(ROOT)?, parse_zone_text(COM)?, parse_zone_text(FOO)?])?;
    let all: BTreeSet<DomainName> = corpus.zones().map(|z| z.apex().clone()).collect();
    let (signed, keys) = sign_corpus(&corpus, &all, 3, &SigningOptions::default())?;
    let Some(RData::DNSKEY(root_key)) = keys[&DomainName::root()].ksk().map(|k| k.rdata.clone()) else {
        return Err("root has no KSK".into());
    };
    let anchor = TrustAnchor::root(root_key);
    let clock = DEFAULT_CLOCK + 60;

    let mut fetch = StaticFetcher::new(signed.zones().cloned());
    let (chain, result) = build_trust_chain(&name("www.foo.com"), RecordType::A, &anchor, &mut fetch, clock);
    for link in &chain.links {
        println!(
            "{:<9} ds={} dnskeys={}",
            link.zone.to_string(),
            link.ds.len(),
            link.dnskeys.len()
        );
    }
    println!("www.foo.com A: {result}");
    assert_eq!(result, ValidationResult::Secure);

    let child = &fetch.zones[&name("foo.com")];
    let tampered: Vec<_> = child
        .records()
        .iter()
        .map(|rr| {
            let mut rr = rr.clone();
            if rr.owner == name("www.foo.com") && rr.rtype() == RecordType::A {
                rr.rdata = RData::A("192.0.2.66".parse().unwrap());
            }
            rr
        })
        .collect();
    fetch
        .zones
        .insert(name("foo.com"), Zone::new(name("foo.com"), tampered)?);
    let (_, result) = build_trust_chain(&name("www.foo.com"), RecordType::A, &anchor, &mut fetch, clock);
    println!("after tampering: {result}");
    assert!(matches!(result, ValidationResult::Bogus(_)));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
