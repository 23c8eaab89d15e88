#![allow(dead_code)]

pub mod props;

use std::path::PathBuf;

use dnsglue::dnssec::SignedZone;
use dnsglue::master::{read_corpus, read_zone_file};
use dnsglue::scan::{SignedCorpus, SigningManifest};
use dnsglue::sim::Scenario;

pub fn fixture(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(rel)
        .to_string_lossy()
        .into_owned()
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn cli(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = dnsglue::cli::run(
        std::iter::once("dnsglue").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

/// Every signed zone shipped under fixtures/.
pub fn dnssec_fixtures() -> Vec<SignedZone> {
    let mut out =
        vec![
            SignedZone::from_zone(&read_zone_file(std::path::Path::new(&fixture("example.signed"))).unwrap())
                .expect("example.signed carries DNSSEC material"),
        ];

    let dir = std::path::PathBuf::from(fixture("audit"));
    let mut files: Vec<_> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.retain(|p| p.extension().is_some_and(|e| e == "zone"));
    files.sort();
    let manifest = SigningManifest::load(&dir.join("manifest.json")).unwrap();
    out.extend(
        SignedCorpus::from_manifest(&read_corpus(&files).unwrap(), &manifest)
            .unwrap()
            .signed
            .into_values(),
    );

    let (net, _) = Scenario::load(std::path::Path::new(&fixture("scenarios/hijack-dnssec-aware.json")))
        .unwrap()
        .build_network()
        .unwrap();
    out.extend(net.honest_corpus().zones().filter_map(SignedZone::from_zone));
    out
}
