// Audit a small corpus with known glue types and signing status.

use std::path::Path;

use dnsglue::master::read_corpus;
use dnsglue::scan::{audit_corpus, SignedCorpus, SigningManifest};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/audit");
    let mut files: Vec<_> = std::fs::read_dir(&dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    files.retain(|p| p.extension().is_some_and(|e| e == "zone"));
    files.sort();
    let corpus = read_corpus(&files)?;
    let manifest = SigningManifest::load(&dir.join("manifest.json"))?;
    let report = audit_corpus(&SignedCorpus::from_manifest(&corpus, &manifest)?);
    print!("{}", report.render_text());
    assert!(report.any_zone_forgeable());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
