// Cycles and minimum glue for a pair of mutually dependent zones, before
// and after stripping their glue.

use std::path::Path;

use dnsglue::glue::compute_minimum_glue;
use dnsglue::master::read_corpus;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let corpus = read_corpus(&[dir.join("cycle2-com.zone"), dir.join("cycle2-net.zone")])?;

    let report = compute_minimum_glue(&corpus);
    print!("{}", report.render_text());
    assert_eq!(report.cycles.len(), 1);
    assert!(report.absent_required.is_empty());

    let stripped = compute_minimum_glue(&corpus.without_glue());
    println!(
        "without glue: {} required records missing",
        stripped.absent_required.len()
    );
    assert!(!stripped.absent_required.is_empty());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
