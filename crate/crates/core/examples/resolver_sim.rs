// Run the on-path glue hijack against the improved bailiwick check, with
// and without a signed glue authority.

use std::path::Path;

use dnsglue::sim::{run_scenario, Scenario};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/scenarios");
    for (file, expect) in [
        ("delegation-improved.json", false),
        ("hijack-improved.json", true),
        ("hijack-dnssec-aware.json", false),
        ("hijack-dnssec-unsigned.json", true),
    ] {
        let verdict = run_scenario(&Scenario::load(&dir.join(file))?)?;
        println!(
            "{:<28} {:<12} {}",
            file,
            verdict.policy.to_string(),
            verdict.summary_line()
        );
        assert_eq!(verdict.poisoned, expect, "{file}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
