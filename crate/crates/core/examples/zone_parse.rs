// Parse a delegating zone and list how each record is classified.

use dnsglue::master::DEFAULT_TTL;
use dnsglue::{name, parse_master_file};

const COM: &str = "$ORIGIN com.
foo          NS  ns.foo
foo          NS  ns.foo.foo
foo          NS  ns.foo.net.
foo          NS  ns.bar
ns.foo       A   192.0.1.1
ns.foo.foo   A   192.0.2.2
ns.foo.net.  A   192.0.2.2
ns.bar       A   192.0.3.3
";

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let zone = parse_master_file(COM, &name("com"), DEFAULT_TTL)?;
    for (i, rr) in zone.records().iter().enumerate() {
        println!("#{} {:?} {rr}", i + 1, zone.classify(rr));
    }
    println!(
        "delegations: {:?}",
        zone.cuts().iter().map(|c| c.to_string()).collect::<Vec<_>>()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
