// Hash names with salt aabbccdd and 12 extra iterations.

use dnsglue::dnssec::{nsec3_hash_text, Nsec3Params};
use dnsglue::name;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = Nsec3Params::new(12, hex::decode("aabbccdd")?);
    for n in ["example", "c.example", "a.c.example", "x.w.example"] {
        println!("{:<14} {}", n, nsec3_hash_text(&name(n), &params)?);
    }
    assert_eq!(
        nsec3_hash_text(&name("example"), &params)?,
        "0p9mhaveqvm6t7vbl5lop2u3t2rp3tom"
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
