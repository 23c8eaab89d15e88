// Off-path guessing race: Monte Carlo rate against the closed form.

use dnsglue::sim::{kaminsky_closed_form, kaminsky_success_rate};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for bits in [8u8, 12, 16] {
        let attempts = 1 << 10;
        let exact = kaminsky_closed_form(attempts, bits);
        let measured = kaminsky_success_rate(attempts, bits, 4_000, 7);
        println!("{bits:>2} bits, {attempts} forged replies: closed form {exact:.4}, measured {measured:.4}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
