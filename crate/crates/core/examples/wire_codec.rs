// Encode a referral with name compression and decode it back.

use dnsglue::master::parse_record_line;
use dnsglue::message::{decode_message, encode_message};
use dnsglue::{name, DnsMessage, DomainName, RecordType};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut msg = DnsMessage::query(0x2b1d, name("www.foo.com"), RecordType::A);
    msg.flags.response = true;
    msg.authority.push(parse_record_line(
        "foo.com. 3600 IN NS ns.foo.com.",
        &DomainName::root(),
    )?);
    msg.additional.push(parse_record_line(
        "ns.foo.com. 3600 IN A 192.0.1.1",
        &DomainName::root(),
    )?);

    let wire = encode_message(&msg);
    let back = decode_message(&wire)?;
    assert_eq!(back, msg);
    println!("{} octets: {}", wire.len(), hex::encode(&wire));
    print!("{back}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
