//! Checks a DNSSEC-aware resolver applies to referrals before following them.

use serde::Serialize;

use super::chain::ChainLink;
use super::denial::{verify_nsec3_denial, ProofKind};
use super::verify::{ds_matches, verify_rrset, BogusReason, ValidationResult};
use crate::message::DnsMessage;
use crate::name::DomainName;
use crate::rr::{Dnskey, RData, RecordType, ResourceRecord};

/// What vouches for a zone's key-signing key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KeyAuthority {
    Anchor(Dnskey),
    Ds(Vec<ResourceRecord>),
}

/// Security status a signed parent gives a delegated child.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ReferralSecurity {
    /// Verified DS set; the child's keys must match it.
    Signed(Vec<ResourceRecord>),
    /// No DS, with an accepted denial of the DS RRset.
    Insecure(ProofKind),
}

/// Verifies the DNSKEY RRset in `response` for `zone` and selects the
/// key-signing key vouched for by `authority`.
pub fn verify_dnskey_response(
    zone: &DomainName,
    authority: &KeyAuthority,
    response: &DnsMessage,
    clock: u32,
) -> Result<ChainLink, BogusReason> {
    let dnskeys: Vec<ResourceRecord> = response
        .answer
        .iter()
        .filter(|rr| &rr.owner == zone && rr.rtype() == RecordType::DNSKEY)
        .cloned()
        .collect();
    let sigs: Vec<ResourceRecord> = response
        .answer
        .iter()
        .filter(|rr| &rr.owner == zone && rr.covered_type() == Some(RecordType::DNSKEY))
        .cloned()
        .collect();
    if dnskeys.is_empty() {
        return Err(BogusReason::ChainBreak);
    }
    let trusted = |k: &Dnskey| match authority {
        KeyAuthority::Anchor(a) => a == k,
        KeyAuthority::Ds(ds) => ds
            .iter()
            .any(|d| matches!(&d.rdata, RData::DS(d) if ds_matches(d, zone, k))),
    };
    let ksk = dnskeys
        .iter()
        .find(|rr| matches!(&rr.rdata, RData::DNSKEY(k) if trusted(k)))
        .cloned()
        .ok_or(BogusReason::ChainBreak)?;
    if let ValidationResult::Bogus(r) = verify_rrset(&dnskeys, &sigs, std::slice::from_ref(&ksk), clock) {
        return Err(r);
    }
    let ds = match authority {
        KeyAuthority::Anchor(_) => Vec::new(),
        KeyAuthority::Ds(ds) => ds.clone(),
    };
    Ok(ChainLink {
        zone: zone.clone(),
        ds,
        ksk,
        dnskeys,
    })
}

/// Decides how a referral from the signed zone `parent` to `child` is
/// secured: a DS set verified under `parent_keys`, or a verified proof that
/// the child is an unsigned delegation.
pub fn check_referral_security(
    response: &DnsMessage,
    parent: &DomainName,
    child: &DomainName,
    parent_keys: &[ResourceRecord],
    clock: u32,
) -> Result<ReferralSecurity, BogusReason> {
    let ds: Vec<ResourceRecord> = response
        .authority
        .iter()
        .filter(|rr| &rr.owner == child && rr.rtype() == RecordType::DS)
        .cloned()
        .collect();
    if !ds.is_empty() {
        let sigs: Vec<ResourceRecord> = response
            .authority
            .iter()
            .filter(|rr| &rr.owner == child && rr.covered_type() == Some(RecordType::DS))
            .cloned()
            .collect();
        return match verify_rrset(&ds, &sigs, parent_keys, clock) {
            ValidationResult::Secure => Ok(ReferralSecurity::Signed(ds)),
            ValidationResult::Bogus(r) => Err(r),
            ValidationResult::Insecure => Err(BogusReason::ChainBreak),
        };
    }
    let verdict = verify_nsec3_denial(response, child, parent, None, parent_keys, clock);
    match (verdict.result, verdict.proof) {
        (ValidationResult::Insecure, Some(p)) => Ok(ReferralSecurity::Insecure(p)),
        (ValidationResult::Bogus(r), _) => Err(r),
        _ => Err(BogusReason::DenialMismatch),
    }
}

/// Delegation NS targets agree with the child's authoritative NS RRset.
pub fn ns_sets_consistent(delegation_targets: &[DomainName], authoritative: &[ResourceRecord]) -> bool {
    let mut a: Vec<&DomainName> = delegation_targets.iter().collect();
    let mut b: Vec<&DomainName> = authoritative.iter().filter_map(|rr| rr.ns_target()).collect();
    a.sort();
    a.dedup();
    b.sort();
    b.dedup();
    !a.is_empty() && a == b
}
