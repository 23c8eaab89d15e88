//! RRSIG verification, DS digests and the signed-data layout shared with signing.

use std::fmt;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::keys::key_tag;
use super::scheme::scheme_for;
use crate::name::DomainName;
use crate::rr::{rrsig_signed_prefix, Dnskey, Ds, RData, ResourceRecord, Rrsig};

pub const DS_SHA256: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BogusReason {
    BadSignature,
    Expired,
    NotYetValid,
    KeyMismatch,
    ChainBreak,
    IncompleteDenial,
    DenialMismatch,
    MissingSignature,
    ChainFetch,
    UnsupportedAlgorithm,
}

impl fmt::Display for BogusReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BogusReason::BadSignature => "bad signature",
            BogusReason::Expired => "signature expired",
            BogusReason::NotYetValid => "signature not yet valid",
            BogusReason::KeyMismatch => "key mismatch",
            BogusReason::ChainBreak => "chain break",
            BogusReason::IncompleteDenial => "incomplete denial",
            BogusReason::DenialMismatch => "denial proof mismatch",
            BogusReason::MissingSignature => "missing signature",
            BogusReason::ChainFetch => "chain fetch failure",
            BogusReason::UnsupportedAlgorithm => "unsupported algorithm",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ValidationResult {
    Secure,
    Insecure,
    Bogus(BogusReason),
}

impl ValidationResult {
    pub fn is_secure(self) -> bool {
        self == ValidationResult::Secure
    }
}

impl fmt::Display for ValidationResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationResult::Secure => f.write_str("secure"),
            ValidationResult::Insecure => f.write_str("insecure"),
            ValidationResult::Bogus(r) => write!(f, "bogus ({r})"),
        }
    }
}

/// RRSIG header followed by the RRset in canonical form (RFC 4034 3.1.8.1):
/// lowercase owners, original TTL, records ordered by rdata octets.
pub fn rrset_signed_data(sig: &Rrsig, rrset: &[ResourceRecord]) -> Vec<u8> {
    let mut out = rrsig_signed_prefix(sig);
    let mut rdatas: Vec<Vec<u8>> = rrset.iter().map(|rr| rr.rdata.canonical_wire()).collect();
    rdatas.sort();
    rdatas.dedup();
    let Some(first) = rrset.first() else {
        return out;
    };
    let owner = signed_owner(&first.owner, sig.labels);
    for rd in rdatas {
        out.extend(owner.canonical_wire());
        out.extend(first.rtype().code().to_be_bytes());
        out.extend(1u16.to_be_bytes());
        out.extend(sig.original_ttl.to_be_bytes());
        out.extend((rd.len() as u16).to_be_bytes());
        out.extend(rd);
    }
    out
}

/// Owner as signed: wildcard-expanded names are reduced to `*.<labels>`.
fn signed_owner(owner: &DomainName, labels: u8) -> DomainName {
    let count = owner.label_count() - usize::from(owner.is_wildcard());
    if (labels as usize) < count {
        owner
            .ancestor_with_labels(labels as usize)
            .map(|a| a.wildcard_child())
            .unwrap_or_else(|| owner.clone())
    } else {
        owner.clone()
    }
}

/// RRSIG labels field for an owner name.
pub fn rrsig_label_count(owner: &DomainName) -> u8 {
    (owner.label_count() - usize::from(owner.is_wildcard())) as u8
}

pub fn verify_rrsig(
    rrset: &[ResourceRecord],
    rrsig: &ResourceRecord,
    dnskey: &ResourceRecord,
    clock: u32,
) -> ValidationResult {
    use ValidationResult::Bogus;
    let RData::RRSIG(sig) = &rrsig.rdata else {
        return Bogus(BogusReason::MissingSignature);
    };
    let RData::DNSKEY(key) = &dnskey.rdata else {
        return Bogus(BogusReason::KeyMismatch);
    };
    let Some(first) = rrset.first() else {
        return Bogus(BogusReason::MissingSignature);
    };
    if rrset
        .iter()
        .any(|rr| rr.owner != first.owner || rr.rtype() != first.rtype())
        || rrsig.owner != first.owner
        || sig.type_covered != first.rtype()
        || sig.labels as usize > first.owner.label_count()
    {
        return Bogus(BogusReason::BadSignature);
    }
    if sig.signer != dnskey.owner
        || sig.key_tag != key_tag(key)
        || sig.algorithm != key.algorithm
        || key.flags & Dnskey::ZONE_KEY == 0
        || key.protocol != 3
    {
        return Bogus(BogusReason::KeyMismatch);
    }
    let Ok(scheme) = scheme_for(sig.algorithm) else {
        return Bogus(BogusReason::UnsupportedAlgorithm);
    };
    if !scheme.verify(&rrset_signed_data(sig, rrset), &sig.signature, &key.public_key) {
        return Bogus(BogusReason::BadSignature);
    }
    if clock > sig.expiration {
        return Bogus(BogusReason::Expired);
    }
    if clock < sig.inception {
        return Bogus(BogusReason::NotYetValid);
    }
    ValidationResult::Secure
}

/// Secure if any RRSIG verifies under any of the keys. Otherwise the most
/// specific failure seen, or `MissingSignature` when there were no RRSIGs.
pub fn verify_rrset(
    rrset: &[ResourceRecord],
    rrsigs: &[ResourceRecord],
    keys: &[ResourceRecord],
    clock: u32,
) -> ValidationResult {
    let mut worst = None;
    for sig in rrsigs {
        for key in keys {
            match verify_rrsig(rrset, sig, key, clock) {
                ValidationResult::Secure => return ValidationResult::Secure,
                ValidationResult::Bogus(r) => {
                    // Prefer reasons other than a plain key mismatch from trying the wrong key.
                    if worst.is_none() || worst == Some(BogusReason::KeyMismatch) {
                        worst = Some(r);
                    }
                }
                ValidationResult::Insecure => {}
            }
        }
    }
    ValidationResult::Bogus(worst.unwrap_or(BogusReason::MissingSignature))
}

pub fn ds_digest(owner: &DomainName, key: &Dnskey) -> Vec<u8> {
    Sha256::new()
        .chain_update(owner.canonical_wire())
        .chain_update(RData::DNSKEY(key.clone()).canonical_wire())
        .finalize()
        .to_vec()
}

pub fn make_ds(owner: &DomainName, key: &Dnskey) -> Ds {
    Ds {
        key_tag: key_tag(key),
        algorithm: key.algorithm,
        digest_type: DS_SHA256,
        digest: ds_digest(owner, key),
    }
}

pub fn ds_matches(ds: &Ds, owner: &DomainName, key: &Dnskey) -> bool {
    ds.digest_type == DS_SHA256
        && ds.key_tag == key_tag(key)
        && ds.algorithm == key.algorithm
        && ds.digest == ds_digest(owner, key)
}
