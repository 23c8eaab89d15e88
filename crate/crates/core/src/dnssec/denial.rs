//! Verification of NSEC3 denial-of-existence proofs.

use serde::Serialize;

use super::nsec3::{nsec3_hash, Nsec3Params, Nsec3Record};
use super::verify::{verify_rrset, BogusReason, ValidationResult};
use crate::message::{DnsMessage, ResponseCode};
use crate::name::DomainName;
use crate::rr::{RecordType, ResourceRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ProofKind {
    NxDomainProof,
    NoDataProof,
    /// Next-closer name of the delegation covered by an Opt-Out span.
    OptOutInsecureDelegation,
    /// The delegation name is matched and its bitmap has NS but no DS.
    UnsignedDelegation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DenialVerdict {
    pub result: ValidationResult,
    pub proof: Option<ProofKind>,
}

impl DenialVerdict {
    fn bogus(reason: BogusReason) -> Self {
        DenialVerdict {
            result: ValidationResult::Bogus(reason),
            proof: None,
        }
    }

    fn ok(result: ValidationResult, proof: ProofKind) -> Self {
        DenialVerdict {
            result,
            proof: Some(proof),
        }
    }
}

struct Proofs<'a> {
    records: Vec<Nsec3Record>,
    params: &'a Nsec3Params,
}

impl Proofs<'_> {
    fn hash(&self, name: &DomainName) -> Vec<u8> {
        nsec3_hash(name, self.params).map(|h| h.to_vec()).unwrap_or_default()
    }

    fn matching(&self, name: &DomainName) -> Option<&Nsec3Record> {
        let h = self.hash(name);
        self.records.iter().find(|r| r.matches(&h))
    }

    fn covering(&self, name: &DomainName) -> Option<&Nsec3Record> {
        let h = self.hash(name);
        self.records.iter().find(|r| r.covers(&h))
    }

    /// True when some record's owner or next hash equals H(name), which
    /// reveals that the name exists.
    fn leaks(&self, name: &DomainName) -> bool {
        let h = self.hash(name);
        self.records.iter().any(|r| r.owner_hash == h || r.next_hash == h)
    }

    /// Closest provable encloser of `name` below or at `apex`, with the
    /// record covering the next-closer name.
    fn closest_encloser(&self, name: &DomainName, apex: &DomainName) -> Option<(DomainName, &Nsec3Record)> {
        let mut next_closer = name.clone();
        for ancestor in name.ancestors().skip(1) {
            if !ancestor.is_subdomain_of(apex) {
                return None;
            }
            if self.matching(&ancestor).is_some() {
                return self.covering(&next_closer).map(|c| (ancestor, c));
            }
            next_closer = ancestor;
        }
        None
    }
}

/// Checks the NSEC3 material in a negative response or insecure referral
/// for `qname`. `keys` are the zone's DNSKEY records.
pub fn verify_nsec3_denial(
    response: &DnsMessage,
    qname: &DomainName,
    apex: &DomainName,
    params: Option<&Nsec3Params>,
    keys: &[ResourceRecord],
    clock: u32,
) -> DenialVerdict {
    use BogusReason::*;
    let mut records = Vec::new();
    for rr in response.authority.iter().filter(|rr| rr.rtype() == RecordType::NSEC3) {
        let Some(rec) = Nsec3Record::from_rr(rr, apex) else {
            continue;
        };
        let sigs: Vec<ResourceRecord> = response
            .authority
            .iter()
            .filter(|s| s.owner == rr.owner && s.covered_type() == Some(RecordType::NSEC3))
            .cloned()
            .collect();
        if let ValidationResult::Bogus(r) = verify_rrset(std::slice::from_ref(rr), &sigs, keys, clock) {
            return DenialVerdict::bogus(r);
        }
        records.push(rec);
    }
    if records.is_empty() {
        return DenialVerdict::bogus(IncompleteDenial);
    }
    let zone_params = records[0].params.clone();
    if records.iter().any(|r| r.params != zone_params) || params.is_some_and(|p| p != &zone_params) {
        return DenialVerdict::bogus(DenialMismatch);
    }
    if nsec3_hash(qname, &zone_params).is_err() {
        return DenialVerdict::bogus(UnsupportedAlgorithm);
    }
    let soa: Vec<ResourceRecord> = response
        .authority
        .iter()
        .filter(|rr| rr.rtype() == RecordType::SOA)
        .cloned()
        .collect();
    if !soa.is_empty() {
        let sigs: Vec<ResourceRecord> = response
            .authority
            .iter()
            .filter(|s| s.covered_type() == Some(RecordType::SOA))
            .cloned()
            .collect();
        if let ValidationResult::Bogus(r) = verify_rrset(&soa, &sigs, keys, clock) {
            return DenialVerdict::bogus(r);
        }
    }
    let proofs = Proofs {
        records,
        params: &zone_params,
    };
    let qtype = response.question.as_ref().map(|q| q.rtype).unwrap_or(RecordType::A);

    if response.rcode == ResponseCode::NxDomain {
        if proofs.leaks(qname) {
            return DenialVerdict::bogus(DenialMismatch);
        }
        let Some((ce, _)) = proofs.closest_encloser(qname, apex) else {
            return DenialVerdict::bogus(IncompleteDenial);
        };
        let wildcard = ce.wildcard_child();
        if proofs.matching(&wildcard).is_some() {
            return DenialVerdict::bogus(DenialMismatch);
        }
        if proofs.covering(&wildcard).is_none() {
            return DenialVerdict::bogus(IncompleteDenial);
        }
        return DenialVerdict::ok(ValidationResult::Secure, ProofKind::NxDomainProof);
    }
    if response.rcode != ResponseCode::NoError || !response.answer.is_empty() {
        return DenialVerdict::bogus(DenialMismatch);
    }

    let delegation = response
        .authority
        .iter()
        .find(|rr| {
            rr.rtype() == RecordType::NS && rr.owner.is_strict_subdomain_of(apex) && qname.is_subdomain_of(&rr.owner)
        })
        .map(|rr| rr.owner.clone());
    if let Some(cut) = delegation {
        if qname != &cut && proofs.leaks(qname) {
            return DenialVerdict::bogus(DenialMismatch);
        }
        if response
            .authority
            .iter()
            .any(|rr| rr.rtype() == RecordType::DS && rr.owner == cut)
        {
            return DenialVerdict::bogus(DenialMismatch);
        }
        if let Some(m) = proofs.matching(&cut) {
            return if m.has_type(RecordType::NS) && !m.has_type(RecordType::DS) && !m.has_type(RecordType::SOA) {
                DenialVerdict::ok(ValidationResult::Insecure, ProofKind::UnsignedDelegation)
            } else {
                DenialVerdict::bogus(DenialMismatch)
            };
        }
        return match proofs.closest_encloser(&cut, apex) {
            None => DenialVerdict::bogus(IncompleteDenial),
            Some((_, cover)) if cover.opt_out => {
                DenialVerdict::ok(ValidationResult::Insecure, ProofKind::OptOutInsecureDelegation)
            }
            Some(_) => DenialVerdict::bogus(DenialMismatch),
        };
    }

    if let Some(m) = proofs.matching(qname) {
        return if m.has_type(qtype) {
            DenialVerdict::bogus(DenialMismatch)
        } else {
            DenialVerdict::ok(ValidationResult::Secure, ProofKind::NoDataProof)
        };
    }
    if qtype == RecordType::DS {
        return match proofs.closest_encloser(qname, apex) {
            Some((_, cover)) if cover.opt_out => {
                DenialVerdict::ok(ValidationResult::Insecure, ProofKind::OptOutInsecureDelegation)
            }
            Some(_) => DenialVerdict::bogus(DenialMismatch),
            None => DenialVerdict::bogus(IncompleteDenial),
        };
    }
    DenialVerdict::bogus(IncompleteDenial)
}
