//! Convertibility of a positive answer into an Opt-Out insecure delegation.

use serde::Serialize;
use thiserror::Error;

use super::oracle::QueryOracle;
use crate::dnssec::nsec3::{nsec3_hash, Nsec3Record};
use crate::dnssec::SignedZone;
use crate::message::{DnsMessage, ResponseCode};
use crate::name::DomainName;
use crate::rr::{RecordType, ResourceRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConvertVerdict {
    Convertible,
    Inconvertible,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Convertibility {
    pub zone: DomainName,
    pub victim: DomainName,
    pub verdict: ConvertVerdict,
    pub witness_suffix: Option<DomainName>,
    #[serde(skip)]
    pub covering_nsec3: Option<Nsec3Record>,
    #[serde(skip)]
    pub closest_encloser_nsec3: Option<Nsec3Record>,
    /// The two NSEC3 records and their signatures, as served.
    pub evidence: Vec<ResourceRecord>,
}

impl Convertibility {
    pub fn is_convertible(&self) -> bool {
        self.verdict == ConvertVerdict::Convertible
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConvertError {
    #[error("{victim} is not strictly below {apex}")]
    NotBelowApex { victim: DomainName, apex: DomainName },
    #[error("{0} has no positive answer in the zone")]
    NotPositive(DomainName),
    #[error("oracle failure: {0}")]
    Oracle(String),
}

/// What one non-existent suffix revealed.
struct SuffixProof {
    cover: (Nsec3Record, Vec<ResourceRecord>),
    encloser: (Nsec3Record, Vec<ResourceRecord>),
}

fn signed_record(resp: &DnsMessage, rr: &ResourceRecord) -> Vec<ResourceRecord> {
    let mut out = vec![rr.clone()];
    out.extend(
        resp.authority
            .iter()
            .filter(|s| s.owner == rr.owner && s.covered_type() == Some(RecordType::NSEC3))
            .cloned(),
    );
    out
}

/// Locates the closest-encloser and next-closer covering records for
/// `suffix` in a negative response.
fn suffix_proof(resp: &DnsMessage, suffix: &DomainName, sz: &SignedZone) -> Option<SuffixProof> {
    let apex = sz.apex();
    let records: Vec<(Nsec3Record, &ResourceRecord)> = resp
        .authority
        .iter()
        .filter_map(|rr| Nsec3Record::from_rr(rr, apex).map(|r| (r, rr)))
        .collect();
    let hash = |n: &DomainName| nsec3_hash(n, &sz.nsec3_params).ok().map(|h| h.to_vec());
    let mut next_closer = suffix.clone();
    for ancestor in suffix.ancestors().skip(1) {
        if !ancestor.is_subdomain_of(apex) {
            return None;
        }
        let h = hash(&ancestor)?;
        if let Some((m, mrr)) = records.iter().find(|(r, _)| r.matches(&h)) {
            let nc = hash(&next_closer)?;
            let (c, crr) = records.iter().find(|(r, _)| r.covers(&nc))?;
            return Some(SuffixProof {
                cover: (c.clone(), signed_record(resp, crr)),
                encloser: (m.clone(), signed_record(resp, mrr)),
            });
        }
        next_closer = ancestor;
    }
    None
}

/// Walks the suffixes of `victim` toward the zone apex looking for a
/// non-existent name whose denial can be replayed as an Opt-Out delegation.
pub fn check_convertibility(
    sz: &SignedZone,
    victim: &DomainName,
    oracle: &mut dyn QueryOracle,
) -> Result<Convertibility, ConvertError> {
    let apex = sz.apex().clone();
    if !victim.is_strict_subdomain_of(&apex) {
        return Err(ConvertError::NotBelowApex {
            victim: victim.clone(),
            apex,
        });
    }
    let first = oracle.query(victim, RecordType::A).map_err(ConvertError::Oracle)?;
    if first.rcode != ResponseCode::NoError || first.is_referral() {
        return Err(ConvertError::NotPositive(victim.clone()));
    }
    let victim_hash = nsec3_hash(victim, &sz.nsec3_params)
        .map_err(|e| ConvertError::Oracle(e.to_string()))?
        .to_vec();
    let mut out = Convertibility {
        zone: apex.clone(),
        victim: victim.clone(),
        verdict: ConvertVerdict::Inconvertible,
        witness_suffix: None,
        covering_nsec3: None,
        closest_encloser_nsec3: None,
        evidence: Vec::new(),
    };
    for suffix in victim.ancestors().skip(1) {
        if suffix == apex {
            break;
        }
        let resp = oracle.query(&suffix, RecordType::A).map_err(ConvertError::Oracle)?;
        if resp.rcode != ResponseCode::NxDomain {
            continue;
        }
        let Some(proof) = suffix_proof(&resp, &suffix, sz) else {
            continue;
        };
        let (cover, cover_rrs) = proof.cover;
        let (encloser, encloser_rrs) = proof.encloser;
        let guarded = cover.opt_out && cover.owner_hash != victim_hash && cover.next_hash != victim_hash;
        if guarded && encloser.next_hash != victim_hash {
            out.verdict = ConvertVerdict::Convertible;
            out.witness_suffix = Some(suffix);
            out.covering_nsec3 = Some(cover);
            out.closest_encloser_nsec3 = Some(encloser);
            out.evidence = cover_rrs.into_iter().chain(encloser_rrs).collect();
            break;
        }
    }
    Ok(out)
}
