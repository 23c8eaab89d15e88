//! Chain-of-trust construction from a trust anchor down to a target RRset.

use std::collections::BTreeMap;

use serde::Serialize;

use super::denial::verify_nsec3_denial;
use super::referral::{verify_dnskey_response, KeyAuthority};
use super::verify::{verify_rrset, BogusReason, ValidationResult};
use crate::authority::answer;
use crate::message::{DnsMessage, ResponseCode};
use crate::name::DomainName;
use crate::rr::{Dnskey, RData, RecordType, ResourceRecord};
use crate::zone::Zone;

/// Something that can put a question to the servers of a given zone.
pub trait ZoneFetcher {
    fn query(&mut self, zone: &DomainName, qname: &DomainName, qtype: RecordType) -> Result<DnsMessage, String>;
}

/// Answers from a fixed set of zones.
#[derive(Debug, Clone, Default)]
pub struct StaticFetcher {
    pub zones: BTreeMap<DomainName, Zone>,
}

impl StaticFetcher {
    pub fn new(zones: impl IntoIterator<Item = Zone>) -> Self {
        StaticFetcher {
            zones: zones.into_iter().map(|z| (z.apex().clone(), z)).collect(),
        }
    }
}

impl ZoneFetcher for StaticFetcher {
    fn query(&mut self, zone: &DomainName, qname: &DomainName, qtype: RecordType) -> Result<DnsMessage, String> {
        let z = self.zones.get(zone).ok_or_else(|| format!("no servers for {zone}"))?;
        Ok(answer(z, qname, qtype))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrustAnchor {
    pub zone: DomainName,
    pub key: Dnskey,
}

impl TrustAnchor {
    pub fn root(key: Dnskey) -> Self {
        TrustAnchor {
            zone: DomainName::root(),
            key,
        }
    }
}

/// One zone's link: the DS set vouching for it (empty for the anchor), the
/// KSK it selected and the full DNSKEY RRset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainLink {
    pub zone: DomainName,
    pub ds: Vec<ResourceRecord>,
    pub ksk: ResourceRecord,
    pub dnskeys: Vec<ResourceRecord>,
}

impl ChainLink {
    /// Keys other than the secure entry point; all keys if there are none.
    pub fn zone_signing_keys(&self) -> Vec<ResourceRecord> {
        let zsks: Vec<ResourceRecord> = self
            .dnskeys
            .iter()
            .filter(|k| matches!(&k.rdata, RData::DNSKEY(d) if !d.is_ksk()))
            .cloned()
            .collect();
        if zsks.is_empty() {
            self.dnskeys.clone()
        } else {
            zsks
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TrustChain {
    pub links: Vec<ChainLink>,
    pub terminal: Vec<ResourceRecord>,
    /// Every record that took part in a verification step.
    pub consumed: Vec<ResourceRecord>,
}

/// Walks DS → KSK → ZSK links from the anchor to `target`/`rtype`.
pub fn build_trust_chain(
    target: &DomainName,
    rtype: RecordType,
    anchor: &TrustAnchor,
    fetch: &mut dyn ZoneFetcher,
    clock: u32,
) -> (TrustChain, ValidationResult) {
    let mut chain = TrustChain::default();
    let result = walk(target, rtype, anchor, fetch, clock, &mut chain);
    (chain, result)
}

fn walk(
    target: &DomainName,
    rtype: RecordType,
    anchor: &TrustAnchor,
    fetch: &mut dyn ZoneFetcher,
    clock: u32,
    chain: &mut TrustChain,
) -> ValidationResult {
    use ValidationResult::{Bogus, Insecure, Secure};
    if !target.is_subdomain_of(&anchor.zone) {
        return Bogus(BogusReason::ChainBreak);
    }
    let mut link = match fetch_keys(
        &anchor.zone,
        KeyAuthority::Anchor(anchor.key.clone()),
        fetch,
        clock,
        chain,
    ) {
        Ok(l) => l,
        Err(r) => return Bogus(r),
    };
    chain.links.push(link.clone());

    for _ in 0..=target.label_count() {
        let zone = link.zone.clone();
        let Ok(resp) = fetch.query(&zone, target, rtype) else {
            return Bogus(BogusReason::ChainFetch);
        };
        let zsks = link.zone_signing_keys();

        let rrset: Vec<ResourceRecord> = resp
            .answer
            .iter()
            .filter(|rr| &rr.owner == target && rr.rtype() == rtype)
            .cloned()
            .collect();
        if !rrset.is_empty() {
            let sigs: Vec<ResourceRecord> = resp
                .answer
                .iter()
                .filter(|rr| &rr.owner == target && rr.covered_type() == Some(rtype))
                .cloned()
                .collect();
            let keys = if rtype == RecordType::DNSKEY && target == &zone {
                link.dnskeys.clone()
            } else {
                zsks
            };
            chain.consumed.extend(rrset.iter().cloned());
            chain.consumed.extend(sigs.iter().cloned());
            chain.terminal = rrset.clone();
            return verify_rrset(&rrset, &sigs, &keys, clock);
        }

        if resp.is_referral() {
            let Some(child) = resp.referral_zone().cloned() else {
                return Bogus(BogusReason::ChainBreak);
            };
            if !child.is_strict_subdomain_of(&zone) || !target.is_subdomain_of(&child) {
                return Bogus(BogusReason::ChainBreak);
            }
            let ds: Vec<ResourceRecord> = resp
                .authority
                .iter()
                .filter(|rr| rr.owner == child && rr.rtype() == RecordType::DS)
                .cloned()
                .collect();
            if ds.is_empty() {
                chain
                    .consumed
                    .extend(resp.authority.iter().filter(|rr| is_denial_record(rr)).cloned());
                let verdict = verify_nsec3_denial(&resp, target, &zone, None, &zsks, clock);
                return match verdict.result {
                    Insecure => Insecure,
                    Secure => Bogus(BogusReason::DenialMismatch),
                    b => b,
                };
            }
            let sigs: Vec<ResourceRecord> = resp
                .authority
                .iter()
                .filter(|rr| rr.owner == child && rr.covered_type() == Some(RecordType::DS))
                .cloned()
                .collect();
            chain.consumed.extend(ds.iter().cloned());
            chain.consumed.extend(sigs.iter().cloned());
            if let Bogus(r) = verify_rrset(&ds, &sigs, &zsks, clock) {
                return Bogus(r);
            }
            link = match fetch_keys(&child, KeyAuthority::Ds(ds.clone()), fetch, clock, chain) {
                Ok(l) => l,
                Err(r) => return Bogus(r),
            };
            chain.links.push(link.clone());
            continue;
        }

        if matches!(resp.rcode, ResponseCode::NxDomain | ResponseCode::NoError) && resp.answer.is_empty() {
            chain
                .consumed
                .extend(resp.authority.iter().filter(|rr| is_denial_record(rr)).cloned());
            let verdict = verify_nsec3_denial(&resp, target, &zone, None, &zsks, clock);
            return verdict.result;
        }
        return Bogus(BogusReason::ChainFetch);
    }
    Bogus(BogusReason::ChainBreak)
}

fn is_denial_record(rr: &ResourceRecord) -> bool {
    matches!(rr.rtype(), RecordType::NSEC3 | RecordType::SOA)
        || matches!(rr.covered_type(), Some(RecordType::NSEC3 | RecordType::SOA))
}

fn fetch_keys(
    zone: &DomainName,
    trust: KeyAuthority,
    fetch: &mut dyn ZoneFetcher,
    clock: u32,
    chain: &mut TrustChain,
) -> Result<ChainLink, BogusReason> {
    let resp = fetch
        .query(zone, zone, RecordType::DNSKEY)
        .map_err(|_| BogusReason::ChainFetch)?;
    chain.consumed.extend(
        resp.answer
            .iter()
            .filter(|rr| {
                &rr.owner == zone && (rr.rtype() == RecordType::DNSKEY || rr.covered_type() == Some(RecordType::DNSKEY))
            })
            .cloned(),
    );
    verify_dnskey_response(zone, &trust, &resp, clock)
}
