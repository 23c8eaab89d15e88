//! Authoritative answers computed from one zone's data, including NSEC3
//! denial material when the zone is signed.

use crate::dnssec::nsec3::{nsec3_hash, Nsec3Params, Nsec3Record};
use crate::message::{DnsMessage, Flags, Question, ResponseCode};
use crate::name::DomainName;
use crate::rr::{RData, RecordType, ResourceRecord};
use crate::zone::{RecordClass, Zone};

/// Answers `qname`/`qtype` from `zone` the way an authoritative server would.
pub fn answer(zone: &Zone, qname: &DomainName, qtype: RecordType) -> DnsMessage {
    let mut msg = DnsMessage {
        flags: Flags {
            response: true,
            ..Flags::default()
        },
        question: Some(Question::new(qname.clone(), qtype)),
        ..Default::default()
    };
    if !qname.is_subdomain_of(zone.apex()) {
        msg.rcode = ResponseCode::Refused;
        return msg;
    }
    let denial = DenialIndex::new(zone);

    if let Some(cut) = zone.cut_covering(qname) {
        if !(cut == qname && qtype == RecordType::DS) {
            referral(zone, cut, &denial, &mut msg);
            return msg;
        }
    }

    msg.flags.authoritative = true;
    let rrset: Vec<ResourceRecord> = zone
        .rrset(qname, qtype)
        .into_iter()
        .filter(|rr| zone.classify(rr) == RecordClass::Authoritative)
        .cloned()
        .collect();
    if !rrset.is_empty() {
        msg.answer.extend(rrset.iter().cloned());
        msg.answer.extend(zone.rrsigs(qname, qtype).into_iter().cloned());
        if qtype == RecordType::NS {
            for rr in &rrset {
                if let Some(t) = rr.ns_target() {
                    msg.additional.extend(zone.addresses(t).into_iter().cloned());
                }
            }
        }
        return msg;
    }

    add_soa(zone, &mut msg);
    if name_exists(zone, qname) {
        if let Some(d) = &denial {
            if d.matching(qname).is_some() {
                d.push_matching(zone, qname, &mut msg);
            } else {
                // Opt-Out delegation asked for DS.
                d.push_closest_encloser(zone, qname, &mut msg, false);
            }
        }
    } else {
        msg.rcode = ResponseCode::NxDomain;
        if let Some(d) = &denial {
            d.push_nxdomain_proof(zone, qname, &mut msg);
        }
    }
    msg
}

fn referral(zone: &Zone, cut: &DomainName, denial: &Option<DenialIndex>, msg: &mut DnsMessage) {
    let ns: Vec<&ResourceRecord> = zone.rrset(cut, RecordType::NS);
    msg.authority.extend(ns.iter().map(|rr| (*rr).clone()));
    let ds = zone.rrset(cut, RecordType::DS);
    if !ds.is_empty() {
        msg.authority.extend(ds.into_iter().cloned());
        msg.authority
            .extend(zone.rrsigs(cut, RecordType::DS).into_iter().cloned());
    } else if let Some(d) = denial {
        if d.matching(cut).is_some() {
            d.push_matching(zone, cut, msg);
        } else {
            d.push_closest_encloser(zone, cut, msg, false);
        }
    }
    for rr in ns {
        if let Some(t) = rr.ns_target() {
            for a in zone.addresses(t) {
                if !msg.additional.contains(a) {
                    msg.additional.push(a.clone());
                }
            }
        }
    }
}

fn add_soa(zone: &Zone, msg: &mut DnsMessage) {
    if let Some(soa) = zone.soa() {
        msg.authority.push(soa.clone());
        msg.authority
            .extend(zone.rrsigs(zone.apex(), RecordType::SOA).into_iter().cloned());
    }
}

/// A name exists when it owns authoritative data or a delegation. Empty
/// non-terminals do not exist.
pub fn name_exists(zone: &Zone, name: &DomainName) -> bool {
    zone.records().iter().any(|rr| {
        &rr.owner == name
            && zone.classify(rr) != RecordClass::Glue
            && rr.rtype() != RecordType::NSEC3
            && rr.covered_type() != Some(RecordType::NSEC3)
    })
}

/// The zone's hashed chain, if it has one.
struct DenialIndex {
    params: Nsec3Params,
    chain: Vec<(Nsec3Record, ResourceRecord)>,
}

impl DenialIndex {
    fn new(zone: &Zone) -> Option<DenialIndex> {
        let param = zone
            .rrset(zone.apex(), RecordType::NSEC3PARAM)
            .into_iter()
            .find_map(|rr| match &rr.rdata {
                RData::NSEC3PARAM(p) => Some(Nsec3Params {
                    algorithm: p.hash_algorithm,
                    iterations: p.iterations,
                    salt: p.salt.clone(),
                }),
                _ => None,
            })?;
        let chain: Vec<(Nsec3Record, ResourceRecord)> = zone
            .records()
            .iter()
            .filter_map(|rr| Nsec3Record::from_rr(rr, zone.apex()).map(|r| (r, rr.clone())))
            .filter(|(r, _)| r.params == param)
            .collect();
        if chain.is_empty() {
            return None;
        }
        Some(DenialIndex { params: param, chain })
    }

    fn hash(&self, name: &DomainName) -> Vec<u8> {
        nsec3_hash(name, &self.params).map(|h| h.to_vec()).unwrap_or_default()
    }

    fn matching(&self, name: &DomainName) -> Option<&(Nsec3Record, ResourceRecord)> {
        let h = self.hash(name);
        self.chain.iter().find(|(r, _)| r.matches(&h))
    }

    fn covering(&self, name: &DomainName) -> Option<&(Nsec3Record, ResourceRecord)> {
        let h = self.hash(name);
        self.chain.iter().find(|(r, _)| r.covers(&h))
    }

    fn push(zone: &Zone, entry: &(Nsec3Record, ResourceRecord), msg: &mut DnsMessage) {
        let rr = &entry.1;
        if msg.authority.contains(rr) {
            return;
        }
        msg.authority.push(rr.clone());
        msg.authority
            .extend(zone.rrsigs(&rr.owner, RecordType::NSEC3).into_iter().cloned());
    }

    fn push_matching(&self, zone: &Zone, name: &DomainName, msg: &mut DnsMessage) {
        if let Some(e) = self.matching(name) {
            DenialIndex::push(zone, e, msg);
        }
    }

    /// Closest encloser match plus next-closer cover, and optionally the
    /// wildcard cover. Returns the closest encloser.
    fn push_closest_encloser(
        &self,
        zone: &Zone,
        name: &DomainName,
        msg: &mut DnsMessage,
        wildcard: bool,
    ) -> Option<DomainName> {
        let mut next_closer = name.clone();
        for ancestor in name.ancestors().skip(1) {
            if !ancestor.is_subdomain_of(zone.apex()) {
                break;
            }
            if let Some(m) = self.matching(&ancestor) {
                DenialIndex::push(zone, m, msg);
                if let Some(c) = self.covering(&next_closer) {
                    DenialIndex::push(zone, c, msg);
                }
                if wildcard {
                    if let Some(w) = self.covering(&ancestor.wildcard_child()) {
                        DenialIndex::push(zone, w, msg);
                    }
                }
                return Some(ancestor);
            }
            next_closer = ancestor;
        }
        None
    }

    fn push_nxdomain_proof(&self, zone: &Zone, name: &DomainName, msg: &mut DnsMessage) {
        self.push_closest_encloser(zone, name, msg, true);
    }
}
