//! Bailiwick-checking policies applied to received responses.

use std::fmt;
use std::net::IpAddr;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::cache::TrustRank;
use crate::message::{DnsMessage, ResponseCode};
use crate::name::DomainName;
use crate::rr::{RecordType, ResourceRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BailiwickPolicy {
    BindLike,
    UnboundLike,
    MaraDnsLike,
    Improved,
    DnssecAware,
}

impl BailiwickPolicy {
    pub const ALL: [BailiwickPolicy; 5] = [
        BailiwickPolicy::BindLike,
        BailiwickPolicy::UnboundLike,
        BailiwickPolicy::MaraDnsLike,
        BailiwickPolicy::Improved,
        BailiwickPolicy::DnssecAware,
    ];

    /// Delegations and glue are only used after their counterparts are fetched.
    pub fn verifies_glue(self) -> bool {
        matches!(self, BailiwickPolicy::Improved | BailiwickPolicy::DnssecAware)
    }
}

impl fmt::Display for BailiwickPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for BailiwickPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        Ok(match norm.as_str() {
            "bindlike" | "bind" => BailiwickPolicy::BindLike,
            "unboundlike" | "unbound" => BailiwickPolicy::UnboundLike,
            "maradnslike" | "maradns" | "mara" => BailiwickPolicy::MaraDnsLike,
            "improved" => BailiwickPolicy::Improved,
            "dnssecaware" | "dnssec" => BailiwickPolicy::DnssecAware,
            _ => return Err(format!("unknown policy `{s}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolicyError {
    #[error("referral carries no NS record usable from {0}")]
    MalformedReferral(DomainName),
    #[error("no in-bailiwick referral left for {0}")]
    BailiwickEmpty(DomainName),
}

/// A delegation the resolver may follow.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DelegationInfo {
    pub child: DomainName,
    pub targets: Vec<DomainName>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SanitizedResponse {
    pub cacheable: Vec<(ResourceRecord, TrustRank)>,
    pub follow_up_queries: Vec<(DomainName, RecordType, String)>,
    pub synthesized_mappings: Vec<(DomainName, IpAddr)>,
    pub rejected: Vec<(ResourceRecord, String)>,
    /// Accepted answer records (owner and type as asked, plus their RRSIGs).
    pub answer: Vec<ResourceRecord>,
    pub delegation: Option<DelegationInfo>,
    /// Glue accepted only until its authoritative counterpart is fetched.
    pub provisional_glue: Vec<ResourceRecord>,
    /// DS, NSEC3, SOA and RRSIG records kept for validation.
    pub dnssec: Vec<ResourceRecord>,
}

fn is_dnssec_material(rr: &ResourceRecord) -> bool {
    matches!(
        rr.rtype(),
        RecordType::DS | RecordType::NSEC3 | RecordType::RRSIG | RecordType::SOA
    )
}

/// Sanitizes `response`, received from a server for `residing`, under `policy`.
pub fn apply_bailiwick_policy(
    policy: BailiwickPolicy,
    residing: &DomainName,
    query: (&DomainName, RecordType),
    response: &DnsMessage,
) -> Result<SanitizedResponse, PolicyError> {
    let (qname, qtype) = query;
    let mut out = SanitizedResponse::default();
    let in_bailiwick = |n: &DomainName| n.is_subdomain_of(residing);

    let answer_rank = if response.flags.authoritative {
        TrustRank::AuthoritativeAnswer
    } else {
        TrustRank::GlueAdditional
    };
    for rr in &response.answer {
        let wanted = &rr.owner == qname && (rr.rtype() == qtype || rr.covered_type() == Some(qtype));
        if wanted && in_bailiwick(&rr.owner) {
            out.answer.push(rr.clone());
            if rr.rtype() == qtype {
                out.cacheable.push((rr.clone(), answer_rank));
            }
        } else {
            out.rejected.push((rr.clone(), "unrelated answer".into()));
        }
    }

    let is_referral = response.rcode == ResponseCode::NoError
        && out.answer.is_empty()
        && response
            .authority
            .iter()
            .any(|rr| rr.rtype() == RecordType::NS && &rr.owner != residing);

    // NS owners that may legitimately start a delegation from here.
    let delegable = |owner: &DomainName| qname.is_subdomain_of(owner) && owner.is_strict_subdomain_of(residing);

    match policy {
        BailiwickPolicy::BindLike => {
            let mut child: Option<DelegationInfo> = None;
            for rr in &response.authority {
                if rr.rtype() != RecordType::NS {
                    continue;
                }
                let ok = qname.is_subdomain_of(&rr.owner) && rr.owner.is_subdomain_of(residing);
                if !ok {
                    out.rejected.push((rr.clone(), "NS owner fails bailiwick check".into()));
                    continue;
                }
                let rank = if &rr.owner == residing && response.flags.authoritative {
                    TrustRank::AuthoritativeAuthority
                } else {
                    TrustRank::GlueAdditional
                };
                out.cacheable.push((rr.clone(), rank));
                if is_referral && &rr.owner != residing {
                    add_target(&mut child, rr);
                }
            }
            for rr in &response.additional {
                if !rr.rtype().is_address() {
                    continue;
                }
                if in_bailiwick(&rr.owner) {
                    out.cacheable.push((rr.clone(), TrustRank::GlueAdditional));
                } else {
                    out.rejected
                        .push((rr.clone(), "additional record outside residing domain".into()));
                    out.follow_up_queries
                        .push((rr.owner.clone(), rr.rtype(), "out-of-bailiwick glue".into()));
                }
            }
            if is_referral && child.is_none() {
                return Err(PolicyError::MalformedReferral(residing.clone()));
            }
            out.delegation = child;
        }
        BailiwickPolicy::UnboundLike => {
            let mut child: Option<DelegationInfo> = None;
            for rr in &response.authority {
                if !in_bailiwick(&rr.owner) {
                    out.rejected.push((rr.clone(), "out of bailiwick".into()));
                    continue;
                }
                if rr.rtype() != RecordType::NS {
                    continue;
                }
                let target_ok = rr.ns_target().is_some_and(&in_bailiwick);
                let owner_ok = qname.is_subdomain_of(&rr.owner);
                if !target_ok || !owner_ok {
                    out.rejected.push((rr.clone(), "out-of-bailiwick referral".into()));
                    continue;
                }
                let rank = if &rr.owner == residing && response.flags.authoritative {
                    TrustRank::AuthoritativeAuthority
                } else {
                    TrustRank::GlueAdditional
                };
                out.cacheable.push((rr.clone(), rank));
                if is_referral && &rr.owner != residing {
                    add_target(&mut child, rr);
                }
            }
            for rr in &response.additional {
                if !rr.rtype().is_address() {
                    continue;
                }
                if in_bailiwick(&rr.owner) {
                    out.cacheable.push((rr.clone(), TrustRank::GlueAdditional));
                } else {
                    out.rejected.push((rr.clone(), "out of bailiwick".into()));
                }
            }
            if is_referral && child.is_none() {
                return Err(PolicyError::BailiwickEmpty(residing.clone()));
            }
            out.delegation = child;
        }
        BailiwickPolicy::MaraDnsLike => {
            for rr in &response.additional {
                if let Some(addr) = rr.address() {
                    out.synthesized_mappings.push((rr.owner.clone(), addr));
                }
            }
            let mut child: Option<DelegationInfo> = None;
            for rr in &response.authority {
                let Some(target) = rr.ns_target() else {
                    continue;
                };
                for g in response.additional.iter().filter(|g| &g.owner == target) {
                    if let Some(addr) = g.address() {
                        out.synthesized_mappings.push((rr.owner.clone(), addr));
                    }
                }
                if is_referral && qname.is_subdomain_of(&rr.owner) && &rr.owner != residing {
                    add_target(&mut child, rr);
                }
            }
            if is_referral && child.is_none() {
                return Err(PolicyError::MalformedReferral(residing.clone()));
            }
            out.delegation = child;
        }
        BailiwickPolicy::Improved | BailiwickPolicy::DnssecAware => {
            let mut child: Option<DelegationInfo> = None;
            for rr in &response.authority {
                if rr.rtype() == RecordType::NS {
                    if is_referral && delegable(&rr.owner) {
                        // Cached only once the referral has been checked.
                        out.cacheable.push((rr.clone(), TrustRank::GlueAdditional));
                        add_target(&mut child, rr);
                    } else {
                        out.rejected
                            .push((rr.clone(), "NS not part of a usable delegation".into()));
                    }
                } else if policy == BailiwickPolicy::DnssecAware && is_dnssec_material(rr) && in_bailiwick(&rr.owner) {
                    out.dnssec.push(rr.clone());
                }
            }
            if policy == BailiwickPolicy::DnssecAware {
                out.dnssec.extend(
                    response
                        .answer
                        .iter()
                        .filter(|rr| rr.rtype() == RecordType::RRSIG && &rr.owner == qname)
                        .cloned(),
                );
                out.dnssec.dedup();
            }
            for rr in &response.additional {
                if !rr.rtype().is_address() {
                    continue;
                }
                let is_glue = child.as_ref().is_some_and(|c| c.targets.contains(&rr.owner));
                if is_glue {
                    out.provisional_glue.push(rr.clone());
                    let fetch = (rr.owner.clone(), RecordType::A, "authoritative counterpart".to_string());
                    if !out.follow_up_queries.contains(&fetch) {
                        out.follow_up_queries.push(fetch);
                    }
                } else {
                    out.rejected.push((rr.clone(), "not glue for the delegation".into()));
                }
            }
            if is_referral && child.is_none() {
                return Err(PolicyError::MalformedReferral(residing.clone()));
            }
            out.delegation = child;
        }
    }
    Ok(out)
}

fn add_target(child: &mut Option<DelegationInfo>, rr: &ResourceRecord) {
    let Some(target) = rr.ns_target() else { return };
    match child {
        None => {
            *child = Some(DelegationInfo {
                child: rr.owner.clone(),
                targets: vec![target.clone()],
            })
        }
        Some(c) if c.child == rr.owner => {
            if !c.targets.contains(target) {
                c.targets.push(target.clone());
            }
        }
        Some(_) => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::message::Flags;
    use crate::name::name;
    use crate::rr::{record, RData};

    fn referral(ns: &[(&str, &str)], glue: &[(&str, &str)]) -> DnsMessage {
        DnsMessage {
            flags: Flags {
                response: true,
                ..Flags::default()
            },
            authority: ns.iter().map(|(o, t)| record(o, 3600, RData::NS(name(t)))).collect(),
            additional: glue
                .iter()
                .map(|(o, a)| record(o, 3600, RData::A(a.parse().unwrap())))
                .collect(),
            ..Default::default()
        }
    }

    fn sample_referral() -> DnsMessage {
        referral(&[("foo.com", "ns.foo.net")], &[("ns.foo.net", "192.0.2.2")])
    }

    #[test]
    fn bind_rejects_out_of_bailiwick_glue() {
        let s = apply_bailiwick_policy(
            BailiwickPolicy::BindLike,
            &name("com"),
            (&name("www.foo.com"), RecordType::A),
            &sample_referral(),
        )
        .unwrap();
        assert_eq!(s.rejected.len(), 1);
        assert_eq!(s.rejected[0].0.owner, name("ns.foo.net"));
        assert_eq!(
            s.follow_up_queries,
            vec![(name("ns.foo.net"), RecordType::A, "out-of-bailiwick glue".to_string())]
        );
        assert_eq!(s.delegation.unwrap().child, name("foo.com"));
        assert!(s
            .cacheable
            .iter()
            .all(|(rr, r)| rr.rtype() == RecordType::NS && *r == TrustRank::GlueAdditional));
    }

    #[test]
    fn mara_accepts_any_mapping() {
        let s = apply_bailiwick_policy(
            BailiwickPolicy::MaraDnsLike,
            &name("com"),
            (&name("www.foo.com"), RecordType::A),
            &sample_referral(),
        )
        .unwrap();
        assert!(s
            .synthesized_mappings
            .contains(&(name("foo.com"), "192.0.2.2".parse().unwrap())));
        assert!(s.cacheable.is_empty());
    }

    #[test]
    fn unbound_requires_in_bailiwick_referral() {
        let err = apply_bailiwick_policy(
            BailiwickPolicy::UnboundLike,
            &name("com"),
            (&name("www.foo.com"), RecordType::A),
            &sample_referral(),
        )
        .unwrap_err();
        assert_eq!(err, PolicyError::BailiwickEmpty(name("com")));

        let ok = referral(
            &[("foo.com", "ns.foo.com"), ("foo.com", "ns.foo.net")],
            &[("ns.foo.com", "192.0.1.1"), ("ns.foo.net", "192.0.2.2")],
        );
        let s = apply_bailiwick_policy(
            BailiwickPolicy::UnboundLike,
            &name("com"),
            (&name("www.foo.com"), RecordType::A),
            &ok,
        )
        .unwrap();
        assert_eq!(s.delegation.unwrap().targets, vec![name("ns.foo.com")]);
        assert_eq!(s.rejected.len(), 2);
    }

    #[test]
    fn improved_marks_glue_provisional() {
        let m = referral(&[("foo.com", "ns.foo.com")], &[("ns.foo.com", "192.0.1.1")]);
        let s = apply_bailiwick_policy(
            BailiwickPolicy::Improved,
            &name("com"),
            (&name("www.foo.com"), RecordType::A),
            &m,
        )
        .unwrap();
        assert_eq!(s.provisional_glue.len(), 1);
        assert_eq!(s.follow_up_queries[0].0, name("ns.foo.com"));
        assert!(s.cacheable.iter().all(|(rr, _)| rr.rtype() == RecordType::NS));
    }

    #[test]
    fn policy_names_parse() {
        for p in BailiwickPolicy::ALL {
            assert_eq!(p.to_string().parse::<BailiwickPolicy>().unwrap(), p);
        }
    }
}
