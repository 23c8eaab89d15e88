//! Glue tamper resistance and the security taxonomy of glue records.

use serde::Serialize;

use super::convert::{check_convertibility, ConvertError};
use super::corpus::SignedCorpus;
use super::oracle::ZoneOracle;
use crate::name::DomainName;
use crate::rr::ResourceRecord;
use crate::zone::enclosing_zone;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VulnerabilityReason {
    UnsignedAuthority,
    SignedInsecure,
    /// The authoritative zone is not in the corpus, or has no data for the owner.
    Unverifiable,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "kebab-case")]
pub enum TamperVerdict {
    Vulnerable(VulnerabilityReason),
    TamperResistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TamperResistance {
    pub verdict: TamperVerdict,
    /// 1: authority outside the residing zone's domain; 2: the residing zone
    /// itself; 3: inside another child; 4: inside the child the glue serves.
    pub location_case: u8,
    pub authority: Option<DomainName>,
}

impl TamperResistance {
    pub fn is_vulnerable(&self) -> bool {
        matches!(self.verdict, TamperVerdict::Vulnerable(_))
    }
}

/// Decides whether a glue record hosted in `residing` can be tampered with
/// despite DNSSEC validation of its authoritative counterpart. The glue
/// pertains to the child whose delegation lists its owner.
pub fn analyze_glue_tamper_resistance(
    glue: &ResourceRecord,
    residing: &DomainName,
    sc: &SignedCorpus,
) -> TamperResistance {
    analyze_glue_tamper_resistance_for(glue, residing, None, sc)
}

/// As [`analyze_glue_tamper_resistance`], judged for the delegation of
/// `delegation` when given.
pub fn analyze_glue_tamper_resistance_for(
    glue: &ResourceRecord,
    residing: &DomainName,
    delegation: Option<&DomainName>,
    sc: &SignedCorpus,
) -> TamperResistance {
    let owner = &glue.owner;
    let enclosing = enclosing_zone(owner, &sc.corpus)
        .filter(|e| e.cut.is_none())
        .map(|e| e.zone);
    let authority = enclosing.map(|z| z.apex().clone());

    let location_case = if authority.as_ref() == Some(residing) {
        2
    } else {
        let below = match &authority {
            Some(a) => a.is_strict_subdomain_of(residing),
            None => owner.is_strict_subdomain_of(residing),
        };
        match sc.corpus.get(residing) {
            Some(rz) if below => match rz.cut_covering(owner).and_then(|cut| rz.delegation(cut)) {
                Some(d) if d.targets.contains(owner) && delegation.is_none_or(|c| c == &d.child) => 4,
                _ => 3,
            },
            _ => 1,
        }
    };
    if location_case == 2 {
        return TamperResistance {
            verdict: TamperVerdict::TamperResistant,
            location_case,
            authority,
        };
    }
    let verdict = match enclosing {
        None => TamperVerdict::Vulnerable(VulnerabilityReason::Unverifiable),
        Some(z) => match sc.signed.get(z.apex()) {
            None => TamperVerdict::Vulnerable(VulnerabilityReason::UnsignedAuthority),
            Some(sz) => {
                let mut oracle = ZoneOracle::new(&sz.zone);
                match check_convertibility(sz, owner, &mut oracle) {
                    Ok(c) if c.is_convertible() => TamperVerdict::Vulnerable(VulnerabilityReason::SignedInsecure),
                    Ok(_) => TamperVerdict::TamperResistant,
                    // The owner is the apex itself: nothing above it to convert.
                    Err(ConvertError::NotBelowApex { .. }) => TamperVerdict::TamperResistant,
                    Err(_) => TamperVerdict::Vulnerable(VulnerabilityReason::Unverifiable),
                }
            }
        },
    };
    TamperResistance {
        verdict,
        location_case,
        authority,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum GlueSecurityClass {
    SelfContained,
    SignedCrossDomain,
    UnsignedCrossDomain,
    SignedCrossSubdomain,
    UnsignedCrossSubdomain,
}

impl GlueSecurityClass {
    pub const ALL: [GlueSecurityClass; 5] = [
        GlueSecurityClass::SelfContained,
        GlueSecurityClass::SignedCrossDomain,
        GlueSecurityClass::UnsignedCrossDomain,
        GlueSecurityClass::SignedCrossSubdomain,
        GlueSecurityClass::UnsignedCrossSubdomain,
    ];

    pub fn label(self) -> &'static str {
        match self {
            GlueSecurityClass::SelfContained => "Self-contained",
            GlueSecurityClass::SignedCrossDomain => "Signed cross-domain",
            GlueSecurityClass::UnsignedCrossDomain => "Unsigned cross-domain",
            GlueSecurityClass::SignedCrossSubdomain => "Signed cross-subdomain",
            GlueSecurityClass::UnsignedCrossSubdomain => "Unsigned cross-subdomain",
        }
    }
}

fn top_level(name: &DomainName) -> Option<DomainName> {
    name.ancestor_with_labels(1)
}

/// Glue records the parent of `domain` serves for its NS targets.
pub fn domain_glue(domain: &DomainName, sc: &SignedCorpus) -> Vec<(DomainName, ResourceRecord)> {
    let Some(parent) = sc.corpus.delegating_zone(domain) else {
        return Vec::new();
    };
    let targets = parent.ns_targets(domain);
    parent
        .glue()
        .filter(|rr| rr.rtype().is_address() && targets.contains(&rr.owner))
        .map(|rr| (parent.apex().clone(), rr.clone()))
        .collect()
}

/// Whether the zone authoritative for `owner` is signed.
fn authority_signed(owner: &DomainName, sc: &SignedCorpus) -> bool {
    enclosing_zone(owner, &sc.corpus).is_some_and(|e| e.cut.is_none() && sc.is_signed(e.zone.apex()))
}

pub fn classify_glue_security(domain: &DomainName, sc: &SignedCorpus) -> Vec<(ResourceRecord, GlueSecurityClass)> {
    domain_glue(domain, sc)
        .into_iter()
        .map(|(_, rr)| {
            let class = if rr.owner.is_subdomain_of(domain) {
                GlueSecurityClass::SelfContained
            } else {
                let signed = authority_signed(&rr.owner, sc);
                let same_tld = top_level(&rr.owner) == top_level(domain);
                match (same_tld, signed) {
                    (false, true) => GlueSecurityClass::SignedCrossDomain,
                    (false, false) => GlueSecurityClass::UnsignedCrossDomain,
                    (true, true) => GlueSecurityClass::SignedCrossSubdomain,
                    (true, false) => GlueSecurityClass::UnsignedCrossSubdomain,
                }
            };
            (rr, class)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Forgeability {
    pub glue_forgeable: bool,
    pub zone_forgeable: bool,
    pub reasons: Vec<String>,
}

/// Glue forgeability is the OR over the domain's glue records; zone
/// forgeability adds the domain's own Opt-Out flag. `None` for unsigned
/// domains.
pub fn assess_forgeability(domain: &DomainName, sc: &SignedCorpus) -> Option<Forgeability> {
    let sz = sc.signed.get(domain)?;
    let mut reasons = Vec::new();
    for (residing, rr) in domain_glue(domain, sc) {
        let t = analyze_glue_tamper_resistance_for(&rr, &residing, Some(domain), sc);
        if let TamperVerdict::Vulnerable(reason) = &t.verdict {
            let why = match reason {
                VulnerabilityReason::UnsignedAuthority => "unsigned",
                VulnerabilityReason::SignedInsecure => "signed insecure",
                VulnerabilityReason::Unverifiable => "unverifiable",
            };
            reasons.push(format!(
                "glue {} in {} is {} (case {})",
                rr.owner, residing, why, t.location_case
            ));
        }
    }
    let glue_forgeable = !reasons.is_empty();
    let zone_forgeable = glue_forgeable && sz.opt_out;
    if zone_forgeable {
        reasons.push(format!("{domain} sets NSEC3 Opt-Out"));
    }
    Some(Forgeability {
        glue_forgeable,
        zone_forgeable,
        reasons,
    })
}
