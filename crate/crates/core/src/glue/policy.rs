//! Historical glue policies and NS target classification.

use serde::Serialize;
use thiserror::Error;

use crate::name::DomainName;
use crate::zone::{RecordClass, Zone};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum NsTargetClass {
    /// Target at or below the delegated child apex.
    InChildBailiwick,
    /// Target below the parent apex but outside the child.
    BelowParentOutsideChild,
    External,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum GluePolicy {
    /// Glue only for servers inside the delegated child.
    Narrow,
    /// Glue for servers anywhere below the delegating parent.
    Moderate,
    /// Glue for every server.
    Mandatory,
}

impl GluePolicy {
    pub const ALL: [GluePolicy; 3] = [GluePolicy::Narrow, GluePolicy::Moderate, GluePolicy::Mandatory];
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{child} is not strictly below {parent}")]
pub struct NotBelowParent {
    pub parent: DomainName,
    pub child: DomainName,
}

pub fn classify_ns_target(
    parent_apex: &DomainName,
    child_apex: &DomainName,
    ns_target: &DomainName,
) -> Result<NsTargetClass, NotBelowParent> {
    if !child_apex.is_strict_subdomain_of(parent_apex) {
        return Err(NotBelowParent {
            parent: parent_apex.clone(),
            child: child_apex.clone(),
        });
    }
    Ok(if ns_target.is_subdomain_of(child_apex) {
        NsTargetClass::InChildBailiwick
    } else if ns_target.is_subdomain_of(parent_apex) {
        NsTargetClass::BelowParentOutsideChild
    } else {
        NsTargetClass::External
    })
}

pub fn glue_allowed(policy: GluePolicy, class: NsTargetClass) -> bool {
    match policy {
        GluePolicy::Narrow => class == NsTargetClass::InChildBailiwick,
        GluePolicy::Moderate => class != NsTargetClass::External,
        GluePolicy::Mandatory => true,
    }
}

/// Indices (into `zone.records()`) of glue records the policy permits: an
/// address record qualifies when it serves some delegation of the zone whose
/// target class the policy allows.
pub fn allowed_glue(zone: &Zone, policy: GluePolicy) -> Vec<usize> {
    let delegations = zone.delegations();
    zone.records()
        .iter()
        .enumerate()
        .filter(|(_, rr)| rr.rtype().is_address() && zone.classify(rr) == RecordClass::Glue)
        .filter(|(_, rr)| {
            delegations.iter().any(|d| {
                d.targets.contains(&rr.owner)
                    && classify_ns_target(zone.apex(), &d.child, &rr.owner).is_ok_and(|c| glue_allowed(policy, c))
            })
        })
        .map(|(i, _)| i)
        .collect()
}
