//! Zones, record classification at zone cuts, and corpus lookups.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::name::DomainName;
use crate::rr::{RData, RecordType, ResourceRecord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZoneError {
    #[error("record `{0}` lies outside zone {1}")]
    OutOfZone(String, DomainName),
    #[error("duplicate zone apex {0} in corpus")]
    DuplicateApex(DomainName),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum RecordClass {
    Authoritative,
    DelegationNs,
    Glue,
}

/// A delegation point inside a zone: the child apex and its NS targets in
/// source order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Delegation {
    pub child: DomainName,
    pub targets: Vec<DomainName>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Zone {
    apex: DomainName,
    records: Vec<ResourceRecord>,
    cuts: BTreeSet<DomainName>,
}

impl Zone {
    /// Builds a zone. Records must be at or below the apex, except address
    /// records, which may sit outside as glue for out-of-zone NS targets.
    pub fn new(apex: DomainName, records: Vec<ResourceRecord>) -> Result<Zone, ZoneError> {
        for rr in &records {
            check_in_zone(&apex, rr)?;
        }
        let cuts = compute_cuts(&apex, &records);
        Ok(Zone { apex, records, cuts })
    }

    pub fn empty(apex: DomainName) -> Zone {
        Zone {
            apex,
            records: Vec::new(),
            cuts: BTreeSet::new(),
        }
    }

    pub fn apex(&self) -> &DomainName {
        &self.apex
    }

    /// Records in source order.
    pub fn records(&self) -> &[ResourceRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Rebuilds the zone with the given records, keeping the apex.
    pub fn with_records(&self, records: Vec<ResourceRecord>) -> Result<Zone, ZoneError> {
        Zone::new(self.apex.clone(), records)
    }

    /// Same zone with every glue record removed.
    pub fn without_glue(&self) -> Zone {
        let kept = self
            .records
            .iter()
            .filter(|rr| self.classify(rr) != RecordClass::Glue)
            .cloned()
            .collect();
        Zone::new(self.apex.clone(), kept).expect("subset of a valid zone is valid")
    }

    /// Delegation points (owners of NS RRsets below the apex that are not
    /// themselves below another delegation point).
    pub fn cuts(&self) -> &BTreeSet<DomainName> {
        &self.cuts
    }

    /// The delegation point at or above `name`, if `name` is cut away from this zone.
    pub fn cut_covering(&self, name: &DomainName) -> Option<&DomainName> {
        name.ancestors()
            .take_while(|a| a != &self.apex)
            .find_map(|a| self.cuts.get(&a))
    }

    pub fn contains_name(&self, name: &DomainName) -> bool {
        name.is_subdomain_of(&self.apex)
    }

    pub fn classify(&self, rr: &ResourceRecord) -> RecordClass {
        if !rr.owner.is_subdomain_of(&self.apex) {
            return RecordClass::Glue;
        }
        match self.cut_covering(&rr.owner) {
            None => RecordClass::Authoritative,
            Some(cut) if cut == &rr.owner => match rr.rtype() {
                RecordType::NS => RecordClass::DelegationNs,
                RecordType::DS => RecordClass::Authoritative,
                RecordType::RRSIG if rr.covered_type() == Some(RecordType::DS) => RecordClass::Authoritative,
                _ => RecordClass::Glue,
            },
            Some(_) => RecordClass::Glue,
        }
    }

    pub fn authoritative(&self) -> impl Iterator<Item = &ResourceRecord> {
        self.records
            .iter()
            .filter(|rr| self.classify(rr) == RecordClass::Authoritative)
    }

    pub fn glue(&self) -> impl Iterator<Item = &ResourceRecord> {
        self.records.iter().filter(|rr| self.classify(rr) == RecordClass::Glue)
    }

    /// Delegations in canonical order of child apex.
    pub fn delegations(&self) -> Vec<Delegation> {
        self.cuts
            .iter()
            .map(|cut| Delegation {
                child: cut.clone(),
                targets: self.ns_targets(cut),
            })
            .collect()
    }

    pub fn delegation(&self, child: &DomainName) -> Option<Delegation> {
        self.cuts.get(child).map(|cut| Delegation {
            child: cut.clone(),
            targets: self.ns_targets(cut),
        })
    }

    /// NS targets at `owner`, deduplicated, in source order.
    pub fn ns_targets(&self, owner: &DomainName) -> Vec<DomainName> {
        let mut out: Vec<DomainName> = Vec::new();
        for rr in &self.records {
            if &rr.owner == owner {
                if let RData::NS(t) = &rr.rdata {
                    if !out.contains(t) {
                        out.push(t.clone());
                    }
                }
            }
        }
        out
    }

    /// All records with the given owner and type, in source order.
    pub fn rrset(&self, owner: &DomainName, rtype: RecordType) -> Vec<&ResourceRecord> {
        self.records
            .iter()
            .filter(|rr| &rr.owner == owner && rr.rtype() == rtype)
            .collect()
    }

    /// RRSIG records at `owner` covering `covered`.
    pub fn rrsigs(&self, owner: &DomainName, covered: RecordType) -> Vec<&ResourceRecord> {
        self.records
            .iter()
            .filter(|rr| &rr.owner == owner && rr.covered_type() == Some(covered))
            .collect()
    }

    /// A and AAAA records owned by `owner`.
    pub fn addresses(&self, owner: &DomainName) -> Vec<&ResourceRecord> {
        self.records
            .iter()
            .filter(|rr| &rr.owner == owner && rr.rtype().is_address())
            .collect()
    }

    pub fn soa(&self) -> Option<&ResourceRecord> {
        self.records
            .iter()
            .find(|rr| rr.owner == self.apex && rr.rtype() == RecordType::SOA)
    }

    /// Owner names holding authoritative data, plus delegation points, in
    /// canonical order. Empty non-terminals are not included.
    pub fn authoritative_names(&self) -> BTreeSet<DomainName> {
        self.records
            .iter()
            .filter(|rr| rr.owner.is_subdomain_of(&self.apex))
            .filter(|rr| match self.classify(rr) {
                RecordClass::Authoritative | RecordClass::DelegationNs => true,
                RecordClass::Glue => false,
            })
            .filter(|rr| !matches!(rr.rtype(), RecordType::NSEC3) && rr.covered_type() != Some(RecordType::NSEC3))
            .map(|rr| rr.owner.clone())
            .collect()
    }
}

fn check_in_zone(apex: &DomainName, rr: &ResourceRecord) -> Result<(), ZoneError> {
    if rr.owner.is_subdomain_of(apex) || rr.rtype().is_address() {
        Ok(())
    } else {
        Err(ZoneError::OutOfZone(rr.to_string(), apex.clone()))
    }
}

fn compute_cuts(apex: &DomainName, records: &[ResourceRecord]) -> BTreeSet<DomainName> {
    let owners: BTreeSet<DomainName> = records
        .iter()
        .filter(|rr| rr.rtype() == RecordType::NS && &rr.owner != apex && rr.owner.is_subdomain_of(apex))
        .map(|rr| rr.owner.clone())
        .collect();
    owners
        .iter()
        .filter(|o| {
            !owners
                .iter()
                .any(|other| other != *o && o.is_strict_subdomain_of(other))
        })
        .cloned()
        .collect()
}

/// A zone selected by [`enclosing_zone`], with the delegation point that cuts
/// the name away when the child zone is missing from the corpus.
#[derive(Debug, Clone, Copy)]
pub struct Enclosing<'a> {
    pub zone: &'a Zone,
    pub cut: Option<&'a DomainName>,
}

/// A set of zones with distinct apexes, kept in canonical order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    zones: BTreeMap<DomainName, Zone>,
}

impl Corpus {
    pub fn new(zones: impl IntoIterator<Item = Zone>) -> Result<Corpus, ZoneError> {
        let mut map = BTreeMap::new();
        for z in zones {
            let apex = z.apex().clone();
            if map.insert(apex.clone(), z).is_some() {
                return Err(ZoneError::DuplicateApex(apex));
            }
        }
        Ok(Corpus { zones: map })
    }

    pub fn zones(&self) -> impl Iterator<Item = &Zone> {
        self.zones.values()
    }

    pub fn len(&self) -> usize {
        self.zones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zones.is_empty()
    }

    pub fn get(&self, apex: &DomainName) -> Option<&Zone> {
        self.zones.get(apex)
    }

    pub fn insert(&mut self, zone: Zone) -> Option<Zone> {
        self.zones.insert(zone.apex().clone(), zone)
    }

    pub fn enclosing_zone(&self, name: &DomainName) -> Option<Enclosing<'_>> {
        enclosing_zone(name, self)
    }

    /// The zone holding the delegation NS RRset for `child`.
    pub fn delegating_zone(&self, child: &DomainName) -> Option<&Zone> {
        let parent = child.parent()?;
        let found = parent
            .ancestors()
            .filter_map(|a| self.zones.get(&a))
            .find(|z| z.cuts().contains(child));
        found
    }

    /// Every zone with its glue removed.
    pub fn without_glue(&self) -> Corpus {
        Corpus {
            zones: self.zones.iter().map(|(k, z)| (k.clone(), z.without_glue())).collect(),
        }
    }

    /// All names appearing as owners or NS targets, in canonical order.
    pub fn all_names(&self) -> BTreeSet<DomainName> {
        let mut out = BTreeSet::new();
        for z in self.zones() {
            out.insert(z.apex().clone());
            for rr in z.records() {
                out.insert(rr.owner.clone());
                if let Some(t) = rr.ns_target() {
                    out.insert(t.clone());
                }
            }
        }
        out
    }
}

/// Longest-apex zone containing `name`. If the chosen zone delegates `name`
/// away to a child absent from the corpus, the delegation point is returned
/// as the cut marker.
pub fn enclosing_zone<'a>(name: &DomainName, corpus: &'a Corpus) -> Option<Enclosing<'a>> {
    let zone = name.ancestors().find_map(|a| corpus.zones.get(&a))?;
    let cut = zone.cut_covering(name);
    Some(Enclosing { zone, cut })
}
