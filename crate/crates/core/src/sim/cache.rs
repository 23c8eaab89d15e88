//! Trust-ranked resolver cache.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::name::DomainName;
use crate::rr::{RecordType, ResourceRecord};

/// Credibility of cached data, lowest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrustRank {
    GlueAdditional,
    AuthoritativeAuthority,
    AuthoritativeAnswer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CacheEntry {
    pub rrset: Vec<ResourceRecord>,
    pub rank: TrustRank,
    pub expiry: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Cache {
    entries: BTreeMap<(DomainName, RecordType), CacheEntry>,
}

impl Cache {
    pub fn new() -> Self {
        Cache::default()
    }

    /// Stores `rrset` unless an unexpired entry of strictly higher rank exists.
    /// Returns whether the entry was stored.
    pub fn insert(&mut self, rrset: Vec<ResourceRecord>, rank: TrustRank, now: u64) -> bool {
        let Some(first) = rrset.first() else {
            return false;
        };
        let key = (first.owner.clone(), first.rtype());
        let ttl = rrset.iter().map(|rr| rr.ttl).min().unwrap_or(0) as u64;
        if let Some(existing) = self.entries.get(&key) {
            if existing.expiry > now && existing.rank > rank {
                return false;
            }
        }
        self.entries.insert(
            key,
            CacheEntry {
                rrset,
                rank,
                expiry: now + ttl.max(1),
            },
        );
        true
    }

    /// Unexpired entry for `owner`/`rtype`.
    pub fn get(&self, owner: &DomainName, rtype: RecordType, now: u64) -> Option<&CacheEntry> {
        self.entries.get(&(owner.clone(), rtype)).filter(|e| e.expiry > now)
    }

    /// An answer usable for clients: authoritative-answer rank only.
    pub fn answer(&self, owner: &DomainName, rtype: RecordType, now: u64) -> Option<&CacheEntry> {
        self.get(owner, rtype, now)
            .filter(|e| e.rank == TrustRank::AuthoritativeAnswer)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(DomainName, RecordType), &CacheEntry)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Deepest cached NS owner at or above `name`.
    pub fn closest_ns(&self, name: &DomainName, now: u64) -> Option<DomainName> {
        name.ancestors().find(|a| self.get(a, RecordType::NS, now).is_some())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rr::{record, RData};

    fn a(addr: &str, ttl: u32) -> Vec<ResourceRecord> {
        vec![record("ns.foo.com", ttl, RData::A(addr.parse().unwrap()))]
    }

    #[test]
    fn authoritative_replaces_glue() {
        let mut c = Cache::new();
        assert!(c.insert(a("192.0.2.2", 100), TrustRank::GlueAdditional, 0));
        assert!(c.insert(a("192.0.1.1", 100), TrustRank::AuthoritativeAnswer, 1));
        let e = c.get(&crate::name::name("ns.foo.com"), RecordType::A, 2).unwrap();
        assert_eq!(e.rrset[0].address().unwrap().to_string(), "192.0.1.1");
    }

    #[test]
    fn glue_does_not_replace_authoritative() {
        let mut c = Cache::new();
        c.insert(a("192.0.1.1", 100), TrustRank::AuthoritativeAnswer, 0);
        assert!(!c.insert(a("192.0.2.2", 100), TrustRank::GlueAdditional, 1));
        let e = c.get(&crate::name::name("ns.foo.com"), RecordType::A, 2).unwrap();
        assert_eq!(e.rrset[0].address().unwrap().to_string(), "192.0.1.1");
    }

    #[test]
    fn expired_entries_are_replaced() {
        let mut c = Cache::new();
        c.insert(a("192.0.1.1", 10), TrustRank::AuthoritativeAnswer, 0);
        assert!(!c.insert(a("192.0.2.2", 10), TrustRank::GlueAdditional, 5));
        assert!(c.insert(a("192.0.2.2", 10), TrustRank::GlueAdditional, 11));
        assert!(c.get(&crate::name::name("ns.foo.com"), RecordType::A, 30).is_none());
    }
}
