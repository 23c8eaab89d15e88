//! Glue versus authoritative counterpart comparison (lame-delegation risk).

use serde::Serialize;

use super::minimum::glue_entries;
use crate::name::DomainName;
use crate::rr::ResourceRecord;
use crate::zone::{enclosing_zone, Corpus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ConsistencyStatus {
    Consistent,
    Mismatch,
    Unverifiable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConsistencyFinding {
    pub zone: DomainName,
    pub entry: usize,
    pub glue: ResourceRecord,
    /// Apex of the zone holding the authoritative data, when present.
    pub authority: Option<DomainName>,
    pub counterpart: Vec<ResourceRecord>,
    pub status: ConsistencyStatus,
    pub note: String,
}

pub fn check_glue_consistency(corpus: &Corpus) -> Vec<ConsistencyFinding> {
    let mut out = Vec::new();
    for zone in corpus.zones() {
        for g in glue_entries(zone) {
            let glue = g.record;
            let (authority, counterpart, status, note) = match enclosing_zone(&glue.owner, corpus) {
                None => (
                    None,
                    Vec::new(),
                    ConsistencyStatus::Unverifiable,
                    "no authoritative zone in corpus".to_string(),
                ),
                Some(e) if e.cut.is_some() => (
                    None,
                    Vec::new(),
                    ConsistencyStatus::Unverifiable,
                    format!("authoritative zone {} absent from corpus", e.cut.unwrap()),
                ),
                Some(e) => {
                    let auth: Vec<ResourceRecord> =
                        e.zone.rrset(&glue.owner, glue.rtype()).into_iter().cloned().collect();
                    let apex = Some(e.zone.apex().clone());
                    if auth.is_empty() {
                        (
                            apex,
                            auth,
                            ConsistencyStatus::Unverifiable,
                            "no authoritative record".to_string(),
                        )
                    } else if auth.iter().any(|a| a.rdata == glue.rdata) {
                        (apex, auth, ConsistencyStatus::Consistent, String::new())
                    } else {
                        (
                            apex,
                            auth,
                            ConsistencyStatus::Mismatch,
                            "lame delegation risk".to_string(),
                        )
                    }
                }
            };
            out.push(ConsistencyFinding {
                zone: g.zone,
                entry: g.entry,
                glue,
                authority,
                counterpart,
                status,
                note,
            });
        }
    }
    out
}
