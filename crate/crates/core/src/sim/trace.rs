//! Resolution traces as line-oriented JSON events.

use std::net::IpAddr;

use serde::{Deserialize, Serialize};

use super::cache::TrustRank;
use crate::name::DomainName;
use crate::rr::RecordType;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GlueAction {
    Provisional,
    Confirmed,
    Replaced,
    KeptTemporarily,
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum TraceEvent {
    Sent {
        step: usize,
        to: IpAddr,
        zone: DomainName,
        qname: DomainName,
        qtype: RecordType,
        tag: u32,
    },
    Received {
        step: usize,
        from: IpAddr,
        residing: DomainName,
        qname: DomainName,
        qtype: RecordType,
        forged: bool,
        /// Wire form of the accepted message, hex encoded.
        message: String,
    },
    Timeout {
        step: usize,
        to: IpAddr,
    },
    Injected {
        step: usize,
        count: usize,
        matched: bool,
    },
    Rejected {
        step: usize,
        record: String,
        reason: String,
    },
    FollowUp {
        step: usize,
        qname: DomainName,
        qtype: RecordType,
        reason: String,
    },
    CacheInsert {
        step: usize,
        owner: DomainName,
        rtype: RecordType,
        rank: TrustRank,
        stored: bool,
        tainted: bool,
    },
    Mapping {
        step: usize,
        name: DomainName,
        address: IpAddr,
        tainted: bool,
    },
    Glue {
        step: usize,
        owner: DomainName,
        action: GlueAction,
        detail: String,
    },
    Validation {
        step: usize,
        zone: DomainName,
        subject: String,
        result: String,
    },
    Cycle {
        step: usize,
        zone: DomainName,
        qname: DomainName,
    },
    Note {
        step: usize,
        text: String,
    },
    Verdict {
        poisoned: bool,
        outcome: String,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionTrace {
    pub events: Vec<TraceEvent>,
}

impl ResolutionTrace {
    pub fn push(&mut self, e: TraceEvent) {
        self.events.push(e);
    }

    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("events serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_json_lines(text: &str) -> Result<Self, serde_json::Error> {
        let events = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<Result<_, _>>()?;
        Ok(ResolutionTrace { events })
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}
