//! Scenario files and their execution to a verdict.

use std::collections::BTreeSet;
use std::net::IpAddr;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::adversary::{Adversary, AdversaryKind};
use super::policy::BailiwickPolicy;
use super::resolver::{Outcome, Resolver, ResolverConfig};
use super::trace::{ResolutionTrace, TraceEvent};
use super::world::{complete_corpus, AddressBook, Network, RogueMode, RogueServer};
use crate::dnssec::{sign_corpus, KeyRole, SignError, SigningOptions, TrustAnchor, DEFAULT_CLOCK};
use crate::master::{parse_record_line, read_zone_file, FileError};
use crate::name::DomainName;
use crate::rr::{RData, RecordType, ResourceRecord};
use crate::zone::{Corpus, Zone, ZoneError};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario {0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("invalid scenario JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Zone(#[from] FileError),
    #[error(transparent)]
    Corpus(#[from] ZoneError),
    #[error("bad record `{0}`: {1}")]
    Record(String, String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Sign(#[from] SignError),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedSpec {
    #[serde(default)]
    pub zones: Vec<DomainName>,
    #[serde(default = "default_true")]
    pub opt_out: bool,
    #[serde(default)]
    pub key_seed: u64,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RogueSpec {
    pub address: IpAddr,
    #[serde(default)]
    pub zones: Vec<PathBuf>,
    #[serde(default)]
    pub legit: Vec<DomainName>,
    #[serde(default)]
    pub inject_authority: Vec<String>,
    #[serde(default)]
    pub inject_additional: Vec<String>,
    #[serde(default)]
    pub mode: RogueMode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuerySpec {
    pub qname: DomainName,
    pub qtype: RecordType,
}

/// A scenario file as written on disk; paths are relative to the file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub name: String,
    pub zones: Vec<PathBuf>,
    #[serde(default)]
    pub signed: SignedSpec,
    #[serde(default)]
    pub rogue: Vec<RogueSpec>,
    pub policy: String,
    #[serde(default)]
    pub adversary: Adversary,
    pub queries: Vec<QuerySpec>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub clock: Option<u32>,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub corpus: Corpus,
    pub signed: SignedSpec,
    pub rogues: Vec<RogueServer>,
    pub policy: BailiwickPolicy,
    pub adversary: Adversary,
    /// Queries in order; the last is the target.
    pub queries: Vec<(DomainName, RecordType)>,
    pub seed: u64,
    pub clock: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub scenario: String,
    pub policy: BailiwickPolicy,
    pub poisoned: bool,
    pub outcome: Outcome,
    pub answers: Vec<(DomainName, RecordType, Outcome)>,
    pub tainted: Vec<String>,
    /// Cache insertions that overwrote a higher-ranked unexpired entry.
    pub rank_violations: usize,
    #[serde(skip)]
    pub trace: ResolutionTrace,
}

impl Verdict {
    pub fn summary_line(&self) -> String {
        format!("poisoned={} outcome={}", self.poisoned, self.outcome)
    }
}

fn parse_injected(lines: &[String]) -> Result<Vec<ResourceRecord>, ScenarioError> {
    lines
        .iter()
        .map(|l| parse_record_line(l, &DomainName::root()).map_err(|e| ScenarioError::Record(l.clone(), e.to_string())))
        .collect()
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Scenario, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io(path.to_path_buf(), e))?;
        let file: ScenarioFile = serde_json::from_str(&text)?;
        Scenario::from_file(file, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn from_file(file: ScenarioFile, base: &Path) -> Result<Scenario, ScenarioError> {
        let zones = file
            .zones
            .iter()
            .map(|p| read_zone_file(&base.join(p)))
            .collect::<Result<Vec<Zone>, _>>()?;
        let corpus = Corpus::new(zones)?;
        let mut rogues = Vec::new();
        for r in &file.rogue {
            let zones = r
                .zones
                .iter()
                .map(|p| read_zone_file(&base.join(p)))
                .collect::<Result<Vec<Zone>, _>>()?;
            rogues.push(RogueServer {
                address: r.address,
                zones,
                legit: r.legit.clone(),
                inject_authority: parse_injected(&r.inject_authority)?,
                inject_additional: parse_injected(&r.inject_additional)?,
                mode: r.mode,
            });
        }
        let policy: BailiwickPolicy = file.policy.parse().map_err(ScenarioError::Invalid)?;
        let s = Scenario {
            name: file.name,
            corpus,
            signed: file.signed,
            rogues,
            policy,
            adversary: file.adversary,
            queries: file.queries.into_iter().map(|q| (q.qname, q.qtype)).collect(),
            seed: file.seed,
            clock: file.clock.unwrap_or(DEFAULT_CLOCK + 3600),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.queries.is_empty() {
            return Err(ScenarioError::Invalid("scenario has no queries".into()));
        }
        let in_namespace = |n: &DomainName| self.corpus.enclosing_zone(n).is_some();
        if self.adversary.kind != AdversaryKind::None {
            let trigger = self
                .adversary
                .trigger
                .as_ref()
                .ok_or_else(|| ScenarioError::Invalid("adversary needs a trigger".into()))?;
            let payload = self
                .adversary
                .payload
                .as_ref()
                .ok_or_else(|| ScenarioError::Invalid("adversary needs a payload".into()))?;
            if !in_namespace(&trigger.qname) {
                return Err(ScenarioError::Invalid(format!(
                    "trigger name {} outside the corpus",
                    trigger.qname
                )));
            }
            if !in_namespace(&payload.glue_owner) {
                return Err(ScenarioError::Invalid(format!(
                    "payload glue owner {} outside the corpus",
                    payload.glue_owner
                )));
            }
        }
        for z in &self.signed.zones {
            if !z.is_root() && self.corpus.get(z).is_none() {
                return Err(ScenarioError::Invalid(format!("signed zone {z} is not in the corpus")));
            }
        }
        Ok(())
    }

    /// The network and, when any zone is signed, the root trust anchor.
    pub fn build_network(&self) -> Result<(Network, Option<TrustAnchor>), ScenarioError> {
        let mut book = AddressBook::from_corpus(&self.corpus);
        let full = complete_corpus(&self.corpus, &mut book);
        if self.signed.zones.is_empty() {
            return Ok((Network::new(full, book, self.rogues.clone()), None));
        }
        let mut signed: BTreeSet<DomainName> = self.signed.zones.iter().cloned().collect();
        signed.insert(DomainName::root());
        let opts = SigningOptions {
            opt_out: self.signed.opt_out,
            ..SigningOptions::default()
        };
        let (corpus, zones) = sign_corpus(&full, &signed, self.signed.key_seed, &opts)?;
        let root_ksk = zones[&DomainName::root()].ksk().cloned().expect("root signed");
        let RData::DNSKEY(key) = root_ksk.rdata else {
            unreachable!()
        };
        debug_assert!(key.flags & KeyRole::Ksk.flags() == KeyRole::Ksk.flags());
        Ok((
            Network::new(corpus, book, self.rogues.clone()),
            Some(TrustAnchor::root(key)),
        ))
    }
}

pub fn run_scenario(s: &Scenario) -> Result<Verdict, ScenarioError> {
    s.validate()?;
    let (net, anchor) = s.build_network()?;
    let mut config = ResolverConfig::new(s.policy, s.clock, s.seed);
    config.anchor = anchor;
    let mut resolver = Resolver::new(&net, config).with_adversary(s.adversary.clone());
    let mut answers = Vec::new();
    for (qname, qtype) in &s.queries {
        let out = resolver.resolve(qname, *qtype);
        answers.push((qname.clone(), *qtype, out));
    }
    let outcome = answers.last().map(|a| a.2.clone()).expect("validated non-empty");
    let mut tainted = resolver.tainted_state();
    for (q, t, o) in &answers {
        if let Outcome::Answer(rrs) = o {
            if rrs.iter().any(|rr| !net.is_genuine(rr)) {
                tainted.push(format!("answer {q} {t}"));
            }
        }
    }
    let poisoned = !tainted.is_empty();
    resolver.trace_mut().push(TraceEvent::Verdict {
        poisoned,
        outcome: outcome.to_string(),
    });
    Ok(Verdict {
        scenario: s.name.clone(),
        policy: s.policy,
        poisoned,
        outcome,
        answers,
        tainted,
        rank_violations: resolver.rank_violations(),
        trace: resolver.into_trace(),
    })
}
