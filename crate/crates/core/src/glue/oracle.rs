//! Resolution oracle for glue sufficiency and minimality.
//!
//! Every (delegation, NS target) pair of a corpus is checked by restricting
//! the delegation to that one target and resolving the target's address
//! from the root with an improved bailiwick-checking resolver.

use serde::Serialize;

use super::minimum::{compute_minimum_glue, glue_entries, GlueEntry};
use crate::name::DomainName;
use crate::rr::{RecordType, ResourceRecord};
use crate::sim::{complete_corpus, AddressBook, BailiwickPolicy, Network, Outcome, Resolver, ResolverConfig};
use crate::zone::Corpus;

const ORACLE_CLOCK: u32 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolutionCheck {
    pub zone: DomainName,
    pub delegation: DomainName,
    pub target: DomainName,
    pub outcome: Outcome,
}

impl ResolutionCheck {
    pub fn passed(&self) -> bool {
        self.outcome.is_answer()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NecessityCheck {
    pub glue: GlueEntry,
    /// Checks that fail once this record is removed.
    pub broken: Vec<ResolutionCheck>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub sufficient: bool,
    pub minimal: bool,
    pub checks: Vec<ResolutionCheck>,
    pub necessity: Vec<NecessityCheck>,
}

/// Resolves `target` from the root in the world built from `served`, where
/// `reference` supplies server addresses.
pub fn resolve_in(served: &Corpus, reference: &Corpus, target: &DomainName, policy: BailiwickPolicy) -> Outcome {
    let mut book = AddressBook::from_corpus(reference);
    let full = complete_corpus(served, &mut book);
    let net = Network::new(full, book, Vec::new());
    let mut resolver = Resolver::new(&net, ResolverConfig::new(policy, ORACLE_CLOCK, 0));
    resolver.resolve(target, RecordType::A)
}

/// One check per (delegating zone, delegation, target) of `reference`,
/// run against `served`.
pub fn resolution_checks(served: &Corpus, reference: &Corpus) -> Vec<ResolutionCheck> {
    let mut out = Vec::new();
    for zone in reference.zones() {
        for d in zone.delegations() {
            for target in &d.targets {
                let mut restricted = served.clone();
                if let Some(sz) = served.get(zone.apex()) {
                    let records: Vec<ResourceRecord> = sz
                        .records()
                        .iter()
                        .filter(|rr| !(rr.owner == d.child && rr.ns_target().is_some_and(|t| t != target)))
                        .cloned()
                        .collect();
                    restricted.insert(sz.with_records(records).expect("subset of a zone"));
                }
                let outcome = resolve_in(&restricted, reference, target, BailiwickPolicy::Improved);
                out.push(ResolutionCheck {
                    zone: zone.apex().clone(),
                    delegation: d.child.clone(),
                    target: target.clone(),
                    outcome,
                });
            }
        }
    }
    out
}

fn without(corpus: &Corpus, drop: &[GlueEntry]) -> Corpus {
    let mut out = corpus.clone();
    for z in corpus.zones() {
        let drop_here: Vec<usize> = drop.iter().filter(|g| &g.zone == z.apex()).map(|g| g.entry).collect();
        if drop_here.is_empty() {
            continue;
        }
        let records = z
            .records()
            .iter()
            .enumerate()
            .filter(|(i, _)| !drop_here.contains(&(i + 1)))
            .map(|(_, rr)| rr.clone())
            .collect();
        out.insert(z.with_records(records).expect("subset of a zone"));
    }
    out
}

/// The corpus keeping only the glue the analyzer marks as required.
pub fn minimum_glue_corpus(corpus: &Corpus) -> Corpus {
    let report = compute_minimum_glue(corpus);
    without(corpus, &report.redundant)
}

/// Checks that the minimum glue alone passes every resolution check, and
/// that removing any one required record breaks at least one of them.
pub fn check_minimum_glue(corpus: &Corpus) -> OracleReport {
    let minimum = minimum_glue_corpus(corpus);
    let checks = resolution_checks(&minimum, corpus);
    let sufficient = checks.iter().all(ResolutionCheck::passed);
    let required: Vec<GlueEntry> = minimum.zones().flat_map(glue_entries).collect();
    let mut necessity = Vec::new();
    for g in required {
        let reduced = without(&minimum, std::slice::from_ref(&g));
        let broken = resolution_checks(&reduced, corpus)
            .into_iter()
            .filter(|c| !c.passed())
            .collect();
        necessity.push(NecessityCheck { glue: g, broken });
    }
    let minimal = necessity.iter().all(|n| !n.broken.is_empty());
    OracleReport {
        sufficient,
        minimal,
        checks,
        necessity,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::master::read_corpus;
    use crate::name::name;

    fn fixture(names: &[&str]) -> Corpus {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
        read_corpus(&names.iter().map(|n| dir.join(n)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn cycle_resolution_with_and_without_glue() {
        let corpus = fixture(&["cycle2-com.zone", "cycle2-net.zone"]);
        let bare = corpus.without_glue();
        let out = resolve_in(&bare, &corpus, &name("ns.foo.com"), BailiwickPolicy::Improved);
        assert_eq!(out, Outcome::CyclicDependencyFailure);
        let minimum = minimum_glue_corpus(&corpus);
        let out = resolve_in(&minimum, &corpus, &name("ns.foo.com"), BailiwickPolicy::Improved);
        assert!(out.is_answer(), "{out}");
    }

    #[test]
    fn cycles_pass_the_removal_oracle() {
        for files in [
            &["cycle2-com.zone", "cycle2-net.zone"][..],
            &["cycle3-com.zone", "cycle3-net.zone", "cycle3-org.zone"][..],
        ] {
            let report = check_minimum_glue(&fixture(files));
            assert!(report.sufficient, "{files:?}: {:?}", report.checks);
            assert!(report.minimal, "{files:?}: {:?}", report.necessity);
            assert_eq!(report.necessity.len(), 1);
        }
    }

    #[test]
    fn sample_corpus_minimum_glue() {
        let report = check_minimum_glue(&fixture(&["glue-policy-com.zone", "glue-policy-foo.zone"]));
        assert!(report.sufficient, "{:?}", report.checks);
        assert!(report.minimal, "{:?}", report.necessity);
    }
}
