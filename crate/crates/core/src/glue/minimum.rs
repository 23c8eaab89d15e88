//! Minimum glue computation, redundancy and the serialized report.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use super::consistency::{check_glue_consistency, ConsistencyFinding};
use super::graph::{build_dependency_graph, find_cycles, DependencyGraph};
use super::policy::{classify_ns_target, NsTargetClass};
use crate::name::DomainName;
use crate::rr::ResourceRecord;
use crate::zone::{Corpus, RecordClass, Zone};

/// A glue record located in its hosting zone. `entry` is the 1-based
/// position of the record in that zone's source order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GlueEntry {
    pub zone: DomainName,
    pub entry: usize,
    pub record: ResourceRecord,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RequirementReason {
    InBailiwick,
    CycleBreak,
}

/// A name that needs glue in `zone` but has no address record there.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct MissingGlue {
    pub zone: DomainName,
    pub delegation: DomainName,
    pub target: DomainName,
    pub reason: RequirementReason,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinimumGlueReport {
    pub cycles: Vec<Vec<DomainName>>,
    pub required: Vec<GlueEntry>,
    pub redundant: Vec<GlueEntry>,
    pub absent_required: Vec<MissingGlue>,
    pub consistency: Vec<ConsistencyFinding>,
    pub external_unresolved: Vec<DomainName>,
}

/// A (hosting zone, delegation, target) triple whose address must be glued.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GlueRequirement {
    pub zone: DomainName,
    pub delegation: DomainName,
    pub target: DomainName,
    pub reason: RequirementReason,
}

/// In-bailiwick targets of every delegation. These need glue regardless of
/// what else the corpus holds.
pub fn glue_requirements(corpus: &Corpus) -> Vec<GlueRequirement> {
    let mut reqs = BTreeSet::new();
    for zone in corpus.zones() {
        for d in zone.delegations() {
            for t in &d.targets {
                if classify_ns_target(zone.apex(), &d.child, t) == Ok(NsTargetClass::InChildBailiwick) {
                    reqs.insert(GlueRequirement {
                        zone: zone.apex().clone(),
                        delegation: d.child.clone(),
                        target: t.clone(),
                        reason: RequirementReason::InBailiwick,
                    });
                }
            }
        }
    }
    reqs.into_iter().collect()
}

/// Reachability of delegated zones from the root, given which (hosting zone,
/// owner) pairs have glue.
struct ReachModel<'a> {
    graph: &'a DependencyGraph,
    checks: Vec<(DomainName, DomainName)>,
}

type GlueKeys = BTreeMap<(DomainName, DomainName), usize>;

impl<'a> ReachModel<'a> {
    fn new(graph: &'a DependencyGraph) -> Self {
        let mut checks = Vec::new();
        for node in graph.nodes.values().filter(|n| n.parent.is_some()) {
            for t in &node.targets {
                checks.push((node.apex.clone(), t.clone()));
            }
        }
        ReachModel { graph, checks }
    }

    /// Deepest delegated zone holding `name`.
    fn zone_of(&self, name: &DomainName) -> Option<&DomainName> {
        name.ancestors()
            .find_map(|a| self.graph.nodes.get(&a).filter(|n| n.parent.is_some()))
            .map(|n| &n.apex)
    }

    /// Least fixpoint of reachable zones. `restrict` limits one delegation to
    /// a single target.
    fn reached(&self, glue: &GlueKeys, restrict: Option<(&DomainName, &DomainName)>) -> BTreeSet<DomainName> {
        let mut reached: BTreeSet<DomainName> = self
            .graph
            .nodes
            .values()
            .filter(|n| n.parent.is_none())
            .map(|n| n.apex.clone())
            .collect();
        loop {
            let mut changed = false;
            for node in self.graph.nodes.values() {
                let Some(parent) = &node.parent else { continue };
                if reached.contains(&node.apex) {
                    continue;
                }
                let parent_ok = !self.graph.nodes.contains_key(parent) || reached.contains(parent);
                if !parent_ok {
                    continue;
                }
                let usable = node.targets.iter().any(|t| {
                    if restrict.is_some_and(|(d, only)| d == &node.apex && only != t) {
                        return false;
                    }
                    if glue.get(&(parent.clone(), t.clone())).is_some_and(|&n| n > 0) {
                        return true;
                    }
                    match self.zone_of(t) {
                        None => true,
                        Some(z) => z != &node.apex && reached.contains(z),
                    }
                });
                if usable {
                    reached.insert(node.apex.clone());
                    changed = true;
                }
            }
            if !changed {
                return reached;
            }
        }
    }

    fn passes(&self, glue: &GlueKeys, check: &(DomainName, DomainName)) -> bool {
        let (d, t) = check;
        match self.zone_of(t) {
            None => true,
            Some(z) => self.reached(glue, Some((d, t))).contains(z),
        }
    }
}

fn keys_of<'e>(entries: impl IntoIterator<Item = &'e GlueEntry>) -> GlueKeys {
    let mut keys = GlueKeys::new();
    for g in entries {
        *keys.entry((g.zone.clone(), g.record.owner.clone())).or_default() += 1;
    }
    keys
}

/// Address glue records of a zone with their 1-based entry numbers.
pub fn glue_entries(zone: &Zone) -> Vec<GlueEntry> {
    zone.records()
        .iter()
        .enumerate()
        .filter(|(_, rr)| rr.rtype().is_address() && zone.classify(rr) == RecordClass::Glue)
        .map(|(i, rr)| GlueEntry {
            zone: zone.apex().clone(),
            entry: i + 1,
            record: rr.clone(),
        })
        .collect()
}

pub fn compute_minimum_glue(corpus: &Corpus) -> MinimumGlueReport {
    let graph = build_dependency_graph(corpus);
    let cycles = find_cycles(&graph);
    let reqs = glue_requirements(corpus);
    let model = ReachModel::new(&graph);

    // A repeated record adds nothing to its RRset; only the first copy counts.
    let mut seen = BTreeSet::new();
    let unique: Vec<GlueEntry> = corpus
        .zones()
        .flat_map(glue_entries)
        .filter(|g| seen.insert((g.zone.clone(), g.record.owner.clone(), g.record.rdata.canonical_wire())))
        .collect();

    let mut required = BTreeSet::new();
    let mut absent = BTreeSet::new();
    for r in &reqs {
        let present: Vec<&GlueEntry> = unique
            .iter()
            .filter(|g| g.zone == r.zone && g.record.owner == r.target)
            .collect();
        if present.is_empty() {
            absent.insert(MissingGlue {
                zone: r.zone.clone(),
                delegation: r.delegation.clone(),
                target: r.target.clone(),
                reason: r.reason,
            });
        }
        required.extend(present.into_iter().cloned());
    }

    // Remaining glue is dropped greedily while every check that passes with
    // all of it still passes. Glue serving the least delegations is tried last.
    let mut kept = keys_of(&unique);
    let wanted: Vec<&(DomainName, DomainName)> = model.checks.iter().filter(|c| model.passes(&kept, c)).collect();
    let served_by = |g: &GlueEntry| {
        graph
            .nodes
            .values()
            .filter(|n| n.parent.as_ref() == Some(&g.zone) && n.targets.contains(&g.record.owner))
            .map(|n| n.apex.clone())
            .min()
    };
    let mut optional: Vec<(Option<DomainName>, &GlueEntry)> = unique
        .iter()
        .filter(|g| !required.contains(*g))
        .map(|g| (served_by(g), g))
        .collect();
    optional.sort_by(|a, b| match (&a.0, &b.0) {
        (None, None) => a.1.cmp(b.1),
        (None, Some(_)) => std::cmp::Ordering::Less,
        (Some(_), None) => std::cmp::Ordering::Greater,
        (Some(x), Some(y)) => y.cmp(x).then_with(|| b.1.cmp(a.1)),
    });
    for (_, g) in optional {
        let key = (g.zone.clone(), g.record.owner.clone());
        *kept.get_mut(&key).expect("counted above") -= 1;
        if wanted.iter().all(|c| model.passes(&kept, c)) {
            continue;
        }
        *kept.get_mut(&key).expect("counted above") += 1;
        required.insert(g.clone());
    }

    // Cycles still unbroken need glue for the in-cycle targets of their
    // least member.
    let reached = model.reached(&kept, None);
    for cycle in cycles.iter().filter(|c| c.len() >= 2) {
        if cycle.iter().all(|m| reached.contains(m)) {
            continue;
        }
        let chosen = &graph.nodes[&cycle[0]];
        let Some(parent) = &chosen.parent else {
            continue;
        };
        for t in &chosen.targets {
            let in_cycle = cycle.iter().any(|m| t.is_subdomain_of(m));
            if in_cycle && kept.get(&(parent.clone(), t.clone())).is_none_or(|&n| n == 0) {
                absent.insert(MissingGlue {
                    zone: parent.clone(),
                    delegation: chosen.apex.clone(),
                    target: t.clone(),
                    reason: RequirementReason::CycleBreak,
                });
            }
        }
    }

    let redundant: Vec<GlueEntry> = corpus
        .zones()
        .flat_map(glue_entries)
        .filter(|g| !required.contains(g))
        .collect();

    let external_unresolved = graph
        .nodes
        .values()
        .filter(|n| n.external_unresolved)
        .map(|n| n.apex.clone())
        .collect();

    MinimumGlueReport {
        cycles,
        required: required.into_iter().collect(),
        redundant,
        absent_required: absent.into_iter().collect(),
        consistency: check_glue_consistency(corpus),
        external_unresolved,
    }
}

impl MinimumGlueReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "cycles:");
        if self.cycles.is_empty() {
            let _ = writeln!(out, "  (none)");
        }
        for c in &self.cycles {
            let names: Vec<String> = c.iter().map(|n| n.to_string()).collect();
            let _ = writeln!(out, "  {{{}}}", names.join(", "));
        }
        for (title, entries) in [("required", &self.required), ("redundant", &self.redundant)] {
            let _ = writeln!(out, "{title}:");
            if entries.is_empty() {
                let _ = writeln!(out, "  (none)");
            }
            for g in entries {
                let _ = writeln!(out, "  {} #{} {}", g.zone, g.entry, g.record);
            }
        }
        let _ = writeln!(out, "absent_required:");
        if self.absent_required.is_empty() {
            let _ = writeln!(out, "  (none)");
        }
        for m in &self.absent_required {
            let reason = match m.reason {
                RequirementReason::InBailiwick => "in-bailiwick",
                RequirementReason::CycleBreak => "cycle-break",
            };
            let _ = writeln!(out, "  {} {} for {} ({reason})", m.zone, m.target, m.delegation);
        }
        let _ = writeln!(out, "consistency:");
        if self.consistency.is_empty() {
            let _ = writeln!(out, "  (none)");
        }
        for f in &self.consistency {
            let _ = writeln!(out, "  {:?} {} #{} {} {}", f.status, f.zone, f.entry, f.glue, f.note);
        }
        if !self.external_unresolved.is_empty() {
            let names: Vec<String> = self.external_unresolved.iter().map(|n| n.to_string()).collect();
            let _ = writeln!(out, "external_unresolved: {}", names.join(", "));
        }
        out
    }
}
