//! Per-domain glue audit with aggregate tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use super::corpus::SignedCorpus;
use super::tamper::{
    analyze_glue_tamper_resistance_for, assess_forgeability, classify_glue_security, GlueSecurityClass,
    TamperResistance,
};
use crate::glue::compute_minimum_glue;
use crate::name::DomainName;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum GlueType {
    SelfContained,
    CyclicDependency,
    OutOfBailiwick,
}

impl GlueType {
    pub const ALL: [GlueType; 3] = [
        GlueType::SelfContained,
        GlueType::CyclicDependency,
        GlueType::OutOfBailiwick,
    ];

    pub fn label(self) -> &'static str {
        match self {
            GlueType::SelfContained => "Self-contained",
            GlueType::CyclicDependency => "Cyclic dependency",
            GlueType::OutOfBailiwick => "Out-of-bailiwick",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum GlueStatus {
    PresentRedundant,
    Minimum,
    Absence,
}

impl GlueStatus {
    pub const ALL: [GlueStatus; 3] = [GlueStatus::PresentRedundant, GlueStatus::Minimum, GlueStatus::Absence];

    pub fn label(self) -> &'static str {
        match self {
            GlueStatus::PresentRedundant => "Present/Redundant",
            GlueStatus::Minimum => "Minimum",
            GlueStatus::Absence => "Absence",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypedGlue {
    pub glue_type: GlueType,
    pub status: GlueStatus,
    pub targets: Vec<DomainName>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GlueSecurity {
    pub owner: DomainName,
    pub address: String,
    pub class: GlueSecurityClass,
    pub tamper: TamperResistance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DomainRow {
    pub domain: DomainName,
    pub parent: Option<DomainName>,
    pub signed: bool,
    pub glue: Vec<TypedGlue>,
    pub security: Vec<GlueSecurity>,
    /// `None` for unsigned domains.
    pub glue_forgeable: Option<bool>,
    pub zone_forgeable: Option<bool>,
    pub reasons: Vec<String>,
}

/// Counts of domains per glue type and status.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StatusCounts {
    pub present_redundant: usize,
    pub minimum: usize,
    pub absence: usize,
}

impl StatusCounts {
    pub fn get(&self, s: GlueStatus) -> usize {
        match s {
            GlueStatus::PresentRedundant => self.present_redundant,
            GlueStatus::Minimum => self.minimum,
            GlueStatus::Absence => self.absence,
        }
    }

    fn bump(&mut self, s: GlueStatus) {
        match s {
            GlueStatus::PresentRedundant => self.present_redundant += 1,
            GlueStatus::Minimum => self.minimum += 1,
            GlueStatus::Absence => self.absence += 1,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct TypeStatusTable {
    pub self_contained: StatusCounts,
    pub cyclic_dependency: StatusCounts,
    pub out_of_bailiwick: StatusCounts,
}

impl TypeStatusTable {
    pub fn get(&self, t: GlueType) -> &StatusCounts {
        match t {
            GlueType::SelfContained => &self.self_contained,
            GlueType::CyclicDependency => &self.cyclic_dependency,
            GlueType::OutOfBailiwick => &self.out_of_bailiwick,
        }
    }

    fn get_mut(&mut self, t: GlueType) -> &mut StatusCounts {
        match t {
            GlueType::SelfContained => &mut self.self_contained,
            GlueType::CyclicDependency => &mut self.cyclic_dependency,
            GlueType::OutOfBailiwick => &mut self.out_of_bailiwick,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SecurityHistogram {
    pub signed_domains: usize,
    /// Signed domains with at least one glue record of each class.
    pub classes: BTreeMap<GlueSecurityClass, usize>,
    pub glue_forgeable: usize,
    pub zone_forgeable: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditMetadata {
    pub domains: usize,
    pub zone_forgeability: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub metadata: AuditMetadata,
    #[serde(rename = "table1")]
    pub glue_table: TypeStatusTable,
    pub security: SecurityHistogram,
    pub rows: Vec<DomainRow>,
}

const ZONE_FORGEABILITY_NOTE: &str =
    "zone forgeable = glue forgeable and the domain sets NSEC3 Opt-Out; zone records are not enumerated";

pub fn audit_corpus(sc: &SignedCorpus) -> AuditReport {
    let report = compute_minimum_glue(&sc.corpus);
    let multi_cycles: Vec<&Vec<DomainName>> = report.cycles.iter().filter(|c| c.len() >= 2).collect();
    let required: BTreeSet<(DomainName, DomainName)> = report
        .required
        .iter()
        .map(|g| (g.zone.clone(), g.record.owner.clone()))
        .collect();

    let mut rows = Vec::new();
    for domain in &sc.domains {
        let parent = sc.corpus.delegating_zone(domain);
        let mut glue = Vec::new();
        if let Some(p) = parent {
            let has_glue = |t: &DomainName| p.glue().any(|rr| rr.rtype().is_address() && &rr.owner == t);
            let cycle = multi_cycles.iter().find(|c| c.contains(domain));
            let mut groups: BTreeMap<GlueType, Vec<DomainName>> = BTreeMap::new();
            for t in p.ns_targets(domain) {
                let ty = if t.is_subdomain_of(domain) {
                    GlueType::SelfContained
                } else if cycle.is_some_and(|c| c.iter().any(|m| m != domain && t.is_subdomain_of(m))) {
                    GlueType::CyclicDependency
                } else {
                    GlueType::OutOfBailiwick
                };
                groups.entry(ty).or_default().push(t);
            }
            for (glue_type, targets) in groups {
                let status = match glue_type {
                    GlueType::SelfContained if targets.iter().all(&has_glue) => GlueStatus::PresentRedundant,
                    GlueType::SelfContained => GlueStatus::Absence,
                    GlueType::CyclicDependency => {
                        let missing = report
                            .absent_required
                            .iter()
                            .any(|m| &m.zone == p.apex() && &m.delegation == domain && targets.contains(&m.target));
                        let extra = targets
                            .iter()
                            .any(|t| has_glue(t) && !required.contains(&(p.apex().clone(), t.clone())));
                        if missing {
                            GlueStatus::Absence
                        } else if extra {
                            GlueStatus::PresentRedundant
                        } else {
                            GlueStatus::Minimum
                        }
                    }
                    GlueType::OutOfBailiwick if targets.iter().any(&has_glue) => GlueStatus::PresentRedundant,
                    GlueType::OutOfBailiwick => GlueStatus::Minimum,
                };
                glue.push(TypedGlue {
                    glue_type,
                    status,
                    targets,
                });
            }
        }
        let security = classify_glue_security(domain, sc)
            .into_iter()
            .map(|(rr, class)| {
                let residing = parent.map(|p| p.apex().clone()).unwrap_or_else(DomainName::root);
                GlueSecurity {
                    owner: rr.owner.clone(),
                    address: rr.address().map(|a| a.to_string()).unwrap_or_default(),
                    class,
                    tamper: analyze_glue_tamper_resistance_for(&rr, &residing, Some(domain), sc),
                }
            })
            .collect();
        let forge = assess_forgeability(domain, sc);
        rows.push(DomainRow {
            domain: domain.clone(),
            parent: parent.map(|p| p.apex().clone()),
            signed: sc.is_signed(domain),
            glue,
            security,
            glue_forgeable: forge.as_ref().map(|f| f.glue_forgeable),
            zone_forgeable: forge.as_ref().map(|f| f.zone_forgeable),
            reasons: forge.map(|f| f.reasons).unwrap_or_default(),
        });
    }
    let (glue_table, security) = aggregate(&rows);
    AuditReport {
        metadata: AuditMetadata {
            domains: rows.len(),
            zone_forgeability: ZONE_FORGEABILITY_NOTE,
        },
        glue_table,
        security,
        rows,
    }
}

/// Recomputes the aggregate blocks from per-domain rows.
pub fn aggregate(rows: &[DomainRow]) -> (TypeStatusTable, SecurityHistogram) {
    let mut table = TypeStatusTable::default();
    let mut hist = SecurityHistogram::default();
    for row in rows {
        for g in &row.glue {
            table.get_mut(g.glue_type).bump(g.status);
        }
        if !row.signed {
            continue;
        }
        hist.signed_domains += 1;
        let classes: BTreeSet<GlueSecurityClass> = row.security.iter().map(|s| s.class).collect();
        for c in classes {
            *hist.classes.entry(c).or_default() += 1;
        }
        hist.glue_forgeable += usize::from(row.glue_forgeable == Some(true));
        hist.zone_forgeable += usize::from(row.zone_forgeable == Some(true));
    }
    (table, hist)
}

impl AuditReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn any_zone_forgeable(&self) -> bool {
        self.rows.iter().any(|r| r.zone_forgeable == Some(true))
    }

    /// The type/status table followed by the security summary and rows.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<20}{:>19}{:>9}{:>9}",
            "Glue Type/Status", "Present/Redundant", "Minimum", "Absence"
        );
        for t in GlueType::ALL {
            let c = self.glue_table.get(t);
            let _ = writeln!(
                out,
                "{:<20}{:>19}{:>9}{:>9}",
                t.label(),
                c.present_redundant,
                c.minimum,
                c.absence
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "signed domains: {}", self.security.signed_domains);
        for c in GlueSecurityClass::ALL {
            let _ = writeln!(
                out,
                "  {:<26}{}",
                c.label(),
                self.security.classes.get(&c).copied().unwrap_or(0)
            );
        }
        let _ = writeln!(out, "  {:<26}{}", "Glue forgeable", self.security.glue_forgeable);
        let _ = writeln!(out, "  {:<26}{}", "Zone forgeable", self.security.zone_forgeable);
        let _ = writeln!(out, "note: {}", self.metadata.zone_forgeability);
        let _ = writeln!(out);
        for row in &self.rows {
            let types: Vec<String> = row
                .glue
                .iter()
                .map(|g| format!("{}:{}", g.glue_type.label(), g.status.label()))
                .collect();
            let flag = |f: Option<bool>| f.map_or("n/a", |b| if b { "yes" } else { "no" });
            let _ = writeln!(
                out,
                "{} signed={} types=[{}] glue_forgeable={} zone_forgeable={}",
                row.domain,
                row.signed,
                types.join(", "),
                flag(row.glue_forgeable),
                flag(row.zone_forgeable)
            );
        }
        out
    }
}
