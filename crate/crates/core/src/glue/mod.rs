//! Glue policies, dependency graphs, minimum glue and consistency.

pub mod consistency;
pub mod graph;
pub mod minimum;
pub mod oracle;
pub mod policy;

pub use consistency::{check_glue_consistency, ConsistencyFinding, ConsistencyStatus};
pub use graph::{build_dependency_graph, find_cycles, DependencyGraph};
pub use minimum::{compute_minimum_glue, GlueEntry, MinimumGlueReport, MissingGlue};
pub use policy::{allowed_glue, classify_ns_target, glue_allowed, GluePolicy, NsTargetClass};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::master::read_corpus;
    use crate::name::name;
    use crate::zone::Corpus;
    use std::path::PathBuf;

    fn fixture(names: &[&str]) -> Corpus {
        let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
        let paths: Vec<PathBuf> = names.iter().map(|n| dir.join(n)).collect();
        read_corpus(&paths).unwrap()
    }

    #[test]
    fn policy_table_over_sample_zone() {
        let c = fixture(&["glue-policy-com.zone"]);
        let z = c.get(&name("com")).unwrap();
        let lines = |p| allowed_glue(z, p).into_iter().map(|i| i + 1).collect::<Vec<_>>();
        assert_eq!(lines(GluePolicy::Narrow), vec![5, 6]);
        assert_eq!(lines(GluePolicy::Moderate), vec![5, 6, 8]);
        assert_eq!(lines(GluePolicy::Mandatory), vec![5, 6, 7, 8]);
    }

    #[test]
    fn two_and_three_zone_cycles() {
        let g3 = build_dependency_graph(&fixture(&["cycle2-com.zone", "cycle2-net.zone"]));
        let edges: Vec<_> = g3.edges.iter().cloned().collect();
        assert_eq!(
            edges,
            vec![(name("foo.com"), name("foo.net")), (name("foo.net"), name("foo.com"))]
        );
        assert_eq!(find_cycles(&g3), vec![vec![name("foo.com"), name("foo.net")]]);

        let g4 = build_dependency_graph(&fixture(&["cycle3-com.zone", "cycle3-net.zone", "cycle3-org.zone"]));
        assert_eq!(
            find_cycles(&g4),
            vec![vec![name("foo.com"), name("foo.net"), name("foo.org")]]
        );
        assert!(g4.edges.contains(&(name("foo.com"), name("foo.net"))));
        assert!(g4.edges.contains(&(name("foo.net"), name("foo.org"))));
        assert!(g4.edges.contains(&(name("foo.org"), name("foo.com"))));
    }

    #[test]
    fn self_loop_and_external_node() {
        let g = build_dependency_graph(&fixture(&["glue-policy-com.zone"]));
        assert!(g.has_self_loop(&name("foo.com")));
        assert!(g.nodes[&name("foo.net")].external_unresolved);
        assert!(g.successors(&name("foo.net")).next().is_none());
    }

    #[test]
    fn sample_corpus_minimum() {
        let report = compute_minimum_glue(&fixture(&["glue-policy-com.zone", "glue-policy-foo.zone"]));
        let req: Vec<(String, usize)> = report.required.iter().map(|g| (g.zone.to_string(), g.entry)).collect();
        assert_eq!(req, vec![("com.".to_string(), 5), ("com.".to_string(), 6)]);
        let red: Vec<usize> = report.redundant.iter().map(|g| g.entry).collect();
        assert_eq!(red, vec![7, 8]);
        assert!(report.absent_required.is_empty());
        assert_eq!(report.cycles, vec![vec![name("foo.com")]]);
    }

    #[test]
    fn cycle_minimum_prefers_least_member() {
        let corpus = fixture(&["cycle2-com.zone", "cycle2-net.zone"]);
        let report = compute_minimum_glue(&corpus);
        assert_eq!(report.required.len(), 1);
        assert_eq!(report.required[0].zone, name("com"));
        assert_eq!(report.required[0].record.owner, name("ns.foo.net"));
        assert_eq!(report.redundant.len(), 1);
        assert_eq!(report.redundant[0].zone, name("net"));

        let stripped = compute_minimum_glue(&corpus.without_glue());
        assert_eq!(stripped.absent_required.len(), 1);
        assert_eq!(stripped.absent_required[0].target, name("ns.foo.net"));
    }

    #[test]
    fn consistency_statuses() {
        let corpus = fixture(&["glue-policy-com.zone", "glue-policy-foo.zone"]);
        let findings = check_glue_consistency(&corpus);
        let line5 = findings.iter().find(|f| f.entry == 5).unwrap();
        assert_eq!(line5.status, ConsistencyStatus::Consistent);
        let line7 = findings.iter().find(|f| f.entry == 7).unwrap();
        assert_eq!(line7.status, ConsistencyStatus::Unverifiable);

        let com = corpus.get(&name("com")).unwrap();
        let mut records = com.records().to_vec();
        records[4].rdata = crate::rr::RData::A("192.0.9.9".parse().unwrap());
        let mut mutated = corpus.clone();
        mutated.insert(com.with_records(records).unwrap());
        let findings = check_glue_consistency(&mutated);
        let line5 = findings.iter().find(|f| f.entry == 5).unwrap();
        assert_eq!(line5.status, ConsistencyStatus::Mismatch);
    }

    #[test]
    fn report_is_deterministic() {
        let a = compute_minimum_glue(&fixture(&["glue-policy-com.zone", "glue-policy-foo.zone"])).to_json();
        let b = compute_minimum_glue(&fixture(&["glue-policy-foo.zone", "glue-policy-com.zone"])).to_json();
        assert_eq!(a, b);
    }
}
