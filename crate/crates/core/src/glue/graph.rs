//! Inter-zone delegation dependency graph and cycle detection.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::name::DomainName;
use crate::zone::Corpus;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphNode {
    pub apex: DomainName,
    /// Apex of the delegating zone; `None` for external-unresolved nodes.
    pub parent: Option<DomainName>,
    pub targets: Vec<DomainName>,
    /// Stands in for the zone of an external NS target absent from the corpus.
    pub external_unresolved: bool,
}

/// Delegated child zones and "needs data from" edges between them.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DependencyGraph {
    pub nodes: BTreeMap<DomainName, GraphNode>,
    pub edges: BTreeSet<(DomainName, DomainName)>,
}

impl DependencyGraph {
    pub fn successors<'a>(&'a self, node: &'a DomainName) -> impl Iterator<Item = &'a DomainName> + 'a {
        self.edges
            .iter()
            .filter(move |(from, _)| from == node)
            .map(|(_, to)| to)
    }

    pub fn has_self_loop(&self, node: &DomainName) -> bool {
        self.edges.contains(&(node.clone(), node.clone()))
    }

    /// Builds a graph directly from nodes and edges; used by tests.
    pub fn from_parts(
        nodes: impl IntoIterator<Item = DomainName>,
        edges: impl IntoIterator<Item = (DomainName, DomainName)>,
    ) -> Self {
        let nodes = nodes
            .into_iter()
            .map(|apex| {
                (
                    apex.clone(),
                    GraphNode {
                        apex,
                        parent: None,
                        targets: Vec::new(),
                        external_unresolved: false,
                    },
                )
            })
            .collect();
        DependencyGraph {
            nodes,
            edges: edges.into_iter().collect(),
        }
    }
}

pub fn build_dependency_graph(corpus: &Corpus) -> DependencyGraph {
    let mut graph = DependencyGraph::default();
    for zone in corpus.zones() {
        for d in zone.delegations() {
            let node = graph.nodes.entry(d.child.clone()).or_insert_with(|| GraphNode {
                apex: d.child.clone(),
                parent: Some(zone.apex().clone()),
                targets: Vec::new(),
                external_unresolved: false,
            });
            for t in d.targets {
                if !node.targets.contains(&t) {
                    node.targets.push(t);
                }
            }
        }
    }

    // Targets that neither fall under a delegated child nor inside any corpus
    // zone get a stand-in node for their (unknown) zone.
    let mut stand_ins = BTreeMap::new();
    for node in graph.nodes.values() {
        for t in &node.targets {
            let under_node = graph.nodes.keys().any(|apex| t.is_subdomain_of(apex));
            if !under_node && corpus.enclosing_zone(t).is_none() {
                let apex = t.parent().unwrap_or_else(DomainName::root);
                stand_ins.entry(apex.clone()).or_insert(GraphNode {
                    apex,
                    parent: None,
                    targets: Vec::new(),
                    external_unresolved: true,
                });
            }
        }
    }
    for (apex, node) in stand_ins {
        graph.nodes.entry(apex).or_insert(node);
    }

    let mut edges = BTreeSet::new();
    for node in graph.nodes.values() {
        for t in &node.targets {
            for other in graph.nodes.keys() {
                if t.is_subdomain_of(other) {
                    edges.insert((node.apex.clone(), other.clone()));
                }
            }
        }
    }
    graph.edges = edges;
    graph
}

/// Strongly connected components that contain a cycle, members in canonical
/// order, components ordered by their least member.
pub fn find_cycles(g: &DependencyGraph) -> Vec<Vec<DomainName>> {
    let mut cycles: Vec<Vec<DomainName>> = strongly_connected_components(g)
        .into_iter()
        .filter(|c| c.len() >= 2 || g.has_self_loop(&c[0]))
        .map(|mut c| {
            c.sort();
            c
        })
        .collect();
    cycles.sort_by(|a, b| a[0].cmp(&b[0]));
    cycles
}

/// Tarjan's algorithm, iterative.
fn strongly_connected_components(g: &DependencyGraph) -> Vec<Vec<DomainName>> {
    let names: Vec<&DomainName> = g.nodes.keys().collect();
    let index_of: BTreeMap<&DomainName, usize> = names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); names.len()];
    for (from, to) in &g.edges {
        if let (Some(&f), Some(&t)) = (index_of.get(from), index_of.get(to)) {
            adj[f].push(t);
        }
    }

    let n = names.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut out = Vec::new();

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut edge_pos)) = call.last_mut() {
            if *edge_pos < adj[v].len() {
                let w = adj[v][*edge_pos];
                *edge_pos += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(names[w].clone());
                        if w == v {
                            break;
                        }
                    }
                    out.push(comp);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::name;

    #[test]
    fn tarjan_small_graphs() {
        let g = DependencyGraph::from_parts(
            ["a", "b", "c", "d"].map(name),
            [("a", "b"), ("b", "a"), ("c", "c"), ("c", "d")].map(|(x, y)| (name(x), name(y))),
        );
        assert_eq!(find_cycles(&g), vec![vec![name("a"), name("b")], vec![name("c")]]);

        let acyclic = DependencyGraph::from_parts(["a", "b"].map(name), [(name("a"), name("b"))]);
        assert!(find_cycles(&acyclic).is_empty());
    }
}
