//! Rank dispatch between the graph and k-graph readers.

use std::sync::Arc;

use crate::document::peek_rank;
use crate::error::ParseError;
use crate::graph::{parse_graph, GraphPresentation};
use crate::kgraph::{parse_kgraph, KGraph, KGraphPresentation};

#[derive(Debug, Clone)]
pub enum Presentation {
    Graph(GraphPresentation),
    KGraph(KGraphPresentation),
}

impl Presentation {
    /// Rank 1 documents go to the graph reader (tails allowed), the rest to
    /// the k-graph reader.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        if peek_rank(text)? == 1 {
            parse_graph(text).map(Presentation::Graph)
        } else {
            parse_kgraph(text).map(Presentation::KGraph)
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            Presentation::Graph(_) => 1,
            Presentation::KGraph(p) => p.rank(),
        }
    }

    /// Declared vertices and edges, without rays.
    pub fn core(&self) -> &Arc<KGraph> {
        match self {
            Presentation::Graph(p) => p.core(),
            Presentation::KGraph(p) => &p.graph,
        }
    }
}

/// Weakly connected components of a k-graph's skeleton, as vertex names.
pub fn components(g: &KGraph) -> Vec<Vec<String>> {
    let n = g.vertex_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    for e in g.edge_ids() {
        let info = g.edge_info(e);
        let (a, b) = (find(&mut parent, info.source.0 as usize), find(&mut parent, info.range.0 as usize));
        parent[a] = b;
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<String>> = Default::default();
    for v in g.vertex_ids() {
        let r = find(&mut parent, v.0 as usize);
        groups.entry(r).or_default().push(g.vertex_name(v).to_string());
    }
    let mut out: Vec<Vec<String>> = groups
        .into_values()
        .map(|mut c| {
            c.sort();
            c
        })
        .collect();
    out.sort();
    out
}
