//! Finitely presented directed graphs (rank 1) with tail marks, structural
//! predicates, ends, the single-entry test and finite ray expansion.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use serde::Serialize;

use crate::document::Document;
use crate::error::ParseError;
use crate::kgraph::{EdgeId, KGraph, KGraphBuilder, VertexId, VertexKind};

/// A validated rank-1 presentation. `core` holds the declared vertices and
/// edges only; rays attached at tail marks and at roots appear in
/// [`expand`](Self::expand).
#[derive(Debug, Clone)]
pub struct GraphPresentation {
    pub document: Document,
    core: Arc<KGraph>,
    tails: BTreeSet<String>,
}

/// A directed cycle, rotated to start at its smallest vertex name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Cycle {
    pub vertices: Vec<String>,
    pub edges: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EndKind {
    Sink { vertex: String },
    LoopWithoutExit { edges: Vec<String>, vertices: Vec<String> },
    Tail { root: String },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct End {
    pub id: String,
    #[serde(flatten)]
    pub kind: EndKind,
}

impl End {
    /// Core vertices whose paths are absorbed by this end.
    pub fn anchor_vertices(&self) -> Vec<String> {
        match &self.kind {
            EndKind::Sink { vertex } => vec![vertex.clone()],
            EndKind::LoopWithoutExit { vertices, .. } => vertices.clone(),
            EndKind::Tail { root } => vec![root.clone()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructuralReport {
    pub row_finite: bool,
    pub locally_finite: bool,
    pub sinks: Vec<String>,
    pub sources: Vec<String>,
    pub loops: usize,
    pub loops_with_exit: usize,
    pub connected: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SingleEntryReport {
    pub holds: bool,
    /// Vertices whose entry count differs from one.
    pub violations: BTreeMap<String, usize>,
    /// Entry count of every core vertex, counting the implied ray at roots.
    pub entry_counts: BTreeMap<String, usize>,
    pub roots: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "class", content = "n", rename_all = "snake_case")]
pub enum GraphClass {
    SingleLoop(usize),
    DirectedTree,
    Other,
}

/// Reads a rank-1 graph document.
pub fn parse_graph(text: &str) -> Result<GraphPresentation, ParseError> {
    GraphPresentation::from_document(Document::from_json(text)?)
}

impl GraphPresentation {
    pub fn from_document(doc: Document) -> Result<Self, ParseError> {
        if doc.k != 1 {
            return Err(ParseError::Schema(format!(
                "graph documents must have k = 1, found k = {}",
                doc.k
            )));
        }
        if !doc.squares.is_empty() {
            return Err(ParseError::Schema("squares are not allowed when k = 1".into()));
        }
        let mut b = KGraphBuilder::new(1);
        let mut names: Vec<&String> = doc.vertices.iter().collect();
        names.sort();
        for v in names {
            b.vertex(v, VertexKind::Core)?;
        }
        let mut edges: Vec<_> = doc.edges.iter().collect();
        edges.sort_by(|a, b| a.id.cmp(&b.id));
        for e in &edges {
            if let Some(c) = e.color {
                if c != 1 {
                    return Err(ParseError::BadColor {
                        edge: e.id.clone(),
                        color: c,
                        k: 1,
                    });
                }
            }
            b.edge(&e.id, &e.source, &e.range, 0, false)?;
        }
        let core = b.finish(&[], false)?;
        let mut tails = BTreeSet::new();
        for t in &doc.tails {
            let v = core
                .vertex(t)
                .ok_or_else(|| ParseError::UnknownVertex(t.clone()))?;
            if !tails.insert(t.clone()) {
                return Err(ParseError::InvalidTail {
                    vertex: t.clone(),
                    reason: "vertex is tail-marked twice".into(),
                });
            }
            if !core.is_model_sink(v) {
                return Err(ParseError::InvalidTail {
                    vertex: t.clone(),
                    reason: "vertex already emits edges, so the ray would be an exit; \
                             mark the vertex where the infinite path starts"
                        .into(),
                });
            }
        }
        Ok(Self {
            document: doc,
            core: Arc::new(core),
            tails,
        })
    }

    /// The declared vertices and edges, without rays.
    pub fn core(&self) -> &Arc<KGraph> {
        &self.core
    }

    pub fn tails(&self) -> &BTreeSet<String> {
        &self.tails
    }

    pub fn is_tail_marked(&self, v: VertexId) -> bool {
        self.tails.contains(self.core.vertex_name(v))
    }

    /// Vertex names in lexicographic order.
    pub fn vertex_names(&self) -> Vec<String> {
        let mut v: Vec<String> = self
            .core
            .vertex_ids()
            .map(|v| self.core.vertex_name(v).to_string())
            .collect();
        v.sort();
        v
    }

    /// Sinks of the infinite graph: core vertices emitting nothing and
    /// carrying no tail.
    pub fn sinks(&self) -> Vec<String> {
        let g = &self.core;
        let mut out: Vec<String> = g
            .vertex_ids()
            .filter(|&v| g.is_model_sink(v) && !self.is_tail_marked(v))
            .map(|v| g.vertex_name(v).to_string())
            .collect();
        out.sort();
        out
    }

    pub fn sources(&self) -> Vec<String> {
        let g = &self.core;
        let mut out: Vec<String> = g
            .vertex_ids()
            .filter(|&v| g.in_edges(v, 0).is_empty())
            .map(|v| g.vertex_name(v).to_string())
            .collect();
        out.sort();
        out
    }

    /// All simple directed cycles of the core graph.
    pub fn cycles(&self) -> Vec<Cycle> {
        let g = &self.core;
        let mut order: Vec<VertexId> = g.vertex_ids().collect();
        order.sort_by(|a, b| g.vertex_name(*a).cmp(g.vertex_name(*b)));
        let rank: BTreeMap<VertexId, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut out = Vec::new();
        for &start in &order {
            let mut path_v = vec![start];
            let mut path_e: Vec<EdgeId> = Vec::new();
            self.cycle_dfs(start, start, &rank, &mut path_v, &mut path_e, &mut out);
        }
        out.sort();
        out
    }

    fn cycle_dfs(
        &self,
        start: VertexId,
        at: VertexId,
        rank: &BTreeMap<VertexId, usize>,
        path_v: &mut Vec<VertexId>,
        path_e: &mut Vec<EdgeId>,
        out: &mut Vec<Cycle>,
    ) {
        let g = &self.core;
        for &e in g.out_edges(at, 0) {
            let next = g.edge_info(e).range;
            if next == start {
                path_e.push(e);
                out.push(Cycle {
                    vertices: path_v.iter().map(|&v| g.vertex_name(v).to_string()).collect(),
                    edges: path_e.iter().map(|&e| g.edge_name(e).to_string()).collect(),
                });
                path_e.pop();
            } else if rank[&next] > rank[&start] && !path_v.contains(&next) {
                path_v.push(next);
                path_e.push(e);
                self.cycle_dfs(start, next, rank, path_v, path_e, out);
                path_e.pop();
                path_v.pop();
            }
        }
    }

    /// First vertex on `cycle` emitting an edge off the cycle.
    pub fn cycle_exit(&self, cycle: &Cycle) -> Option<String> {
        let g = &self.core;
        let on: BTreeSet<&str> = cycle.edges.iter().map(String::as_str).collect();
        cycle.vertices.iter().find_map(|name| {
            let v = g.vertex(name)?;
            g.out_edges(v, 0)
                .iter()
                .any(|&e| !on.contains(g.edge_name(e)))
                .then(|| name.clone())
        })
    }

    pub fn loops_with_exit(&self) -> Vec<(Cycle, String)> {
        self.cycles()
            .into_iter()
            .filter_map(|c| self.cycle_exit(&c).map(|x| (c, x)))
            .collect()
    }

    /// Weak components as sorted name lists, ordered by first member.
    pub fn components(&self) -> Vec<Vec<String>> {
        let g = &self.core;
        let mut seen = vec![false; g.vertex_count()];
        let mut comps = Vec::new();
        for v in g.vertex_ids() {
            if seen[v.0 as usize] {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([v]);
            seen[v.0 as usize] = true;
            while let Some(x) = queue.pop_front() {
                comp.push(g.vertex_name(x).to_string());
                let nbrs = g
                    .out_edges(x, 0)
                    .iter()
                    .map(|&e| g.edge_info(e).range)
                    .chain(g.in_edges(x, 0).iter().map(|&e| g.edge_info(e).source));
                for y in nbrs.collect::<Vec<_>>() {
                    if !seen[y.0 as usize] {
                        seen[y.0 as usize] = true;
                        queue.push_back(y);
                    }
                }
            }
            comp.sort();
            comps.push(comp);
        }
        comps.sort();
        comps
    }

    pub fn connected(&self) -> bool {
        self.components().len() == 1
    }

    pub fn structural_report(&self) -> StructuralReport {
        let cycles = self.cycles();
        let with_exit = cycles.iter().filter(|c| self.cycle_exit(c).is_some()).count();
        StructuralReport {
            // a finite presentation with single-edge rays is always both
            row_finite: true,
            locally_finite: true,
            sinks: self.sinks(),
            sources: self.sources(),
            loops: cycles.len(),
            loops_with_exit: with_exit,
            connected: self.connected(),
        }
    }

    /// Sinks, loops without exit and tails, sorted by id.
    pub fn find_ends(&self) -> Vec<End> {
        let mut ends: Vec<End> = self
            .sinks()
            .into_iter()
            .map(|v| End {
                id: format!("sink:{v}"),
                kind: EndKind::Sink { vertex: v },
            })
            .collect();
        for c in self.cycles() {
            if self.cycle_exit(&c).is_none() {
                ends.push(End {
                    id: format!("loop:{}", c.vertices[0]),
                    kind: EndKind::LoopWithoutExit {
                        edges: c.edges,
                        vertices: c.vertices,
                    },
                });
            }
        }
        for t in &self.tails {
            ends.push(End {
                id: format!("tail:{t}"),
                kind: EndKind::Tail { root: t.clone() },
            });
        }
        ends.sort();
        ends
    }

    /// Smallest source of each acyclic weak component. Such a vertex is read
    /// as fed by an infinite incoming ray with no exits, which is how a finite
    /// presentation stands in for an infinite tree without sources.
    pub fn roots(&self) -> Vec<String> {
        let g = &self.core;
        let cyclic: BTreeSet<String> = self
            .cycles()
            .into_iter()
            .flat_map(|c| c.vertices)
            .collect();
        let sources: BTreeSet<String> = self.sources().into_iter().collect();
        let mut out = Vec::new();
        for comp in self.components() {
            if comp.iter().any(|v| cyclic.contains(v)) {
                continue;
            }
            if let Some(r) = comp.iter().find(|v| sources.contains(*v)) {
                debug_assert!(g.vertex(r).is_some());
                out.push(r.clone());
            }
        }
        out
    }

    pub fn single_entry_check(&self) -> SingleEntryReport {
        let g = &self.core;
        let roots = self.roots();
        let mut entry_counts = BTreeMap::new();
        for v in g.vertex_ids() {
            let name = g.vertex_name(v).to_string();
            let mut n = g.in_edges(v, 0).len();
            if roots.contains(&name) {
                n += 1;
            }
            entry_counts.insert(name, n);
        }
        let violations: BTreeMap<String, usize> = entry_counts
            .iter()
            .filter(|(_, &n)| n != 1)
            .map(|(k, &n)| (k.clone(), n))
            .collect();
        SingleEntryReport {
            holds: violations.is_empty(),
            violations,
            entry_counts,
            roots,
        }
    }

    pub fn classify(&self) -> GraphClass {
        if !self.connected() || !self.single_entry_check().holds || !self.sinks().is_empty() {
            return GraphClass::Other;
        }
        let cycles = self.cycles();
        match cycles.len() {
            0 => GraphClass::DirectedTree,
            1 if cycles[0].vertices.len() == self.core.vertex_count()
                && cycles[0].edges.len() == self.core.edge_count()
                && self.tails.is_empty() =>
            {
                GraphClass::SingleLoop(cycles[0].vertices.len())
            }
            _ => GraphClass::Other,
        }
    }

    /// Finite model with every tail and root ray unrolled `depth` steps.
    ///
    /// Tail at `w`: vertices `w~t1..w~tT`, edges `w~e1: w→w~t1`,
    /// `w~e{i}: w~t{i-1}→w~t{i}`. Root `r`: vertices `r~h1..r~hT`, edges
    /// `r~f1: r~h1→r`, `r~f{i}: r~h{i}→r~h{i-1}`.
    pub fn expand(&self, depth: usize) -> Result<Arc<KGraph>, ParseError> {
        let depth = depth.max(1);
        let mut b = KGraphBuilder::new(1);
        b.tail_depth(depth);
        for name in self.vertex_names() {
            b.vertex(&name, VertexKind::Core)?;
        }
        let mut edges: Vec<_> = self.document.edges.iter().collect();
        edges.sort_by(|a, b| a.id.cmp(&b.id));
        for e in edges {
            b.edge(&e.id, &e.source, &e.range, 0, false)?;
        }
        for w in &self.tails {
            let mut prev = w.clone();
            for step in 1..=depth {
                let v = format!("{w}~t{step}");
                b.vertex(
                    &v,
                    VertexKind::Tail {
                        root: w.clone(),
                        step,
                    },
                )?;
                b.edge(&format!("{w}~e{step}"), &prev, &v, 0, true)?;
                prev = v;
            }
        }
        for r in self.roots() {
            let mut next = r.clone();
            for step in 1..=depth {
                let v = format!("{r}~h{step}");
                b.vertex(
                    &v,
                    VertexKind::Head {
                        root: r.clone(),
                        step,
                    },
                )?;
                b.edge(&format!("{r}~f{step}"), &v, &next, 0, true)?;
                next = v;
            }
        }
        Ok(Arc::new(b.finish(&[], false)?))
    }

    /// Same presentation with every identifier passed through `rename`.
    pub fn relabel(&self, rename: impl Fn(&str) -> String) -> Result<Self, ParseError> {
        let mut doc = self.document.clone();
        doc.vertices = doc.vertices.iter().map(|v| rename(v)).collect();
        for e in &mut doc.edges {
            e.source = rename(&e.source);
            e.range = rename(&e.range);
        }
        doc.tails = doc.tails.iter().map(|v| rename(v)).collect();
        Self::from_document(doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(text: &str) -> GraphPresentation {
        parse_graph(text).unwrap()
    }

    #[test]
    fn single_loop_basics() {
        let p = g(r#"{"k":1,"vertices":["v"],"edges":[{"id":"e","source":"v","range":"v"}],"tails":[]}"#);
        let r = p.structural_report();
        assert_eq!((r.loops, r.loops_with_exit, r.sinks.len(), r.connected), (1, 0, 0, true));
        assert_eq!(p.classify(), GraphClass::SingleLoop(1));
        assert!(p.single_entry_check().holds);
        assert_eq!(p.find_ends()[0].id, "loop:v");
    }

    #[test]
    fn tail_graph_and_roots() {
        let p = g(r#"{"k":1,"vertices":["v","w"],"edges":[{"id":"e","source":"v","range":"w"}],"tails":["w"]}"#);
        assert_eq!(p.find_ends().len(), 1);
        assert_eq!(p.roots(), vec!["v"]);
        assert!(p.single_entry_check().holds);
        assert_eq!(p.classify(), GraphClass::DirectedTree);
        let m = p.expand(3).unwrap();
        assert_eq!(m.vertex_count(), 2 + 3 + 3);
        assert!(m.is_frontier(m.vertex("w~t3").unwrap()));
        assert!(m.is_head_start(m.vertex("v~h3").unwrap()));
    }

    #[test]
    fn parse_errors() {
        let dangling = parse_graph(r#"{"k":1,"vertices":["v"],"edges":[{"id":"e","source":"v","range":"x"}]}"#);
        assert!(matches!(dangling, Err(ParseError::DanglingVertex { .. })));
        let dup = parse_graph(
            r#"{"k":1,"vertices":["v"],"edges":[{"id":"e","source":"v","range":"v"},{"id":"e","source":"v","range":"v"}]}"#,
        );
        assert!(matches!(dup, Err(ParseError::DuplicateEdge(_))));
        let bad_tail = parse_graph(r#"{"k":1,"vertices":["v"],"edges":[{"id":"e","source":"v","range":"v"}],"tails":["v"]}"#);
        assert!(matches!(bad_tail, Err(ParseError::InvalidTail { .. })));
        let syntax = parse_graph("{\"k\":1,\n \"vertices\": [}");
        assert!(matches!(syntax, Err(ParseError::Syntax { line: 2, .. })));
        let unknown = parse_graph(r#"{"k":1,"vertices":[],"edges":[],"extra":1}"#);
        assert!(unknown.is_err());
    }

    #[test]
    fn loop_with_exit_and_disjoint_loops() {
        let p = g(r#"{"k":1,"vertices":["v","w"],"edges":[{"id":"e","source":"v","range":"v"},{"id":"f","source":"v","range":"w"}]}"#);
        assert_eq!(p.structural_report().loops_with_exit, 1);
        assert_eq!(p.classify(), GraphClass::Other);
        let two = g(r#"{"k":1,"vertices":["a","b"],"edges":[{"id":"e","source":"a","range":"a"},{"id":"f","source":"b","range":"b"}]}"#);
        assert!(!two.structural_report().connected);
    }

    #[test]
    fn double_entry_violation() {
        let p = g(r#"{"k":1,"vertices":["a","b","v"],"edges":[
            {"id":"e","source":"a","range":"v"},{"id":"f","source":"b","range":"v"}],"tails":["v"]}"#);
        let r = p.single_entry_check();
        assert!(!r.holds);
        assert_eq!(r.violations.get("v"), Some(&2));
        // b is a second source in an acyclic component: no implied ray
        assert_eq!(r.violations.get("b"), Some(&0));
    }
}
