//! Finitely presented k-graphs: a colored 1-skeleton plus factorisation
//! squares, with color-sorted path normal forms.
//!
//! Orientation: a path `λ = λ_1 λ_2 ⋯` is read left to right with
//! `r(λ_i) = s(λ_{i+1})`, and `S_λ = S_{λ_1} S_{λ_2} ⋯`. Literature that
//! composes k-graph paths right to left swaps the words "source" and
//! "range"; under that dictionary its "no sources" is our "no sinks" and its
//! "single exit" (`|Λ^{e_i} v| = 1`) is our single entry per color. Stored
//! data never flips.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::document::{Document, SquareRecord};
use crate::error::{Error, ParseError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub u32);

/// Degree vector in `Z^k` (paths only ever carry nonnegative entries).
pub type Degree = Vec<i64>;

/// Where a vertex of a finite model came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VertexKind {
    Core,
    /// `step`-th vertex along the outgoing ray attached at `root`.
    Tail { root: String, step: usize },
    /// `step`-th vertex along the implied incoming ray feeding `root`.
    Head { root: String, step: usize },
}

#[derive(Debug, Clone)]
pub struct VertexInfo {
    pub name: String,
    pub kind: VertexKind,
}

#[derive(Debug, Clone)]
pub struct EdgeInfo {
    pub name: String,
    pub source: VertexId,
    pub range: VertexId,
    /// Zero-based color.
    pub color: usize,
}

/// Direction for path enumeration relative to a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Paths whose range is the vertex.
    Into,
    /// Paths whose source is the vertex.
    OutOf,
}

static NEXT_GRAPH_ID: AtomicU64 = AtomicU64::new(1);

/// A finite colored graph with factorisation squares. Every algebraic
/// computation runs over one of these.
#[derive(Debug)]
pub struct KGraph {
    id: u64,
    k: usize,
    vertices: Vec<VertexInfo>,
    edges: Vec<EdgeInfo>,
    vertex_index: HashMap<String, VertexId>,
    edge_index: HashMap<String, EdgeId>,
    out_edges: Vec<Vec<Vec<EdgeId>>>,
    in_edges: Vec<Vec<Vec<EdgeId>>>,
    squares: HashMap<(EdgeId, EdgeId), (EdgeId, EdgeId)>,
    tail_depth: usize,
}

/// A path in normal form: edges sorted by color via square moves.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KPath {
    pub source: VertexId,
    pub edges: Vec<EdgeId>,
    pub range: VertexId,
    pub degree: Degree,
}

impl fmt::Debug for KPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.edges.is_empty() {
            write!(f, "v{}", self.source.0)
        } else {
            let ids: Vec<String> = self.edges.iter().map(|e| e.0.to_string()).collect();
            write!(f, "[{}]", ids.join(" "))
        }
    }
}

impl KPath {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_vertex(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

pub(crate) struct KGraphBuilder {
    k: usize,
    vertices: Vec<VertexInfo>,
    edges: Vec<EdgeInfo>,
    vertex_index: HashMap<String, VertexId>,
    edge_index: HashMap<String, EdgeId>,
    tail_depth: usize,
}

impl KGraphBuilder {
    pub(crate) fn new(k: usize) -> Self {
        Self {
            k,
            vertices: Vec::new(),
            edges: Vec::new(),
            vertex_index: HashMap::new(),
            edge_index: HashMap::new(),
            tail_depth: 0,
        }
    }

    pub(crate) fn tail_depth(&mut self, depth: usize) {
        self.tail_depth = depth;
    }

    pub(crate) fn vertex(&mut self, name: &str, kind: VertexKind) -> Result<VertexId, ParseError> {
        if self.vertex_index.contains_key(name) {
            return Err(match kind {
                VertexKind::Core => ParseError::DuplicateVertex(name.to_string()),
                _ => ParseError::NameCollision(name.to_string()),
            });
        }
        let id = VertexId(self.vertices.len() as u32);
        self.vertices.push(VertexInfo {
            name: name.to_string(),
            kind,
        });
        self.vertex_index.insert(name.to_string(), id);
        Ok(id)
    }

    pub(crate) fn edge(
        &mut self,
        name: &str,
        source: &str,
        range: &str,
        color: usize,
        generated: bool,
    ) -> Result<EdgeId, ParseError> {
        if self.edge_index.contains_key(name) {
            return Err(if generated {
                ParseError::NameCollision(name.to_string())
            } else {
                ParseError::DuplicateEdge(name.to_string())
            });
        }
        let lookup = |v: &str| {
            self.vertex_index
                .get(v)
                .copied()
                .ok_or_else(|| ParseError::DanglingVertex {
                    edge: name.to_string(),
                    vertex: v.to_string(),
                })
        };
        let s = lookup(source)?;
        let r = lookup(range)?;
        let id = EdgeId(self.edges.len() as u32);
        self.edges.push(EdgeInfo {
            name: name.to_string(),
            source: s,
            range: r,
            color,
        });
        self.edge_index.insert(name.to_string(), id);
        Ok(id)
    }

    pub(crate) fn finish(
        self,
        squares: &[SquareRecord],
        require_every_color: bool,
    ) -> Result<KGraph, ParseError> {
        let n = self.vertices.len();
        let mut out_edges = vec![vec![Vec::new(); self.k]; n];
        let mut in_edges = vec![vec![Vec::new(); self.k]; n];
        // Edges are visited in name order so adjacency lists are deterministic.
        let mut order: Vec<EdgeId> = (0..self.edges.len() as u32).map(EdgeId).collect();
        order.sort_by(|a, b| self.edges[a.0 as usize].name.cmp(&self.edges[b.0 as usize].name));
        for e in order {
            let info = &self.edges[e.0 as usize];
            out_edges[info.source.0 as usize][info.color].push(e);
            in_edges[info.range.0 as usize][info.color].push(e);
        }
        let mut graph = KGraph {
            id: NEXT_GRAPH_ID.fetch_add(1, Ordering::Relaxed),
            k: self.k,
            vertices: self.vertices,
            edges: self.edges,
            vertex_index: self.vertex_index,
            edge_index: self.edge_index,
            out_edges,
            in_edges,
            squares: HashMap::new(),
            tail_depth: self.tail_depth,
        };
        if require_every_color {
            for v in 0..n {
                for c in 0..graph.k {
                    if graph.out_edges[v][c].is_empty() {
                        return Err(ParseError::MissingColor {
                            vertex: graph.vertices[v].name.clone(),
                            color: c + 1,
                        });
                    }
                }
            }
        }
        graph.install_squares(squares)?;
        if graph.k >= 3 {
            graph.check_cubes()?;
        }
        Ok(graph)
    }
}

impl KGraph {
    /// Identifier unique to this graph instance within the process.
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn rank(&self) -> usize {
        self.k
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertices.len() as u32).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len() as u32).map(EdgeId)
    }

    pub fn vertex(&self, name: &str) -> Option<VertexId> {
        self.vertex_index.get(name).copied()
    }

    pub fn edge(&self, name: &str) -> Option<EdgeId> {
        self.edge_index.get(name).copied()
    }

    pub fn vertex_info(&self, v: VertexId) -> &VertexInfo {
        &self.vertices[v.0 as usize]
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v.0 as usize].name
    }

    pub fn edge_info(&self, e: EdgeId) -> &EdgeInfo {
        &self.edges[e.0 as usize]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edges[e.0 as usize].name
    }

    pub fn color(&self, e: EdgeId) -> usize {
        self.edges[e.0 as usize].color
    }

    /// Depth to which rays were unrolled when building this finite model.
    pub fn tail_depth(&self) -> usize {
        self.tail_depth
    }

    pub fn out_edges(&self, v: VertexId, color: usize) -> &[EdgeId] {
        &self.out_edges[v.0 as usize][color]
    }

    pub fn in_edges(&self, v: VertexId, color: usize) -> &[EdgeId] {
        &self.in_edges[v.0 as usize][color]
    }

    /// Vertices with no outgoing edge in this finite model.
    pub fn is_model_sink(&self, v: VertexId) -> bool {
        self.out_edges[v.0 as usize].iter().all(|c| c.is_empty())
    }

    /// Last vertex of an unrolled tail: it emits an edge outside the model.
    pub fn is_frontier(&self, v: VertexId) -> bool {
        matches!(&self.vertices[v.0 as usize].kind,
            VertexKind::Tail { step, .. } if *step == self.tail_depth)
    }

    /// First vertex of an unrolled head ray: it receives an edge outside the model.
    pub fn is_head_start(&self, v: VertexId) -> bool {
        matches!(&self.vertices[v.0 as usize].kind,
            VertexKind::Head { step, .. } if *step == self.tail_depth)
    }

    /// A sink of the presented (infinite) graph, as opposed to a frontier.
    pub fn is_true_sink(&self, v: VertexId) -> bool {
        self.is_model_sink(v) && !self.is_frontier(v)
    }

    pub fn is_boundary(&self, v: VertexId) -> bool {
        self.is_frontier(v) || self.is_head_start(v)
    }

    pub fn zero_degree(&self) -> Degree {
        vec![0; self.k]
    }

    pub fn unit_degree(&self, color: usize) -> Degree {
        let mut d = self.zero_degree();
        d[color] = 1;
        d
    }

    pub fn vertex_path(&self, v: VertexId) -> KPath {
        KPath {
            source: v,
            edges: Vec::new(),
            range: v,
            degree: self.zero_degree(),
        }
    }

    pub fn edge_path(&self, e: EdgeId) -> KPath {
        let info = self.edge_info(e);
        KPath {
            source: info.source,
            edges: vec![e],
            range: info.range,
            degree: self.unit_degree(info.color),
        }
    }

    /// Builds a path from edge names, validating composability, and
    /// normalizes it.
    pub fn path_from_names(&self, names: &[&str]) -> Result<KPath, ParseError> {
        let mut edges = Vec::with_capacity(names.len());
        for n in names {
            edges.push(self.edge(n).ok_or_else(|| ParseError::UnknownEdge(n.to_string()))?);
        }
        self.path_from_edges(&edges).ok_or_else(|| {
            ParseError::Schema(format!("edges {names:?} do not form a path"))
        })
    }

    /// Builds a normalized path from a composable edge sequence.
    pub fn path_from_edges(&self, edges: &[EdgeId]) -> Option<KPath> {
        let first = *edges.first()?;
        let mut path = self.edge_path(first);
        for &e in &edges[1..] {
            path = self.compose(&path, &self.edge_path(e))?;
        }
        Some(path)
    }

    pub fn path_names(&self, p: &KPath) -> Vec<String> {
        p.edges.iter().map(|&e| self.edge_name(e).to_string()).collect()
    }

    /// Readable label: edge names joined, or the vertex name for length 0.
    pub fn path_label(&self, p: &KPath) -> String {
        if p.is_vertex() {
            self.vertex_name(p.source).to_string()
        } else {
            self.path_names(p).join("")
        }
    }

    /// Concatenation `a` then `b`, normalized; `None` unless `r(a) = s(b)`.
    pub fn compose(&self, a: &KPath, b: &KPath) -> Option<KPath> {
        if a.range != b.source {
            return None;
        }
        let mut edges = a.edges.clone();
        edges.extend_from_slice(&b.edges);
        let degree = a.degree.iter().zip(&b.degree).map(|(x, y)| x + y).collect();
        let mut path = KPath {
            source: a.source,
            edges,
            range: b.range,
            degree,
        };
        self.normalize_in_place(&mut path.edges);
        Some(path)
    }

    fn swap_pair(&self, x: EdgeId, y: EdgeId) -> (EdgeId, EdgeId) {
        *self
            .squares
            .get(&(x, y))
            .expect("validated k-graph has a square for every composable 2-color pair")
    }

    /// Bubble-sorts colors into nondecreasing order using square moves.
    fn normalize_in_place(&self, edges: &mut [EdgeId]) {
        if self.k == 1 {
            return;
        }
        let keys: Vec<usize> = edges.iter().map(|&e| self.color(e)).collect();
        self.sort_by_keys(edges, keys);
    }

    fn sort_by_keys(&self, edges: &mut [EdgeId], mut keys: Vec<usize>) {
        let n = edges.len();
        loop {
            let mut swapped = false;
            for i in 0..n.saturating_sub(1) {
                if keys[i] > keys[i + 1] {
                    let (a, b) = self.swap_pair(edges[i], edges[i + 1]);
                    edges[i] = a;
                    edges[i + 1] = b;
                    keys.swap(i, i + 1);
                    swapped = true;
                }
            }
            if !swapped {
                break;
            }
        }
    }

    /// Representative of `p` whose color sequence is `target` (a
    /// rearrangement of the color histogram of `p`).
    pub fn reorder(&self, p: &KPath, target: &[usize]) -> Vec<EdgeId> {
        let mut edges = p.edges.clone();
        debug_assert_eq!(edges.len(), target.len());
        // j-th occurrence of color c in the current word goes to the j-th
        // occurrence of c in the target word
        let mut slots: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (pos, &c) in target.iter().enumerate().rev() {
            slots.entry(c).or_default().push(pos);
        }
        let keys: Vec<usize> = edges
            .iter()
            .map(|&e| {
                slots
                    .get_mut(&self.color(e))
                    .and_then(|v| v.pop())
                    .expect("target is a rearrangement of the path colors")
            })
            .collect();
        self.sort_by_keys(&mut edges, keys);
        edges
    }

    fn sorted_colors(degree: &[i64]) -> Vec<usize> {
        degree
            .iter()
            .enumerate()
            .flat_map(|(c, &n)| std::iter::repeat(c).take(n.max(0) as usize))
            .collect()
    }

    fn path_at(&self, start: VertexId, edges: Vec<EdgeId>) -> KPath {
        let mut degree = self.zero_degree();
        for &e in &edges {
            degree[self.color(e)] += 1;
        }
        let range = edges.last().map(|&e| self.edge_info(e).range).unwrap_or(start);
        let mut path = KPath {
            source: start,
            edges,
            range,
            degree,
        };
        self.normalize_in_place(&mut path.edges);
        path
    }

    /// The unique factor `λ(m, n)` of degree `n − m`.
    pub fn segment(&self, p: &KPath, m: &[i64], n: &[i64]) -> Result<KPath> {
        let ok = m.len() == self.k
            && n.len() == self.k
            && (0..self.k).all(|c| 0 <= m[c] && m[c] <= n[c] && n[c] <= p.degree[c]);
        if !ok {
            return Err(Error::SegmentOutOfRange {
                m: m.to_vec(),
                n: n.to_vec(),
                degree: p.degree.clone(),
            });
        }
        Ok(self.segment_unchecked(p, m, n))
    }

    pub(crate) fn segment_unchecked(&self, p: &KPath, m: &[i64], n: &[i64]) -> KPath {
        let mid: Vec<i64> = n.iter().zip(m).map(|(a, b)| a - b).collect();
        let rest: Vec<i64> = p.degree.iter().zip(n).map(|(a, b)| a - b).collect();
        let mut target = Self::sorted_colors(m);
        let head = target.len();
        target.extend(Self::sorted_colors(&mid));
        let body = target.len();
        target.extend(Self::sorted_colors(&rest));
        let word = if self.k == 1 {
            p.edges.clone()
        } else {
            self.reorder(p, &target)
        };
        let start = if head == 0 {
            p.source
        } else {
            self.edge_info(word[head - 1]).range
        };
        self.path_at(start, word[head..body].to_vec())
    }

    /// Prefix test: returns the remainder `α'` with `α = ν α'`.
    pub fn strip_prefix(&self, alpha: &KPath, nu: &KPath) -> Option<KPath> {
        if alpha.source != nu.source || (0..self.k).any(|c| nu.degree[c] > alpha.degree[c]) {
            return None;
        }
        if self.k == 1 {
            return alpha.edges.starts_with(&nu.edges).then(|| {
                self.path_at(
                    nu.range,
                    alpha.edges[nu.edges.len()..].to_vec(),
                )
            });
        }
        let zero = self.zero_degree();
        if self.segment_unchecked(alpha, &zero, &nu.degree) != *nu {
            return None;
        }
        Some(self.segment_unchecked(alpha, &nu.degree, &alpha.degree))
    }

    /// Factorisation `μ = μ^σ_1 ⋯ μ^σ_k` with `d(μ^σ_i) = e_{σ(i)}`.
    /// `sigma` holds zero-based color indices.
    pub fn factorize(&self, mu: &KPath, sigma: &[usize]) -> Result<Vec<EdgeId>> {
        let ones = vec![1; self.k];
        if mu.degree != ones {
            return Err(Error::DegreeMismatch {
                expected: ones,
                found: mu.degree.clone(),
            });
        }
        if !is_permutation(sigma, self.k) {
            return Err(Error::BadPermutation(sigma.to_vec()));
        }
        Ok(self.reorder(mu, sigma))
    }

    /// All normal-form paths of degree `n` starting at `v` (`OutOf`) or
    /// ending at `v` (`Into`), in deterministic order.
    pub fn enumerate_paths(&self, n: &[i64], v: VertexId, direction: Direction) -> Vec<KPath> {
        let colors = Self::sorted_colors(n);
        let mut out = Vec::new();
        match direction {
            Direction::OutOf => {
                let mut stack = Vec::new();
                self.extend_forward(v, &colors, &mut stack, &mut out, v);
            }
            Direction::Into => {
                let mut stack = Vec::new();
                self.extend_backward(v, &colors, &mut stack, &mut out, v);
            }
        }
        out.sort();
        out
    }

    /// Like [`enumerate_paths`](Self::enumerate_paths) but bounded by a
    /// truncation level on every color.
    pub fn enumerate_paths_bounded(
        &self,
        n: &[i64],
        v: VertexId,
        direction: Direction,
        level: u32,
    ) -> Result<Vec<KPath>> {
        if n.iter().any(|&x| x < 0 || x > level as i64) {
            return Err(Error::TruncationExceeded {
                requested: n.to_vec(),
                limit: level,
            });
        }
        Ok(self.enumerate_paths(n, v, direction))
    }

    fn extend_forward(
        &self,
        at: VertexId,
        colors: &[usize],
        stack: &mut Vec<EdgeId>,
        out: &mut Vec<KPath>,
        start: VertexId,
    ) {
        match colors.split_first() {
            None => out.push(KPath {
                source: start,
                edges: stack.clone(),
                range: at,
                degree: self.degree_of(stack),
            }),
            Some((&c, rest)) => {
                for &e in self.out_edges(at, c) {
                    stack.push(e);
                    self.extend_forward(self.edge_info(e).range, rest, stack, out, start);
                    stack.pop();
                }
            }
        }
    }

    fn extend_backward(
        &self,
        at: VertexId,
        colors: &[usize],
        stack: &mut Vec<EdgeId>,
        out: &mut Vec<KPath>,
        end: VertexId,
    ) {
        match colors.split_last() {
            None => {
                let edges: Vec<EdgeId> = stack.iter().rev().copied().collect();
                out.push(KPath {
                    source: at,
                    degree: self.degree_of(&edges),
                    edges,
                    range: end,
                })
            }
            Some((&c, rest)) => {
                for &e in self.in_edges(at, c) {
                    stack.push(e);
                    self.extend_backward(self.edge_info(e).source, rest, stack, out, end);
                    stack.pop();
                }
            }
        }
    }

    fn degree_of(&self, edges: &[EdgeId]) -> Degree {
        let mut d = self.zero_degree();
        for &e in edges {
            d[self.color(e)] += 1;
        }
        d
    }

    /// Extensions `ρ` from `v` used to rewrite `S_μ S_ν*` as
    /// `Σ_ρ S_{μρ} S_{νρ}*`: full degree `extra`, except that for `k = 1`
    /// extension stops early at vertices emitting no edge.
    pub fn maximal_extensions(&self, v: VertexId, extra: &[i64]) -> Vec<KPath> {
        if self.k > 1 {
            return self.enumerate_paths(extra, v, Direction::OutOf);
        }
        let mut out = Vec::new();
        let mut stack = Vec::new();
        self.extend_maximal(v, extra[0], &mut stack, &mut out, v);
        out
    }

    fn extend_maximal(
        &self,
        at: VertexId,
        remaining: i64,
        stack: &mut Vec<EdgeId>,
        out: &mut Vec<KPath>,
        start: VertexId,
    ) {
        let next = self.out_edges(at, 0);
        if remaining == 0 || next.is_empty() {
            out.push(KPath {
                source: start,
                edges: stack.clone(),
                range: at,
                degree: vec![stack.len() as i64],
            });
            return;
        }
        for &e in next {
            stack.push(e);
            self.extend_maximal(self.edge_info(e).range, remaining - 1, stack, out, start);
            stack.pop();
        }
    }

    fn install_squares(&mut self, squares: &[SquareRecord]) -> Result<(), ParseError> {
        if self.k == 1 && !squares.is_empty() {
            return Err(ParseError::Schema("squares are not allowed when k = 1".into()));
        }
        for sq in squares {
            let look = |n: &String| {
                self.edge(n)
                    .ok_or_else(|| ParseError::UnknownEdge(n.clone()))
            };
            let (e, f) = (look(&sq.first[0])?, look(&sq.first[1])?);
            let (a, b) = (look(&sq.second[0])?, look(&sq.second[1])?);
            let bad = |reason: &str| ParseError::SquareMismatch {
                first: sq.first.clone(),
                second: sq.second.clone(),
                reason: reason.to_string(),
            };
            let (ie, if_, ia, ib) = (self.edge_info(e), self.edge_info(f), self.edge_info(a), self.edge_info(b));
            if ie.color == if_.color {
                return Err(bad("first pair must use two different colors"));
            }
            if ia.color != if_.color || ib.color != ie.color {
                return Err(bad("second pair must swap the colors of the first"));
            }
            if ie.range != if_.source || ia.range != ib.source {
                return Err(bad("pairs must be composable"));
            }
            if ie.source != ia.source || if_.range != ib.range {
                return Err(bad("endpoints of the two pairs differ"));
            }
            for (key, val) in [((e, f), (a, b)), ((a, b), (e, f))] {
                if self.squares.insert(key, val).is_some() {
                    return Err(ParseError::DuplicateSquare(
                        self.edge_name(key.0).to_string(),
                        self.edge_name(key.1).to_string(),
                    ));
                }
            }
        }
        for x in self.edge_ids() {
            let ix = self.edge_info(x);
            for c in 0..self.k {
                if c == ix.color {
                    continue;
                }
                for &y in self.out_edges(ix.range, c) {
                    if !self.squares.contains_key(&(x, y)) {
                        return Err(ParseError::MissingSquare(
                            self.edge_name(x).to_string(),
                            self.edge_name(y).to_string(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Compares the two hexagon routes (`s1 s2 s1` against `s2 s1 s2`) on
    /// every composable path with three distinct colors.
    fn check_cubes(&self) -> Result<(), ParseError> {
        for x in self.edge_ids() {
            let cx = self.color(x);
            for cy in (0..self.k).filter(|&c| c != cx) {
                for &y in self.out_edges(self.edge_info(x).range, cy) {
                    for cz in (0..self.k).filter(|&c| c != cx && c != cy) {
                        for &z in self.out_edges(self.edge_info(y).range, cz) {
                            let word = [x, y, z];
                            let left = self.apply_swaps(word, &[0, 1, 0]);
                            let right = self.apply_swaps(word, &[1, 0, 1]);
                            if left != right {
                                return Err(ParseError::CubeInconsistency {
                                    path: word.iter().map(|&e| self.edge_name(e).to_string()).collect(),
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn apply_swaps(&self, mut word: [EdgeId; 3], positions: &[usize]) -> [EdgeId; 3] {
        for &p in positions {
            let (a, b) = self.swap_pair(word[p], word[p + 1]);
            word[p] = a;
            word[p + 1] = b;
        }
        word
    }
}

pub fn is_permutation(sigma: &[usize], k: usize) -> bool {
    sigma.len() == k && sigma.iter().copied().collect::<BTreeSet<_>>() == (0..k).collect()
}

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

/// `(-1)^σ` by inversion counting.
pub fn permutation_sign(sigma: &[usize]) -> i64 {
    let mut inversions = 0;
    for i in 0..sigma.len() {
        for j in i + 1..sigma.len() {
            if sigma[i] > sigma[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `σ ∘ τ` as sequences: `(σ∘τ)(i) = σ(τ(i))`.
pub fn compose_permutations(sigma: &[usize], tau: &[usize]) -> Vec<usize> {
    tau.iter().map(|&t| sigma[t]).collect()
}

/// A validated k-graph presentation.
#[derive(Debug, Clone)]
pub struct KGraphPresentation {
    pub document: Document,
    pub graph: Arc<KGraph>,
}

impl KGraphPresentation {
    pub fn rank(&self) -> usize {
        self.graph.rank()
    }

    /// Entering-edge counts per vertex and color that differ from one.
    pub fn single_exit_violations(&self) -> Vec<(String, usize, usize)> {
        let g = &self.graph;
        let mut out = Vec::new();
        for v in g.vertex_ids() {
            for c in 0..g.rank() {
                let n = g.in_edges(v, c).len();
                if n != 1 {
                    out.push((g.vertex_name(v).to_string(), c + 1, n));
                }
            }
        }
        out
    }

    pub fn single_exit(&self) -> bool {
        self.single_exit_violations().is_empty()
    }
}

/// Reads a k-graph document: colored edges plus factorisation squares.
///
/// For `k >= 2` every vertex must emit at least one edge of every color, and
/// cube consistency is checked when `k >= 3`. Tails are rejected here; use
/// the graph reader for 1-graphs with rays.
pub fn parse_kgraph(text: &str) -> Result<KGraphPresentation, ParseError> {
    let doc = Document::from_json(text)?;
    kgraph_from_document(doc)
}

pub fn kgraph_from_document(doc: Document) -> Result<KGraphPresentation, ParseError> {
    if doc.k == 0 {
        return Err(ParseError::ZeroRank);
    }
    if !doc.tails.is_empty() {
        return Err(ParseError::TailsInKGraph);
    }
    let mut b = KGraphBuilder::new(doc.k);
    let mut names: Vec<&String> = doc.vertices.iter().collect();
    names.sort();
    for v in names {
        b.vertex(v, VertexKind::Core)?;
    }
    let mut edges: Vec<_> = doc.edges.iter().collect();
    edges.sort_by(|a, b| a.id.cmp(&b.id));
    for e in edges {
        let color = match (doc.k, e.color) {
            (1, None) => 1,
            (_, Some(c)) => c,
            (_, None) => {
                return Err(ParseError::Schema(format!("edge `{}` is missing a color", e.id)))
            }
        };
        if color == 0 || color > doc.k {
            return Err(ParseError::BadColor {
                edge: e.id.clone(),
                color,
                k: doc.k,
            });
        }
        b.edge(&e.id, &e.source, &e.range, color - 1, false)?;
    }
    let graph = b.finish(&doc.squares, doc.k >= 2)?;
    Ok(KGraphPresentation {
        document: doc,
        graph: Arc::new(graph),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus() -> KGraphPresentation {
        parse_kgraph(
            r#"{"k":2,"vertices":["v"],"edges":[
                {"id":"e","source":"v","range":"v","color":1},
                {"id":"f","source":"v","range":"v","color":2}],
               "squares":[{"first":["e","f"],"second":["f","e"]}]}"#,
        )
        .unwrap()
    }

    /// Two vertices u, w; color 1 swaps them, color 2 loops at each.
    /// Square: `x f_w = f_u x` and `y f_u = f_w y`.
    pub(crate) fn two_vertex() -> KGraphPresentation {
        parse_kgraph(
            r#"{"k":2,"vertices":["u","w"],"edges":[
                {"id":"x","source":"u","range":"w","color":1},
                {"id":"y","source":"w","range":"u","color":1},
                {"id":"fu","source":"u","range":"u","color":2},
                {"id":"fw","source":"w","range":"w","color":2}],
               "squares":[{"first":["x","fw"],"second":["fu","x"]},
                          {"first":["y","fu"],"second":["fw","y"]}]}"#,
        )
        .unwrap()
    }

    #[test]
    fn torus_segment_prefix() {
        let p = torus();
        let g = &p.graph;
        let ef = g.path_from_names(&["e", "f"]).unwrap();
        let fe = g.path_from_names(&["f", "e"]).unwrap();
        assert_eq!(ef, fe);
        let e = g.segment(&ef, &[0, 0], &[1, 0]).unwrap();
        assert_eq!(g.path_names(&e), vec!["e"]);
        assert_eq!(g.segment(&ef, &[0, 0], &[1, 1]).unwrap(), ef);
        assert!(g.segment(&ef, &[0, 0], &[2, 0]).is_err());
    }

    #[test]
    fn factorize_commuting_square() {
        let p = torus();
        let g = &p.graph;
        let ef = g.path_from_names(&["e", "f"]).unwrap();
        let id: Vec<_> = g.factorize(&ef, &[0, 1]).unwrap().iter().map(|&e| g.edge_name(e)).collect();
        assert_eq!(id, vec!["e", "f"]);
        let flip: Vec<_> = g.factorize(&ef, &[1, 0]).unwrap().iter().map(|&e| g.edge_name(e)).collect();
        assert_eq!(flip, vec!["f", "e"]);
        let e = g.edge_path(g.edge("e").unwrap());
        assert!(matches!(g.factorize(&e, &[0, 1]), Err(Error::DegreeMismatch { .. })));
    }

    /// Contains the square `ef = ab` with `d(e) = d(b) = e_1`, completed so
    /// that every vertex emits both colors.
    pub(crate) fn ef_ab() -> KGraphPresentation {
        parse_kgraph(
            r#"{"k":2,"vertices":["s","m1","m2","t"],"edges":[
                {"id":"e","source":"s","range":"m1","color":1},
                {"id":"f","source":"m1","range":"t","color":2},
                {"id":"a","source":"s","range":"m2","color":2},
                {"id":"b","source":"m2","range":"t","color":1},
                {"id":"g","source":"m1","range":"t","color":1},
                {"id":"h","source":"m2","range":"t","color":2},
                {"id":"p","source":"t","range":"t","color":1},
                {"id":"q","source":"t","range":"t","color":2}],
               "squares":[{"first":["e","f"],"second":["a","b"]},
                          {"first":["b","q"],"second":["h","p"]},
                          {"first":["g","q"],"second":["f","p"]},
                          {"first":["p","q"],"second":["q","p"]}]}"#,
        )
        .unwrap()
    }

    #[test]
    fn factorize_noncommuting_square() {
        let p = ef_ab();
        let g = &p.graph;
        let mu = g.path_from_names(&["e", "f"]).unwrap();
        assert_eq!(mu, g.path_from_names(&["a", "b"]).unwrap());
        let names = |s: &[usize]| -> Vec<String> {
            g.factorize(&mu, s).unwrap().iter().map(|&e| g.edge_name(e).to_string()).collect()
        };
        assert_eq!(names(&[0, 1]), vec!["e", "f"]);
        assert_eq!(names(&[1, 0]), vec!["a", "b"]);
    }

    #[test]
    fn sinks_rejected_for_rank_two() {
        let p = parse_kgraph(
            r#"{"k":2,"vertices":["s","m1","m2","t"],"edges":[
                {"id":"e","source":"s","range":"m1","color":1},
                {"id":"f","source":"m1","range":"t","color":2},
                {"id":"a","source":"s","range":"m2","color":2},
                {"id":"b","source":"m2","range":"t","color":1}],
               "squares":[{"first":["e","f"],"second":["a","b"]}]}"#,
        );
        assert!(matches!(p, Err(ParseError::MissingColor { .. })));
    }

    #[test]
    fn two_vertex_factorisations() {
        let p = two_vertex();
        let g = &p.graph;
        let mu = g.path_from_names(&["x", "fw"]).unwrap();
        let id: Vec<_> = g.factorize(&mu, &[0, 1]).unwrap().iter().map(|&e| g.edge_name(e)).collect();
        let flip: Vec<_> = g.factorize(&mu, &[1, 0]).unwrap().iter().map(|&e| g.edge_name(e)).collect();
        assert_eq!(id, vec!["x", "fw"]);
        assert_eq!(flip, vec!["fu", "x"]);
        assert!(p.single_exit());
    }

    #[test]
    fn missing_square_rejected() {
        let err = parse_kgraph(
            r#"{"k":2,"vertices":["v"],"edges":[
                {"id":"e","source":"v","range":"v","color":1},
                {"id":"f","source":"v","range":"v","color":2}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, ParseError::MissingSquare(..)));
    }

    #[test]
    fn enumerate_torus_paths() {
        let p = torus();
        let g = &p.graph;
        let v = g.vertex("v").unwrap();
        assert_eq!(g.enumerate_paths(&[1, 1], v, Direction::OutOf).len(), 1);
        assert_eq!(g.enumerate_paths(&[2, 1], v, Direction::Into).len(), 1);
        assert!(g.enumerate_paths_bounded(&[3, 0], v, Direction::Into, 2).is_err());
    }

    #[test]
    fn permutation_signs() {
        assert_eq!(permutation_sign(&[0, 1, 2]), 1);
        assert_eq!(permutation_sign(&[1, 0, 2]), -1);
        assert_eq!(permutation_sign(&[1, 2, 0]), 1);
        assert_eq!(permutations(3).len(), 6);
        let total: i64 = permutations(4).iter().map(|s| permutation_sign(s)).sum();
        assert_eq!(total, 0);
    }
}
