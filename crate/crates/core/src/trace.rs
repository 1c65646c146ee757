//! Graph traces, the induced trace on the algebra, K-theory ranks and the
//! diagonal canonical form of fixed-point elements.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{key_degree, Element};
use crate::error::{Error, Result};
use crate::graph::{EndKind, GraphPresentation};
use crate::kgraph::{KGraph, KGraphPresentation, KPath, VertexId, VertexKind};
use crate::linalg::nullspace;
use crate::scalar::{format_rational, GaussianRational, Rational};

/// A positive vertex function with `g(v) = Σ_{s(e)=v} g(r(e))` away from ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphTrace {
    pub values: BTreeMap<String, Rational>,
    pub end_values: BTreeMap<String, Rational>,
}

/// Value 1 on every end.
pub fn default_end_values(p: &GraphPresentation) -> BTreeMap<String, Rational> {
    p.find_ends()
        .into_iter()
        .map(|e| (e.id, Rational::one()))
        .collect()
}

fn check_no_loop_with_exit(p: &GraphPresentation) -> Result<()> {
    if let Some((cycle, exit)) = p.loops_with_exit().into_iter().next() {
        return Err(Error::LoopWithExit {
            cycle: cycle.edges,
            exit_vertex: exit,
        });
    }
    Ok(())
}

/// Propagates end values backwards through the graph.
pub fn solve_graph_trace(
    p: &GraphPresentation,
    end_values: &BTreeMap<String, Rational>,
) -> Result<GraphTrace> {
    check_no_loop_with_exit(p)?;
    let ends = p.find_ends();
    for id in end_values.keys() {
        if !ends.iter().any(|e| &e.id == id) {
            return Err(Error::UnknownEnd(id.clone()));
        }
    }
    let g = p.core();
    let mut fixed: HashMap<VertexId, Rational> = HashMap::new();
    for end in &ends {
        let value = end_values
            .get(&end.id)
            .ok_or_else(|| Error::MissingEndValue(end.id.clone()))?;
        if *value <= Rational::zero() {
            return Err(Error::NonPositiveEndValue(end.id.clone()));
        }
        for name in end.anchor_vertices() {
            fixed.insert(g.vertex(&name).expect("end anchors are core vertices"), value.clone());
        }
    }
    let mut memo: HashMap<VertexId, Rational> = fixed;
    fn visit(g: &KGraph, v: VertexId, memo: &mut HashMap<VertexId, Rational>) -> Rational {
        if let Some(x) = memo.get(&v) {
            return x.clone();
        }
        // no loop has an exit and every loop is an end, so this recursion
        // runs on an acyclic part of the graph
        let mut total = Rational::zero();
        for &e in g.out_edges(v, 0) {
            total += visit(g, g.edge_info(e).range, memo);
        }
        memo.insert(v, total.clone());
        total
    }
    let mut values = BTreeMap::new();
    for v in g.vertex_ids() {
        values.insert(g.vertex_name(v).to_string(), visit(g, v, &mut memo));
    }
    Ok(GraphTrace {
        values,
        end_values: end_values.clone(),
    })
}

impl GraphTrace {
    pub fn value(&self, vertex: &str) -> Option<&Rational> {
        self.values.get(vertex)
    }

    pub fn is_faithful(&self) -> bool {
        self.values.values().all(|x| *x > Rational::zero())
    }

    /// Checks the trace relation at every vertex that emits edges.
    pub fn satisfies_trace_condition(&self, p: &GraphPresentation) -> bool {
        let g = p.core();
        g.vertex_ids().all(|v| {
            let out = g.out_edges(v, 0);
            out.is_empty() || {
                let sum = out.iter().fold(Rational::zero(), |acc, &e| {
                    acc + &self.values[g.vertex_name(g.edge_info(e).range)]
                });
                sum == self.values[g.vertex_name(v)]
            }
        })
    }

    /// The trace on a finite model: ray vertices carry their root's value.
    pub fn on_model(&self, model: &Arc<KGraph>) -> Trace {
        let values = model
            .vertex_ids()
            .map(|v| {
                let info = model.vertex_info(v);
                let name = match &info.kind {
                    VertexKind::Core => &info.name,
                    VertexKind::Tail { root, .. } | VertexKind::Head { root, .. } => root,
                };
                self.values[name].clone()
            })
            .collect();
        Trace {
            graph: Arc::clone(model),
            values,
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let m: BTreeMap<&String, String> = self
            .values
            .iter()
            .map(|(k, v)| (k, format_rational(v)))
            .collect();
        serde_json::to_value(m).expect("trace serializes")
    }
}

/// `τ(S_μS_ν*) = δ_{μ,ν} g(r(μ))` on one finite model.
#[derive(Debug, Clone)]
pub struct Trace {
    graph: Arc<KGraph>,
    values: Vec<Rational>,
}

impl Trace {
    pub fn new(graph: &Arc<KGraph>, values: Vec<Rational>) -> Self {
        assert_eq!(values.len(), graph.vertex_count());
        Self {
            graph: Arc::clone(graph),
            values,
        }
    }

    pub fn graph(&self) -> &Arc<KGraph> {
        &self.graph
    }

    pub fn vertex_value(&self, v: VertexId) -> &Rational {
        &self.values[v.0 as usize]
    }

    pub fn is_faithful(&self) -> bool {
        self.values.iter().all(|x| *x > Rational::zero())
    }

    pub fn evaluate(&self, a: &Element) -> Result<GaussianRational> {
        if a.graph().id() != self.graph.id() {
            return Err(Error::PresentationMismatch);
        }
        let mut total = GaussianRational::zero();
        for ((mu, nu), c) in a.terms() {
            if mu == nu {
                total += c.scale(self.vertex_value(mu.range));
            }
        }
        Ok(total)
    }

    /// `⟨x, y⟩ = τ(x* y)`.
    pub fn inner(&self, x: &Element, y: &Element) -> Result<GaussianRational> {
        self.evaluate(&x.adjoint().try_mul(y)?)
    }

    /// `τ(p_{r(μ)})` for a generator key.
    pub fn key_norm_sq(&self, mu: &KPath) -> &Rational {
        self.vertex_value(mu.range)
    }

    /// Checks `g(v) = Σ_{e ∈ vΛ^{e_i}} g(r(e))` at every vertex emitting
    /// color `i`, skipping frontier vertices of unrolled rays.
    pub fn satisfies_trace_condition(&self) -> bool {
        let g = &self.graph;
        g.vertex_ids().all(|v| {
            (0..g.rank()).all(|c| {
                let out = g.out_edges(v, c);
                out.is_empty() || {
                    let sum = out.iter().fold(Rational::zero(), |acc, &e| {
                        acc + self.vertex_value(g.edge_info(e).range)
                    });
                    sum == *self.vertex_value(v)
                }
            })
        })
    }
}

/// A faithful graph trace on a k-graph: the supplied values, or else the
/// constant function 1, or else the unique positive solution up to scale
/// (normalized to 1 at the first vertex).
pub fn kgraph_trace(
    p: &KGraphPresentation,
    values: Option<&BTreeMap<String, Rational>>,
) -> Result<Trace> {
    let g = &p.graph;
    let candidate = |vals: Vec<Rational>| {
        let t = Trace::new(g, vals);
        (t.satisfies_trace_condition() && t.is_faithful()).then_some(t)
    };
    if let Some(map) = values {
        let mut vals = Vec::new();
        for v in g.vertex_ids() {
            let name = g.vertex_name(v);
            vals.push(
                map.get(name)
                    .cloned()
                    .ok_or_else(|| Error::MissingEndValue(name.to_string()))?,
            );
        }
        return candidate(vals).ok_or_else(|| {
            Error::Hypothesis("supplied vertex values are not a faithful graph trace".into())
        });
    }
    if let Some(t) = candidate(vec![Rational::one(); g.vertex_count()]) {
        return Ok(t);
    }
    let n = g.vertex_count();
    let mut rows = Vec::new();
    for v in g.vertex_ids() {
        for c in 0..g.rank() {
            let mut row = vec![GaussianRational::zero(); n];
            row[v.0 as usize] += GaussianRational::one();
            for &e in g.out_edges(v, c) {
                row[g.edge_info(e).range.0 as usize] -= &GaussianRational::one();
            }
            rows.push(row);
        }
    }
    let basis = nullspace(&rows, n);
    if basis.len() == 1 && !basis[0][0].is_zero() {
        let scale = basis[0][0].inv();
        let vals: Vec<Rational> = basis[0].iter().map(|x| (x * &scale).re).collect();
        if let Some(t) = candidate(vals) {
            return Ok(t);
        }
    }
    Err(Error::Hypothesis(
        "no canonical faithful graph trace; supply vertex values".into(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KTheoryRanks {
    pub k0: usize,
    pub k1: usize,
}

/// Ranks of `K_0` and `K_1` for graphs in which no loop has an exit.
pub fn ktheory_ranks(p: &GraphPresentation) -> Result<KTheoryRanks> {
    check_no_loop_with_exit(p)?;
    let ends = p.find_ends();
    let loops = ends
        .iter()
        .filter(|e| matches!(e.kind, EndKind::LoopWithoutExit { .. }))
        .count();
    Ok(KTheoryRanks {
        k0: ends.len(),
        k1: loops,
    })
}

/// `f = Σ c_{v,n} S_{v,n}S_{v,n}*` where `(v, n)` is the path from `v` into
/// end `n`, cut at its first vertex inside the end.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FixedPointCanonicalForm {
    pub terms: BTreeMap<(String, String), GaussianRational>,
    pub paths: BTreeMap<(String, String), Vec<String>>,
}

impl FixedPointCanonicalForm {
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Rebuilds the element on a finite model.
    pub fn to_element(&self, model: &Arc<KGraph>) -> Result<Element> {
        let mut out = Element::zero(model);
        for (key, c) in &self.terms {
            let names: Vec<&str> = self.paths[key].iter().map(String::as_str).collect();
            let path = if names.is_empty() {
                let v = model
                    .vertex(&key.0)
                    .ok_or_else(|| crate::ParseError::UnknownVertex(key.0.clone()))?;
                model.vertex_path(v)
            } else {
                model.path_from_names(&names)?
            };
            out.add_term(path.clone(), path, c.clone());
        }
        Ok(out)
    }
}

/// Model vertices lying inside an end, with the end id.
pub fn end_anchors(p: &GraphPresentation, model: &KGraph) -> HashMap<VertexId, String> {
    let mut out = HashMap::new();
    for end in p.find_ends() {
        for name in end.anchor_vertices() {
            if let Some(v) = model.vertex(&name) {
                out.insert(v, end.id.clone());
            }
        }
    }
    for v in model.vertex_ids() {
        if let VertexKind::Tail { root, .. } = &model.vertex_info(v).kind {
            out.insert(v, format!("tail:{root}"));
        }
    }
    out
}

/// Rewrites a diagonal degree-0 element as a combination of end paths by
/// splitting `S_αS_α* = Σ_e S_{αe}S_{αe}*` until each path meets an end.
pub fn canonical_f_form(p: &GraphPresentation, f: &Element) -> Result<FixedPointCanonicalForm> {
    check_no_loop_with_exit(p)?;
    let model = f.graph();
    let anchors = end_anchors(p, model);
    let mut form = FixedPointCanonicalForm::default();
    for ((alpha, beta), c) in f.expanded() {
        let d = key_degree(&(alpha.clone(), beta.clone()));
        if d.iter().any(|&x| x != 0) {
            return Err(Error::DegreeMismatch {
                expected: model.zero_degree(),
                found: d,
            });
        }
        if alpha != beta {
            return Err(Error::NonDiagonal {
                mu: model.path_label(&alpha),
                nu: model.path_label(&beta),
            });
        }
        let mut stack = vec![alpha];
        while let Some(a) = stack.pop() {
            match cut_at_end(model, &a, &anchors) {
                Some((cut, end)) => {
                    let key = (model.vertex_name(cut.source).to_string(), end);
                    let names = model.path_names(&cut);
                    if let Some(prev) = form.paths.get(&key) {
                        if *prev != names {
                            return Err(Error::AmbiguousEndPath {
                                vertex: key.0,
                                end: key.1,
                            });
                        }
                    }
                    form.paths.insert(key.clone(), names);
                    *form.terms.entry(key).or_insert_with(GaussianRational::zero) += &c;
                }
                None => {
                    for &e in model.out_edges(a.range, 0) {
                        stack.push(model.compose(&a, &model.edge_path(e)).expect("e leaves r(α)"));
                    }
                }
            }
        }
    }
    let dead: Vec<_> = form
        .terms
        .iter()
        .filter(|(_, c)| c.is_zero())
        .map(|(k, _)| k.clone())
        .collect();
    for k in dead {
        form.terms.remove(&k);
        form.paths.remove(&k);
    }
    Ok(form)
}

fn cut_at_end(
    g: &KGraph,
    a: &KPath,
    anchors: &HashMap<VertexId, String>,
) -> Option<(KPath, String)> {
    if let Some(end) = anchors.get(&a.source) {
        return Some((g.vertex_path(a.source), end.clone()));
    }
    for (i, &e) in a.edges.iter().enumerate() {
        if let Some(end) = anchors.get(&g.edge_info(e).range) {
            let cut = g.path_from_edges(&a.edges[..=i]).expect("prefix of a path");
            return Some((cut, end.clone()));
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixedPointNorms {
    #[serde(serialize_with = "crate::scalar::serialize_rational")]
    pub cstar_norm_sq: Rational,
    #[serde(serialize_with = "crate::scalar::serialize_rational")]
    pub hilbert_norm_sq: Rational,
    #[serde(serialize_with = "crate::scalar::serialize_rational")]
    pub module_norm_sq: Rational,
    #[serde(serialize_with = "crate::scalar::serialize_rational")]
    pub min_end_trace: Rational,
}

impl FixedPointNorms {
    /// `‖f‖_H² ≥ min τ(end) · ‖f‖_X²`.
    pub fn inequality_holds(&self) -> bool {
        self.hilbert_norm_sq >= &self.min_end_trace * &self.module_norm_sq
    }
}

/// Exact norms of a canonical form. The projections in the form are
/// mutually orthogonal, so `f*f = Σ |c|² S S*`.
pub fn fixed_point_norms(form: &FixedPointCanonicalForm, t: &GraphTrace) -> FixedPointNorms {
    let mut cstar = Rational::zero();
    let mut hilbert = Rational::zero();
    for ((_, end), c) in &form.terms {
        let n = c.norm_sqr();
        hilbert += &n * &t.end_values[end];
        if n > cstar {
            cstar = n;
        }
    }
    let min_end = t
        .end_values
        .values()
        .min()
        .cloned()
        .unwrap_or_else(Rational::zero);
    FixedPointNorms {
        module_norm_sq: cstar.clone(),
        cstar_norm_sq: cstar,
        hilbert_norm_sq: hilbert,
        min_end_trace: min_end,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FloatNorms {
    pub cstar_norm_sq: f64,
    pub hilbert_norm_sq: f64,
    pub module_norm_sq: f64,
    pub min_end_trace: f64,
}

/// Float norms of `Σ c_i P_i` for orthogonal projections with traces `t_i`;
/// input pairs are `(|c_i|, t_i)`.
pub fn fixed_point_norms_f64(terms: &[(f64, f64)]) -> FloatNorms {
    let cstar = terms.iter().map(|(c, _)| c * c).fold(0.0, f64::max);
    let hilbert = terms.iter().map(|(c, t)| c * c * t).sum();
    let min_end = terms.iter().map(|(_, t)| *t).fold(f64::INFINITY, f64::min);
    FloatNorms {
        cstar_norm_sq: cstar,
        hilbert_norm_sq: hilbert,
        module_norm_sq: cstar,
        min_end_trace: if terms.is_empty() { 0.0 } else { min_end },
    }
}

/// Partial sums `a_N = Σ_{i=1}^N 2^{i/4} p_i` with `τ(p_i) = 2^{-i}` along a
/// branch of the dyadic tree.
pub fn dyadic_partial_sum_norms(n: u32) -> FloatNorms {
    let terms: Vec<(f64, f64)> = (1..=n)
        .map(|i| (2f64.powf(i as f64 / 4.0), 2f64.powi(-(i as i32))))
        .collect();
    fixed_point_norms_f64(&terms)
}
