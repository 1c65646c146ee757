//! Finite orthogonal pieces of `H = L²(A, τ)` and the Dirac operator on them.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::algebra::{expand_key, key_degree, Element, Key};
use crate::clifford::{Clifford, Matrix};
use crate::error::{Error, Result};
use crate::graph::GraphPresentation;
use crate::kgraph::{Degree, Direction, KGraph, KPath, VertexId, VertexKind};
use crate::scalar::{GaussianRational, Rational};
use crate::trace::{default_end_values, solve_graph_trace, Trace};

/// Generators `S_μS_ν*` with `d(μ), d(ν) ≤ L` that cannot be extended
/// without leaving the window: in every color one of the two paths has
/// length exactly `L` (or, at rank 1, `r(μ)` emits nothing). These span
/// every generator inside the window and are pairwise orthogonal.
#[derive(Debug, Clone)]
pub struct Truncation {
    trace: Trace,
    level: u32,
    basis: Vec<Key>,
    gram: Vec<Rational>,
    index: BTreeMap<Key, usize>,
    blocks: BTreeMap<Degree, Vec<usize>>,
}

/// Finite model and trace for a 1-graph, rays unrolled `depth` steps.
pub fn graph_model(p: &GraphPresentation, depth: usize) -> Result<(Arc<KGraph>, Trace)> {
    let model = p.expand(depth)?;
    let gt = solve_graph_trace(p, &default_end_values(p))?;
    let trace = gt.on_model(&model);
    Ok((model, trace))
}

fn degree_box(k: usize, level: u32) -> Vec<Degree> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|d| {
                (0..=level as i64).map(move |x| {
                    let mut d = d.clone();
                    d.push(x);
                    d
                })
            })
            .collect();
    }
    out
}

pub fn build_truncation(trace: &Trace, level: u32) -> Result<Truncation> {
    if !trace.is_faithful() {
        return Err(Error::Hypothesis("the trace is not faithful".into()));
    }
    let g = trace.graph().clone();
    let k = g.rank();
    let l = level as i64;
    let degrees = degree_box(k, level);
    let mut basis = Vec::new();
    for w in g.vertex_ids() {
        let into: Vec<(Degree, Vec<KPath>)> = degrees
            .iter()
            .map(|d| (d.clone(), g.enumerate_paths(d, w, Direction::Into)))
            .collect();
        let sink = k == 1 && g.is_model_sink(w);
        for (a, mus) in &into {
            for (b, nus) in &into {
                let maximal = sink || a.iter().zip(b).all(|(x, y)| (*x).max(*y) == l);
                if !maximal {
                    continue;
                }
                for mu in mus {
                    for nu in nus {
                        basis.push((mu.clone(), nu.clone()));
                    }
                }
            }
        }
    }
    if basis.is_empty() {
        return Err(Error::EmptyBasis);
    }
    basis.sort_by(|x, y| key_degree(x).cmp(&key_degree(y)).then_with(|| x.cmp(y)));
    let gram = basis.iter().map(|(mu, _)| trace.key_norm_sq(mu).clone()).collect();
    let index = basis.iter().enumerate().map(|(i, key)| (key.clone(), i)).collect();
    let mut blocks: BTreeMap<Degree, Vec<usize>> = BTreeMap::new();
    for (i, key) in basis.iter().enumerate() {
        blocks.entry(key_degree(key)).or_default().push(i);
    }
    Ok(Truncation {
        trace: trace.clone(),
        level,
        basis,
        gram,
        index,
        blocks,
    })
}

impl Truncation {
    pub fn graph(&self) -> &Arc<KGraph> {
        self.trace.graph()
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Key] {
        &self.basis
    }

    /// `‖x_i‖² = τ(p_{r(μ)})`.
    pub fn gram(&self) -> &[Rational] {
        &self.gram
    }

    pub fn blocks(&self) -> &BTreeMap<Degree, Vec<usize>> {
        &self.blocks
    }

    pub fn degree(&self, i: usize) -> Degree {
        key_degree(&self.basis[i])
    }

    pub fn element(&self, i: usize) -> Element {
        Element::from_key(self.graph(), &self.basis[i])
    }

    pub fn elements(&self) -> Vec<Element> {
        (0..self.len()).map(|i| self.element(i)).collect()
    }

    /// `d(μ)` of the basis vectors of degree `n` (ignoring rank-1 sinks).
    fn target(&self, n: &[i64]) -> Option<Degree> {
        let l = self.level as i64;
        n.iter()
            .map(|&x| (x.abs() <= l).then_some(if x >= 0 { l } else { l + x }))
            .collect()
    }

    /// Coordinates of `x` in the basis, or `None` when `x` leaves the span.
    pub fn coords(&self, x: &Element) -> Option<BTreeMap<usize, GaussianRational>> {
        let g = self.graph();
        let mut out: BTreeMap<usize, GaussianRational> = BTreeMap::new();
        for (key, c) in x.terms() {
            let target = self.target(&key_degree(key))?;
            if key.0.degree.iter().zip(&target).any(|(a, b)| a > b) {
                return None;
            }
            for (k2, v) in expand_key(g, key, &target) {
                let i = *self.index.get(&k2)?;
                *out.entry(i).or_insert_with(GaussianRational::zero) += &(c * &v);
            }
        }
        out.retain(|_, v| !v.is_zero());
        Some(out)
    }

    pub fn vector(&self, coords: &BTreeMap<usize, GaussianRational>) -> Element {
        let mut out = Element::zero(self.graph());
        for (&i, c) in coords {
            let (mu, nu) = self.basis[i].clone();
            out.add_term(mu, nu, c.clone());
        }
        out
    }

    pub fn generators(&self, max_len: u32) -> Vec<Element> {
        path_generators(self.graph(), max_len)
    }

    /// Basis vectors away from the window edge (`|n|_∞ ≤ L − 2`) whose
    /// paths start at presented vertices.
    pub fn is_interior(&self, i: usize) -> bool {
        let g = self.graph();
        let (mu, nu) = &self.basis[i];
        let edge = self.level as i64 - 2;
        key_degree(&self.basis[i]).iter().all(|x| x.abs() <= edge)
            && [mu.source, nu.source]
                .iter()
                .all(|&v| matches!(g.vertex_info(v).kind, VertexKind::Core))
    }

    /// Exact check that `⟨x_i, x_j⟩ = δ_ij ‖x_i‖²`.
    pub fn verify_orthogonality(&self) -> Result<Option<(usize, usize)>> {
        let xs = self.elements();
        for i in 0..xs.len() {
            for j in i..xs.len() {
                let ip = self.trace.inner(&xs[i], &xs[j])?;
                let want = if i == j {
                    GaussianRational::real(self.gram[i].clone())
                } else {
                    GaussianRational::zero()
                };
                if ip != want {
                    return Ok(Some((i, j)));
                }
            }
        }
        Ok(None)
    }

    /// `⟨x, a y⟩ = ⟨a* x, y⟩` over basis pairs; returns a failing triple.
    pub fn verify_star_representation(&self, gens: &[Element]) -> Result<Option<(usize, usize, usize)>> {
        let xs = self.elements();
        for (ai, a) in gens.iter().enumerate() {
            let a_star = a.adjoint();
            for (i, x) in xs.iter().enumerate() {
                let ax = a_star.try_mul(x)?;
                for (j, y) in xs.iter().enumerate() {
                    let lhs = self.trace.inner(x, &a.try_mul(y)?)?;
                    let rhs = self.trace.inner(&ax, y)?;
                    if lhs != rhs {
                        return Ok(Some((ai, i, j)));
                    }
                }
            }
        }
        Ok(None)
    }
}

/// Vertex projections plus `S_λ`, `S_λ*` for `0 < d(λ) ≤ max_len` in every
/// color.
pub fn path_generators(g: &Arc<KGraph>, max_len: u32) -> Vec<Element> {
    let mut out: Vec<Element> = g.vertex_ids().map(|v| Element::vertex(g, v)).collect();
    for v in g.vertex_ids() {
        for d in degree_box(g.rank(), max_len) {
            if d.iter().all(|&x| x == 0) {
                continue;
            }
            for lambda in g.enumerate_paths(&d, v, Direction::OutOf) {
                out.push(Element::path(g, &lambda));
                out.push(Element::path_adjoint(g, &lambda));
            }
        }
    }
    out
}

pub fn vertex_of(g: &KGraph, name: &str) -> Result<VertexId> {
    g.vertex(name)
        .ok_or_else(|| Error::Hypothesis(format!("unknown vertex `{name}`")))
}

/// `D` on the truncation: one Clifford block per basis vector.
#[derive(Debug, Clone)]
pub struct DiracOperator {
    pub rank: usize,
    /// `[n]` at rank 1, `i Σ γ^m n_m` otherwise, with `n = d(μ) − d(ν)`.
    pub symbols: Vec<Matrix>,
}

pub fn build_dirac(tr: &Truncation) -> Result<DiracOperator> {
    let k = tr.graph().rank();
    let c = Clifford::new(k)?;
    let symbols = (0..tr.len()).map(|i| c.dirac_symbol(&tr.degree(i))).collect();
    Ok(DiracOperator { rank: k, symbols })
}

impl DiracOperator {
    /// Eigenvalue `|μ| − |ν|` of a rank-1 basis vector.
    pub fn eigenvalue(&self, i: usize) -> Option<GaussianRational> {
        self.symbols[i].as_scalar()
    }

    /// `⟨D x_i, x_j⟩ = ⟨x_i, D x_j⟩` for all basis pairs, using the exact
    /// Gram matrix (with spinor factors, `g_ij S_i* = g_ij S_j`).
    pub fn is_symmetric(&self, tr: &Truncation) -> Result<bool> {
        let xs = tr.elements();
        for i in 0..xs.len() {
            for j in 0..xs.len() {
                let gij = tr.trace().inner(&xs[i], &xs[j])?;
                if gij.is_zero() {
                    continue;
                }
                if self.symbols[i].adjoint().scale(&gij) != self.symbols[j].scale(&gij) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::trace::kgraph_trace;

    fn circle(level: u32) -> Truncation {
        let (_, t) = graph_model(&corpus::graph(&corpus::cycle(1)), 1).unwrap();
        build_truncation(&t, level).unwrap()
    }

    #[test]
    fn circle_fourier_basis() {
        let tr = circle(2);
        assert_eq!(tr.len(), 5);
        let degrees: Vec<i64> = (0..5).map(|i| tr.degree(i)[0]).collect();
        assert_eq!(degrees, vec![-2, -1, 0, 1, 2]);
        assert!(tr.gram().iter().all(|g| *g == Rational::from_integer(1.into())));
        let d = build_dirac(&tr).unwrap();
        for i in 0..5 {
            assert_eq!(d.eigenvalue(i).unwrap(), GaussianRational::from_int(degrees[i]));
        }
        assert!(d.is_symmetric(&tr).unwrap());
        assert_eq!(tr.verify_orthogonality().unwrap(), None);
        let g = tr.graph();
        let pv = tr.coords(&Element::vertex_named(g, "v0").unwrap()).unwrap();
        assert_eq!(pv.len(), 1);
        let s = Element::edge(g, "e0").unwrap();
        assert_eq!(tr.coords(&s).unwrap().keys().map(|&i| tr.degree(i)[0]).collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn tail_graph_truncation_is_orthogonal() {
        let p = corpus::graph(&corpus::ray(1));
        let (_, t) = graph_model(&p, 3).unwrap();
        let tr = build_truncation(&t, 1).unwrap();
        assert_eq!(tr.verify_orthogonality().unwrap(), None);
        let g = tr.graph();
        for name in ["u0", "u1"] {
            assert!(tr.coords(&Element::vertex_named(g, name).unwrap()).is_some());
        }
        assert!(tr.coords(&Element::edge(g, "f0").unwrap()).is_some());
        let gens = tr.generators(1);
        assert_eq!(tr.verify_star_representation(&gens).unwrap(), None);
        assert!(build_dirac(&tr).unwrap().is_symmetric(&tr).unwrap());
    }

    #[test]
    fn torus_basis_matches_enumeration() {
        let p = corpus::kgraph(&corpus::torus(2));
        let t = kgraph_trace(&p, None).unwrap();
        let tr = build_truncation(&t, 1).unwrap();
        // one vertex, unique path per degree: one vector per degree in [-1, 1]^2
        let mut count = 0;
        for a1 in 0..=1 {
            for a2 in 0..=1 {
                for b1 in 0..=1 {
                    for b2 in 0..=1 {
                        if i64::max(a1, b1) == 1 && i64::max(a2, b2) == 1 {
                            count += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(tr.len(), count);
        assert_eq!(tr.blocks().len(), 9);
        assert_eq!(tr.verify_orthogonality().unwrap(), None);
        assert!(build_dirac(&tr).unwrap().is_symmetric(&tr).unwrap());
    }

    #[test]
    fn sink_keys_stop_early() {
        let p = corpus::graph(&corpus::path_to_sink(1));
        let (_, t) = graph_model(&p, 1).unwrap();
        let tr = build_truncation(&t, 2).unwrap();
        assert_eq!(tr.verify_orthogonality().unwrap(), None);
        let g = tr.graph();
        assert!(tr.coords(&Element::vertex_named(g, "p0").unwrap()).is_some());
    }
}
