//! Exact arithmetic in the dense algebra spanned by `S_μ S_ν*`.
//!
//! The spanning set is not linearly independent (Cuntz–Krieger relations
//! identify `S_μS_ν*` with `Σ_ρ S_{μρ}S_{νρ}*`), so elements store whatever
//! terms arithmetic produced and equality goes through [`Element::expanded`],
//! which rewrites every homogeneous component onto a common level where the
//! surviving generators are linearly independent.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};
use crate::kgraph::{Degree, Direction, KGraph, KPath, VertexId};
use crate::scalar::{parse_rational, GaussianRational, Rational};

/// Generator key `(μ, ν)` for `S_μ S_ν*`, with `r(μ) = r(ν)`.
pub type Key = (KPath, KPath);

pub fn key_degree(key: &Key) -> Degree {
    key.0
        .degree
        .iter()
        .zip(&key.1.degree)
        .map(|(a, b)| a - b)
        .collect()
}

/// `S_μS_ν* · S_αS_β*` as a sum of generator keys (all with coefficient 1).
pub fn generator_product(g: &KGraph, left: &Key, right: &Key) -> Vec<Key> {
    let (mu, nu) = left;
    let (alpha, beta) = right;
    if nu.source != alpha.source {
        return Vec::new();
    }
    let comparable_up = nu.degree.iter().zip(&alpha.degree).all(|(a, b)| a <= b);
    if comparable_up {
        // α = ν α'
        return match g.strip_prefix(alpha, nu) {
            Some(rest) => vec![(g.compose(mu, &rest).expect("r(μ) = r(ν) = s(α')"), beta.clone())],
            None => Vec::new(),
        };
    }
    let comparable_down = nu.degree.iter().zip(&alpha.degree).all(|(a, b)| a >= b);
    if comparable_down {
        // ν = α ν'
        return match g.strip_prefix(nu, alpha) {
            Some(rest) => vec![(mu.clone(), g.compose(beta, &rest).expect("r(β) = r(α) = s(ν')"))],
            None => Vec::new(),
        };
    }
    // S_ν* S_α = Σ S_{ν'} S_{α'}* over common extensions να' = αν' of
    // degree d(ν) ∨ d(α)
    let join: Degree = nu.degree.iter().zip(&alpha.degree).map(|(a, b)| *a.max(b)).collect();
    let extra: Degree = join.iter().zip(&nu.degree).map(|(a, b)| a - b).collect();
    let mut out = Vec::new();
    for rho in g.enumerate_paths(&extra, nu.range, Direction::OutOf) {
        let lambda = g.compose(nu, &rho).expect("ρ starts at r(ν)");
        if let Some(alpha_rest) = g.strip_prefix(&lambda, alpha) {
            out.push((
                g.compose(mu, &rho).expect("composable"),
                g.compose(beta, &alpha_rest).expect("composable"),
            ));
        }
    }
    out
}

/// A finite linear combination of generators over one finite model.
#[derive(Clone)]
pub struct Element {
    graph: Arc<KGraph>,
    terms: BTreeMap<Key, GaussianRational>,
}

impl Element {
    pub fn zero(graph: &Arc<KGraph>) -> Self {
        Self {
            graph: Arc::clone(graph),
            terms: BTreeMap::new(),
        }
    }

    pub fn graph(&self) -> &Arc<KGraph> {
        &self.graph
    }

    /// `c · S_μ S_ν*`; zero when `r(μ) ≠ r(ν)`.
    pub fn term(graph: &Arc<KGraph>, mu: KPath, nu: KPath, c: GaussianRational) -> Self {
        let mut e = Self::zero(graph);
        e.add_term(mu, nu, c);
        e
    }

    pub fn generator(graph: &Arc<KGraph>, mu: KPath, nu: KPath) -> Self {
        Self::term(graph, mu, nu, GaussianRational::one())
    }

    pub fn from_key(graph: &Arc<KGraph>, key: &Key) -> Self {
        Self::generator(graph, key.0.clone(), key.1.clone())
    }

    /// `p_v`.
    pub fn vertex(graph: &Arc<KGraph>, v: VertexId) -> Self {
        let p = graph.vertex_path(v);
        Self::generator(graph, p.clone(), p)
    }

    /// `S_λ`.
    pub fn path(graph: &Arc<KGraph>, lambda: &KPath) -> Self {
        Self::generator(graph, lambda.clone(), graph.vertex_path(lambda.range))
    }

    /// `S_λ*`.
    pub fn path_adjoint(graph: &Arc<KGraph>, lambda: &KPath) -> Self {
        Self::generator(graph, graph.vertex_path(lambda.range), lambda.clone())
    }

    /// `S_e` for a named edge.
    pub fn edge(graph: &Arc<KGraph>, name: &str) -> Result<Self> {
        let e = graph
            .edge(name)
            .ok_or_else(|| ParseError::UnknownEdge(name.to_string()))?;
        Ok(Self::path(graph, &graph.edge_path(e)))
    }

    /// `p_v` for a named vertex.
    pub fn vertex_named(graph: &Arc<KGraph>, name: &str) -> Result<Self> {
        let v = graph
            .vertex(name)
            .ok_or_else(|| ParseError::UnknownVertex(name.to_string()))?;
        Ok(Self::vertex(graph, v))
    }

    pub fn add_term(&mut self, mu: KPath, nu: KPath, c: GaussianRational) {
        if mu.range != nu.range || c.is_zero() {
            return;
        }
        match self.terms.entry((mu, nu)) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Key, &GaussianRational)> {
        self.terms.iter()
    }

    /// Number of stored terms (not a dimension).
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, key: &Key) -> GaussianRational {
        self.terms.get(key).cloned().unwrap_or_else(GaussianRational::zero)
    }

    fn same_graph(&self, other: &Self) -> Result<()> {
        if self.graph.id() == other.graph.id() {
            Ok(())
        } else {
            Err(Error::PresentationMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_graph(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.0.clone(), k.1.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_graph(other)?;
        let mut out = Self::zero(&self.graph);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let c = ca * cb;
                for (mu, nu) in generator_product(&self.graph, a, b) {
                    out.add_term(mu, nu, c.clone());
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        let mut out = Self::zero(&self.graph);
        if c.is_zero() {
            return out;
        }
        for (k, v) in &self.terms {
            out.terms.insert(k.clone(), v * c);
        }
        out
    }

    fn neg_ref(&self) -> Self {
        self.scale(&-GaussianRational::one())
    }

    /// `(c S_μS_ν*)* = conj(c) S_νS_μ*`.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(&self.graph);
        for ((mu, nu), c) in &self.terms {
            out.add_term(nu.clone(), mu.clone(), c.conj());
        }
        out
    }

    /// Homogeneous components keyed by gauge degree `d(μ) − d(ν)`.
    pub fn grade(&self) -> BTreeMap<Degree, Element> {
        let mut out: BTreeMap<Degree, Element> = BTreeMap::new();
        for (k, c) in &self.terms {
            out.entry(key_degree(k))
                .or_insert_with(|| Self::zero(&self.graph))
                .terms
                .insert(k.clone(), c.clone());
        }
        out.retain(|_, e| !e.is_zero());
        out
    }

    /// `Φ_n(a)`.
    pub fn component(&self, n: &[i64]) -> Self {
        let mut out = Self::zero(&self.graph);
        for (k, c) in &self.terms {
            if key_degree(k) == n {
                out.terms.insert(k.clone(), c.clone());
            }
        }
        out
    }

    /// Expectation onto the fixed-point algebra, `Φ_0`.
    pub fn expectation(&self) -> Self {
        self.component(&self.graph.zero_degree())
    }

    /// Degrees carrying a nonzero component.
    pub fn support(&self) -> BTreeSet<Degree> {
        self.grade().into_keys().collect()
    }

    /// Rewrites each homogeneous component onto generators with
    /// `d(μ)` equal to the componentwise maximum present (for rank 1,
    /// stopping early at vertices emitting nothing). Distinct keys of the
    /// result are linearly independent, so the map is zero iff the element is.
    pub fn expanded(&self) -> BTreeMap<Key, GaussianRational> {
        let mut by_degree: BTreeMap<Degree, Vec<(&Key, &GaussianRational)>> = BTreeMap::new();
        for (k, c) in &self.terms {
            by_degree.entry(key_degree(k)).or_default().push((k, c));
        }
        let mut out: BTreeMap<Key, GaussianRational> = BTreeMap::new();
        for terms in by_degree.values() {
            let level = level_of(terms.iter().map(|(k, _)| *k), self.graph.rank());
            for &(key, c) in terms {
                for (k, v) in expand_key(&self.graph, key, &level) {
                    let slot = out.entry(k).or_insert_with(GaussianRational::zero);
                    *slot += &(c * &v);
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() || self.expanded().is_empty()
    }

    /// Exact equality in the algebra (not of stored term lists).
    pub fn equals(&self, other: &Self) -> Result<bool> {
        Ok(self.try_sub(other)?.is_zero())
    }

    /// Deterministic short form: the canonical expansion, then repeated
    /// merging of complete single-edge extension families with equal
    /// coefficients.
    pub fn contracted(&self) -> Self {
        let mut terms = self.expanded();
        let g = &self.graph;
        loop {
            let mut changed = false;
            let keys: Vec<Key> = terms.keys().cloned().collect();
            'outer: for key in keys {
                if !terms.contains_key(&key) {
                    continue;
                }
                for c in 0..g.rank() {
                    if let Some((parent, family)) = parent_family(g, &key, c) {
                        let coeff = terms[&key].clone();
                        if family.iter().all(|f| terms.get(f) == Some(&coeff)) {
                            for f in &family {
                                terms.remove(f);
                            }
                            let slot = terms.entry(parent).or_insert_with(GaussianRational::zero);
                            *slot += &coeff;
                            changed = true;
                            continue 'outer;
                        }
                    }
                }
            }
            terms.retain(|_, v| !v.is_zero());
            if !changed {
                break;
            }
        }
        Self {
            graph: Arc::clone(&self.graph),
            terms,
        }
    }

    /// Sum of the distinct vertex projections at the sources of all `μ` and
    /// `ν` appearing in the inputs; a two-sided unit for each of them.
    pub fn local_unit(elements: &[Element]) -> Result<Element> {
        let first = elements.first().ok_or_else(|| {
            Error::Hypothesis("local unit of an empty family is undefined".into())
        })?;
        let mut vertices = BTreeSet::new();
        for e in elements {
            first.same_graph(e)?;
            for (mu, nu) in e.terms.keys() {
                vertices.insert(mu.source);
                vertices.insert(nu.source);
            }
        }
        let mut out = Element::zero(&first.graph);
        for v in vertices {
            let p = first.graph.vertex_path(v);
            out.add_term(p.clone(), p, GaussianRational::one());
        }
        Ok(out)
    }

    /// Each term scaled by its degree in `color`. For rank 1 this is
    /// `[D, a]` with `D = Σ n Φ_n`.
    pub fn degree_weighted(&self, color: usize) -> Self {
        let mut out = Self::zero(&self.graph);
        for (k, c) in &self.terms {
            let n = key_degree(k)[color];
            out.add_term(k.0.clone(), k.1.clone(), c * &GaussianRational::from_int(n));
        }
        out
    }

    /// `[D, a]` for rank 1: `(|μ| − |ν|) S_μS_ν*` termwise.
    pub fn dirac_commutator(&self) -> Result<Self> {
        if self.graph.rank() != 1 {
            return Err(Error::Hypothesis(
                "rank >= 2 commutators are Clifford valued; use clifford::dirac_commutator".into(),
            ));
        }
        Ok(self.degree_weighted(0))
    }

    /// Summary of `δ^order(a)`, `δ = [|D|, ·]`.
    ///
    /// On the block `Φ_m H` a homogeneous component of degree `n` acts with
    /// multiplier `(|m+n| − |m|)^order`, whose supremum over `m` is
    /// `|n|^order`. For rank ≥ 2 the lattice norm is Euclidean and the exact
    /// supremum `|n|_2^order` may be irrational; the reported bound is then
    /// the rational upper bound `|n|_1^order` and `exact` is false.
    pub fn delta_action(&self, order: u32) -> DeltaSummary {
        let mut bound = Rational::zero();
        let mut exact = true;
        let mut components = Vec::new();
        for (n, _) in self.grade() {
            let l1: i64 = n.iter().map(|x| x.abs()).sum();
            let nonzero = n.iter().filter(|x| **x != 0).count();
            if nonzero > 1 {
                exact = false;
            }
            let b = Rational::from_integer(l1.into()).pow(order as i32);
            components.push((n, b.clone()));
            if b > bound {
                bound = b;
            }
        }
        if order == 0 && !components.is_empty() {
            bound = Rational::one();
        }
        DeltaSummary {
            bounded: true,
            norm_bound: bound,
            exact,
            components,
        }
    }

    /// JSON list of `{"mu", "nu", "re", "im"}` records in contracted form.
    pub fn to_json_value(&self) -> serde_json::Value {
        let c = self.contracted();
        let g = &self.graph;
        let items: Vec<TermRecord> = c
            .terms
            .iter()
            .map(|((mu, nu), v)| TermRecord {
                mu: g.path_names(mu),
                nu: g.path_names(nu),
                re: v.re_string(),
                im: Some(v.im_string()),
                vertex: (mu.is_vertex() && nu.is_vertex())
                    .then(|| g.vertex_name(mu.source).to_string()),
            })
            .collect();
        serde_json::to_value(items).expect("terms serialize")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("terms serialize")
    }

    pub fn from_json(graph: &Arc<KGraph>, text: &str) -> Result<Self, ParseError> {
        let items: Vec<TermRecord> =
            serde_json::from_str(text).map_err(|e| ParseError::from_json(&e))?;
        let mut out = Element::zero(graph);
        for t in items {
            let mu = term_path(graph, &t.mu, t.vertex.as_deref(), &t.nu)?;
            let nu = term_path(graph, &t.nu, t.vertex.as_deref(), &t.mu)?;
            if mu.range != nu.range {
                return Err(ParseError::Schema(format!(
                    "term mu={:?} nu={:?}: paths must end at the same vertex",
                    t.mu, t.nu
                )));
            }
            let c = GaussianRational::new(
                parse_rational(&t.re)?,
                match &t.im {
                    Some(s) => parse_rational(s)?,
                    None => Rational::zero(),
                },
            );
            out.add_term(mu, nu, c);
        }
        Ok(out)
    }
}

/// Per-degree `δ` bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaSummary {
    pub bounded: bool,
    pub norm_bound: Rational,
    pub exact: bool,
    pub components: Vec<(Degree, Rational)>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermRecord {
    mu: Vec<String>,
    nu: Vec<String>,
    re: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vertex: Option<String>,
}

fn term_path(
    g: &KGraph,
    names: &[String],
    vertex: Option<&str>,
    partner: &[String],
) -> Result<KPath, ParseError> {
    if !names.is_empty() {
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        return g.path_from_names(&refs);
    }
    let v = if !partner.is_empty() {
        // S_μ with ν = r(μ), or S_ν* with μ = r(ν)
        let refs: Vec<&str> = partner.iter().map(String::as_str).collect();
        g.path_from_names(&refs)?.range
    } else {
        let name = vertex.ok_or_else(|| {
            ParseError::Schema("a term with empty mu and nu needs a \"vertex\" field".into())
        })?;
        g.vertex(name)
            .ok_or_else(|| ParseError::UnknownVertex(name.to_string()))?
    };
    Ok(g.vertex_path(v))
}

/// Componentwise maximum of `d(μ)` over a set of keys.
pub(crate) fn level_of<'a>(keys: impl Iterator<Item = &'a Key>, rank: usize) -> Degree {
    let mut level = vec![0; rank];
    for (mu, _) in keys {
        for (l, d) in level.iter_mut().zip(&mu.degree) {
            *l = (*l).max(*d);
        }
    }
    level
}

/// `S_μS_ν* = Σ_ρ S_{μρ}S_{νρ}*` with `d(μρ)` raised to `level`.
pub(crate) fn expand_key(g: &KGraph, key: &Key, level: &[i64]) -> Vec<(Key, GaussianRational)> {
    let (mu, nu) = key;
    let extra: Degree = level.iter().zip(&mu.degree).map(|(a, b)| a - b).collect();
    if extra.iter().all(|&x| x == 0) {
        return vec![(key.clone(), GaussianRational::one())];
    }
    g.maximal_extensions(mu.range, &extra)
        .into_iter()
        .map(|rho| {
            (
                (
                    g.compose(mu, &rho).expect("ρ starts at r(μ)"),
                    g.compose(nu, &rho).expect("ρ starts at r(ν)"),
                ),
                GaussianRational::one(),
            )
        })
        .collect()
}

/// If `key = (μe, νe)` for a final color-`c` edge `e`, returns `(μ, ν)` and
/// all keys `(μf, νf)` with `f` ranging over color-`c` edges out of `r(μ)`.
fn parent_family(g: &KGraph, key: &Key, c: usize) -> Option<(Key, Vec<Key>)> {
    let (a, b) = key;
    if a.degree[c] == 0 || b.degree[c] == 0 {
        return None;
    }
    let mut cut_a = a.degree.clone();
    cut_a[c] -= 1;
    let mut cut_b = b.degree.clone();
    cut_b[c] -= 1;
    let tail_a = g.segment_unchecked(a, &cut_a, &a.degree);
    let tail_b = g.segment_unchecked(b, &cut_b, &b.degree);
    if tail_a != tail_b {
        return None;
    }
    let zero = g.zero_degree();
    let mu = g.segment_unchecked(a, &zero, &cut_a);
    let nu = g.segment_unchecked(b, &zero, &cut_b);
    let unit = g.unit_degree(c);
    let family = g
        .enumerate_paths(&unit, mu.range, Direction::OutOf)
        .into_iter()
        .map(|f| (g.compose(&mu, &f).unwrap(), g.compose(&nu, &f).unwrap()))
        .collect();
    Some(((mu, nu), family))
}

impl PartialEq for Element {
    /// Equality in the algebra; elements of different models are unequal.
    fn eq(&self, other: &Self) -> bool {
        self.equals(other).unwrap_or(false)
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let g = &self.graph;
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((mu, nu), c)| {
                let body = match (mu.is_vertex(), nu.is_vertex()) {
                    (true, true) => format!("p_{}", g.vertex_name(mu.source)),
                    (false, true) => format!("S_{}", g.path_label(mu)),
                    (true, false) => format!("S_{}*", g.path_label(nu)),
                    (false, false) => format!("S_{}S_{}*", g.path_label(mu), g.path_label(nu)),
                };
                if c.is_one() {
                    body
                } else if c.is_real() && c.re.is_negative() && (-c.clone()).is_one() {
                    format!("-{body}")
                } else {
                    format!("{c}*{body}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl $tr for &Element {
            type Output = Element;
            /// Panics if the operands come from different models.
            fn $m(self, rhs: &Element) -> Element {
                self.$try(rhs).expect("operands share a presentation")
            }
        }
        impl $tr for Element {
            type Output = Element;
            fn $m(self, rhs: Element) -> Element {
                (&self).$try(&rhs).expect("operands share a presentation")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.neg_ref()
    }
}

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;

    fn loop_graph() -> Arc<KGraph> {
        parse_graph(r#"{"k":1,"vertices":["v"],"edges":[{"id":"e","source":"v","range":"v"}]}"#)
            .unwrap()
            .expand(2)
            .unwrap()
    }

    fn two_loops_at_v() -> Arc<KGraph> {
        parse_graph(
            r#"{"k":1,"vertices":["v"],"edges":[{"id":"e","source":"v","range":"v"},{"id":"f","source":"v","range":"v"}]}"#,
        )
        .unwrap()
        .expand(2)
        .unwrap()
    }

    #[test]
    fn isometry_and_projection() {
        let g = loop_graph();
        let s = Element::edge(&g, "e").unwrap();
        let p = Element::vertex_named(&g, "v").unwrap();
        assert_eq!(&s.adjoint() * &s, p);
        // single out-edge: S_e S_e* = p_v via the CK relation
        assert_eq!(&s * &s.adjoint(), p);
        let four = &(&(&s.adjoint() * &s) * &s.adjoint()) * &s;
        assert_eq!(four, p);
    }

    #[test]
    fn orthogonal_ranges() {
        let g = two_loops_at_v();
        let e = Element::edge(&g, "e").unwrap();
        let f = Element::edge(&g, "f").unwrap();
        assert!((&e.adjoint() * &f).is_zero());
        let p = Element::vertex_named(&g, "v").unwrap();
        let ck = &(&e * &e.adjoint()) + &(&f * &f.adjoint());
        assert_eq!(ck, p);
        assert_ne!(&e * &e.adjoint(), p);
    }

    #[test]
    fn grading_and_expectation() {
        let g = two_loops_at_v();
        let e = Element::edge(&g, "e").unwrap();
        let f = Element::edge(&g, "f").unwrap();
        let x = &e + &(&f * &e.adjoint());
        let grades = x.grade();
        assert_eq!(grades.len(), 2);
        assert!(x.expectation().is_zero() == false);
        assert!(e.expectation().is_zero());
    }

    #[test]
    fn involution_conjugates() {
        let g = loop_graph();
        let e = Element::edge(&g, "e").unwrap();
        let x = e.scale(&GaussianRational::i());
        assert_eq!(x.adjoint(), e.adjoint().scale(&-GaussianRational::i()));
    }

    #[test]
    fn contracted_form_is_short() {
        let g = two_loops_at_v();
        let e = Element::edge(&g, "e").unwrap();
        let f = Element::edge(&g, "f").unwrap();
        let p = &(&e * &e.adjoint()) + &(&f * &f.adjoint());
        let c = p.contracted();
        assert_eq!(c.term_count(), 1);
        assert_eq!(c.to_string(), "p_v");
    }

    #[test]
    fn json_round_trip() {
        let g = two_loops_at_v();
        let e = Element::edge(&g, "e").unwrap();
        let x = &e.scale(&GaussianRational::new(crate::scalar::rat(1, 2), crate::scalar::rat(-3, 1)))
            + &Element::vertex_named(&g, "v").unwrap();
        let back = Element::from_json(&g, &x.to_json()).unwrap();
        assert_eq!(back, x);
        assert!(Element::from_json(&g, r#"[{"mu":[],"nu":[],"re":"1","im":"0"}]"#).is_err());
    }

    #[test]
    fn local_unit_of_edge() {
        let g = parse_graph(r#"{"k":1,"vertices":["v","w"],"edges":[{"id":"e","source":"v","range":"w"}],"tails":["w"]}"#)
            .unwrap()
            .expand(2)
            .unwrap();
        let e = Element::edge(&g, "e").unwrap();
        let phi = Element::local_unit(&[e.clone()]).unwrap();
        let expect = &Element::vertex_named(&g, "v").unwrap() + &Element::vertex_named(&g, "w").unwrap();
        assert_eq!(phi, expect);
        assert_eq!(&phi * &e, e);
        assert_eq!(&e * &phi, e);
        assert_eq!(&phi * &phi, phi);
    }

    #[test]
    fn delta_bounds() {
        let g = loop_graph();
        let e = Element::edge(&g, "e").unwrap();
        assert_eq!(e.delta_action(1).norm_bound, crate::scalar::rat(1, 1));
        let ee = &e * &e;
        assert_eq!(ee.delta_action(3).norm_bound, crate::scalar::rat(8, 1));
        let p = Element::vertex_named(&g, "v").unwrap();
        assert!(p.delta_action(1).norm_bound.is_zero());
    }
}
