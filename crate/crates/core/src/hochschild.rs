//! Hochschild chains over the path algebra, the boundary `b`, orientation
//! cycles and their representation through `[D, ·]`.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{expand_key, generator_product, key_degree, level_of, Element, Key};
use crate::clifford::{dirac_commutator, AlgebraMatrix, Clifford, Matrix};
use crate::error::{Error, ParseError, Result};
use crate::kgraph::{
    compose_permutations, permutation_sign, permutations, Degree, Direction, KGraph,
    KGraphPresentation, KPath, VertexId,
};
use crate::scalar::GaussianRational;

/// `Σ c · a_0 ⊗ a_1 ⊗ … ⊗ a_n` with every factor a single generator.
#[derive(Clone)]
pub struct Chain {
    graph: Arc<KGraph>,
    arity: usize,
    terms: BTreeMap<Vec<Key>, GaussianRational>,
}

impl Chain {
    /// Empty chain with `arity` tensor factors.
    pub fn zero(graph: &Arc<KGraph>, arity: usize) -> Self {
        Self {
            graph: graph.clone(),
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn graph(&self) -> &Arc<KGraph> {
        &self.graph
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Key>, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, factors: &[Key]) -> GaussianRational {
        self.terms.get(factors).cloned().unwrap_or_else(GaussianRational::zero)
    }

    /// Adds `c · f_0 ⊗ … ⊗ f_n`; panics on a wrong factor count.
    pub fn add_term(&mut self, factors: Vec<Key>, c: GaussianRational) {
        assert_eq!(factors.len(), self.arity, "factor count must equal the arity");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(factors) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Adds `c · x_0 ⊗ … ⊗ x_n`, expanded multilinearly.
    pub fn add_tensor(&mut self, factors: &[Element], c: &GaussianRational) -> Result<()> {
        if factors.len() != self.arity {
            return Err(Error::DegreeMismatch {
                expected: vec![self.arity as i64],
                found: vec![factors.len() as i64],
            });
        }
        let mut partial: Vec<(Vec<Key>, GaussianRational)> = vec![(Vec::new(), c.clone())];
        for x in factors {
            if !Arc::ptr_eq(x.graph(), &self.graph) {
                return Err(Error::PresentationMismatch);
            }
            let mut next = Vec::new();
            for (keys, coef) in &partial {
                for (k, v) in x.terms() {
                    let mut ks = keys.clone();
                    ks.push(k.clone());
                    next.push((ks, coef * v));
                }
            }
            partial = next;
        }
        for (keys, coef) in partial {
            self.add_term(keys, coef);
        }
        Ok(())
    }

    pub fn from_tensor(factors: &[Element]) -> Result<Self> {
        let g = factors.first().ok_or(Error::ArityTooSmall(0))?.graph();
        let mut out = Self::zero(g, factors.len());
        out.add_tensor(factors, &GaussianRational::one())?;
        Ok(out)
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        let mut out = Self::zero(&self.graph, self.arity);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * c);
        }
        out
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if !Arc::ptr_eq(&self.graph, &other.graph) {
            return Err(Error::PresentationMismatch);
        }
        if self.arity != other.arity {
            return Err(Error::DegreeMismatch {
                expected: vec![self.arity as i64],
                found: vec![other.arity as i64],
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(&-GaussianRational::one()))
    }

    /// `b(a_0⊗…⊗a_n) = Σ_j (−1)^j …⊗a_ja_{j+1}⊗… + (−1)^n a_na_0⊗a_1⊗…⊗a_{n−1}`.
    pub fn boundary(&self) -> Result<Chain> {
        if self.arity < 2 {
            return Err(Error::ArityTooSmall(self.arity));
        }
        let n = self.arity - 1;
        let g = &self.graph;
        let mut out = Chain::zero(g, n);
        for (f, c) in &self.terms {
            for j in 0..n {
                let signed = if j % 2 == 0 { c.clone() } else { -c.clone() };
                for prod in generator_product(g, &f[j], &f[j + 1]) {
                    let mut keys = Vec::with_capacity(n);
                    keys.extend_from_slice(&f[..j]);
                    keys.push(prod);
                    keys.extend_from_slice(&f[j + 2..]);
                    out.add_term(keys, signed.clone());
                }
            }
            let signed = if n % 2 == 0 { c.clone() } else { -c.clone() };
            for prod in generator_product(g, &f[n], &f[0]) {
                let mut keys = Vec::with_capacity(n);
                keys.push(prod);
                keys.extend_from_slice(&f[1..n]);
                out.add_term(keys, signed.clone());
            }
        }
        Ok(out)
    }

    /// Rewrites every slot onto a common level per `(slot, degree)`, where
    /// distinct generators are independent, and expands multilinearly.
    pub fn canonical(&self) -> BTreeMap<Vec<Key>, GaussianRational> {
        let rank = self.graph.rank();
        let mut levels: Vec<BTreeMap<Degree, Vec<&Key>>> = vec![BTreeMap::new(); self.arity];
        for f in self.terms.keys() {
            for (slot, key) in f.iter().enumerate() {
                levels[slot].entry(key_degree(key)).or_default().push(key);
            }
        }
        let levels: Vec<BTreeMap<Degree, Degree>> = levels
            .into_iter()
            .map(|m| {
                m.into_iter()
                    .map(|(d, keys)| (d, level_of(keys.into_iter(), rank)))
                    .collect()
            })
            .collect();
        let mut out: BTreeMap<Vec<Key>, GaussianRational> = BTreeMap::new();
        for (f, c) in &self.terms {
            let mut partial: Vec<(Vec<Key>, GaussianRational)> = vec![(Vec::new(), c.clone())];
            for (slot, key) in f.iter().enumerate() {
                let level = &levels[slot][&key_degree(key)];
                let pieces = expand_key(&self.graph, key, level);
                let mut next = Vec::with_capacity(partial.len() * pieces.len());
                for (keys, coef) in &partial {
                    for (k, v) in &pieces {
                        let mut ks = keys.clone();
                        ks.push(k.clone());
                        next.push((ks, coef * v));
                    }
                }
                partial = next;
            }
            for (keys, coef) in partial {
                *out.entry(keys).or_insert_with(GaussianRational::zero) += &coef;
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() || self.canonical().is_empty()
    }

    /// Equality in the tensor power of the algebra.
    pub fn equals(&self, other: &Self) -> Result<bool> {
        Ok(self.try_sub(other)?.is_zero())
    }

    /// The algebra element of an arity-1 chain.
    pub fn to_element(&self) -> Result<Element> {
        if self.arity != 1 {
            return Err(Error::DegreeMismatch {
                expected: vec![1],
                found: vec![self.arity as i64],
            });
        }
        let mut out = Element::zero(&self.graph);
        for (f, c) in &self.terms {
            let (mu, nu) = f[0].clone();
            out.add_term(mu, nu, c.clone());
        }
        Ok(out)
    }

    /// `{"arity", "terms": [{"re", "im", "factors": [element, …]}]}`.
    pub fn to_json_value(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(f, c)| {
                let factors: Vec<serde_json::Value> = f
                    .iter()
                    .map(|k| Element::from_key(&self.graph, k).to_json_value())
                    .collect();
                serde_json::json!({"re": c.re_string(), "im": c.im_string(), "factors": factors})
            })
            .collect();
        serde_json::json!({"arity": self.arity, "terms": terms})
    }

    pub fn from_json(graph: &Arc<KGraph>, text: &str) -> Result<Self, ParseError> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| ParseError::from_json(&e))?;
        let schema = |m: &str| ParseError::Schema(m.to_string());
        let arity = v["arity"].as_u64().ok_or_else(|| schema("chain needs an integer \"arity\""))? as usize;
        let mut out = Chain::zero(graph, arity);
        for t in v["terms"].as_array().ok_or_else(|| schema("chain needs a \"terms\" array"))? {
            let c = GaussianRational::parse_pair(
                t["re"].as_str().ok_or_else(|| schema("term needs \"re\""))?,
                t["im"].as_str().unwrap_or("0"),
            )?;
            let factors = t["factors"].as_array().ok_or_else(|| schema("term needs \"factors\""))?;
            if factors.len() != arity {
                return Err(schema("factor count differs from arity"));
            }
            let elements = factors
                .iter()
                .map(|f| Element::from_json(graph, &f.to_string()))
                .collect::<Result<Vec<_>, _>>()?;
            out.add_tensor(&elements, &c)
                .map_err(|e| ParseError::Schema(e.to_string()))?;
        }
        Ok(out)
    }
}

impl PartialEq for Chain {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other).unwrap_or(false)
    }
}

impl fmt::Debug for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chain({self})")
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(keys, c)| {
                let body: Vec<String> = keys
                    .iter()
                    .map(|k| Element::from_key(&self.graph, k).to_string())
                    .collect();
                let body = body.join(" ⊗ ");
                if c.is_one() {
                    body
                } else {
                    format!("{c}*({body})")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn edge_key(g: &KGraph, lambda: &KPath) -> Key {
    (lambda.clone(), g.vertex_path(lambda.range))
}

fn adjoint_key(g: &KGraph, lambda: &KPath) -> Key {
    (g.vertex_path(lambda.range), lambda.clone())
}

/// `c = Σ_e S_e* ⊗ S_e` over every edge of a rank-1 model.
pub fn orientation_cycle_1graph(model: &Arc<KGraph>) -> Chain {
    let mut out = Chain::zero(model, 2);
    for e in model.edge_ids() {
        let p = model.edge_path(e);
        out.add_term(vec![adjoint_key(model, &p), edge_key(model, &p)], GaussianRational::one());
    }
    out
}

/// `Σ_v (|v|_1 − [v emits]) p_v`, where `|v|_1` counts entering edges.
pub fn vertex_multiplicity_formula(model: &Arc<KGraph>) -> Element {
    let mut out = Element::zero(model);
    for v in model.vertex_ids() {
        let entering = model.in_edges(v, 0).len() as i64;
        let emits = !model.out_edges(v, 0).is_empty() as i64;
        let v_path = model.vertex_path(v);
        out.add_term(v_path.clone(), v_path, GaussianRational::from_int(entering - emits));
    }
    out
}

/// How `[D, ·]` enters `π_D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Commutator {
    /// `D = i Σ γ^m n_m` (plain `n` at rank 1), which is self-adjoint.
    SelfAdjoint,
    /// `[D, S_λ] = Σ γ^m d_m(λ) S_λ`, the form used in the hand computation.
    Symbol,
}

fn commutator_matrix(c: &Clifford, a: &Element, conv: Commutator) -> Result<AlgebraMatrix> {
    match conv {
        Commutator::SelfAdjoint => dirac_commutator(c, a),
        Commutator::Symbol => {
            let mut out = AlgebraMatrix::zeros(c.dim(), a);
            for (m, g) in c.gammas.iter().enumerate() {
                out = out.try_add(&AlgebraMatrix::tensor(g, &a.degree_weighted(m)))?;
            }
            Ok(out)
        }
    }
}

/// `π_D(Σ a_0⊗a_1⊗…⊗a_n) = Σ a_0 [D, a_1] ⋯ [D, a_n]`.
pub fn pi_d(chain: &Chain, c: &Clifford, conv: Commutator) -> Result<AlgebraMatrix> {
    let g = chain.graph();
    if c.k != g.rank() {
        return Err(Error::DegreeMismatch {
            expected: vec![g.rank() as i64],
            found: vec![c.k as i64],
        });
    }
    let zero = Element::zero(g);
    let mut out = AlgebraMatrix::zeros(c.dim(), &zero);
    for (factors, coef) in chain.terms() {
        let a0 = Element::from_key(g, &factors[0]).scale(coef);
        let mut acc = AlgebraMatrix::tensor(&c.identity(), &a0);
        for key in &factors[1..] {
            let a = Element::from_key(g, key);
            acc = acc.try_mul(&commutator_matrix(c, &a, conv)?)?;
        }
        out = out.try_add(&acc)?;
    }
    Ok(out)
}

/// `Σ_v p_v` over the listed vertices.
pub fn vertex_sum(g: &Arc<KGraph>, vertices: impl IntoIterator<Item = VertexId>) -> Element {
    let mut out = Element::zero(g);
    for v in vertices {
        let p = g.vertex_path(v);
        out.add_term(p.clone(), p, GaussianRational::one());
    }
    out
}

/// Checks of `c = Σ_e S_e*⊗S_e` on one finite model.
#[derive(Debug, Clone, Serialize)]
pub struct OneGraphCycleReport {
    pub edges: usize,
    /// `b(c)` agrees with `Σ_v (|v|_1 − [v emits]) p_v`.
    pub matches_formula: bool,
    /// Nonzero vertex coefficients of `b(c)`, by vertex name.
    pub coefficients: BTreeMap<String, String>,
    /// `b(c)` vanishes away from the truncation boundary.
    pub interior_zero: bool,
    /// `b(c) = 0` exactly in the model.
    pub boundary_zero: bool,
    /// `π_D(c) = Σ p_v` over vertices below the ray starts.
    pub pi_d_identity: bool,
    /// `π_D(c)` fixes every generator `S_μS_ν*` with `|μ|, |ν| ≤ 2` whose
    /// `s(μ)` is not a ray start.
    pub pi_d_fixes_basis: bool,
    pub basis_checked: usize,
}

pub fn check_orientation_1graph(model: &Arc<KGraph>) -> Result<OneGraphCycleReport> {
    let c = orientation_cycle_1graph(model);
    let b = c.boundary()?.to_element()?;
    let formula = vertex_multiplicity_formula(model);
    let matches_formula = b.equals(&formula)?;
    let mut coefficients = BTreeMap::new();
    let mut interior_zero = true;
    for v in model.vertex_ids() {
        let p = model.vertex_path(v);
        let coef = formula.coefficient(&(p.clone(), p));
        if !coef.is_zero() {
            coefficients.insert(model.vertex_name(v).to_string(), coef.to_string());
            if !model.is_boundary(v) {
                interior_zero = false;
            }
        }
    }
    let clifford = Clifford::new(1)?;
    let pi = pi_d(&c, &clifford, Commutator::SelfAdjoint)?.get(0, 0).clone();
    let inner = vertex_sum(
        model,
        model.vertex_ids().into_iter().filter(|&v| !model.is_head_start(v)),
    );
    let pi_d_identity = pi.equals(&inner)?;
    let mut basis_checked = 0;
    let mut pi_d_fixes_basis = true;
    for w in model.vertex_ids() {
        for lm in 0..=2 {
            for mu in model.enumerate_paths(&[lm], w, Direction::Into) {
                if model.is_head_start(mu.source) {
                    continue;
                }
                for ln in 0..=2 {
                    for nu in model.enumerate_paths(&[ln], w, Direction::Into) {
                        let x = Element::generator(model, mu.clone(), nu);
                        basis_checked += 1;
                        if !pi.try_mul(&x)?.equals(&x)? {
                            pi_d_fixes_basis = false;
                        }
                    }
                }
            }
        }
    }
    Ok(OneGraphCycleReport {
        edges: model.edge_count(),
        matches_formula,
        coefficients,
        interior_zero,
        boundary_zero: b.is_zero(),
        pi_d_identity,
        pi_d_fixes_basis,
        basis_checked,
    })
}

/// `c_k` with the global scalar kept apart from the chain.
#[derive(Debug, Clone)]
pub struct OrientationCycle {
    pub k: usize,
    /// `i^⌈(k+1)/2⌉`.
    pub scalar: GaussianRational,
    /// `Σ_μ (1/k!) Σ_σ (−1)^σ S_μ* ⊗ S_{μ^σ_1} ⊗ … ⊗ S_{μ^σ_k}`.
    pub chain: Chain,
}

impl OrientationCycle {
    pub fn full(&self) -> Chain {
        self.chain.scale(&self.scalar)
    }
}

fn ones(k: usize) -> Degree {
    vec![1; k]
}

fn unit_cubes(g: &KGraph) -> Vec<KPath> {
    let n = ones(g.rank());
    g.vertex_ids()
        .into_iter()
        .flat_map(|v| g.enumerate_paths(&n, v, Direction::OutOf))
        .collect()
}

fn factor_paths(g: &KGraph, mu: &KPath, sigma: &[usize]) -> Result<Vec<KPath>> {
    Ok(g.factorize(mu, sigma)?.into_iter().map(|e| g.edge_path(e)).collect())
}

fn factorial(k: usize) -> i64 {
    (1..=k as i64).product()
}

/// Builds `c_k` without checking single exit.
pub fn orientation_cycle_unchecked(g: &Arc<KGraph>) -> Result<OrientationCycle> {
    let k = g.rank();
    let mut chain = Chain::zero(g, k + 1);
    let kf = factorial(k);
    for mu in unit_cubes(g) {
        for sigma in permutations(k) {
            let mut keys = vec![adjoint_key(g, &mu)];
            for p in factor_paths(g, &mu, &sigma)? {
                keys.push(edge_key(g, &p));
            }
            chain.add_term(keys, GaussianRational::from_ratio(permutation_sign(&sigma), kf));
        }
    }
    Ok(OrientationCycle {
        k,
        scalar: GaussianRational::i_pow((k as i64 + 2) / 2),
        chain,
    })
}

pub fn orientation_cycle_kgraph(p: &KGraphPresentation) -> Result<OrientationCycle> {
    if let Some((vertex, color, count)) = p.single_exit_violations().into_iter().next() {
        return Err(Error::SingleExitViolated { vertex, color, count });
    }
    orientation_cycle_unchecked(&p.graph)
}

/// Checks of `c_k` on a k-graph.
#[derive(Debug, Clone, Serialize)]
pub struct KGraphCycleReport {
    pub k: usize,
    pub terms: usize,
    pub boundary_zero: bool,
    /// `π_D(c_k) = ω_C ⊗ Σ_v p_v` with the symbol commutator.
    pub pi_d_volume_form: bool,
    /// `π_D(c_k) = i^k ω_C ⊗ Σ_v p_v` with the self-adjoint `D`.
    pub pi_d_self_adjoint: bool,
    /// `ω_C²` when it is a scalar.
    pub omega_squared: Option<String>,
}

pub fn check_orientation_kgraph(p: &KGraphPresentation) -> Result<KGraphCycleReport> {
    let cycle = orientation_cycle_kgraph(p)?;
    let g = &p.graph;
    let full = cycle.full();
    let boundary_zero = full.boundary()?.is_zero();
    let clifford = Clifford::new(cycle.k)?;
    let omega = clifford.volume_form_raw();
    let unit = vertex_sum(g, g.vertex_ids());
    let literal = AlgebraMatrix::tensor(&omega, &unit);
    let pi_symbol = pi_d(&full, &clifford, Commutator::Symbol)?;
    let shifted: Matrix = omega.scale(&GaussianRational::i_pow(cycle.k as i64));
    let pi_sa = pi_d(&full, &clifford, Commutator::SelfAdjoint)?;
    Ok(KGraphCycleReport {
        k: cycle.k,
        terms: full.term_count(),
        boundary_zero,
        pi_d_volume_form: pi_symbol.equals(&literal)?,
        pi_d_self_adjoint: pi_sa.equals(&AlgebraMatrix::tensor(&shifted, &unit))?,
        omega_squared: omega.mul(&omega).as_scalar().map(|s| s.to_string()),
    })
}

/// Outcome of one proof step.
#[derive(Debug, Clone, Serialize)]
pub struct StepCheck {
    pub holds: bool,
    pub checked: usize,
    pub witness: Option<String>,
}

impl StepCheck {
    fn new() -> Self {
        Self {
            holds: true,
            checked: 0,
            witness: None,
        }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.holds {
            self.holds = false;
            self.witness = Some(witness());
        }
    }
}

/// Independent checks of the three steps behind `b(c_k) = 0`.
#[derive(Debug, Clone, Serialize)]
pub struct CancellationReport {
    pub k: usize,
    /// Middle terms cancel in pairs `σ ↔ σ∘t_j` over `A_j → B_j`.
    pub pairing: StepCheck,
    /// Paired elementary tensors agree factor by factor.
    pub termwise: StepCheck,
    /// Each head term cancels against `Σ_α x(λ, σ∘ψ_k, α)`.
    pub head_tail: StepCheck,
    /// `b` of each `μ`-summand equals the head plus tail expression.
    pub first_step: StepCheck,
    pub boundary_zero: bool,
    /// 1, 2 or 3 for the first failing step.
    pub failing_step: Option<u8>,
}

fn psi(k: usize) -> Vec<usize> {
    (0..k).map(|i| (i + 1) % k).collect()
}

fn inverse(sigma: &[usize]) -> Vec<usize> {
    let mut out = vec![0; sigma.len()];
    for (i, &s) in sigma.iter().enumerate() {
        out[s] = i;
    }
    out
}

fn swap_adjacent(k: usize, j: usize) -> Vec<usize> {
    let mut t: Vec<usize> = (0..k).collect();
    t.swap(j, j + 1);
    t
}

fn concat(g: &KGraph, parts: &[KPath]) -> KPath {
    parts[1..]
        .iter()
        .fold(parts[0].clone(), |acc, p| g.compose(&acc, p).expect("factors are composable"))
}

fn sign(s: i64) -> GaussianRational {
    GaussianRational::from_int(s)
}

/// Verifies the proof of `b(c_k) = 0` step by step on a finite k-graph.
pub fn verify_cancellation_steps(g: &Arc<KGraph>) -> Result<CancellationReport> {
    let k = g.rank();
    if k < 2 {
        return Err(Error::Hypothesis("cancellation steps need rank at least 2".into()));
    }
    let perms = permutations(k);
    let cubes = unit_cubes(g);
    let mut pairing = StepCheck::new();
    let mut termwise = StepCheck::new();
    let mut first_step = StepCheck::new();

    // step (i): A_j → B_j via σ ↦ σ∘t_j, with opposite signs
    for j in 0..k - 1 {
        let t = swap_adjacent(k, j);
        let a: Vec<&Vec<usize>> = perms.iter().filter(|s| s[j] < s[j + 1]).collect();
        let b: BTreeSet<Vec<usize>> =
            perms.iter().filter(|s| s[j] > s[j + 1]).cloned().collect();
        let image: BTreeSet<Vec<usize>> =
            a.iter().map(|s| compose_permutations(s, &t)).collect();
        pairing.record(image == b && a.len() == b.len(), || format!("t_{} is not a bijection", j + 1));
        for s in &a {
            let st = compose_permutations(s, &t);
            pairing.record(permutation_sign(s) + permutation_sign(&st) == 0, || {
                format!("signs of {s:?} and {st:?} do not cancel")
            });
        }
    }

    let mut heads = Chain::zero(g, k);
    let mut tails = Chain::zero(g, k);
    // (λ, σ) → (head multiplicity, tail partners α)
    let mut groups: BTreeMap<(KPath, Vec<usize>), (usize, Vec<KPath>)> = BTreeMap::new();
    let psi_k = psi(k);
    let psi_inv = inverse(&psi_k);
    let sign_k = if k % 2 == 0 { 1 } else { -1 };

    for mu in &cubes {
        let name = g.path_label(mu);
        let factors: BTreeMap<Vec<usize>, Vec<KPath>> = perms
            .iter()
            .map(|s| Ok((s.clone(), factor_paths(g, mu, s)?)))
            .collect::<Result<_>>()?;
        let mut summand = Chain::zero(g, k + 1);
        let mut head_tail = Chain::zero(g, k);
        for (s, fs) in &factors {
            let sg = sign(permutation_sign(s));
            let mut keys = vec![adjoint_key(g, mu)];
            keys.extend(fs.iter().map(|p| edge_key(g, p)));
            summand.add_term(keys, sg.clone());

            // head: (−1)^σ S*_{μ_2⋯μ_k} ⊗ S_{μ_2} ⊗ … ⊗ S_{μ_k}
            let lambda = concat(g, &fs[1..]);
            let mut hk = vec![adjoint_key(g, &lambda)];
            hk.extend(fs[1..].iter().map(|p| edge_key(g, p)));
            head_tail.add_term(hk.clone(), sg.clone());
            heads.add_term(hk, sg.clone());
            groups.entry((lambda, s.clone())).or_insert((0, Vec::new())).0 += 1;

            // tail: (−1)^σ (−1)^k S_{μ_k}S*_{μ_k}S*_{μ_1⋯μ_{k−1}} ⊗ S_{μ_1} ⊗ … ⊗ S_{μ_{k−1}}
            let last = &fs[k - 1];
            let front = concat(g, &fs[..k - 1]);
            let lead: Element = Element::path(g, last)
                .try_mul(&Element::path_adjoint(g, last))?
                .try_mul(&Element::path_adjoint(g, &front))?;
            let mut rest: Vec<Element> = vec![lead];
            rest.extend(fs[..k - 1].iter().map(|p| Element::path(g, p)));
            let ts = sign(permutation_sign(s) * sign_k);
            head_tail.add_tensor(&rest, &ts)?;
            tails.add_tensor(&rest, &ts)?;
            let sigma = compose_permutations(s, &psi_inv);
            groups.entry((front, sigma)).or_insert((0, Vec::new())).1.push(last.clone());

            // step (ii): paired tensors agree termwise
            for j in 0..k - 1 {
                if s[j] > s[j + 1] {
                    continue;
                }
                let st = compose_permutations(s, &swap_adjacent(k, j));
                let other = &factors[&st];
                let left = g.compose(&fs[j], &fs[j + 1]);
                let right = g.compose(&other[j], &other[j + 1]);
                let outside = (0..k).filter(|&i| i != j && i != j + 1).all(|i| fs[i] == other[i]);
                termwise.record(left.is_some() && left == right && outside, || {
                    format!("μ = {name}, σ = {s:?}, j = {}", j + 1)
                });
            }
        }

        // step (i) on chains: middle terms sum to zero for each j
        for j in 0..k - 1 {
            let mut middle = Chain::zero(g, k);
            for (s, fs) in &factors {
                let mut keys = vec![adjoint_key(g, mu)];
                keys.extend(fs[..j].iter().map(|p| edge_key(g, p)));
                keys.push(edge_key(g, &g.compose(&fs[j], &fs[j + 1]).expect("adjacent factors")));
                keys.extend(fs[j + 2..].iter().map(|p| edge_key(g, p)));
                middle.add_term(keys, sign(permutation_sign(s)));
            }
            pairing.record(middle.is_zero(), || format!("μ = {name}, j = {}", j + 1));
        }
        first_step.record(summand.boundary()?.equals(&head_tail)?, || format!("μ = {name}"));
    }

    // step (iii): heads against Σ_α x(λ, σ∘ψ_k, α)
    let mut head_tail_step = StepCheck::new();
    for ((lambda, s), (mult, alphas)) in &groups {
        let color = s[0];
        let entering = g.in_edges(lambda.source, color).len();
        let mut partial = Chain::zero(g, k);
        let mut hk = vec![adjoint_key(g, lambda)];
        let fs = factor_paths_of(g, lambda, &s[1..])?;
        hk.extend(fs.iter().map(|p| edge_key(g, p)));
        partial.add_term(hk, GaussianRational::from_int(*mult as i64));
        let mut tail_sum = Element::zero(g);
        for a in alphas {
            tail_sum = tail_sum.try_add(&Element::path(g, a).try_mul(&Element::path_adjoint(g, a))?)?;
        }
        let mut rest = vec![tail_sum.try_mul(&Element::path_adjoint(g, lambda))?];
        rest.extend(fs.iter().map(|p| Element::path(g, p)));
        partial.add_tensor(&rest, &-GaussianRational::one())?;
        head_tail_step.record(partial.is_zero(), || {
            format!(
                "vertex {}: {} edges of color {} enter (λ = {})",
                g.vertex_name(lambda.source),
                entering,
                color + 1,
                g.path_label(lambda)
            )
        });
    }

    let boundary_zero = heads.try_add(&tails)?.is_zero();
    let failing_step = if !(pairing.holds && first_step.holds) {
        Some(1)
    } else if !termwise.holds {
        Some(2)
    } else if !head_tail_step.holds {
        Some(3)
    } else {
        None
    };
    Ok(CancellationReport {
        k,
        pairing,
        termwise,
        head_tail: head_tail_step,
        first_step,
        boundary_zero,
        failing_step,
    })
}

/// Splits `λ` of degree `1_k − e_{colors excluded}` into single edges with
/// the given color order.
fn factor_paths_of(g: &KGraph, lambda: &KPath, colors: &[usize]) -> Result<Vec<KPath>> {
    let mut out = Vec::with_capacity(colors.len());
    let mut start = g.zero_degree();
    for &c in colors {
        let mut end = start.clone();
        end[c] += 1;
        out.push(g.segment(lambda, &start, &end)?);
        start = end;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn model(text: &str, depth: usize) -> Arc<KGraph> {
        corpus::graph(text).expand(depth).unwrap()
    }

    #[test]
    fn arity_two_boundary_is_commutator() {
        let g = model(&corpus::cycle(2), 1);
        let x = Element::edge(&g, "e0").unwrap();
        let y = Element::edge(&g, "e1").unwrap().adjoint();
        let b = Chain::from_tensor(&[x.clone(), y.clone()]).unwrap().boundary().unwrap();
        let want = x.try_mul(&y).unwrap().try_sub(&y.try_mul(&x).unwrap()).unwrap();
        assert!(b.to_element().unwrap().equals(&want).unwrap());
        assert!(matches!(b.boundary(), Err(Error::ArityTooSmall(1))));
    }

    #[test]
    fn circle_cycle() {
        let g = model(&corpus::cycle(1), 1);
        let c = orientation_cycle_1graph(&g);
        assert_eq!(c.to_string(), "S_e0* ⊗ S_e0");
        let r = check_orientation_1graph(&g).unwrap();
        assert!(r.boundary_zero && r.matches_formula && r.pi_d_identity && r.pi_d_fixes_basis);
    }

    #[test]
    fn rose_multiplicity() {
        let g = model(&corpus::rose(3), 1);
        let r = check_orientation_1graph(&g).unwrap();
        assert!(r.matches_formula);
        assert_eq!(r.coefficients["v"], "2");
        assert!(!r.boundary_zero);
    }

    #[test]
    fn sink_coefficient_counts_entries() {
        let g = model(&corpus::path_to_sink(2), 1);
        let r = check_orientation_1graph(&g).unwrap();
        assert!(r.matches_formula);
        assert_eq!(r.coefficients["p2"], "1");
    }

    #[test]
    fn broom_boundary_residual() {
        let g = model(&corpus::broom(2), 3);
        let r = check_orientation_1graph(&g).unwrap();
        assert!(r.matches_formula && r.interior_zero && r.pi_d_identity && r.pi_d_fixes_basis);
        assert!(!r.boundary_zero);
    }

    #[test]
    fn torus_cycle_terms() {
        let p = corpus::kgraph(&corpus::torus(2));
        let c = orientation_cycle_kgraph(&p).unwrap();
        assert_eq!(c.scalar, GaussianRational::from_int(-1));
        assert_eq!(c.chain.term_count(), 2);
        let g = &p.graph;
        let ef = g.path_from_names(&["e1", "e2"]).unwrap();
        let e = g.edge_path(g.edge("e1").unwrap());
        let f = g.edge_path(g.edge("e2").unwrap());
        let half = GaussianRational::from_ratio(1, 2);
        let keys = |a: &KPath, b: &KPath| vec![adjoint_key(g, &ef), edge_key(g, a), edge_key(g, b)];
        assert_eq!(c.chain.coefficient(&keys(&e, &f)), half);
        assert_eq!(c.chain.coefficient(&keys(&f, &e)), -half);
    }

    #[test]
    fn kgraph_cycles_close() {
        for (name, text) in corpus::single_exit_kgraphs() {
            let p = corpus::kgraph(&text);
            let r = check_orientation_kgraph(&p).unwrap();
            assert!(r.boundary_zero, "{name}");
            assert!(r.pi_d_volume_form, "{name}");
            assert!(r.pi_d_self_adjoint, "{name}");
            let steps = verify_cancellation_steps(&p.graph).unwrap();
            assert_eq!(steps.failing_step, None, "{name}: {steps:?}");
            assert!(steps.boundary_zero);
        }
    }

    #[test]
    fn double_entry_fails_head_tail() {
        let p = corpus::kgraph(&corpus::double_entry_2graph());
        assert!(matches!(orientation_cycle_kgraph(&p), Err(Error::SingleExitViolated { .. })));
        let steps = verify_cancellation_steps(&p.graph).unwrap();
        assert!(steps.pairing.holds && steps.termwise.holds && steps.first_step.holds);
        assert_eq!(steps.failing_step, Some(3));
        assert!(steps.head_tail.witness.as_deref().unwrap().starts_with("vertex v"));
        assert!(!steps.boundary_zero);
        let c = orientation_cycle_unchecked(&p.graph).unwrap();
        assert!(!c.full().boundary().unwrap().is_zero());
    }

    #[test]
    fn chain_json_round_trip() {
        let p = corpus::kgraph(&corpus::two_vertex());
        let c = orientation_cycle_kgraph(&p).unwrap().full();
        let back = Chain::from_json(&p.graph, &c.to_json_value().to_string()).unwrap();
        assert_eq!(back, c);
    }
}
