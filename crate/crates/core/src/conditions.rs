//! Hypotheses and the nine conditions for one presentation, collected into a
//! versioned report.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{Element, Key};
use crate::clifford::sign_table_check;
use crate::error::{Error, Result};
use crate::graph::{GraphClass, GraphPresentation};
use crate::hochschild::{check_orientation_1graph, check_orientation_kgraph, verify_cancellation_steps};
use crate::kgraph::{KGraph, KGraphPresentation, VertexKind};
use crate::presentation::{components, Presentation};
use crate::scalar::Rational;
use crate::spectral::{
    build_truncation, closedness_eval, commutant_probe, first_order_check, path_generators,
    reality_check_1graph, singular_profile, spin_c_generation_check, vertex_masses, Truncation,
};
use crate::trace::{
    canonical_f_form, default_end_values, fixed_point_norms, kgraph_trace, solve_graph_trace, GraphTrace,
    Trace,
};

pub const REPORT_VERSION: u32 = 1;

pub const CONDITION_NAMES: [&str; 9] = [
    "dimension",
    "regularity",
    "orientability",
    "closedness",
    "finiteness",
    "first_order",
    "spin_c",
    "reality",
    "irreducibility",
];

/// Largest window used for rank ≥ 2 profiles; lattice counts grow like `N^k`.
pub const HIGHER_RANK_WINDOW: u64 = 256;

#[derive(Debug, Clone, Serialize)]
pub struct Hypotheses {
    pub connected: bool,
    pub locally_finite: bool,
    pub no_sinks: bool,
    pub faithful_graph_trace_exists: bool,
    /// Single entry for graphs, single exit for rank ≥ 2.
    pub single_entry: bool,
    pub fg_ktheory: bool,
    /// Number of ends, for graphs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ends: Option<usize>,
    pub witnesses: BTreeMap<String, String>,
}

impl Hypotheses {
    pub fn all_hold(&self) -> bool {
        self.connected
            && self.locally_finite
            && self.no_sinks
            && self.faithful_graph_trace_exists
            && self.single_entry
            && self.fg_ktheory
    }
}

pub fn hypothesis_check(p: &Presentation) -> Hypotheses {
    match p {
        Presentation::Graph(g) => graph_hypotheses(g),
        Presentation::KGraph(g) => kgraph_hypotheses(g),
    }
}

fn graph_hypotheses(p: &GraphPresentation) -> Hypotheses {
    let mut witnesses = BTreeMap::new();
    let comps = p.components();
    if comps.len() != 1 {
        witnesses.insert("connected".into(), format!("{} components", comps.len()));
    }
    let sinks = p.sinks();
    if !sinks.is_empty() {
        witnesses.insert("no_sinks".into(), format!("sinks {sinks:?}"));
    }
    let faithful = match solve_graph_trace(p, &default_end_values(p)) {
        Ok(t) if t.is_faithful() => true,
        Ok(_) => {
            witnesses.insert("faithful_graph_trace_exists".into(), "trace vanishes somewhere".into());
            false
        }
        Err(e) => {
            witnesses.insert("faithful_graph_trace_exists".into(), e.to_string());
            false
        }
    };
    let entry = p.single_entry_check();
    if !entry.holds {
        witnesses.insert("single_entry".into(), format!("entry counts {:?}", entry.violations));
    }
    let report = p.structural_report();
    Hypotheses {
        connected: comps.len() == 1,
        locally_finite: report.locally_finite,
        no_sinks: sinks.is_empty(),
        faithful_graph_trace_exists: faithful,
        single_entry: entry.holds,
        // a finite presentation has finitely many ends
        fg_ktheory: true,
        ends: Some(p.find_ends().len()),
        witnesses,
    }
}

fn kgraph_hypotheses(p: &KGraphPresentation) -> Hypotheses {
    let mut witnesses = BTreeMap::new();
    let comps = components(&p.graph);
    if comps.len() != 1 {
        witnesses.insert("connected".into(), format!("{} components", comps.len()));
    }
    let faithful = match kgraph_trace(p, None) {
        Ok(_) => true,
        Err(e) => {
            witnesses.insert("faithful_graph_trace_exists".into(), e.to_string());
            false
        }
    };
    let violations = p.single_exit_violations();
    if let Some((v, c, n)) = violations.first() {
        witnesses.insert("single_entry".into(), format!("{n} edges of color {c} enter {v}"));
    }
    Hypotheses {
        connected: comps.len() == 1,
        locally_finite: true,
        // the reader rejects vertices missing a color
        no_sinks: true,
        faithful_graph_trace_exists: faithful,
        single_entry: violations.is_empty(),
        fg_ktheory: true,
        ends: None,
        witnesses,
    }
}

#[derive(Debug, Clone)]
pub struct ConditionConfig {
    pub level: u32,
    pub window: u64,
    /// Relative tolerance for the numeric dimension check.
    pub tolerance: f64,
    pub end_values: Option<BTreeMap<String, Rational>>,
}

impl Default for ConditionConfig {
    fn default() -> Self {
        Self {
            level: 3,
            window: 100_000,
            tolerance: 0.05,
            end_values: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Fails,
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Numeric,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionEntry {
    pub name: String,
    pub status: Status,
    pub method: Method,
    pub witness: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub report_version: u32,
    pub rank: usize,
    pub level: u32,
    pub window: u64,
    pub tolerance: f64,
    pub hypotheses: Hypotheses,
    pub conditions: Vec<ConditionEntry>,
}

impl ConditionReport {
    pub fn entry(&self, name: &str) -> Option<&ConditionEntry> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn all_hold(&self) -> bool {
        self.conditions.iter().all(|c| c.status == Status::Holds)
    }

    /// 0 when all hold, 2 when any fails, otherwise 3.
    pub fn exit_code(&self) -> i32 {
        if self.all_hold() {
            0
        } else if self.conditions.iter().any(|c| c.status == Status::Fails) {
            2
        } else {
            3
        }
    }

    pub fn to_json_value(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Finite model, trace and truncation shared by the evaluators.
struct Setup<'a> {
    presentation: &'a Presentation,
    model: Arc<KGraph>,
    graph_trace: Option<GraphTrace>,
    trace: std::result::Result<Trace, String>,
    truncation: std::result::Result<Truncation, String>,
    level: u32,
}

fn setup<'a>(p: &'a Presentation, cfg: &ConditionConfig) -> Result<Setup<'a>> {
    let (model, graph_trace, trace) = match p {
        Presentation::Graph(g) => {
            let model = g.expand(cfg.level as usize + 2)?;
            let values = cfg.end_values.clone().unwrap_or_else(|| default_end_values(g));
            match solve_graph_trace(g, &values) {
                Ok(gt) => {
                    let t = gt.on_model(&model);
                    (model, Some(gt), Ok(t))
                }
                Err(e) => (model, None, Err(e.to_string())),
            }
        }
        Presentation::KGraph(g) => {
            let t = kgraph_trace(g, cfg.end_values.as_ref()).map_err(|e| e.to_string());
            (g.graph.clone(), None, t)
        }
    };
    let truncation = match &trace {
        Ok(t) => build_truncation(t, cfg.level).map_err(|e| e.to_string()),
        Err(e) => Err(e.clone()),
    };
    Ok(Setup {
        presentation: p,
        model,
        graph_trace,
        trace,
        truncation,
        level: cfg.level,
    })
}

type Verdict = (Status, Value);

fn holds_if(ok: bool, witness: Value) -> Verdict {
    (if ok { Status::Holds } else { Status::Fails }, witness)
}

fn need<'s, T>(x: &'s std::result::Result<T, String>) -> Result<&'s T> {
    x.as_ref()
        .map_err(|e| Error::Hypothesis(format!("no faithful trace or truncation: {e}")))
}

/// Generator length for the quadratic checks: single edges generate `A`,
/// and both commutator identities are multiplicative in each slot.
const CHECK_GENERATOR_LENGTH: u32 = 1;

fn dimension(s: &Setup, cfg: &ConditionConfig) -> Result<Verdict> {
    let tr = need(&s.truncation)?;
    let t = need(&s.trace)?;
    let g = tr.graph();
    let k = g.rank();
    let window = if k == 1 { cfg.window } else { cfg.window.min(HIGHER_RANK_WINDOW) };
    let mut vertices = Vec::new();
    let mut ok = true;
    for v in g.vertex_ids() {
        if !matches!(g.vertex_info(v).kind, VertexKind::Core) {
            continue;
        }
        let masses = vertex_masses(tr, v)?;
        let profile = singular_profile(&masses, window)?;
        let tau = t.vertex_value(v).to_f64().unwrap_or(f64::NAN);
        // F_T at the window edge carries an O(ln τ / ln N) bias, so the
        // extrapolated value is the limit estimate
        let estimate = profile.extrapolated;
        let positive = estimate > 0.0 && tau > 0.0;
        let constant = estimate / tau;
        let within = if k == 1 {
            (estimate / (2.0 * tau) - 1.0).abs() <= cfg.tolerance
        } else {
            true
        };
        ok &= positive && within;
        vertices.push(json!({
            "vertex": g.vertex_name(v),
            "trace": t.vertex_value(v).to_string(),
            "limit": profile.limit,
            "extrapolated": profile.extrapolated,
            "band": [profile.band.0, profile.band.1],
            "measured_constant": constant,
            "within_tolerance": within,
        }));
    }
    Ok(holds_if(
        ok,
        json!({
            "window": window,
            "tolerance": cfg.tolerance,
            "target": if k == 1 { "2 tau(p_v)" } else { "positive" },
            "vertices": vertices,
        }),
    ))
}

fn regularity(s: &Setup) -> Result<Verdict> {
    let gens = path_generators(&s.model, s.level);
    let mut bounded = true;
    let mut max_bound = Rational::default();
    for a in &gens {
        for order in 0..=2 {
            let d = a.delta_action(order);
            bounded &= d.bounded;
            if order == 1 && d.norm_bound > max_bound {
                max_bound = d.norm_bound;
            }
        }
    }
    Ok(holds_if(
        bounded,
        json!({"generators": gens.len(), "orders": [0, 1, 2], "max_first_order_bound": max_bound.to_string()}),
    ))
}

fn orientability(s: &Setup) -> Result<Verdict> {
    match s.presentation {
        Presentation::Graph(_) => {
            let r = check_orientation_1graph(&s.model)?;
            let ok = r.matches_formula && r.interior_zero && r.pi_d_identity && r.pi_d_fixes_basis;
            Ok(holds_if(ok, serde_json::to_value(&r).expect("serializes")))
        }
        Presentation::KGraph(p) => {
            if !p.single_exit() {
                let r = verify_cancellation_steps(&p.graph)?;
                return Ok((Status::Fails, serde_json::to_value(&r).expect("serializes")));
            }
            let r = check_orientation_kgraph(p)?;
            let ok = r.boundary_zero && r.pi_d_volume_form && r.pi_d_self_adjoint;
            Ok(holds_if(ok, serde_json::to_value(&r).expect("serializes")))
        }
    }
}

fn single_key(e: &Element) -> Option<Key> {
    let mut terms = e.terms();
    let (key, _) = terms.next()?;
    terms.next().is_none().then(|| key.clone())
}

/// Deterministic generator tuples of length `k` for the closedness check.
pub fn closedness_tuples(tr: &Truncation, count: usize) -> Vec<Vec<Key>> {
    let g = tr.graph();
    let k = g.rank();
    let mut keys: Vec<Key> = path_generators(g, 1).iter().filter_map(single_key).collect();
    keys.extend(tr.basis().iter().cloned());
    let n = keys.len();
    if n == 0 {
        return Vec::new();
    }
    (0..count)
        .map(|t| (0..k).map(|j| keys[(t * (2 * j + 1) * 37 + j * 11 + t / n) % n].clone()).collect())
        .collect()
}

fn closedness(s: &Setup) -> Result<Verdict> {
    let tr = need(&s.truncation)?;
    let t = need(&s.trace)?;
    let tuples = closedness_tuples(tr, 100);
    let mut nonzero = None;
    let mut det_zero_when_columns_cancel = true;
    let mut route = None;
    for tuple in &tuples {
        let r = closedness_eval(t, tuple)?;
        route = Some(r.route);
        if r.columns_sum_zero && r.determinant.is_some_and(|d| d != 0) {
            det_zero_when_columns_cancel = false;
        }
        if !r.value.is_zero() && nonzero.is_none() {
            nonzero = Some(serde_json::to_value(&r).expect("serializes"));
        }
    }
    Ok(holds_if(
        nonzero.is_none() && det_zero_when_columns_cancel,
        json!({
            "tuples": tuples.len(),
            "route": route,
            "det_zero_when_columns_cancel": det_zero_when_columns_cancel,
            "nonzero": nonzero,
        }),
    ))
}

fn finiteness(s: &Setup) -> Result<Verdict> {
    match s.presentation {
        Presentation::KGraph(p) => Ok((
            Status::Holds,
            json!({"unital": true, "vertices": p.graph.vertex_count()}),
        )),
        Presentation::Graph(p) => match p.classify() {
            GraphClass::SingleLoop(n) => Ok((Status::Holds, json!({"unital": true, "loop_length": n}))),
            GraphClass::DirectedTree => {
                let gt = s.graph_trace.as_ref().ok_or_else(|| Error::Hypothesis("no graph trace".into()))?;
                let model = &s.model;
                let mut f = Element::zero(model);
                for (i, v) in model
                    .vertex_ids()
                    .filter(|&v| matches!(model.vertex_info(v).kind, VertexKind::Core))
                    .enumerate()
                {
                    let pv = model.vertex_path(v);
                    f.add_term(pv.clone(), pv, crate::scalar::GaussianRational::from_int(i as i64 + 1));
                }
                let form = canonical_f_form(p, &f)?;
                let norms = fixed_point_norms(&form, gt);
                Ok(holds_if(
                    norms.inequality_holds(),
                    json!({"ends": p.find_ends().len(), "norms": norms}),
                ))
            }
            GraphClass::Other => Err(Error::Hypothesis(
                "the finiteness argument covers single loops and directed trees".into(),
            )),
        },
    }
}

fn first_order(s: &Setup) -> Result<Verdict> {
    let r = first_order_check(need(&s.truncation)?, CHECK_GENERATOR_LENGTH)?;
    Ok(holds_if(r.holds, serde_json::to_value(&r).expect("serializes")))
}

fn spin_c(s: &Setup) -> Result<Verdict> {
    let r = spin_c_generation_check(need(&s.truncation)?, CHECK_GENERATOR_LENGTH)?;
    Ok(holds_if(r.holds, serde_json::to_value(&r).expect("serializes")))
}

fn reality(s: &Setup) -> Result<Verdict> {
    let k = s.presentation.rank();
    if k == 1 {
        let r = reality_check_1graph(need(&s.truncation)?, CHECK_GENERATOR_LENGTH)?;
        return Ok(holds_if(r.holds, serde_json::to_value(&r).expect("serializes")));
    }
    let rows = sign_table_check(k)?;
    let row = rows.last().expect("one row per rank");
    Ok(holds_if(row.pass, serde_json::to_value(row).expect("serializes")))
}

fn irreducibility(s: &Setup) -> Result<Verdict> {
    let comps = components(s.presentation.core());
    let r = commutant_probe(need(&s.truncation)?)?;
    Ok(holds_if(
        comps.len() == 1 && r.interior_dimension == 1,
        json!({"components": comps.len(), "commutant": r}),
    ))
}

/// All nine conditions. Errors from an evaluator become `not_applicable`
/// entries naming the broken prerequisite.
pub fn evaluate_all(p: &Presentation, cfg: &ConditionConfig) -> Result<ConditionReport> {
    let s = setup(p, cfg)?;
    let mut conditions = Vec::new();
    for name in CONDITION_NAMES {
        let method = if name == "dimension" { Method::Numeric } else { Method::Exact };
        let verdict = match name {
            "dimension" => dimension(&s, cfg),
            "regularity" => regularity(&s),
            "orientability" => orientability(&s),
            "closedness" => closedness(&s),
            "finiteness" => finiteness(&s),
            "first_order" => first_order(&s),
            "spin_c" => spin_c(&s),
            "reality" => reality(&s),
            _ => irreducibility(&s),
        };
        let (status, witness) = verdict.unwrap_or_else(|e| (Status::NotApplicable, json!({"reason": e.to_string()})));
        conditions.push(ConditionEntry {
            name: name.to_string(),
            status,
            method,
            witness,
        });
    }
    Ok(ConditionReport {
        report_version: REPORT_VERSION,
        rank: p.rank(),
        level: cfg.level,
        window: cfg.window,
        tolerance: cfg.tolerance,
        hypotheses: hypothesis_check(p),
        conditions,
    })
}
