//! Exact evaluators for closedness, first order, reality, spin^c generation
//! and the commutant of the represented algebra, on a truncation.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{key_degree, Element, Key};
use crate::clifford::{clifford_span_dimension, expected_span_dimension, product, Clifford, Matrix};
use crate::error::{Error, Result};
use crate::kgraph::{Degree, Direction};
use crate::linalg::{rank, SparseEchelon};
use crate::scalar::{GaussianRational, Rational};
use crate::trace::Trace;

use super::Truncation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosednessRoute {
    Gauge,
    Determinant,
}

/// `τ̃_ω(Γ[D,a_1]⋯[D,a_p](1+D²)^{−p/2})` reduced to an exact scalar.
#[derive(Debug, Clone, Serialize)]
pub struct ClosednessRecord {
    pub route: ClosednessRoute,
    #[serde(serialize_with = "crate::scalar::serialize_display")]
    pub value: GaussianRational,
    pub degrees: Vec<Degree>,
    /// `det(n_{j,m})`, determinant route only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub determinant: Option<i64>,
    /// `tr(Γ Π_j Σ_m n_{j,m} γ^m)`, determinant route only.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "opt_display")]
    pub clifford_trace: Option<GaussianRational>,
    /// `τ(a_1⋯a_p)`.
    #[serde(serialize_with = "crate::scalar::serialize_display")]
    pub trace_factor: GaussianRational,
    pub columns_sum_zero: bool,
}

fn opt_display<S: serde::Serializer>(x: &Option<GaussianRational>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

fn determinant(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect())
        .collect();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return 0;
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c].clone();
        for i in c + 1..n {
            let f = &a[i][c] / &a[c][c];
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] -= t;
            }
        }
    }
    det.to_integer().try_into().unwrap_or(i64::MAX)
}

/// Grading for even rank, identity for odd rank.
fn closedness_grading(c: &Clifford) -> Matrix {
    if c.k % 2 == 0 {
        c.grading()
    } else {
        c.identity()
    }
}

/// Closedness value for generators `S_μS_ν*` with `p = k`.
pub fn closedness_eval(trace: &Trace, generators: &[Key]) -> Result<ClosednessRecord> {
    let g = trace.graph();
    let k = g.rank();
    if generators.len() != k {
        return Err(Error::Hypothesis(format!(
            "closedness takes p = k = {k} generators, got {}",
            generators.len()
        )));
    }
    let degrees: Vec<Degree> = generators.iter().map(key_degree).collect();
    let columns_sum_zero = (0..k).all(|m| degrees.iter().map(|d| d[m]).sum::<i64>() == 0);
    let mut prod = Element::from_key(g, &generators[0]);
    for key in &generators[1..] {
        prod = prod.try_mul(&Element::from_key(g, key))?;
    }
    let trace_factor = trace.evaluate(&prod)?;
    if k == 1 {
        let value = &GaussianRational::from_int(degrees[0][0]) * &trace_factor;
        return Ok(ClosednessRecord {
            route: ClosednessRoute::Gauge,
            value,
            degrees,
            determinant: None,
            clifford_trace: None,
            trace_factor,
            columns_sum_zero,
        });
    }
    let c = Clifford::new(k)?;
    let gamma = closedness_grading(&c);
    let factors: Vec<Matrix> = degrees
        .iter()
        .map(|d| {
            c.gammas
                .iter()
                .zip(d)
                .fold(Matrix::zeros(c.dim()), |acc, (gm, &x)| acc.add(&gm.scale(&GaussianRational::from_int(x))))
        })
        .collect();
    let ctrace = gamma.mul(&product(&factors, c.dim())).trace();
    let det = determinant(&degrees);
    let reference = gamma.mul(&c.full_product()).trace();
    if ctrace != &reference * &GaussianRational::from_int(det) {
        return Err(Error::Hypothesis(format!(
            "Clifford trace {ctrace} is not det {det} times {reference}"
        )));
    }
    let value = &(&GaussianRational::i_pow(k as i64) * &ctrace) * &trace_factor;
    Ok(ClosednessRecord {
        route: ClosednessRoute::Determinant,
        value,
        degrees,
        determinant: Some(det),
        clifford_trace: Some(ctrace),
        trace_factor,
        columns_sum_zero,
    })
}

/// `D_m(a y) − a D_m(y)`, the color-`m` part of `[D, a]` applied to `y`.
fn commutator_apply(a: &Element, y: &Element, color: usize) -> Result<Element> {
    a.try_mul(y)?.degree_weighted(color).try_sub(&a.try_mul(&y.degree_weighted(color))?)
}

#[derive(Debug, Clone, Serialize)]
pub struct FirstOrderReport {
    pub level: u32,
    pub generators: usize,
    pub basis: usize,
    pub checked: usize,
    pub holds: bool,
    /// First violation of `[a, b^op] = 0` or `[[D,a], b^op] = 0`.
    pub witness: Option<String>,
    /// Violation found when `b^op` is replaced by left multiplication.
    pub left_action_witness: Option<String>,
}

/// `[a, b^op] = 0` and `[[D,a], b^op] = 0` on every basis vector for all
/// generators of length at most `max_len`.
pub fn first_order_check(tr: &Truncation, max_len: u32) -> Result<FirstOrderReport> {
    let gens = tr.generators(max_len);
    let xs = tr.elements();
    let k = tr.graph().rank();
    let right: Vec<Vec<Element>> = gens
        .iter()
        .map(|b| xs.iter().map(|x| x.try_mul(b)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let left: Vec<Vec<Element>> = gens
        .iter()
        .map(|a| xs.iter().map(|x| a.try_mul(x)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let mut checked = 0;
    let mut witness = None;
    'outer: for (a, ax_row) in gens.iter().zip(&left) {
        for (b, xb_row) in gens.iter().zip(&right) {
            for (i, (x, (ax, xb))) in xs.iter().zip(ax_row.iter().zip(xb_row)).enumerate() {
                checked += 1;
                // x and b are homogeneous, so every term below is a multiple
                // of a(xb) or (ax)b
                if ax.term_count() == 0 && xb.term_count() == 0 {
                    continue;
                }
                // a(xb) and a D_m(xb), one product per term of xb
                let (axb, a_dxb) = weighted_left(a, xb, k)?;
                // (ax)b and D_m(ax) b, one product per term of ax
                let (ax_b, dax_b) = weighted_right(ax, b, k)?;
                if !axb.equals(&ax_b)? {
                    witness = Some(format!("[a, b^op] x != 0 for a = {a}, b = {b}, x = {x}"));
                    break 'outer;
                }
                let nx = key_degree(&tr.basis()[i]);
                for m in 0..k {
                    // [D_m, a](xb) = D_m(a xb) − a D_m(xb)
                    let lhs = axb.degree_weighted(m).try_sub(&a_dxb[m])?;
                    // ([D_m, a]x) b = D_m(ax) b − n_x (ax) b, x being one key
                    let rhs = dax_b[m].try_sub(&ax_b.scale(&GaussianRational::from_int(nx[m])))?;
                    if !lhs.equals(&rhs)? {
                        witness = Some(format!(
                            "[[D,a], b^op] x != 0 in color {} for a = {a}, b = {b}, x = {x}",
                            m + 1
                        ));
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(FirstOrderReport {
        level: tr.level(),
        generators: gens.len(),
        basis: xs.len(),
        checked,
        holds: witness.is_none(),
        witness,
        left_action_witness: left_action_witness(&gens, &xs, k)?,
    })
}

/// `(a y, [a D_m(y)]_m)`, multiplying each term of `y` once.
fn weighted_left(a: &Element, y: &Element, k: usize) -> Result<(Element, Vec<Element>)> {
    let g = y.graph();
    let mut plain = Element::zero(g);
    let mut weighted = vec![Element::zero(g); k];
    for (key, c) in y.terms() {
        let p = a.try_mul(&Element::from_key(g, key))?.scale(c);
        let n = key_degree(key);
        for m in 0..k {
            weighted[m] = weighted[m].try_add(&p.scale(&GaussianRational::from_int(n[m])))?;
        }
        plain = plain.try_add(&p)?;
    }
    Ok((plain, weighted))
}

/// `(y b, [D_m(y) b]_m)`, multiplying each term of `y` once.
fn weighted_right(y: &Element, b: &Element, k: usize) -> Result<(Element, Vec<Element>)> {
    let g = y.graph();
    let mut plain = Element::zero(g);
    let mut weighted = vec![Element::zero(g); k];
    for (key, c) in y.terms() {
        let p = Element::from_key(g, key).try_mul(b)?.scale(c);
        let n = key_degree(key);
        for m in 0..k {
            weighted[m] = weighted[m].try_add(&p.scale(&GaussianRational::from_int(n[m])))?;
        }
        plain = plain.try_add(&p)?;
    }
    Ok((plain, weighted))
}

/// Searches for `[[D,a], b] x != 0` with `b` acting on the left.
fn left_action_witness(gens: &[Element], xs: &[Element], k: usize) -> Result<Option<String>> {
    for a in gens {
        for b in gens {
            // only noncommuting pairs can produce a witness
            if a.try_mul(b)?.equals(&b.try_mul(a)?)? {
                continue;
            }
            for x in xs {
                let bx = b.try_mul(x)?;
                if bx.term_count() == 0 {
                    continue;
                }
                for m in 0..k {
                    let l = commutator_apply(a, &bx, m)?;
                    let r = b.try_mul(&commutator_apply(a, x, m)?)?;
                    if !l.equals(&r)? {
                        return Ok(Some(format!("[[D,a], b] x = {} for a = {a}, b = {b}, x = {x}", l.try_sub(&r)?)));
                    }
                }
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Serialize)]
pub struct RealityReport {
    pub j_squared: bool,
    pub anticommutes_with_d: bool,
    pub right_action: bool,
    pub checked: usize,
    pub holds: bool,
    pub witness: Option<String>,
}

/// `J x = x*` on a rank-1 truncation: `J² = 1`, `JDJ = −D`, `Ja*J x = xa`.
pub fn reality_check_1graph(tr: &Truncation, max_len: u32) -> Result<RealityReport> {
    if tr.graph().rank() != 1 {
        return Err(Error::Hypothesis("J(x) = x* is the rank-1 real structure".into()));
    }
    let gens = tr.generators(max_len);
    let mut report = RealityReport {
        j_squared: true,
        anticommutes_with_d: true,
        right_action: true,
        checked: 0,
        holds: true,
        witness: None,
    };
    for x in tr.elements() {
        report.checked += 1;
        if report.j_squared && !x.adjoint().adjoint().equals(&x)? {
            report.j_squared = false;
            report.witness.get_or_insert(format!("J² x != x for x = {x}"));
        }
        let jdj = x.adjoint().degree_weighted(0).adjoint();
        if report.anticommutes_with_d && !jdj.equals(&-x.degree_weighted(0))? {
            report.anticommutes_with_d = false;
            report.witness.get_or_insert(format!("JDJ x != −D x for x = {x}"));
        }
        for a in &gens {
            let lhs = a.adjoint().try_mul(&x.adjoint())?.adjoint();
            if report.right_action && !lhs.equals(&x.try_mul(a)?)? {
                report.right_action = false;
                report.witness.get_or_insert(format!("Ja*J x != xa for a = {a}, x = {x}"));
            }
        }
    }
    report.holds = report.j_squared && report.anticommutes_with_d && report.right_action;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct SpinCReport {
    pub rank: usize,
    /// `[D, a]` acts on the truncation as a Clifford symbol times an element
    /// of the algebra, for every generator.
    pub commutators_in_algebra: bool,
    pub span_dimension: usize,
    pub expected_dimension: usize,
    pub checked: usize,
    pub holds: bool,
    pub witness: Option<String>,
}

/// Generation of the Clifford-valued algebra by `A` and `[D, A]`.
pub fn spin_c_generation_check(tr: &Truncation, max_len: u32) -> Result<SpinCReport> {
    let g = tr.graph();
    let k = g.rank();
    let gens = tr.generators(max_len);
    let mut checked = 0;
    let mut witness = None;
    'outer: for a in &gens {
        for x in tr.elements() {
            for m in 0..k {
                checked += 1;
                let got = commutator_apply(a, &x, m)?;
                let want = a.degree_weighted(m).try_mul(&x)?;
                if !got.equals(&want)? {
                    witness = Some(format!("[D_{}, a] x is not (n_a a) x for a = {a}, x = {x}", m + 1));
                    break 'outer;
                }
            }
        }
    }
    let c = Clifford::new(k)?;
    let (span_dimension, expected_dimension) = if k == 1 {
        (1, 1)
    } else {
        (clifford_span_dimension(&c), expected_span_dimension(k))
    };
    let commutators_in_algebra = witness.is_none();
    if witness.is_none() && span_dimension != expected_dimension {
        witness = Some(format!("Clifford span has dimension {span_dimension}, expected {expected_dimension}"));
    }
    Ok(SpinCReport {
        rank: k,
        commutators_in_algebra,
        span_dimension,
        expected_dimension,
        checked,
        holds: witness.is_none(),
        witness,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutantReport {
    pub unknowns: usize,
    pub equations: usize,
    pub skipped: usize,
    /// Dimension of the block-diagonal commutant on the whole truncation.
    pub dimension: usize,
    /// Dimension after restricting solutions to interior entries.
    pub interior_dimension: usize,
    /// Solutions that vanish on the interior (truncation artifacts).
    pub boundary_only: usize,
}

/// Operators `T` preserving each gauge block and commuting with `p_v`,
/// `S_e`, `S_e*` on both sides and with `S_eS_f*` on the right. Commuting
/// with the right action keeps the candidates to left multiplications, so
/// right multiplication by projections of an abelian `F` is excluded.
pub fn commutant_probe(tr: &Truncation) -> Result<CommutantReport> {
    let g = tr.graph();
    let n = tr.len();
    let basis = tr.basis();
    // unknown T_ij for x_j -> x_i in the same block with matching ends
    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut by_col: Vec<Vec<usize>> = vec![Vec::new(); n];
    for members in tr.blocks().values() {
        for &j in members {
            for &i in members {
                let (mi, ni) = &basis[i];
                let (mj, nj) = &basis[j];
                if mi.source == mj.source && ni.source == nj.source {
                    index.insert((i, j), index.len());
                    by_col[j].push(i);
                }
            }
        }
    }
    let unknowns = index.len();
    let xs = tr.elements();

    let mut ops: Vec<(Element, bool)> = Vec::new();
    for e in g.edge_ids() {
        let p = g.edge_path(e);
        for right in [false, true] {
            ops.push((Element::path(g, &p), right));
            ops.push((Element::path_adjoint(g, &p), right));
        }
    }
    for v in g.vertex_ids() {
        for color in 0..g.rank() {
            let into = g.enumerate_paths(&g.unit_degree(color), v, Direction::Into);
            for e in &into {
                for f in &into {
                    ops.push((Element::generator(g, e.clone(), f.clone()), true));
                }
            }
        }
    }

    let mut system = SparseEchelon::new(unknowns);
    let (mut equations, mut skipped) = (0, 0);
    for (op, right) in &ops {
        let act = |x: &Element| -> Result<Element> {
            if *right {
                x.try_mul(op)
            } else {
                op.try_mul(x)
            }
        };
        let images: Vec<Option<BTreeMap<usize, GaussianRational>>> =
            xs.iter().map(|x| act(x).map(|y| tr.coords(&y))).collect::<Result<_>>()?;
        for j in 0..n {
            // op(T x_j) = T(op x_j), compared coordinatewise
            let Some(rhs) = &images[j] else {
                skipped += 1;
                continue;
            };
            if by_col[j].iter().any(|&i| images[i].is_none()) {
                skipped += 1;
                continue;
            }
            let mut rows: BTreeMap<usize, BTreeMap<usize, GaussianRational>> = BTreeMap::new();
            for &i in &by_col[j] {
                let u = index[&(i, j)];
                for (q, c) in images[i].as_ref().expect("checked") {
                    *rows.entry(*q).or_default().entry(u).or_insert_with(GaussianRational::zero) += c;
                }
            }
            for (l, c) in rhs {
                for &q in &by_col[*l] {
                    let u = index[&(q, *l)];
                    *rows.entry(q).or_default().entry(u).or_insert_with(GaussianRational::zero) -= c;
                }
            }
            for row in rows.into_values() {
                equations += 1;
                system.insert(row);
            }
        }
    }
    let solutions = system.nullspace();
    let interior: Vec<usize> = index
        .iter()
        .filter(|((i, j), _)| tr.is_interior(*i) && tr.is_interior(*j))
        .map(|(_, &u)| u)
        .collect();
    let restricted: Vec<Vec<GaussianRational>> = solutions
        .iter()
        .map(|s| interior.iter().map(|&u| s[u].clone()).collect())
        .collect();
    let interior_dimension = rank(&restricted, interior.len());
    Ok(CommutantReport {
        unknowns,
        equations,
        skipped,
        dimension: solutions.len(),
        interior_dimension,
        boundary_only: solutions.len() - interior_dimension,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::spectral::{build_truncation, graph_model};
    use crate::trace::kgraph_trace;

    fn one_graph(text: &str, depth: usize, level: u32) -> Truncation {
        let (_, t) = graph_model(&corpus::graph(text), depth).unwrap();
        build_truncation(&t, level).unwrap()
    }

    #[test]
    fn closedness_of_an_edge_is_zero() {
        let (m, t) = graph_model(&corpus::graph(&corpus::cycle(1)), 1).unwrap();
        let e = m.edge_path(m.edge("e0").unwrap());
        let r = closedness_eval(&t, &[(e.clone(), m.vertex_path(e.source))]).unwrap();
        assert_eq!(r.route, ClosednessRoute::Gauge);
        assert!(r.value.is_zero() && r.trace_factor.is_zero());
    }

    #[test]
    fn determinant_route() {
        let p = corpus::kgraph(&corpus::torus(2));
        let t = kgraph_trace(&p, None).unwrap();
        let g = t.graph().clone();
        let e1 = g.edge_path(g.edge("e1").unwrap());
        let e2 = g.edge_path(g.edge("e2").unwrap());
        let v = g.vertex_path(e1.source);
        // degrees (1,-1) and (-1,1): columns cancel
        let r = closedness_eval(&t, &[(e1.clone(), e2.clone()), (e2.clone(), e1.clone())]).unwrap();
        assert_eq!(r.determinant, Some(0));
        assert!(r.columns_sum_zero && r.value.is_zero());
        // degrees (1,0) and (0,1): det 1 but τ(S_e1 S_e2) = 0
        let r = closedness_eval(&t, &[(e1, v.clone()), (e2, v)]).unwrap();
        assert_eq!(r.determinant, Some(1));
        assert!(!r.clifford_trace.unwrap().is_zero());
        assert!(r.trace_factor.is_zero() && r.value.is_zero());
    }

    #[test]
    fn first_order_on_path_and_loop() {
        let r = first_order_check(&one_graph(&corpus::cycle(1), 1, 3), 2).unwrap();
        assert!(r.holds, "{:?}", r.witness);
        // the loop algebra is commutative, so left and right actions agree
        assert!(r.left_action_witness.is_none());
        let r = first_order_check(&one_graph(&corpus::broom(2), 4, 2), 2).unwrap();
        assert!(r.holds, "{:?}", r.witness);
        assert!(r.left_action_witness.is_some());
    }

    #[test]
    fn reality_on_loop() {
        let r = reality_check_1graph(&one_graph(&corpus::cycle(2), 1, 3), 2).unwrap();
        assert!(r.holds, "{:?}", r.witness);
    }

    #[test]
    fn spin_c_on_torus() {
        let p = corpus::kgraph(&corpus::torus(2));
        let t = kgraph_trace(&p, None).unwrap();
        let tr = build_truncation(&t, 2).unwrap();
        let r = spin_c_generation_check(&tr, 1).unwrap();
        assert!(r.holds, "{:?}", r.witness);
        assert_eq!(r.span_dimension, 4);
    }

    #[test]
    fn commutant_dimensions() {
        let r = commutant_probe(&one_graph(&corpus::cycle(1), 1, 3)).unwrap();
        assert_eq!(r.interior_dimension, 1, "{r:?}");
        let r = commutant_probe(&one_graph(&corpus::cycles(&[1, 1]), 1, 3)).unwrap();
        assert!(r.interior_dimension >= 2, "{r:?}");
        let r = commutant_probe(&one_graph(&corpus::broom(2), 5, 3)).unwrap();
        assert_eq!(r.interior_dimension, 1, "{r:?}");
    }
}
