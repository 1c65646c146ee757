//! Finite-rank module operators `Σ c Θ_{x,y}` and the trace `τ̃`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::algebra::{key_degree, Element};
use crate::error::{Error, Result};
use crate::kgraph::{Degree, Direction, VertexId};
use crate::scalar::{GaussianRational, Rational};
use crate::trace::Trace;

use super::Truncation;

/// `Σ c_i Θ_{x_i, y_i}` with `Θ_{x,y}(z) = x Φ(y* z)`.
#[derive(Debug, Clone)]
pub struct ThetaSum {
    pub terms: Vec<(GaussianRational, Element, Element)>,
}

impl ThetaSum {
    pub fn apply(&self, z: &Element) -> Result<Element> {
        let mut out = Element::zero(z.graph());
        for (c, x, y) in &self.terms {
            let inner = y.adjoint().try_mul(z)?.expectation();
            out = out.try_add(&x.try_mul(&inner)?.scale(c))?;
        }
        Ok(out)
    }

    /// `Θ_{x,y} Θ_{z,w} = Θ_{x Φ(y* z), w}`.
    pub fn compose(&self, other: &ThetaSum) -> Result<ThetaSum> {
        let mut terms = Vec::new();
        for (c, x, y) in &self.terms {
            for (d, z, w) in &other.terms {
                let x2 = x.try_mul(&y.adjoint().try_mul(z)?.expectation())?;
                terms.push((c * d, x2, w.clone()));
            }
        }
        Ok(ThetaSum { terms })
    }
}

/// `τ̃(Σ c Θ_{x,y}) = Σ c τ(Φ(y* x))`.
pub fn semifinite_trace(t: &ThetaSum, trace: &Trace) -> Result<GaussianRational> {
    let mut total = GaussianRational::zero();
    for (c, x, y) in &t.terms {
        total += &(c * &trace.evaluate(&y.adjoint().try_mul(x)?.expectation())?);
    }
    Ok(total)
}

/// Rank-one family for `p_v Φ_n`: `Θ_{x,x}` with `x = S_α S_β*`, `s(α) = v`,
/// `d(α) = n⁺`, `d(β) = n⁻`. Validated on every basis vector of `tr`.
pub fn decompose_projection(tr: &Truncation, v: VertexId, n: &[i64]) -> Result<ThetaSum> {
    let g = tr.graph();
    let name = g.vertex_name(v).to_string();
    if n.iter().any(|x| x.unsigned_abs() > tr.level() as u64) {
        return Err(Error::NoDecomposition {
            vertex: name,
            degree: n.to_vec(),
            reason: format!("degree outside the window of level {}", tr.level()),
        });
    }
    let plus: Degree = n.iter().map(|&x| x.max(0)).collect();
    let minus: Degree = n.iter().map(|&x| (-x).max(0)).collect();
    let mut terms = Vec::new();
    for alpha in g.enumerate_paths(&plus, v, Direction::OutOf) {
        for beta in g.enumerate_paths(&minus, alpha.range, Direction::Into) {
            let x = Element::generator(g, alpha.clone(), beta);
            terms.push((GaussianRational::one(), x.clone(), x));
        }
    }
    let sum = ThetaSum { terms };
    let pv = Element::vertex(g, v);
    for i in 0..tr.len() {
        let z = tr.element(i);
        let want = if key_degree(&tr.basis()[i]) == n {
            pv.try_mul(&z)?
        } else {
            Element::zero(g)
        };
        if !sum.apply(&z)?.equals(&want)? {
            return Err(Error::NoDecomposition {
                vertex: name,
                degree: n.to_vec(),
                reason: format!("rank-one sum differs from p_v Φ_n on {z}"),
            });
        }
    }
    Ok(sum)
}

/// `τ̃(p_v Φ_n)` for every degree in the window, each through a validated
/// decomposition.
pub fn vertex_block_traces(tr: &Truncation, v: VertexId) -> Result<BTreeMap<Degree, Rational>> {
    let mut out = BTreeMap::new();
    for n in tr.blocks().keys() {
        let sum = decompose_projection(tr, v, n)?;
        let value = semifinite_trace(&sum, tr.trace())?;
        if !value.is_real() {
            return Err(Error::Hypothesis(format!("τ̃(p_v Φ_{n:?}) is not real")));
        }
        out.insert(n.clone(), value.re);
    }
    Ok(out)
}
