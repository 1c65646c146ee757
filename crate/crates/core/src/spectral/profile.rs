//! Generalized singular values of `a(1+D²)^{-k/2}` and Dixmier-limit
//! estimates, in double precision.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kgraph::{Degree, VertexId, VertexKind};
use crate::scalar::Rational;

use super::{vertex_block_traces, Truncation};

/// `τ̃`-mass of each gauge block, validated on the window and constant
/// across it.
#[derive(Debug, Clone, Serialize)]
pub struct BlockMasses {
    pub rank: usize,
    /// Dimension of the spinor factor (`2^⌊k/2⌋`).
    pub spinor_dim: usize,
    #[serde(serialize_with = "crate::scalar::serialize_rational")]
    pub per_block: Rational,
    #[serde(skip)]
    pub validated: BTreeMap<Degree, Rational>,
}

fn constant_masses(rank: usize, validated: BTreeMap<Degree, Rational>) -> Result<BlockMasses> {
    let first = validated.values().next().cloned().ok_or(Error::EmptyBasis)?;
    if let Some((n, x)) = validated.iter().find(|(_, x)| **x != first) {
        return Err(Error::Hypothesis(format!(
            "block mass at degree {n:?} is {x}, not {first}"
        )));
    }
    Ok(BlockMasses {
        rank,
        spinor_dim: 1 << (rank / 2),
        per_block: first,
        validated,
    })
}

/// Masses of `p_v Φ_n`.
pub fn vertex_masses(tr: &Truncation, v: VertexId) -> Result<BlockMasses> {
    constant_masses(tr.graph().rank(), vertex_block_traces(tr, v)?)
}

/// Masses of `Φ_n` itself, for presentations without rays.
pub fn whole_masses(tr: &Truncation) -> Result<BlockMasses> {
    let g = tr.graph();
    if g.vertex_ids().any(|v| !matches!(g.vertex_info(v).kind, VertexKind::Core)) {
        return Err(Error::Hypothesis(
            "Φ_n has infinite trace on presentations with rays; profile a vertex instead".into(),
        ));
    }
    let mut total: BTreeMap<Degree, Rational> = BTreeMap::new();
    for v in g.vertex_ids() {
        for (n, x) in vertex_block_traces(tr, v)? {
            *total.entry(n).or_default() += x;
        }
    }
    constant_masses(g.rank(), total)
}

/// Eigenvalues with masses, `F_T` samples and the limit estimates.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralProfile {
    pub window: u64,
    pub rank: usize,
    /// Distinct eigenvalues, decreasing, with their total masses.
    #[serde(skip)]
    pub eigenvalues: Vec<(f64, f64)>,
    pub total_mass: f64,
    /// `(t, F_T(t))` at logarithmically spaced `t`.
    #[serde(skip)]
    pub samples: Vec<(f64, f64)>,
    /// `F_T` at the full window mass.
    pub limit: f64,
    /// Intercept of a linear fit of `F_T` against `1/ln(1+t)`.
    pub extrapolated: f64,
    /// Range of `F_T` over the last decade of `t`.
    pub band: (f64, f64),
    /// Smallest sampled `t` after which `F_T` never increases.
    pub monotone_from: Option<f64>,
}

const SAMPLES: usize = 400;

fn eigen_list(m: &BlockMasses, window: u64) -> Vec<(f64, f64)> {
    let mass = m.per_block.to_f64().unwrap_or(f64::NAN) * m.spinor_dim as f64;
    let k = m.rank;
    if k == 1 {
        return (0..=window)
            .map(|n| {
                let x = n as f64;
                let mult = if n == 0 { 1.0 } else { 2.0 };
                ((1.0 + x * x).powf(-0.5), mult * mass)
            })
            .collect();
    }
    // lattice points of Z^k inside the ball of radius N, by squared norm
    let n2 = (window * window) as usize;
    let mut counts = vec![0u64; n2 + 1];
    counts[0] = 1;
    for _ in 0..k {
        let mut next = vec![0u64; n2 + 1];
        for (r2, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for x in 0..=window as usize {
                let s = r2 + x * x;
                if s > n2 {
                    break;
                }
                next[s] += if x == 0 { c } else { 2 * c };
            }
        }
        counts = next;
    }
    counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(r2, &c)| ((1.0 + r2 as f64).powf(-(k as f64) / 2.0), c as f64 * mass))
        .collect()
}

/// `F_T(t) = (1/ln(1+t)) ∫_0^t μ_s ds` over the window `|n| ≤ N`.
pub fn singular_profile(m: &BlockMasses, window: u64) -> Result<SpectralProfile> {
    if window < 16 {
        return Err(Error::WindowTooSmall(window));
    }
    let eigenvalues = eigen_list(m, window);
    // cumulative (mass, integral) at the end of each eigenvalue step
    let mut cum = Vec::with_capacity(eigenvalues.len());
    let (mut mass, mut integral) = (0.0, 0.0);
    for &(lambda, w) in &eigenvalues {
        mass += w;
        integral += lambda * w;
        cum.push((mass, integral));
    }
    let total_mass = mass;
    let integral_at = |t: f64| -> f64 {
        let i = cum.partition_point(|&(m, _)| m < t);
        if i >= cum.len() {
            return integral;
        }
        let (m_before, int_before) = if i == 0 { (0.0, 0.0) } else { cum[i - 1] };
        int_before + (t - m_before) * eigenvalues[i].0
    };
    let samples: Vec<(f64, f64)> = (1..=SAMPLES)
        .map(|j| {
            let t = total_mass.powf(j as f64 / SAMPLES as f64);
            (t, integral_at(t) / (1.0 + t).ln())
        })
        .collect();
    let limit = samples.last().map(|s| s.1).unwrap_or(f64::NAN);

    let fit: Vec<(f64, f64)> = samples[SAMPLES / 2..]
        .iter()
        .map(|&(t, f)| (1.0 / (1.0 + t).ln(), f))
        .collect();
    let extrapolated = linear_intercept(&fit);

    let decade: Vec<f64> = samples
        .iter()
        .filter(|(t, _)| *t >= total_mass / 10.0)
        .map(|s| s.1)
        .collect();
    let band = decade
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &f| (lo.min(f), hi.max(f)));

    let mut monotone_from = None;
    for i in (0..samples.len()).rev() {
        if i + 1 < samples.len() && samples[i + 1].1 > samples[i].1 + 1e-12 {
            break;
        }
        monotone_from = Some(samples[i].0);
    }

    Ok(SpectralProfile {
        window,
        rank: m.rank,
        eigenvalues,
        total_mass,
        samples,
        limit,
        extrapolated,
        band,
        monotone_from,
    })
}

fn linear_intercept(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    my - (sxy / sxx) * mx
}

impl SpectralProfile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,F\n");
        for (t, f) in &self.samples {
            out.push_str(&format!("{t},{f}\n"));
        }
        out
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "limit": self.limit,
            "extrapolated": self.extrapolated,
            "band": [self.band.0, self.band.1],
            "window": self.window,
            "total_mass": self.total_mass,
            "monotone_from": self.monotone_from,
        })
    }
}

/// `(s − ½) Σ_n mass (1+n²)^{−s}` at rank 1, with the sum beyond the
/// window replaced by `2·mass·∫_{N+½}^∞ x^{−2s} dx`.
pub fn zeta_residue(m: &BlockMasses, window: u64, s: f64) -> Result<f64> {
    if m.rank != 1 {
        return Err(Error::Hypothesis("the zeta cross-check is implemented for rank 1".into()));
    }
    let mass = m.per_block.to_f64().unwrap_or(f64::NAN);
    let mut sum = mass;
    for n in 1..=window {
        let x = n as f64;
        sum += 2.0 * mass * (1.0 + x * x).powf(-s);
    }
    let edge = window as f64 + 0.5;
    sum += 2.0 * mass * edge.powf(1.0 - 2.0 * s) / (2.0 * s - 1.0);
    Ok((s - 0.5) * sum)
}
