//! Exact complex Clifford algebras with anti-Hermitian generators
//! (`γ^jγ^l + γ^lγ^j = −2δ_{jl}`), the reality structure `J = χ ∘ conj`,
//! and algebra-valued Clifford matrices for Dirac commutators.

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::linalg::rank;
use crate::scalar::GaussianRational;

/// Dense square matrix over Gaussian rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    n: usize,
    data: Vec<GaussianRational>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![GaussianRational::zero(); n * n],
        }
    }

    pub fn scalar(n: usize, c: GaussianRational) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = c.clone();
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, GaussianRational::one())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &GaussianRational {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, c: GaussianRational) {
        self.data[i * self.n + j] = c;
    }

    pub fn entries(&self) -> &[GaussianRational] {
        &self.data
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.data[k * n + j];
                    if !b.is_zero() {
                        out.data[i * n + j] += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|a| a.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].clone();
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Matrix {
        self.conj().transpose()
    }

    pub fn kron(&self, other: &Matrix) -> Matrix {
        let (a, b) = (self.n, other.n);
        let n = a * b;
        let mut out = Self::zeros(n);
        for i in 0..a {
            for j in 0..a {
                let x = &self.data[i * a + j];
                if x.is_zero() {
                    continue;
                }
                for k in 0..b {
                    for l in 0..b {
                        out.data[(i * b + k) * n + j * b + l] = x * &other.data[k * b + l];
                    }
                }
            }
        }
        out
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(GaussianRational::is_real)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// `Some(c)` when the matrix is `c · Id`.
    pub fn as_scalar(&self) -> Option<GaussianRational> {
        let c = self.data[0].clone();
        (*self == Self::scalar(self.n, c.clone())).then_some(c)
    }

    /// `Some(s)` with `self = s · other`, `s = ±1`.
    pub fn sign_relative_to(&self, other: &Matrix) -> Option<i64> {
        if self == other {
            Some(1)
        } else if *self == other.scale(&-GaussianRational::one()) {
            Some(-1)
        } else {
            None
        }
    }

    pub fn trace(&self) -> GaussianRational {
        (0..self.n).fold(GaussianRational::zero(), |acc, i| acc + self.data[i * self.n + i].clone())
    }

    pub fn apply(&self, v: &[GaussianRational]) -> Vec<GaussianRational> {
        (0..self.n)
            .map(|i| {
                (0..self.n).fold(GaussianRational::zero(), |acc, j| acc + self.get(i, j) * &v[j])
            })
            .collect()
    }

    /// Row-major arrays of `"re,im"` strings.
    pub fn to_json_value(&self) -> serde_json::Value {
        let rows: Vec<Vec<String>> = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        let c = self.get(i, j);
                        format!("{},{}", c.re_string(), c.im_string())
                    })
                    .collect()
            })
            .collect();
        serde_json::to_value(rows).expect("matrix serializes")
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Matrix, crate::ParseError> {
        let rows: Vec<Vec<String>> = serde_json::from_value(v.clone())
            .map_err(|e| crate::ParseError::Schema(e.to_string()))?;
        let n = rows.len();
        let mut m = Matrix::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(crate::ParseError::Schema("matrix must be square".into()));
            }
            for (j, s) in row.iter().enumerate() {
                let (re, im) = s
                    .split_once(',')
                    .ok_or_else(|| crate::ParseError::Scalar(s.clone()))?;
                m.set(i, j, GaussianRational::parse_pair(re, im)?);
            }
        }
        Ok(m)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.n)
            .map(|i| {
                let r: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
                format!("[{}]", r.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

/// `(-1)^n`.
pub fn parity_sign(n: i64) -> i64 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `s(k) = ⌊k/2⌋(k+1) − k`.
pub fn s_of_k(k: usize) -> i64 {
    let k = k as i64;
    (k / 2) * (k + 1) - k
}

/// Expected `(J², JD vs DJ, JΓ vs ΓJ)` signs for `k mod 8`.
pub fn expected_signs(k: usize) -> (i64, i64, Option<i64>) {
    match k % 8 {
        0 => (1, 1, Some(1)),
        1 => (1, -1, None),
        2 => (-1, 1, Some(-1)),
        3 => (-1, 1, None),
        4 => (-1, 1, Some(1)),
        5 => (-1, -1, None),
        6 => (1, 1, Some(-1)),
        _ => (1, 1, None),
    }
}

fn pauli(which: u8) -> Matrix {
    let z = GaussianRational::zero;
    let o = GaussianRational::one;
    let i = GaussianRational::i;
    let d = match which {
        0 => vec![o(), z(), z(), o()],
        1 => vec![z(), o(), o(), z()],
        2 => vec![z(), -i(), i(), z()],
        _ => vec![o(), z(), z(), -o()],
    };
    Matrix { n: 2, data: d }
}

fn pauli_string_matrix(s: &[u8]) -> Matrix {
    s.iter()
        .fold(Matrix::identity(1), |acc, &p| acc.kron(&pauli(p)))
}

fn anticommute(a: &[u8], b: &[u8]) -> bool {
    a.iter()
        .zip(b)
        .filter(|(x, y)| **x != 0 && **y != 0 && x != y)
        .count()
        % 2
        == 1
}

/// Whether generator `j` (1-based) must have real entries.
fn wants_real(k: usize, j: usize) -> bool {
    let odd_is_imaginary = s_of_k(k) % 2 != 0;
    (j % 2 == 1) != odd_is_imaginary
}

/// `k` anti-Hermitian generators `i·P` (P a Pauli string on `⌊k/2⌋`
/// qubits) with odd-index generators imaginary and even-index ones real,
/// the pattern reversed when `k ≡ 0 mod 4`.
pub fn generators(k: usize) -> Result<Vec<Matrix>> {
    if k == 0 || k > 12 {
        return Err(Error::CliffordRank(k));
    }
    let m = k / 2;
    let all: Vec<Vec<u8>> = (0..4usize.pow(m as u32))
        .map(|mut x| {
            let mut s = vec![0u8; m];
            for slot in s.iter_mut().rev() {
                *slot = (x % 4) as u8;
                x /= 4;
            }
            s
        })
        .collect();
    fn search(
        k: usize,
        all: &[Vec<u8>],
        chosen: &mut Vec<usize>,
    ) -> bool {
        let j = chosen.len() + 1;
        if j > k {
            return true;
        }
        for (idx, s) in all.iter().enumerate() {
            let ys = s.iter().filter(|&&p| p == 2).count();
            // i·P is real exactly when P is imaginary, i.e. has an odd number of Y's
            if (ys % 2 == 1) != wants_real(k, j) {
                continue;
            }
            if chosen.contains(&idx) || !chosen.iter().all(|&c| anticommute(&all[c], s)) {
                continue;
            }
            chosen.push(idx);
            if search(k, all, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let mut chosen = Vec::new();
    if !search(k, &all, &mut chosen) {
        return Err(Error::Hypothesis(format!(
            "no Pauli generators meet the conjugation pattern for k = {k}"
        )));
    }
    let i = GaussianRational::i();
    Ok(chosen
        .iter()
        .map(|&c| pauli_string_matrix(&all[c]).scale(&i))
        .collect())
}

pub fn product(ms: &[Matrix], dim: usize) -> Matrix {
    ms.iter().fold(Matrix::identity(dim), |acc, m| acc.mul(m))
}

/// Generators plus derived operators for one rank.
#[derive(Debug, Clone)]
pub struct Clifford {
    pub k: usize,
    pub gammas: Vec<Matrix>,
}

impl Clifford {
    pub fn new(k: usize) -> Result<Self> {
        Ok(Self {
            k,
            gammas: generators(k)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.gammas[0].dim()
    }

    pub fn identity(&self) -> Matrix {
        Matrix::identity(self.dim())
    }

    /// `γ^1 ⋯ γ^k`.
    pub fn full_product(&self) -> Matrix {
        product(&self.gammas, self.dim())
    }

    /// `i^⌈(k+1)/2⌉ γ^1⋯γ^k` with the exponent as written for the cycle.
    pub fn volume_form_raw(&self) -> Matrix {
        let e = (self.k as i64 + 2) / 2;
        self.full_product().scale(&GaussianRational::i_pow(e))
    }

    /// `i^⌊(k+1)/2⌋ γ^1⋯γ^k`, which squares to the identity for every `k`.
    pub fn grading(&self) -> Matrix {
        let e = (self.k as i64 + 1) / 2;
        self.full_product().scale(&GaussianRational::i_pow(e))
    }

    /// `χ = γ^2 γ^4 ⋯ γ^{2⌊k/2⌋}` (identity for `k = 1`).
    pub fn chi(&self) -> Matrix {
        let evens: Vec<Matrix> = self.gammas.iter().skip(1).step_by(2).cloned().collect();
        product(&evens, self.dim())
    }

    /// Clifford symbol of `D` on the degree-`n` block: `n` for `k = 1`,
    /// `i Σ_m γ^m n_m` otherwise.
    pub fn dirac_symbol(&self, n: &[i64]) -> Matrix {
        if self.k == 1 {
            return Matrix::scalar(1, GaussianRational::from_int(n[0]));
        }
        let mut out = Matrix::zeros(self.dim());
        for (g, &x) in self.gammas.iter().zip(n) {
            if x != 0 {
                out = out.add(&g.scale(&GaussianRational::from_int(x)));
            }
        }
        out.scale(&GaussianRational::i())
    }

    /// Coefficient matrix of `[D, a]` for homogeneous `a` of degree `n`.
    /// Same as [`dirac_symbol`](Self::dirac_symbol): `D` acts by scalars on
    /// each gauge block.
    pub fn commutator_symbol(&self, n: &[i64]) -> Matrix {
        self.dirac_symbol(n)
    }
}

/// Volume form data with the squared form reported rather than assumed.
#[derive(Debug, Clone)]
pub struct VolumeForm {
    pub k: usize,
    pub omega: Matrix,
    pub omega_sq: Matrix,
    pub omega_sq_scalar: Option<GaussianRational>,
    pub grading: Matrix,
}

pub fn volume_form(k: usize) -> Result<VolumeForm> {
    let c = Clifford::new(k)?;
    let omega = c.volume_form_raw();
    let omega_sq = omega.mul(&omega);
    Ok(VolumeForm {
        k,
        omega_sq_scalar: omega_sq.as_scalar(),
        omega,
        omega_sq,
        grading: c.grading(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RealitySigns {
    pub eps: i64,
    pub eps_prime: i64,
    pub eps_dprime: Option<i64>,
}

#[derive(Debug, Clone)]
pub struct RealityData {
    pub k: usize,
    pub s_k: i64,
    pub chi: Matrix,
    pub signs: RealitySigns,
    /// `χ* = ±χ`.
    pub chi_adjoint_sign: i64,
    /// Sign `s` in `J D_n J* = s D_{−n}`, checked on a window of degrees.
    pub degree_reversal_sign: i64,
    pub degree_vectors_checked: usize,
}

/// Computes the signs of `J x = χ · conj(x)` exactly.
pub fn reality_operator(k: usize) -> Result<RealityData> {
    let c = Clifford::new(k)?;
    let chi = c.chi();
    reality_with_chi(&c, chi)
}

/// Sign computation for an arbitrary real unitary `χ`; used to show that a
/// perturbed `χ` breaks the table.
pub fn reality_with_chi(c: &Clifford, chi: Matrix) -> Result<RealityData> {
    let k = c.k;
    let bad = |what: &str| Error::Hypothesis(format!("k = {k}: {what}"));
    if !chi.is_real() {
        return Err(bad("χ has non-real entries"));
    }
    let chi_inv = chi.adjoint();
    if chi.mul(&chi_inv) != c.identity() {
        return Err(bad("χ is not unitary, so J is not antiunitary"));
    }
    // J² = χ conj(χ) = χ²
    let eps = sign_of_scalar(&chi.mul(&chi)).ok_or_else(|| bad("J² is not ±1"))?;
    let conjugate = |m: &Matrix| chi.mul(&m.conj()).mul(&chi_inv);
    let mut eps_prime = None;
    for g in &c.gammas {
        // χ conj(γ^m) χ* = s γ^m for all m gives J D_n J* = s D_{−n}
        let s = conjugate(g)
            .sign_relative_to(g)
            .ok_or_else(|| bad("χ conj(γ) χ* is not ±γ"))?;
        match eps_prime {
            None => eps_prime = Some(s),
            Some(p) if p != s => return Err(bad("generators disagree on ε′")),
            _ => {}
        }
    }
    let eps_prime = eps_prime.expect("k >= 1");
    let eps_dprime = if k % 2 == 0 {
        let gamma = c.grading();
        Some(
            conjugate(&gamma)
                .sign_relative_to(&gamma)
                .ok_or_else(|| bad("J Γ J* is not ±Γ"))?,
        )
    } else {
        None
    };
    let chi_adjoint_sign = chi
        .adjoint()
        .sign_relative_to(&chi)
        .ok_or_else(|| bad("χ* is not ±χ"))?;
    let (degree_reversal_sign, checked) = degree_reversal(c, &chi, &chi_inv)?;
    Ok(RealityData {
        k,
        s_k: s_of_k(k),
        chi,
        signs: RealitySigns {
            eps,
            eps_prime,
            eps_dprime,
        },
        chi_adjoint_sign,
        degree_reversal_sign,
        degree_vectors_checked: checked,
    })
}

fn sign_of_scalar(m: &Matrix) -> Option<i64> {
    let c = m.as_scalar()?;
    if c == GaussianRational::one() {
        Some(1)
    } else if c == -GaussianRational::one() {
        Some(-1)
    } else {
        None
    }
}

/// Degree vectors with entries in `[−3, 3]`: all of them up to rank 5, a
/// fixed stride through the lattice beyond that.
pub fn degree_window(k: usize) -> Vec<Vec<i64>> {
    let total = 7usize.pow(k as u32);
    let stride = if k <= 5 { 1 } else { total / 2401 + 1 };
    let mut out = Vec::new();
    let mut idx = 0;
    while idx < total {
        let mut x = idx;
        let mut n = Vec::with_capacity(k);
        for _ in 0..k {
            n.push((x % 7) as i64 - 3);
            x /= 7;
        }
        out.push(n);
        idx += stride;
    }
    // axes are always included
    for m in 0..k {
        for v in [-3, -1, 1, 3] {
            let mut n = vec![0; k];
            n[m] = v;
            out.push(n);
        }
    }
    out
}

fn degree_reversal(c: &Clifford, chi: &Matrix, chi_inv: &Matrix) -> Result<(i64, usize)> {
    let k = c.k;
    let mut sign = None;
    let window = degree_window(k);
    // J D_n J* is linear in n: precompute the images of the generators
    let images: Vec<Matrix> = (0..k)
        .map(|m| {
            let mut e = vec![0; k];
            e[m] = 1;
            chi.mul(&c.dirac_symbol(&e).conj()).mul(chi_inv)
        })
        .collect();
    for n in &window {
        if n.iter().all(|&x| x == 0) {
            continue;
        }
        let mut lhs = Matrix::zeros(c.dim());
        for (img, &x) in images.iter().zip(n) {
            if x != 0 {
                lhs = lhs.add(&img.scale(&GaussianRational::from_int(x)));
            }
        }
        let minus_n: Vec<i64> = n.iter().map(|x| -x).collect();
        let s = lhs.sign_relative_to(&c.dirac_symbol(&minus_n)).ok_or_else(|| {
            Error::Hypothesis(format!("k = {k}: J D_n J* is not ±D_(-n) at n = {n:?}"))
        })?;
        match sign {
            None => sign = Some(s),
            Some(p) if p != s => {
                return Err(Error::Hypothesis(format!(
                    "k = {k}: degree-reversal sign changes at n = {n:?}"
                )))
            }
            _ => {}
        }
    }
    Ok((sign.unwrap_or(1), window.len()))
}

/// `(−1)^{⌊(k+1)/2⌋(k+2)}`.
pub fn expected_degree_reversal_sign(k: usize) -> i64 {
    let k = k as i64;
    parity_sign(((k + 1) / 2) * (k + 2))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignRow {
    pub k: usize,
    pub computed: RealitySigns,
    pub expected: RealitySigns,
    pub degree_reversal_sign: i64,
    pub expected_degree_reversal_sign: i64,
    pub chi_real: bool,
    pub chi_adjoint_sign_matches: bool,
    pub pass: bool,
}

/// Compares computed signs against the mod-8 table for `k = 1..=kmax`.
pub fn sign_table_check(kmax: usize) -> Result<Vec<SignRow>> {
    (1..=kmax)
        .map(|k| {
            let r = reality_operator(k)?;
            let (e, ep, edp) = expected_signs(k);
            let expected = RealitySigns {
                eps: e,
                eps_prime: ep,
                eps_dprime: edp,
            };
            let h = (k / 2) as i64;
            let chi_adjoint_sign_matches = r.chi_adjoint_sign == parity_sign(h * (h + 1) / 2);
            let exp_rev = expected_degree_reversal_sign(k);
            let pass = r.signs == expected
                && r.degree_reversal_sign == exp_rev
                && chi_adjoint_sign_matches
                && r.chi.is_real();
            Ok(SignRow {
                k,
                computed: r.signs,
                expected,
                degree_reversal_sign: r.degree_reversal_sign,
                expected_degree_reversal_sign: exp_rev,
                chi_real: r.chi.is_real(),
                chi_adjoint_sign_matches,
                pass,
            })
        })
        .collect()
}

/// Complex dimension of the span of all products of the generators.
pub fn clifford_span_dimension(c: &Clifford) -> usize {
    let d = c.dim();
    let mut rows = Vec::new();
    for mask in 0u32..(1 << c.k) {
        let factors: Vec<Matrix> = (0..c.k)
            .filter(|j| mask & (1 << j) != 0)
            .map(|j| c.gammas[j].clone())
            .collect();
        rows.push(product(&factors, d).entries().to_vec());
    }
    rank(&rows, d * d)
}

/// Expected span dimension: `2^k` for even `k`, `2^{k−1}` for odd `k`,
/// where the irreducible module identifies `γ^1⋯γ^k` with a scalar.
pub fn expected_span_dimension(k: usize) -> usize {
    if k % 2 == 0 {
        1 << k
    } else {
        1 << (k - 1)
    }
}

/// Square matrix with algebra entries: Clifford matrices tensored with the
/// path algebra, acting on spinors with algebra-valued components.
#[derive(Clone)]
pub struct AlgebraMatrix {
    n: usize,
    entries: Vec<Element>,
}

impl AlgebraMatrix {
    pub fn zeros(n: usize, like: &Element) -> Self {
        Self {
            n,
            entries: vec![Element::zero(like.graph()); n * n],
        }
    }

    /// `M ⊗ a`.
    pub fn tensor(m: &Matrix, a: &Element) -> Self {
        let n = m.dim();
        let entries = m.entries().iter().map(|c| a.scale(c)).collect();
        Self { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Element {
        &self.entries[i * self.n + j]
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<_>>()?;
        Ok(Self { n: self.n, entries })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let n = self.n;
        let mut out = Self::zeros(n, &self.entries[0]);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Element::zero(self.entries[0].graph());
                for k in 0..n {
                    let a = &self.entries[i * n + k];
                    let b = &other.entries[k * n + j];
                    if a.term_count() > 0 && b.term_count() > 0 {
                        acc = acc.try_add(&a.try_mul(b)?)?;
                    }
                }
                out.entries[i * n + j] = acc;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|a| a.scale(c)).collect(),
        }
    }

    /// Left multiplication by an algebra element in every entry.
    pub fn left_mul(&self, a: &Element) -> Result<Self> {
        Ok(Self {
            n: self.n,
            entries: self.entries.iter().map(|x| a.try_mul(x)).collect::<Result<_>>()?,
        })
    }

    pub fn equals(&self, other: &Self) -> Result<bool> {
        for (a, b) in self.entries.iter().zip(&other.entries) {
            if !a.equals(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Element::is_zero)
    }

    /// Applies to a spinor with algebra components: `(Mx)_i = Σ_j M_ij x_j`.
    pub fn apply(&self, x: &[Element]) -> Result<Vec<Element>> {
        let n = self.n;
        (0..n)
            .map(|i| {
                let mut acc = Element::zero(x[0].graph());
                for j in 0..n {
                    acc = acc.try_add(&self.entries[i * n + j].try_mul(&x[j])?)?;
                }
                Ok(acc)
            })
            .collect()
    }
}

impl fmt::Debug for AlgebraMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.entries.iter()).finish()
    }
}

/// `[D, a]`: `(|μ|−|ν|) S_μS_ν*` for rank 1, `i Σ_m γ^m ⊗ Φ-weighted(a, m)`
/// otherwise.
pub fn dirac_commutator(c: &Clifford, a: &Element) -> Result<AlgebraMatrix> {
    if c.k != a.graph().rank() {
        return Err(Error::DegreeMismatch {
            expected: vec![c.k as i64],
            found: vec![a.graph().rank() as i64],
        });
    }
    if c.k == 1 {
        return Ok(AlgebraMatrix::tensor(&Matrix::identity(1), &a.degree_weighted(0)));
    }
    let mut out = AlgebraMatrix::zeros(c.dim(), a);
    let i = GaussianRational::i();
    for (m, g) in c.gammas.iter().enumerate() {
        out = out.try_add(&AlgebraMatrix::tensor(&g.scale(&i), &a.degree_weighted(m)))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anticommutation_relations() {
        for k in 1..=8 {
            let c = Clifford::new(k).unwrap();
            let d = c.dim();
            assert_eq!(d, 1 << (k / 2));
            for (a, ga) in c.gammas.iter().enumerate() {
                assert_eq!(ga.adjoint(), ga.scale(&-GaussianRational::one()));
                for (b, gb) in c.gammas.iter().enumerate() {
                    let anti = ga.mul(gb).add(&gb.mul(ga));
                    let want = if a == b {
                        Matrix::scalar(d, GaussianRational::from_int(-2))
                    } else {
                        Matrix::zeros(d)
                    };
                    assert_eq!(anti, want, "k={k} a={a} b={b}");
                }
                let real = ga.is_real();
                assert_eq!(real, wants_real(k, a + 1), "k={k} generator {}", a + 1);
            }
        }
    }

    #[test]
    fn rank_one_and_three() {
        let c1 = Clifford::new(1).unwrap();
        assert_eq!(c1.gammas[0], Matrix::scalar(1, GaussianRational::i()));
        let c3 = Clifford::new(3).unwrap();
        // (γ¹γ²γ³)² = (−1)^{k(k+1)/2} = 1, so the central product is ±1
        let p = c3.full_product().as_scalar().unwrap();
        assert!(p == GaussianRational::one() || p == -GaussianRational::one());
    }

    #[test]
    fn grading_squares_to_one() {
        for k in 1..=8 {
            let c = Clifford::new(k).unwrap();
            let g = c.grading();
            assert_eq!(g.mul(&g), c.identity(), "k={k}");
        }
        let v2 = volume_form(2).unwrap();
        assert_eq!(v2.omega_sq_scalar, Some(-GaussianRational::one()));
        let v1 = volume_form(1).unwrap();
        assert_eq!(v1.omega, Matrix::scalar(1, -GaussianRational::one()));
    }

    #[test]
    fn sign_table_small() {
        let rows = sign_table_check(4).unwrap();
        assert!(rows.iter().all(|r| r.pass), "{rows:?}");
    }

    #[test]
    fn span_dimensions() {
        for k in 1..=4 {
            let c = Clifford::new(k).unwrap();
            assert_eq!(clifford_span_dimension(&c), expected_span_dimension(k));
        }
    }

    #[test]
    fn matrix_json_round_trip() {
        let c = Clifford::new(2).unwrap();
        let v = c.gammas[0].to_json_value();
        assert_eq!(Matrix::from_json_value(&v).unwrap(), c.gammas[0]);
    }
}
