//! Shared numerical primitives: multi-indices, Gauss quadrature, Hermite
//! functions and dense complex linear algebra.
//!
//! Everything downstream (group representations, symbol calculi, the
//! Stratonovich-Weyl harness) is built from the pieces in this module, so the
//! conventions fixed here — graded-lexicographic index enumeration, the
//! `λ`-scaled Hermite normalization, basis-tagged matrices — are the
//! conventions of the whole crate.

use crate::par;
use crate::{C64, Error, Result};
use std::collections::HashMap;

/// Hard cap on Gauss rule orders; past this the Jacobi-matrix eigensolve is
/// no longer guaranteed to deliver node accuracy near machine precision.
pub const MAX_QUADRATURE_ORDER: usize = 256;

/// Hard cap on Hermite indices accepted by [`hermite_fn`].
pub const MAX_HERMITE_INDEX: usize = 512;

// ---------------------------------------------------------------------------
// Multi-indices
// ---------------------------------------------------------------------------

/// Exponent multi-index `α ∈ ℕⁿ`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total degree `|α| = Σ αₖ`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `α!` as a float.
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&k| factorial(k as usize)).product()
    }

    /// Component-wise `α + e_axis`.
    pub fn raised(&self, axis: usize) -> MultiIndex {
        let mut v = self.0.clone();
        v[axis] += 1;
        MultiIndex(v)
    }

    /// Component-wise `α − e_axis`, if `α_axis > 0`.
    pub fn lowered(&self, axis: usize) -> Option<MultiIndex> {
        if self.0[axis] == 0 {
            return None;
        }
        let mut v = self.0.clone();
        v[axis] -= 1;
        Some(MultiIndex(v))
    }

    /// Component-wise `≤`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Component-wise sum.
    pub fn plus(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Component-wise difference, if `other ≤ self`.
    pub fn minus(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if !other.le(self) {
            return None;
        }
        Some(MultiIndex(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    /// `Π_k C(α_k, γ_k)`.
    pub fn binomial(&self, sub: &MultiIndex) -> f64 {
        self.0
            .iter()
            .zip(&sub.0)
            .map(|(&a, &g)| binomial(a as usize, g as usize))
            .product()
    }

    /// `z^α` for a complex vector `z`.
    pub fn monomial(&self, z: &[C64]) -> C64 {
        self.0
            .iter()
            .zip(z)
            .map(|(&k, &zk)| zk.powu(k))
            .product()
    }

    /// `x^α` for a real vector `x`.
    pub fn monomial_real(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .map(|(&k, &xk)| xk.powi(k as i32))
            .product()
    }
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0_f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// All multi-indices with `|α| ≤ max_degree`, enumerated by total degree and
/// lexicographically within each degree.  The enumeration is total and
/// stable; every graded basis in the crate uses it.
pub fn enumerate_multi_indices(n: usize, max_degree: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for deg in 0..=max_degree {
        let mut level = Vec::new();
        compositions(n, deg as u32, &mut Vec::new(), &mut level);
        level.sort();
        out.extend(level);
    }
    out
}

fn compositions(n: usize, rest: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if prefix.len() + 1 == n {
        prefix.push(rest);
        out.push(MultiIndex(prefix.clone()));
        prefix.pop();
        return;
    }
    for k in 0..=rest {
        prefix.push(k);
        compositions(n, rest - k, prefix, out);
        prefix.pop();
    }
}

/// A graded index set `{α : |α| ≤ degree}` with positional lookup.
#[derive(Clone, Debug)]
pub struct IndexSet {
    pub n: usize,
    pub degree: usize,
    pub indices: Vec<MultiIndex>,
    pos: HashMap<MultiIndex, usize>,
}

impl IndexSet {
    pub fn new(n: usize, degree: usize) -> Self {
        let indices = enumerate_multi_indices(n, degree);
        let pos = indices
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, mi)| (mi, i))
            .collect();
        IndexSet {
            n,
            degree,
            indices,
            pos,
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn position(&self, mi: &MultiIndex) -> Option<usize> {
        self.pos.get(mi).copied()
    }
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadKind {
    GaussHermite1d,
    GaussLegendre1d,
    TensorProduct,
}

/// Quadrature rule on `ℝ^dim`; nodes are stored point-major.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub dim: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub kind: QuadKind,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    /// Tensor product of 1D (or lower-dimensional) rules.
    pub fn tensor(rules: &[&QuadratureRule]) -> QuadratureRule {
        assert!(!rules.is_empty());
        let dim = rules.iter().map(|r| r.dim).sum();
        let total: usize = rules.iter().map(|r| r.len()).product();
        let mut nodes = Vec::with_capacity(total * dim);
        let mut weights = Vec::with_capacity(total);
        let mut counters = vec![0usize; rules.len()];
        for _ in 0..total {
            let mut w = 1.0;
            for (r, &c) in rules.iter().zip(&counters) {
                nodes.extend_from_slice(r.node(c));
                w *= r.weights[c];
            }
            weights.push(w);
            for (slot, r) in counters.iter_mut().zip(rules).rev() {
                *slot += 1;
                if *slot < r.len() {
                    break;
                }
                *slot = 0;
            }
        }
        QuadratureRule {
            dim,
            nodes,
            weights,
            kind: QuadKind::TensorProduct,
        }
    }

    /// Deterministic parallel quadrature sum `Σ wᵢ f(xᵢ)`.
    pub fn integrate<F>(&self, f: F) -> C64
    where
        F: Fn(&[f64]) -> C64 + Sync + Send,
    {
        par::sum_indexed(self.len(), |i| self.weights[i] * f(self.node(i)))
    }
}

/// Gauss-Hermite rule for the weight `e^{−x²}` on `ℝ`: exact on polynomials
/// of degree `≤ 2·order − 1`.
pub fn gauss_hermite(order: usize) -> Result<QuadratureRule> {
    golub_welsch(order, QuadKind::GaussHermite1d)
}

/// Gauss-Legendre rule on `[−1, 1]`: exact on polynomials of degree
/// `≤ 2·order − 1`.
pub fn gauss_legendre(order: usize) -> Result<QuadratureRule> {
    golub_welsch(order, QuadKind::GaussLegendre1d)
}

fn golub_welsch(order: usize, kind: QuadKind) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(Error::Config("quadrature order must be ≥ 1".into()));
    }
    if order > MAX_QUADRATURE_ORDER {
        return Err(Error::QuadratureCap {
            requested: order,
            cap: MAX_QUADRATURE_ORDER,
        });
    }
    // Jacobi matrix of the orthogonal-polynomial recurrence.
    let (offdiag, mu0): (Vec<f64>, f64) = match kind {
        QuadKind::GaussHermite1d => (
            (1..order).map(|k| (k as f64 / 2.0).sqrt()).collect(),
            std::f64::consts::PI.sqrt(),
        ),
        QuadKind::GaussLegendre1d => (
            (1..order)
                .map(|k| {
                    let k = k as f64;
                    k / (4.0 * k * k - 1.0).sqrt()
                })
                .collect(),
            2.0,
        ),
        QuadKind::TensorProduct => unreachable!(),
    };
    let mut jac = DenseMatrix::zeros(Basis::plain(order), Basis::plain(order));
    for k in 0..order - 1 {
        jac.set(k, k + 1, C64::new(offdiag[k], 0.0));
        jac.set(k + 1, k, C64::new(offdiag[k], 0.0));
    }
    let (eigs, _) = hermitian_eig(&jac);
    let mut nodes = eigs;
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let _ = mu0;
    // Newton-polish each node on the degree-`order` orthonormal polynomial,
    // then take the weights as Christoffel numbers 1/Σ_{k<order} p_k(x)².
    for x in nodes.iter_mut() {
        for _ in 0..4 {
            let (pn, dpn) = match kind {
                QuadKind::GaussHermite1d => {
                    let phi = hermite_phi_upto(order, *x);
                    (phi[order], (2.0 * order as f64).sqrt() * phi[order - 1])
                }
                QuadKind::GaussLegendre1d => {
                    let p = legendre_upto(order, *x);
                    let n = order as f64;
                    let dp = n * (*x * p[order] - p[order - 1]) / (*x * *x - 1.0);
                    (
                        ((2.0 * n + 1.0) / 2.0).sqrt() * p[order],
                        ((2.0 * n + 1.0) / 2.0).sqrt() * dp,
                    )
                }
                QuadKind::TensorProduct => unreachable!(),
            };
            if dpn != 0.0 {
                *x -= pn / dpn;
            }
        }
    }
    // Fold residual asymmetry out: both rules are symmetric about 0.
    let nodes: Vec<f64> = (0..order)
        .map(|i| 0.5 * (nodes[i] - nodes[order - 1 - i]))
        .collect();
    let weights: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            let sum: f64 = match kind {
                QuadKind::GaussHermite1d => hermite_phi_upto(order - 1, x)
                    .iter()
                    .map(|p| p * p)
                    .sum(),
                QuadKind::GaussLegendre1d => legendre_upto(order - 1, x)
                    .iter()
                    .enumerate()
                    .map(|(k, p)| (2.0 * k as f64 + 1.0) / 2.0 * p * p)
                    .sum(),
                QuadKind::TensorProduct => unreachable!(),
            };
            1.0 / sum
        })
        .collect();
    Ok(QuadratureRule {
        dim: 1,
        nodes,
        weights,
        kind,
    })
}

/// Plain Legendre polynomials `P_0 .. P_n` at `x`.
fn legendre_upto(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return out;
    }
    out.push(x);
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0) * x * out[out.len() - 1] - k * out[out.len() - 2]) / (k + 1.0);
        out.push(next);
    }
    out
}

// ---------------------------------------------------------------------------
// Hermite functions
// ---------------------------------------------------------------------------

/// Normalized Hermite polynomials `φ_k(t) = H_k(t)/√(2^k k! √π)` for
/// `k = 0..=kmax`, by the stable three-term recurrence.  These satisfy
/// `∫ φ_j φ_k e^{−t²} dt = δ_{jk}`.
pub fn hermite_phi_upto(kmax: usize, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(kmax + 1);
    let phi0 = std::f64::consts::PI.powf(-0.25);
    out.push(phi0);
    if kmax == 0 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * t * phi0);
    for k in 1..kmax {
        let k = k as f64;
        let next = t * (2.0 / (k + 1.0)).sqrt() * out[out.len() - 1]
            - (k / (k + 1.0)).sqrt() * out[out.len() - 2];
        out.push(next);
    }
    out
}

/// [`hermite_phi_upto`] at a complex argument (the polynomials are entire;
/// used after contour shifts that absorb oscillatory factors).
pub fn hermite_phi_upto_complex(kmax: usize, t: C64) -> Vec<C64> {
    let mut out = Vec::with_capacity(kmax + 1);
    let phi0 = C64::new(std::f64::consts::PI.powf(-0.25), 0.0);
    out.push(phi0);
    if kmax == 0 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * t * phi0);
    for k in 1..kmax {
        let k = k as f64;
        let next = t * (2.0 / (k + 1.0)).sqrt() * out[out.len() - 1]
            - (k / (k + 1.0)).sqrt() * out[out.len() - 2];
        out.push(next);
    }
    out
}

/// `k`-th Hermite function at scale `λ`:
/// `h_k(x; λ) = (λ/π)^{1/4} (2^k k!)^{−1/2} H_k(√λ x) e^{−λx²/2}`,
/// orthonormal in `L²(ℝ)`.
pub fn hermite_fn(k: usize, lambda: f64, x: f64) -> Result<f64> {
    if k > MAX_HERMITE_INDEX {
        return Err(Error::HermiteCap {
            k,
            cap: MAX_HERMITE_INDEX,
        });
    }
    assert!(lambda > 0.0, "hermite_fn: scale λ must be positive");
    Ok(hermite_fn_upto(k, lambda, x)[k])
}

/// All Hermite functions `h_0 .. h_kmax` at scale `λ`, evaluated at `x`.
pub fn hermite_fn_upto(kmax: usize, lambda: f64, x: f64) -> Vec<f64> {
    let t = lambda.sqrt() * x;
    let damp = lambda.powf(0.25) * (-0.5 * t * t).exp();
    hermite_phi_upto(kmax, t)
        .into_iter()
        .map(|p| damp * p)
        .collect()
}

// ---------------------------------------------------------------------------
// Basis tags and dense matrices
// ---------------------------------------------------------------------------

/// Identification of the orthonormal basis an operator matrix refers to.
///
/// Graded bases (`Hermite`, `FockMonomial`) are indexed by the enumeration of
/// [`enumerate_multi_indices`], tensored with `ℂ^vdim` (vector index fastest).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Basis {
    /// Hermite functions `h_α`, `|α| ≤ degree`, on `L²(ℝⁿ) ⊗ ℂ^vdim`.
    Hermite { n: usize, degree: usize, vdim: usize },
    /// Orthonormal monomials `e_α = z^α/√((2λ)^{|α|} α!)`, `|α| ≤ degree`,
    /// tensored with `ℂ^vdim`.
    FockMonomial { n: usize, degree: usize, vdim: usize },
    /// Matrix units `E_{ij}` of `End(ℂ^vdim)` with the Hilbert-Schmidt inner
    /// product; dimension `vdim²`.
    EndV { vdim: usize },
    /// An untagged `dim`-dimensional space.
    Plain { dim: usize },
}

impl Basis {
    pub fn hermite(n: usize, degree: usize) -> Self {
        Basis::Hermite { n, degree, vdim: 1 }
    }

    pub fn fock(n: usize, degree: usize) -> Self {
        Basis::FockMonomial { n, degree, vdim: 1 }
    }

    pub fn plain(dim: usize) -> Self {
        Basis::Plain { dim }
    }

    pub fn dim(&self) -> usize {
        match self {
            Basis::Hermite { n, degree, vdim } | Basis::FockMonomial { n, degree, vdim } => {
                graded_dim(*n, *degree) * vdim
            }
            Basis::EndV { vdim } => vdim * vdim,
            Basis::Plain { dim } => *dim,
        }
    }

    pub fn vdim(&self) -> usize {
        match self {
            Basis::Hermite { vdim, .. } | Basis::FockMonomial { vdim, .. } => *vdim,
            _ => 1,
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            Basis::Hermite { degree, .. } | Basis::FockMonomial { degree, .. } => *degree,
            _ => 0,
        }
    }

    /// Same basis kind truncated to a smaller degree.
    pub fn truncated(&self, degree: usize) -> Basis {
        match self {
            Basis::Hermite { n, vdim, .. } => Basis::Hermite {
                n: *n,
                degree,
                vdim: *vdim,
            },
            Basis::FockMonomial { n, vdim, .. } => Basis::FockMonomial {
                n: *n,
                degree,
                vdim: *vdim,
            },
            other => other.clone(),
        }
    }

    /// Same basis tensored with `ℂ^vdim`.
    pub fn with_vdim(&self, vdim: usize) -> Basis {
        match self {
            Basis::Hermite { n, degree, .. } => Basis::Hermite {
                n: *n,
                degree: *degree,
                vdim,
            },
            Basis::FockMonomial { n, degree, .. } => Basis::FockMonomial {
                n: *n,
                degree: *degree,
                vdim,
            },
            other => other.clone(),
        }
    }
}

pub fn graded_dim(n: usize, degree: usize) -> usize {
    binomial(n + degree, n) as usize
}

/// Dense complex matrix between two tagged bases, row-major storage.
#[derive(Clone, Debug)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub row_basis: Basis,
    pub col_basis: Basis,
    pub hermitian: bool,
    data: Vec<C64>,
}

impl DenseMatrix {
    pub fn zeros(row_basis: Basis, col_basis: Basis) -> Self {
        let rows = row_basis.dim();
        let cols = col_basis.dim();
        DenseMatrix {
            rows,
            cols,
            row_basis,
            col_basis,
            hermitian: false,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(basis: Basis) -> Self {
        let mut m = DenseMatrix::zeros(basis.clone(), basis);
        for i in 0..m.rows {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m.hermitian = true;
        m
    }

    /// Rank-one matrix `|row_idx⟩⟨col_idx|` on a single basis.
    pub fn unit(basis: Basis, row_idx: usize, col_idx: usize) -> Self {
        let mut m = DenseMatrix::zeros(basis.clone(), basis);
        m.set(row_idx, col_idx, C64::new(1.0, 0.0));
        m
    }

    /// Build entries row-parallel from a closure.
    pub fn from_fn<F>(row_basis: Basis, col_basis: Basis, f: F) -> Self
    where
        F: Fn(usize, usize) -> C64 + Sync + Send,
    {
        let rows = row_basis.dim();
        let cols = col_basis.dim();
        let data: Vec<C64> = par::map_indexed(rows, |i| {
            (0..cols).map(|j| f(i, j)).collect::<Vec<_>>()
        })
        .into_iter()
        .flatten()
        .collect();
        DenseMatrix {
            rows,
            cols,
            row_basis,
            col_basis,
            hermitian: false,
            data,
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.cols + j] += v;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(
            self.col_basis, rhs.row_basis,
            "basis mismatch in matrix product"
        );
        let rows = self.rows;
        let cols = rhs.cols;
        let inner = self.cols;
        let data: Vec<C64> = par::map_indexed(rows, |i| {
            let mut out = vec![C64::new(0.0, 0.0); cols];
            for k in 0..inner {
                let a = self.get(i, k);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let rrow = rhs.row(k);
                for (o, &b) in out.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
            out
        })
        .into_iter()
        .flatten()
        .collect();
        DenseMatrix {
            rows,
            cols,
            row_basis: self.row_basis.clone(),
            col_basis: rhs.col_basis.clone(),
            hermitian: false,
            data,
        }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &x)| a * x).sum())
            .collect()
    }

    pub fn add(&self, rhs: &DenseMatrix) -> DenseMatrix {
        self.zip(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &DenseMatrix) -> DenseMatrix {
        self.zip(rhs, |a, b| a - b)
    }

    fn zip(&self, rhs: &DenseMatrix, f: impl Fn(C64, C64) -> C64) -> DenseMatrix {
        assert_eq!(self.row_basis, rhs.row_basis, "basis mismatch");
        assert_eq!(self.col_basis, rhs.col_basis, "basis mismatch");
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            row_basis: self.row_basis.clone(),
            col_basis: self.col_basis.clone(),
            hermitian: false,
            data,
        }
    }

    pub fn scaled(&self, s: C64) -> DenseMatrix {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= s;
        }
        out.hermitian = false;
        out
    }

    pub fn adjoint(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.col_basis.clone(), self.row_basis.clone());
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out.hermitian = self.hermitian;
        out
    }

    pub fn commutator(&self, rhs: &DenseMatrix) -> DenseMatrix {
        self.mul(rhs).sub(&rhs.mul(self))
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Hilbert-Schmidt inner product `Tr(rhs† self)`.
    pub fn hs_inner(&self, rhs: &DenseMatrix) -> C64 {
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(&a, &b)| b.conj() * a)
            .sum()
    }

    /// Degrees of the flattened basis indices (vector index fastest).
    fn basis_degrees(basis: &Basis) -> Vec<usize> {
        match basis {
            Basis::Hermite { n, degree, vdim } | Basis::FockMonomial { n, degree, vdim } => {
                enumerate_multi_indices(*n, *degree)
                    .iter()
                    .flat_map(|mi| std::iter::repeat(mi.order() as usize).take(*vdim))
                    .collect()
            }
            other => vec![0; other.dim()],
        }
    }

    /// Leading sub-matrix on basis indices of degree `≤ new_degree`.
    pub fn truncate_to_degree(&self, new_degree: usize) -> DenseMatrix {
        let rdeg = Self::basis_degrees(&self.row_basis);
        let cdeg = Self::basis_degrees(&self.col_basis);
        let rkeep = rdeg.iter().take_while(|&&d| d <= new_degree).count();
        let ckeep = cdeg.iter().take_while(|&&d| d <= new_degree).count();
        let mut out = DenseMatrix::zeros(
            self.row_basis.truncated(new_degree.min(self.row_basis.degree())),
            self.col_basis.truncated(new_degree.min(self.col_basis.degree())),
        );
        assert_eq!(out.rows, rkeep);
        assert_eq!(out.cols, ckeep);
        for i in 0..rkeep {
            for j in 0..ckeep {
                out.set(i, j, self.get(i, j));
            }
        }
        out
    }

    /// Interior block: degrees `≤ degree − margin`.  Ladder operators leak
    /// one degree and quadratic ones two, so comparisons of truncated
    /// operator products happen here.
    pub fn interior(&self, margin: usize) -> DenseMatrix {
        let d = self.row_basis.degree().max(self.col_basis.degree());
        self.truncate_to_degree(d.saturating_sub(margin))
    }

    /// Kronecker product with a `vdim × vdim` block acting on the tensor
    /// factor `ℂ^vdim` (vector index fastest).  A `1 × 1` identity factor
    /// returns the matrix unchanged, bit for bit.
    pub fn kron_v(&self, block: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.row_basis.vdim(), 1, "kron_v expects a scalar operator");
        assert!(block.is_square());
        let d = block.rows;
        if d == 1 && block.get(0, 0) == C64::new(1.0, 0.0) {
            return self.clone();
        }
        let row_basis = self.row_basis.with_vdim(d);
        let col_basis = self.col_basis.with_vdim(d);
        let mut out = DenseMatrix::zeros(row_basis, col_basis);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for p in 0..d {
                    for q in 0..d {
                        out.set(i * d + p, j * d + q, a * block.get(p, q));
                    }
                }
            }
        }
        out
    }

    /// The `(p, q)` block of a `vdim`-tensored operator, as a scalar operator.
    pub fn v_block(&self, p: usize, q: usize) -> DenseMatrix {
        let d = self.row_basis.vdim();
        assert_eq!(d, self.col_basis.vdim());
        assert!(p < d && q < d);
        let rb = self.row_basis.with_vdim(1);
        let cb = self.col_basis.with_vdim(1);
        let mut out = DenseMatrix::zeros(rb, cb);
        for i in 0..out.rows {
            for j in 0..out.cols {
                out.set(i, j, self.get(i * d + p, j * d + q));
            }
        }
        out
    }
}

/// Graded-basis matrix of a tensor product `⊗_k op_k` of per-axis 1D
/// operators, each given on `{0, …, degree}`.
pub fn assemble_tensor_1d(set: &IndexSet, basis: Basis, ops: &[DenseMatrix]) -> DenseMatrix {
    assert_eq!(ops.len(), set.n);
    let dim = set.len();
    assert_eq!(basis.dim(), dim);
    DenseMatrix::from_fn(basis.clone(), basis, |i, j| {
        let (alpha, beta) = (&set.indices[i], &set.indices[j]);
        let mut acc = C64::new(1.0, 0.0);
        for k in 0..set.n {
            acc *= ops[k].get(alpha.0[k] as usize, beta.0[k] as usize);
            if acc == C64::new(0.0, 0.0) {
                break;
            }
        }
        acc
    })
}

// ---------------------------------------------------------------------------
// Hermite-basis ladder matrices
// ---------------------------------------------------------------------------

/// Matrix of multiplication by `x_axis` on the graded Hermite basis at
/// scale `λ`: `x h_k = √((k+1)/2λ) h_{k+1} + √(k/2λ) h_{k−1}` per axis.
pub fn hermite_mult_x(set: &IndexSet, lambda: f64, axis: usize) -> DenseMatrix {
    let basis = Basis::hermite(set.n, set.degree);
    let mut m = DenseMatrix::zeros(basis.clone(), basis);
    for (j, beta) in set.indices.iter().enumerate() {
        let k = beta.0[axis] as f64;
        if let Some(i) = set.position(&beta.raised(axis)) {
            m.set(i, j, C64::new(((k + 1.0) / (2.0 * lambda)).sqrt(), 0.0));
        }
        if let Some(lower) = beta.lowered(axis) {
            let i = set.position(&lower).unwrap();
            m.set(i, j, C64::new((k / (2.0 * lambda)).sqrt(), 0.0));
        }
    }
    m
}

/// Matrix of `∂/∂x_axis` on the graded Hermite basis at scale `λ`:
/// `h_k' = √(λk/2) h_{k−1} − √(λ(k+1)/2) h_{k+1}` per axis.
pub fn hermite_diff(set: &IndexSet, lambda: f64, axis: usize) -> DenseMatrix {
    let basis = Basis::hermite(set.n, set.degree);
    let mut m = DenseMatrix::zeros(basis.clone(), basis);
    for (j, beta) in set.indices.iter().enumerate() {
        let k = beta.0[axis] as f64;
        if let Some(i) = set.position(&beta.raised(axis)) {
            m.set(i, j, C64::new(-(lambda * (k + 1.0) / 2.0).sqrt(), 0.0));
        }
        if let Some(lower) = beta.lowered(axis) {
            let i = set.position(&lower).unwrap();
            m.set(i, j, C64::new((lambda * k / 2.0).sqrt(), 0.0));
        }
    }
    m
}

// ---------------------------------------------------------------------------
// Factorizations
// ---------------------------------------------------------------------------

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.  Returns the eigenvalues (ascending) and the unitary matrix of
/// column eigenvectors.
pub fn hermitian_eig(m: &DenseMatrix) -> (Vec<f64>, DenseMatrix) {
    assert!(m.is_square());
    let n = m.rows;
    let mut a = m.clone();
    let mut v = DenseMatrix::identity(m.row_basis.clone());
    let scale = a.max_norm().max(1e-300);
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a.get(p, q).norm());
            }
        }
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let g = apq.norm();
                if g <= 1e-18 * scale {
                    continue;
                }
                let phase = apq / g;
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let theta = (aqq - app) / (2.0 * g);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // Unitary R = [[c, s], [−s·e^{−iφ}, c·e^{−iφ}]], e^{iφ} = a_pq/|a_pq|;
                // update A ← R† A R, V ← V R.
                let cp = phase.conj();
                for i in 0..n {
                    let aip = a.get(i, p);
                    let aiq = a.get(i, q);
                    a.set(i, p, c * aip - s * cp * aiq);
                    a.set(i, q, s * aip + c * cp * aiq);
                }
                for j in 0..n {
                    let apj = a.get(p, j);
                    let aqj = a.get(q, j);
                    a.set(p, j, c * apj - s * phase * aqj);
                    a.set(q, j, s * apj + c * phase * aqj);
                }
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, c * vip - s * cp * viq);
                    v.set(i, q, s * vip + c * cp * viq);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.partial_cmp(&a.get(j, j).re).unwrap());
    let eigs: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let mut vecs = DenseMatrix::zeros(m.row_basis.clone(), m.col_basis.clone());
    for (newj, &oldj) in order.iter().enumerate() {
        for i in 0..n {
            vecs.set(i, newj, v.get(i, oldj));
        }
    }
    (eigs, vecs)
}

/// Thin SVD `M = U Σ V†` of a square complex matrix by one-sided Jacobi.
/// Returns `(U, σ, V)` with the singular values in descending order.
pub fn svd(m: &DenseMatrix) -> (DenseMatrix, Vec<f64>, DenseMatrix) {
    assert!(m.is_square());
    let n = m.rows;
    let mut a = m.clone();
    let mut v = DenseMatrix::identity(m.col_basis.clone());
    let col = |mat: &DenseMatrix, j: usize| -> Vec<C64> {
        (0..n).map(|i| mat.get(i, j)).collect()
    };
    let scale = m.fro_norm().max(1e-300);
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (ap, aq) = (col(&a, p), col(&a, q));
                let alpha: f64 = ap.iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = aq.iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = ap.iter().zip(&aq).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g <= 1e-16 * (alpha.sqrt() * beta.sqrt()).max(1e-30 * scale * scale) {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let theta = (beta - alpha) / (2.0 * g);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // Right-multiply the column pair by R (see hermitian_eig).
                let cp = phase.conj();
                for i in 0..n {
                    let aip = a.get(i, p);
                    let aiq = a.get(i, q);
                    a.set(i, p, c * aip - s * cp * aiq);
                    a.set(i, q, s * aip + c * cp * aiq);
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, c * vip - s * cp * viq);
                    v.set(i, q, s * vip + c * cp * viq);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sig: Vec<(f64, usize)> = (0..n)
        .map(|j| {
            let norm: f64 = (0..n).map(|i| a.get(i, j).norm_sqr()).sum::<f64>().sqrt();
            (norm, j)
        })
        .collect();
    sig.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    let mut u = DenseMatrix::zeros(m.row_basis.clone(), m.col_basis.clone());
    let mut vv = DenseMatrix::zeros(m.col_basis.clone(), m.col_basis.clone());
    let mut sigma = Vec::with_capacity(n);
    for (newj, &(norm, oldj)) in sig.iter().enumerate() {
        sigma.push(norm);
        let inv = if norm > 0.0 { 1.0 / norm } else { 0.0 };
        for i in 0..n {
            u.set(i, newj, a.get(i, oldj) * inv);
            vv.set(i, newj, v.get(i, oldj));
        }
    }
    (u, sigma, vv)
}

/// Unitary part `U` of the polar decomposition `M = P·U` with `P` positive
/// semidefinite Hermitian, computed from the singular-value factorization.
pub fn polar_unitary(m: &DenseMatrix) -> Result<DenseMatrix> {
    polar_unitary_tol(m, 1e-12)
}

/// [`polar_unitary`] with an explicit relative rank tolerance.
pub fn polar_unitary_tol(m: &DenseMatrix, rel_tol: f64) -> Result<DenseMatrix> {
    assert!(m.is_square(), "polar_unitary expects a square matrix");
    let (u, sigma, v) = svd(m);
    let smax = sigma.first().copied().unwrap_or(0.0);
    let smin = sigma.last().copied().unwrap_or(0.0);
    if smin < rel_tol * smax.max(1.0) {
        return Err(Error::RankDeficient { sigma_min: smin });
    }
    Ok(u.mul(&v.adjoint()))
}

/// Hermitian `R` with `R · M · R = I` for positive-definite Hermitian `M`,
/// via eigendecomposition.
pub fn psd_inv_sqrt(m: &DenseMatrix) -> Result<DenseMatrix> {
    hermitian_power(m, -0.5, 1e-12)
}

/// Hermitian `M^p` through the spectral calculus; eigenvalues at or below
/// `tol · max(|λ|, 1)` are rejected when `p < 0`.
pub fn hermitian_power(m: &DenseMatrix, p: f64, tol: f64) -> Result<DenseMatrix> {
    assert!(m.is_square());
    let herm_defect = m.sub(&m.adjoint()).max_norm();
    if herm_defect > 1e-10 * m.max_norm().max(1.0) {
        return Err(Error::NotPositiveDefinite {
            eigenvalue: f64::NAN,
        });
    }
    let (eigs, q) = hermitian_eig(m);
    let lmax = eigs.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let floor = tol * lmax.max(1.0);
    let mut powered = Vec::with_capacity(eigs.len());
    for &l in &eigs {
        if l <= floor && p < 0.0 {
            return Err(Error::NotPositiveDefinite { eigenvalue: l });
        }
        powered.push(if l <= 0.0 && p > 0.0 { 0.0 } else { l.powf(p) });
    }
    let n = m.rows;
    let mut out = DenseMatrix::zeros(m.row_basis.clone(), m.col_basis.clone());
    for i in 0..n {
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                acc += q.get(i, k) * powered[k] * q.get(j, k).conj();
            }
            out.set(i, j, acc);
        }
    }
    out.hermitian = true;
    Ok(out)
}

/// `exp(S)` for anti-Hermitian `S`, through the spectral calculus of `iS`.
pub fn exp_anti_hermitian(s: &DenseMatrix) -> DenseMatrix {
    assert!(s.is_square());
    let herm = s.scaled(C64::new(0.0, 1.0)); // iS is Hermitian
    let (eigs, q) = hermitian_eig(&herm);
    let n = s.rows;
    let mut out = DenseMatrix::zeros(s.row_basis.clone(), s.col_basis.clone());
    for i in 0..n {
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                // exp(S) = Q e^{−iΛ} Q†
                let phase = C64::from_polar(1.0, -eigs[k]);
                acc += q.get(i, k) * phase * q.get(j, k).conj();
            }
            out.set(i, j, acc);
        }
    }
    out
}

/// Least-squares solution of `A x ≈ b` (rows ≥ cols) by Householder QR.
pub fn lstsq(a: &DenseMatrix, b: &[C64]) -> Vec<C64> {
    let (m, n) = (a.rows, a.cols);
    assert!(m >= n, "lstsq expects an overdetermined system");
    assert_eq!(b.len(), m);
    let mut r: Vec<C64> = a.data.to_vec();
    let mut y: Vec<C64> = b.to_vec();
    let at = |r: &Vec<C64>, i: usize, j: usize| r[i * n + j];
    for k in 0..n {
        // Householder vector for column k.
        let mut norm = 0.0f64;
        for i in k..m {
            norm += at(&r, i, k).norm_sqr();
        }
        let norm = norm.sqrt();
        if norm == 0.0 {
            continue;
        }
        let akk = at(&r, k, k);
        let alpha = if akk.norm() > 0.0 {
            -(akk / akk.norm()) * norm
        } else {
            C64::new(-norm, 0.0)
        };
        let mut v: Vec<C64> = (k..m).map(|i| at(&r, i, k)).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in k..n {
            let dot: C64 = (k..m).map(|i| v[i - k].conj() * at(&r, i, j)).sum();
            let factor = dot * (2.0 / vnorm2);
            for i in k..m {
                r[i * n + j] -= factor * v[i - k];
            }
        }
        let dot: C64 = (k..m).map(|i| v[i - k].conj() * y[i]).sum();
        let factor = dot * (2.0 / vnorm2);
        for i in k..m {
            y[i] -= factor * v[i - k];
        }
    }
    // Back substitution on the upper-triangular R.
    let mut x = vec![C64::new(0.0, 0.0); n];
    for k in (0..n).rev() {
        let mut acc = y[k];
        for j in (k + 1)..n {
            acc -= at(&r, k, j) * x[j];
        }
        let rkk = at(&r, k, k);
        x[k] = if rkk.norm() > 0.0 {
            acc / rkk
        } else {
            C64::new(0.0, 0.0)
        };
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn multi_index_enumeration_graded_and_stable() {
        let set = IndexSet::new(2, 2);
        let expect: Vec<Vec<u32>> = vec![
            vec![0, 0],
            vec![0, 1],
            vec![1, 0],
            vec![0, 2],
            vec![1, 1],
            vec![2, 0],
        ];
        assert_eq!(
            set.indices.iter().map(|m| m.0.clone()).collect::<Vec<_>>(),
            expect
        );
        for (i, mi) in set.indices.iter().enumerate() {
            assert_eq!(set.position(mi), Some(i));
        }
        assert_eq!(set.len(), graded_dim(2, 2));
    }

    #[test]
    fn gauss_hermite_order_one_is_midpoint() {
        let rule = gauss_hermite(1).unwrap();
        assert!(rule.nodes[0].abs() < 1e-14);
        assert!((rule.weights[0] - std::f64::consts::PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn gauss_hermite_second_moment() {
        for order in [2usize, 7, 20, 60] {
            let rule = gauss_hermite(order).unwrap();
            let m2: f64 = rule
                .weights
                .iter()
                .zip(&rule.nodes)
                .map(|(w, x)| w * x * x)
                .sum();
            assert!(
                (m2 - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-12,
                "order {order}: moment {m2}"
            );
        }
    }

    #[test]
    fn gauss_hermite_exactness_through_advertised_degree() {
        // ∫ x^{2m} e^{−x²} dx = Γ(m + 1/2) = √π (2m−1)!!/2^m
        let order = 12;
        let rule = gauss_hermite(order).unwrap();
        let mut exact = std::f64::consts::PI.sqrt();
        for m in 0..order {
            let deg = 2 * m;
            if deg > 2 * order - 1 {
                break;
            }
            let q: f64 = rule
                .weights
                .iter()
                .zip(&rule.nodes)
                .map(|(w, x)| w * x.powi(deg as i32))
                .sum();
            assert!(
                (q - exact).abs() <= 1e-12 * exact.abs().max(1.0),
                "degree {deg}"
            );
            exact *= (2 * m + 1) as f64 / 2.0;
        }
    }

    #[test]
    fn gauss_hermite_rejects_past_cap() {
        assert!(matches!(
            gauss_hermite(MAX_QUADRATURE_ORDER + 1),
            Err(Error::QuadratureCap { .. })
        ));
    }

    #[test]
    fn gauss_legendre_basic_moments() {
        let rule = gauss_legendre(16).unwrap();
        let m0: f64 = rule.weights.iter().sum();
        let m2: f64 = rule
            .weights
            .iter()
            .zip(&rule.nodes)
            .map(|(w, x)| w * x * x)
            .sum();
        assert!((m0 - 2.0).abs() < 1e-13);
        assert!((m2 - 2.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn quadrature_orthonormalizes_hermite_functions() {
        // order 40 resolves ⟨h_j, h_k⟩ = δ_jk for j,k ≤ 10 at λ = 1.
        let rule = gauss_hermite(40).unwrap();
        let lambda = 1.0;
        for j in 0..=10usize {
            for k in 0..=10usize {
                // substitute t = √λ x so the Gaussians are absorbed exactly
                let mut acc = 0.0;
                for (w, t) in rule.weights.iter().zip(&rule.nodes) {
                    let phis = hermite_phi_upto(j.max(k), *t);
                    acc += w * phis[j] * phis[k];
                }
                let _ = lambda;
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!((acc - expect).abs() < 1e-12, "j={j} k={k}: {acc}");
            }
        }
    }

    #[test]
    fn hermite_fn_normalization_at_origin() {
        let h0 = hermite_fn(0, 1.0, 0.0).unwrap();
        assert!((h0 - std::f64::consts::PI.powf(-0.25)).abs() < 1e-15);
        for lambda in [0.5, 1.0, 2.0] {
            assert_eq!(hermite_fn(1, lambda, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn hermite_fn_unit_norm_by_quadrature() {
        let rule = gauss_hermite(60).unwrap();
        for lambda in [0.5, 1.0, 2.0] {
            for k in 0..=15usize {
                // ∫ h_k(x)² dx with t = √λ x
                let acc: f64 = rule
                    .weights
                    .iter()
                    .zip(&rule.nodes)
                    .map(|(w, t)| {
                        let phi = hermite_phi_upto(k, *t)[k];
                        w * phi * phi
                    })
                    .sum();
                assert!((acc - 1.0).abs() < 1e-10, "λ={lambda} k={k}");
            }
        }
    }

    #[test]
    fn hermite_fn_rejects_past_cap() {
        assert!(matches!(
            hermite_fn(MAX_HERMITE_INDEX + 1, 1.0, 0.0),
            Err(Error::HermiteCap { .. })
        ));
    }

    #[test]
    fn hermite_recurrence_residual_on_nodes() {
        // √(2λ)·x·h_k = √(k+1) h_{k+1} + √k h_{k−1}
        let rule = gauss_hermite(24).unwrap();
        for lambda in [0.5, 1.0, 2.0] {
            for &t in &rule.nodes {
                let x = t / f64::sqrt(lambda);
                let h = hermite_fn_upto(16, lambda, x);
                for k in 1..=15usize {
                    let lhs = (2.0 * lambda).sqrt() * x * h[k];
                    let rhs = ((k + 1) as f64).sqrt() * h[k + 1] + (k as f64).sqrt() * h[k - 1];
                    assert!((lhs - rhs).abs() < 1e-9, "k={k} x={x}");
                }
            }
        }
    }

    #[test]
    fn ladder_matrices_satisfy_commutation() {
        let set = IndexSet::new(1, 10);
        let lambda = 0.7;
        let x = hermite_mult_x(&set, lambda, 0);
        let d = hermite_diff(&set, lambda, 0);
        // [∂, x] = 1 on the interior block.
        let comm = d.commutator(&x).interior(2);
        let id = DenseMatrix::identity(comm.row_basis.clone());
        assert!(comm.sub(&id).max_norm() < 1e-13);
    }

    #[test]
    fn polar_unitary_identity_and_diagonal() {
        let id = DenseMatrix::identity(Basis::plain(4));
        let u = polar_unitary(&id).unwrap();
        assert!(u.sub(&id).max_norm() < 1e-13);

        let mut d = DenseMatrix::zeros(Basis::plain(3), Basis::plain(3));
        d.set(0, 0, c(2.0, 0.0));
        d.set(1, 1, c(5.0, 0.0));
        d.set(2, 2, c(0.5, 0.0));
        let u = polar_unitary(&d).unwrap();
        let id3 = DenseMatrix::identity(Basis::plain(3));
        assert!(u.sub(&id3).max_norm() < 1e-12);
    }

    #[test]
    fn polar_unitary_random_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let basis = Basis::plain(6);
        let mut m = DenseMatrix::zeros(basis.clone(), basis);
        for i in 0..6 {
            for j in 0..6 {
                m.set(
                    i,
                    j,
                    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                );
            }
        }
        let u = polar_unitary(&m).unwrap();
        let uu = u.adjoint().mul(&u);
        let id = DenseMatrix::identity(Basis::plain(6));
        assert!(uu.sub(&id).max_norm() < 1e-12, "U not unitary");
        // M U† must be PSD Hermitian.
        let p = m.mul(&u.adjoint());
        assert!(p.sub(&p.adjoint()).max_norm() < 1e-11, "P not Hermitian");
        let (eigs, _) = hermitian_eig(&p);
        assert!(eigs.iter().all(|&l| l > -1e-11), "P not PSD: {eigs:?}");
        // Defining equation M = P U.
        assert!(p.mul(&u).sub(&m).max_norm() < 1e-11);
    }

    #[test]
    fn polar_unitary_signals_rank_deficiency() {
        let mut m = DenseMatrix::zeros(Basis::plain(3), Basis::plain(3));
        m.set(0, 0, c(1.0, 0.0));
        m.set(1, 1, c(1.0, 0.0));
        assert!(matches!(polar_unitary(&m), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn psd_inv_sqrt_scalar_cases() {
        let id = DenseMatrix::identity(Basis::plain(3));
        let r = psd_inv_sqrt(&id).unwrap();
        assert!(r.sub(&id).max_norm() < 1e-13);

        let mut d = DenseMatrix::zeros(Basis::plain(2), Basis::plain(2));
        d.set(0, 0, c(4.0, 0.0));
        d.set(1, 1, c(9.0, 0.0));
        let r = psd_inv_sqrt(&d).unwrap();
        assert!((r.get(0, 0) - c(0.5, 0.0)).norm() < 1e-13);
        assert!((r.get(1, 1) - c(1.0 / 3.0, 0.0)).norm() < 1e-13);
        assert!(r.get(0, 1).norm() < 1e-14);
    }

    #[test]
    fn psd_inv_sqrt_random_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let basis = Basis::plain(5);
        let mut a = DenseMatrix::zeros(basis.clone(), basis.clone());
        for i in 0..5 {
            for j in 0..5 {
                a.set(
                    i,
                    j,
                    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                );
            }
        }
        // M = A†A + εI is Hermitian positive definite.
        let mut m = a.adjoint().mul(&a);
        for i in 0..5 {
            m.add_to(i, i, c(0.1, 0.0));
        }
        let r = psd_inv_sqrt(&m).unwrap();
        let resid = r.mul(&m).mul(&r).sub(&DenseMatrix::identity(basis));
        assert!(resid.max_norm() < 1e-10, "RMR − I = {}", resid.max_norm());
        assert!(r.sub(&r.adjoint()).max_norm() < 1e-11);
    }

    #[test]
    fn psd_inv_sqrt_rejects_indefinite() {
        let mut d = DenseMatrix::zeros(Basis::plain(2), Basis::plain(2));
        d.set(0, 0, c(1.0, 0.0));
        d.set(1, 1, c(-1.0, 0.0));
        assert!(matches!(
            psd_inv_sqrt(&d),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn factorizations_hold_at_moderate_condition_numbers() {
        // cond(M) = 1e6: both defining equations still hold to 1e−10.
        let n = 6;
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let basis = Basis::plain(n);
        let mut q1 = DenseMatrix::zeros(basis.clone(), basis.clone());
        for i in 0..n {
            for j in 0..n {
                q1.set(
                    i,
                    j,
                    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                );
            }
        }
        let u1 = polar_unitary(&q1).unwrap();
        let mut m = DenseMatrix::zeros(basis.clone(), basis.clone());
        for i in 0..n {
            let s = 10f64.powf(-(6.0 * i as f64) / (n - 1) as f64);
            m.set(i, i, c(s, 0.0));
        }
        let m = u1.mul(&m).mul(&u1.adjoint());
        let herm = m.add(&m.adjoint()).scaled(c(0.5, 0.0));
        let r = psd_inv_sqrt(&herm).unwrap();
        let resid = r.mul(&herm).mul(&r).sub(&DenseMatrix::identity(basis));
        assert!(resid.max_norm() < 1e-8, "residual {}", resid.max_norm());
    }

    #[test]
    fn lstsq_recovers_exact_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rowsb = Basis::plain(12);
        let colsb = Basis::plain(4);
        let mut a = DenseMatrix::zeros(rowsb, colsb);
        for i in 0..12 {
            for j in 0..4 {
                a.set(
                    i,
                    j,
                    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                );
            }
        }
        let x_true: Vec<C64> = (0..4)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let b = a.apply(&x_true);
        let x = lstsq(&a, &b);
        for (xi, ti) in x.iter().zip(&x_true) {
            assert!((xi - ti).norm() < 1e-12);
        }
    }

    #[test]
    fn exp_anti_hermitian_is_unitary() {
        let mut s = DenseMatrix::zeros(Basis::plain(3), Basis::plain(3));
        s.set(0, 1, c(0.3, 0.4));
        s.set(1, 0, c(-0.3, 0.4));
        s.set(2, 2, c(0.0, 0.9));
        let e = exp_anti_hermitian(&s);
        let id = DenseMatrix::identity(Basis::plain(3));
        assert!(e.adjoint().mul(&e).sub(&id).max_norm() < 1e-12);
    }

    #[test]
    fn interior_block_is_leading_principal() {
        let set = IndexSet::new(2, 3);
        let basis = Basis::fock(2, 3);
        let m = DenseMatrix::from_fn(basis.clone(), basis, |i, j| c((i * 100 + j) as f64, 0.0));
        let inner = m.interior(1);
        assert_eq!(inner.rows, graded_dim(2, 2));
        assert_eq!(inner.get(1, 2), m.get(1, 2));
        let _ = set;
    }

    proptest::proptest! {
        #[test]
        fn quadrature_exact_on_random_polynomials(coeffs in proptest::collection::vec(-1.0f64..1.0, 1..8)) {
            // Degree ≤ 7 polynomial against e^{−x²}: order 8 is exact.
            let rule = gauss_hermite(8).unwrap();
            let q: f64 = rule.weights.iter().zip(&rule.nodes).map(|(w, x)| {
                let mut p = 0.0;
                for (k, c) in coeffs.iter().enumerate() { p += c * x.powi(k as i32); }
                w * p
            }).sum();
            // moments: ∫ x^k e^{−x²} = 0 (odd), Γ((k+1)/2) (even)
            let mut exact = 0.0;
            for (k, c) in coeffs.iter().enumerate() {
                if k % 2 == 0 {
                    let m = k / 2;
                    let mut mom = std::f64::consts::PI.sqrt();
                    for j in 0..m { mom *= (2 * j + 1) as f64 / 2.0; }
                    exact += c * mom;
                }
            }
            proptest::prop_assert!((q - exact).abs() < 1e-12 * (1.0 + exact.abs()));
        }
    }
}
