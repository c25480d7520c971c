//! Weyl quantization `W₀` and Wigner dequantization `W₀⁻¹` on `ℝ²ⁿ`, the
//! `Ψ_λ` moment map, and the operator-valued extension `W` acting on
//! `L²(ℝⁿ, V)`.
//!
//! Convention: `W₀(f)φ(p) = (2π)^{−n} ∫ e^{isq} f(p + s/2, q) φ(p+s) ds dq`,
//! so `W₀(p_k)` is multiplication by `x_k` and `W₀(q_k) = i∂_k`.  The inverse
//! reads the kernel back through `f(u, q) = ∫ K(u − s/2, u + s/2) e^{−isq} ds`;
//! the phase sign is pinned by the round-trip and `Ψ_λ` tests, both of which
//! are sign-sensitive.
//!
//! Dequantization comes in two shapes matching [`PhaseSymbol`]: an exact
//! coefficient-table inverse on operators that are polynomials in the ladder
//! generators (the truncated matrix determines the polynomial exactly), and
//! quadrature evaluation of the kernel integral for Hilbert-Schmidt matrices.
//! Truncating an unbounded band operator makes its pointwise symbol ring, so
//! the polynomial route is the meaningful inverse on Lie-algebra images.

use crate::heisenberg::HeisCoadjPoint;
use crate::numkit::{
    binomial, gauss_hermite, lstsq, Basis, DenseMatrix, IndexSet, MultiIndex, QuadratureRule,
};
use crate::{C64, Error, Result};
use std::collections::BTreeMap;

/// Polynomial symbol on phase space: `Σ c_{AB} p^A q^B`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoly {
    pub n: usize,
    pub coeffs: BTreeMap<(MultiIndex, MultiIndex), C64>,
}

impl PhasePoly {
    pub fn zero(n: usize) -> Self {
        PhasePoly {
            n,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: C64) -> Self {
        let mut p = Self::zero(n);
        p.add_term(MultiIndex::zeros(n), MultiIndex::zeros(n), c);
        p
    }

    pub fn add_term(&mut self, p_exp: MultiIndex, q_exp: MultiIndex, c: C64) {
        if c == C64::new(0.0, 0.0) {
            return;
        }
        *self
            .coeffs
            .entry((p_exp, q_exp))
            .or_insert(C64::new(0.0, 0.0)) += c;
    }

    pub fn scaled(&self, s: C64) -> Self {
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            *v *= s;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((a, b), &v) in &other.coeffs {
            out.add_term(a.clone(), b.clone(), v);
        }
        out
    }

    pub fn degree(&self) -> usize {
        self.coeffs
            .keys()
            .map(|(a, b)| (a.order() + b.order()) as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, p: &[f64], q: &[f64]) -> C64 {
        self.coeffs
            .iter()
            .map(|((pa, qb), &c)| c * pa.monomial_real(p) * qb.monomial_real(q))
            .sum()
    }

    /// Complex conjugate as a function on `ℝ²ⁿ`.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.n);
        for ((a, b), v) in &self.coeffs {
            out.add_term(a.clone(), b.clone(), v.conj());
        }
        out
    }

    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let mut keys: std::collections::BTreeSet<_> = self.coeffs.keys().cloned().collect();
        keys.extend(other.coeffs.keys().cloned());
        keys.into_iter()
            .map(|k| {
                let a = self.coeffs.get(&k).copied().unwrap_or(C64::new(0.0, 0.0));
                let b = other.coeffs.get(&k).copied().unwrap_or(C64::new(0.0, 0.0));
                (a - b).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Pull back through `j(p,q) = q − λpi` to a polynomial in `(z, z̄)`:
    /// `p_k = i(z_k − z̄_k)/2λ`, `q_k = (z_k + z̄_k)/2`.
    pub fn to_plane_symbol(&self, lambda: f64) -> crate::berezin0::PolySymbol {
        let mut out = crate::berezin0::PolySymbol::zero(self.n, lambda);
        let half = C64::new(0.5, 0.0);
        let ip = C64::new(0.0, 1.0 / (2.0 * lambda));
        for ((pa, qb), &c) in &self.coeffs {
            let mut terms: BTreeMap<(MultiIndex, MultiIndex), C64> = BTreeMap::new();
            terms.insert((MultiIndex::zeros(self.n), MultiIndex::zeros(self.n)), c);
            for axis in 0..self.n {
                for _ in 0..pa.0[axis] {
                    terms = mul_linear(&terms, axis, ip, -ip);
                }
                for _ in 0..qb.0[axis] {
                    terms = mul_linear(&terms, axis, half, half);
                }
            }
            for ((za, zb), v) in terms {
                out.add_term(za, zb, v);
            }
        }
        out
    }
}

/// Multiply a `(z, z̄)` coefficient table by `cz·z_axis + czb·z̄_axis`.
fn mul_linear(
    terms: &BTreeMap<(MultiIndex, MultiIndex), C64>,
    axis: usize,
    cz: C64,
    czb: C64,
) -> BTreeMap<(MultiIndex, MultiIndex), C64> {
    let mut out: BTreeMap<(MultiIndex, MultiIndex), C64> = BTreeMap::new();
    for ((za, zb), &v) in terms {
        if cz != C64::new(0.0, 0.0) {
            *out.entry((za.raised(axis), zb.clone()))
                .or_insert(C64::new(0.0, 0.0)) += v * cz;
        }
        if czb != C64::new(0.0, 0.0) {
            *out.entry((za.clone(), zb.raised(axis)))
                .or_insert(C64::new(0.0, 0.0)) += v * czb;
        }
    }
    out
}

/// `End(V)`-valued polynomial phase symbol: a `vdim × vdim` matrix of scalar
/// symbols (row-major), so the scalar engine applies blockwise.
#[derive(Clone, Debug)]
pub struct MatrixPhasePoly {
    pub n: usize,
    pub vdim: usize,
    pub entries: Vec<PhasePoly>,
}

impl MatrixPhasePoly {
    pub fn zero(n: usize, vdim: usize) -> Self {
        MatrixPhasePoly {
            n,
            vdim,
            entries: vec![PhasePoly::zero(n); vdim * vdim],
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> &PhasePoly {
        &self.entries[i * self.vdim + j]
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut PhasePoly {
        &mut self.entries[i * self.vdim + j]
    }

    /// Evaluate to an `End(V)` matrix at a phase-space point.
    pub fn eval(&self, p: &[f64], q: &[f64]) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(Basis::plain(self.vdim), Basis::plain(self.vdim));
        for i in 0..self.vdim {
            for j in 0..self.vdim {
                m.set(i, j, self.entry(i, j).eval(p, q));
            }
        }
        m
    }
}

/// A phase-space symbol in one of its two concrete shapes.
#[derive(Clone, Debug)]
pub enum PhaseSymbol {
    /// Exact coefficient table.
    Poly(PhasePoly),
    /// Kernel closure evaluated by quadrature.
    Sampled(WignerSymbol),
}

impl PhaseSymbol {
    pub fn eval(&self, p: &[f64], q: &[f64]) -> C64 {
        match self {
            PhaseSymbol::Poly(f) => f.eval(p, q),
            PhaseSymbol::Sampled(w) => w.eval(p, q),
        }
    }
}

// ---------------------------------------------------------------------------
// Quantization
// ---------------------------------------------------------------------------

/// 1D Hermite ladder matrices (`x`·, `∂`) on `{h_0, …, h_{dim−1}}`.
fn hermite_ops_1d(dim: usize, lambda: f64) -> (DenseMatrix, DenseMatrix) {
    let basis = Basis::hermite(1, dim - 1);
    let mut x = DenseMatrix::zeros(basis.clone(), basis.clone());
    let mut d = DenseMatrix::zeros(basis.clone(), basis);
    for k in 0..dim {
        let kf = k as f64;
        if k + 1 < dim {
            x.set(k + 1, k, C64::new(((kf + 1.0) / (2.0 * lambda)).sqrt(), 0.0));
            d.set(k + 1, k, C64::new(-(lambda * (kf + 1.0) / 2.0).sqrt(), 0.0));
        }
        if k > 0 {
            x.set(k - 1, k, C64::new((kf / (2.0 * lambda)).sqrt(), 0.0));
            d.set(k - 1, k, C64::new((lambda * kf / 2.0).sqrt(), 0.0));
        }
    }
    (x, d)
}

/// 1D quantized monomial `W₀(p^a q^b)` on `{h_0, …, h_deg}` from the
/// derivative formula: `i^b Σ_m C(b,m) (a)_m 2^{−m} x^{a−m} ∂^{b−m}`.
/// Assembled with internal padding so every kept entry is exact.
fn quantize_monomial_1d(a: u32, b: u32, deg: usize, lambda: f64) -> DenseMatrix {
    let pad_dim = deg + (a + b) as usize + 1;
    let (x, d) = hermite_ops_1d(pad_dim, lambda);
    let basis = Basis::hermite(1, pad_dim - 1);
    let mut acc = DenseMatrix::zeros(basis.clone(), basis.clone());
    for m in 0..=(a.min(b)) {
        let mut falling = 1.0;
        for i in 0..m {
            falling *= (a - i) as f64;
        }
        let coef = binomial(b as usize, m as usize) * falling * 0.5f64.powi(m as i32);
        let mut term = DenseMatrix::identity(basis.clone());
        for _ in 0..(a - m) {
            term = x.mul(&term);
        }
        for _ in 0..(b - m) {
            term = term.mul(&d);
        }
        acc = acc.add(&term.scaled(C64::new(coef, 0.0)));
    }
    acc.scaled(C64::i().powu(b)).truncate_to_degree(deg)
}

/// 1D quantized monomial by full symmetrization of `a` copies of `x` and `b`
/// copies of `i∂` — the independent second path of the two-path check.
fn quantize_monomial_1d_symmetrized(a: u32, b: u32, deg: usize, lambda: f64) -> DenseMatrix {
    let pad_dim = deg + (a + b) as usize + 1;
    let (x, d) = hermite_ops_1d(pad_dim, lambda);
    let id = d.scaled(C64::i());
    let basis = Basis::hermite(1, pad_dim - 1);
    let mut orderings: Vec<Vec<bool>> = Vec::new(); // true = x factor
    let mut stack = Vec::with_capacity((a + b) as usize);
    gen_orderings(a, b, &mut stack, &mut orderings);
    let mut acc = DenseMatrix::zeros(basis.clone(), basis.clone());
    for word in &orderings {
        let mut term = DenseMatrix::identity(basis.clone());
        for &is_x in word {
            term = if is_x { x.mul(&term) } else { id.mul(&term) };
        }
        acc = acc.add(&term);
    }
    let count = orderings.len().max(1) as f64;
    acc.scaled(C64::new(1.0 / count, 0.0))
        .truncate_to_degree(deg)
}

fn gen_orderings(a: u32, b: u32, stack: &mut Vec<bool>, out: &mut Vec<Vec<bool>>) {
    if a == 0 && b == 0 {
        out.push(stack.clone());
        return;
    }
    if a > 0 {
        stack.push(true);
        gen_orderings(a - 1, b, stack, out);
        stack.pop();
    }
    if b > 0 {
        stack.push(false);
        gen_orderings(a, b - 1, stack, out);
        stack.pop();
    }
}

fn quantize_with(
    f: &PhasePoly,
    set: &IndexSet,
    lambda: f64,
    mono: impl Fn(u32, u32, usize, f64) -> DenseMatrix,
) -> DenseMatrix {
    let basis = Basis::hermite(set.n, set.degree);
    let mut out = DenseMatrix::zeros(basis.clone(), basis.clone());
    for ((pa, qb), &c) in &f.coeffs {
        let ops: Vec<DenseMatrix> = (0..set.n)
            .map(|k| {
                let mut op = mono(pa.0[k], qb.0[k], set.degree, lambda);
                op.row_basis = Basis::plain(set.degree + 1);
                op.col_basis = Basis::plain(set.degree + 1);
                op
            })
            .collect();
        let term = crate::numkit::assemble_tensor_1d(set, basis.clone(), &ops);
        out = out.add(&term.scaled(c));
    }
    out
}

/// Operator on `L²(ℝⁿ)` (or `L²(ℝⁿ, V)`) presented in the Hermite basis,
/// with the scale tying the basis to phase space.
#[derive(Clone, Debug)]
pub struct KernelOperator {
    pub lambda: f64,
    pub matrix: DenseMatrix,
}

impl KernelOperator {
    /// Integral kernel `K(x, y) = Σ A_{αβ} h_α(x) h_β(y)` reconstructed from
    /// the Hermite expansion (scalar operators).
    pub fn kernel_eval(&self, set: &IndexSet, x: &[f64], y: &[f64]) -> C64 {
        assert_eq!(self.matrix.row_basis.vdim(), 1);
        let hx = eval_hermite_graded(set, self.lambda, x);
        let hy = eval_hermite_graded(set, self.lambda, y);
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..set.len() {
            for j in 0..set.len() {
                acc += self.matrix.get(i, j) * hx[i] * hy[j];
            }
        }
        acc
    }

    /// Apply the operator to a function given by samples of `h`-coefficients.
    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }
}

pub(crate) fn eval_hermite_graded(set: &IndexSet, lambda: f64, x: &[f64]) -> Vec<f64> {
    let per_axis: Vec<Vec<f64>> = (0..set.n)
        .map(|k| crate::numkit::hermite_fn_upto(set.degree, lambda, x[k]))
        .collect();
    set.indices
        .iter()
        .map(|alpha| {
            alpha
                .0
                .iter()
                .enumerate()
                .map(|(k, &e)| per_axis[k][e as usize])
                .product()
        })
        .collect()
}

/// Weyl quantization of a polynomial symbol, monomial by monomial from the
/// derivative formula.  Every entry of the returned truncated matrix agrees
/// with the untruncated operator.
pub fn weyl_quantize_poly(f: &PhasePoly, set: &IndexSet, lambda: f64) -> KernelOperator {
    KernelOperator {
        lambda,
        matrix: quantize_with(f, set, lambda, quantize_monomial_1d),
    }
}

/// Same map through the symmetrized-ladder ordering; agrees with
/// [`weyl_quantize_poly`] exactly on polynomials (two-path check).
pub fn weyl_quantize_poly_symmetrized(
    f: &PhasePoly,
    set: &IndexSet,
    lambda: f64,
) -> KernelOperator {
    KernelOperator {
        lambda,
        matrix: quantize_with(f, set, lambda, quantize_monomial_1d_symmetrized),
    }
}

// ---------------------------------------------------------------------------
// Dequantization
// ---------------------------------------------------------------------------

/// Wigner symbol of a Hilbert-Schmidt (finite-rank or rapidly decaying)
/// matrix, evaluated anywhere by Gauss-Hermite quadrature of
/// `f(p, q) = Σ A_{αβ} ∫ h_α(p − s/2) h_β(p + s/2) e^{−isq} ds`.
#[derive(Clone, Debug)]
pub struct WignerSymbol {
    pub lambda: f64,
    matrix: DenseMatrix,
    n: usize,
    degree: usize,
    order: usize,
}

impl WignerSymbol {
    pub fn eval(&self, p: &[f64], q: &[f64]) -> C64 {
        self.eval_with_order(p, q, self.order)
    }

    pub fn eval_with_order(&self, p: &[f64], q: &[f64], order: usize) -> C64 {
        let damp: f64 = p
            .iter()
            .zip(q)
            .map(|(&pk, &qk)| -self.lambda * pk * pk - qk * qk / self.lambda)
            .sum();
        damp.exp() * self.eval_reduced_with_order(p, q, order)
    }

    /// The symbol with the Gaussian envelope factored off analytically:
    /// `f(p,q) = e^{−Σ(λp_k² + q_k²/λ)} · Y(p,q)` with `Y` the value returned
    /// here.  `Y` has no oscillatory cancellation, so it stays accurate at
    /// any distance from the origin; quadrature with the product Gaussian
    /// absorbed into the weight should pair against this form.
    pub fn eval_reduced(&self, p: &[f64], q: &[f64]) -> C64 {
        self.eval_reduced_with_order(p, q, self.order)
    }

    pub fn eval_reduced_with_order(&self, p: &[f64], q: &[f64], order: usize) -> C64 {
        let rule = gauss_hermite(order).expect("quadrature order within cap");
        let tables: Vec<Vec<C64>> = (0..self.n)
            .map(|axis| cross_wigner_table_1d(self.degree, self.lambda, p[axis], q[axis], &rule))
            .collect();
        contract_tables(&self.matrix, self.n, self.degree, &tables)
    }

    /// Difference between consecutive quadrature refinements at a point; an
    /// a-posteriori resolution estimate.
    pub fn residual_estimate(&self, p: &[f64], q: &[f64]) -> f64 {
        (self.eval_with_order(p, q, self.order) - self.eval_with_order(p, q, self.order + 8))
            .norm()
    }
}

/// Contract a graded-basis matrix against per-axis `(deg+1)²` tables.
pub(crate) fn contract_tables(
    matrix: &DenseMatrix,
    n: usize,
    degree: usize,
    tables: &[Vec<C64>],
) -> C64 {
    let set = IndexSet::new(n, degree);
    let d = degree + 1;
    let mut acc = C64::new(0.0, 0.0);
    for (i, alpha) in set.indices.iter().enumerate() {
        for (j, beta) in set.indices.iter().enumerate() {
            let a = matrix.get(i, j);
            if a == C64::new(0.0, 0.0) {
                continue;
            }
            let mut prod = a;
            for k in 0..n {
                prod *= tables[k][alpha.0[k] as usize * d + beta.0[k] as usize];
            }
            acc += prod;
        }
    }
    acc
}

/// Per-axis reduced cross-Wigner table `Y_{jk}` with the Gaussian envelope
/// factored analytically:
/// `X_{jk}(p,q) = ∫ h_j(p−s/2) h_k(p+s/2) e^{−isq} ds
///             = e^{−(λp² + q²/λ)} · 2 Σ_u w φ_j(ā − u) φ_k(a + u)`
/// with `a = √λ p − iq/√λ`, after completing the square in `s` and shifting
/// the contour.  The integrand is then a polynomial in `u` (degree `j + k`),
/// so moderate orders are exact and nothing oscillates.
pub(crate) fn cross_wigner_table_1d(
    degree: usize,
    lambda: f64,
    p: f64,
    q: f64,
    rule: &QuadratureRule,
) -> Vec<C64> {
    let d = degree + 1;
    let mut out = vec![C64::new(0.0, 0.0); d * d];
    let a = C64::new(lambda.sqrt() * p, -q / lambda.sqrt());
    let ab = a.conj();
    for (w, u) in rule.weights.iter().zip(&rule.nodes) {
        let left = crate::numkit::hermite_phi_upto_complex(degree, ab - u);
        let right = crate::numkit::hermite_phi_upto_complex(degree, a + u);
        for j in 0..d {
            let lj = *w * left[j];
            for k in 0..d {
                out[j * d + k] += lj * right[k];
            }
        }
    }
    for v in out.iter_mut() {
        *v *= 2.0;
    }
    out
}

/// Quadrature-backed Wigner dequantization of a scalar Hermite-basis matrix.
pub fn wigner_dequantize(a: &DenseMatrix, lambda: f64, quad_order: usize) -> WignerSymbol {
    let (n, degree) = match &a.row_basis {
        Basis::Hermite { n, degree, vdim } => {
            assert_eq!(*vdim, 1, "wigner_dequantize expects a scalar operator");
            (*n, *degree)
        }
        other => panic!("wigner_dequantize expects a Hermite-basis operator, got {other:?}"),
    };
    WignerSymbol {
        lambda,
        matrix: a.clone(),
        n,
        degree,
        order: quad_order,
    }
}

/// Exact polynomial Wigner dequantization: solves `W₀(f) = A` for a
/// polynomial `f` of total degree ≤ `max_degree` by least squares over the
/// quantized-monomial basis, matching entries on the interior block.  Fails
/// with [`Error::NotPolynomial`] when `A` is not in the span.
pub fn wigner_dequantize_poly(
    a: &DenseMatrix,
    set: &IndexSet,
    lambda: f64,
    max_degree: usize,
) -> Result<PhasePoly> {
    let monos = phase_monomials(set.n, max_degree);
    let quantized: Vec<DenseMatrix> = monos
        .iter()
        .map(|(pa, qb)| {
            let mut f = PhasePoly::zero(set.n);
            f.add_term(pa.clone(), qb.clone(), C64::new(1.0, 0.0));
            weyl_quantize_poly(&f, set, lambda).matrix
        })
        .collect();
    let margin = max_degree;
    let target = a.interior(margin);
    let rows = target.rows * target.cols;
    let mut design = DenseMatrix::zeros(Basis::plain(rows), Basis::plain(monos.len()));
    for (col, qm) in quantized.iter().enumerate() {
        let inner = qm.interior(margin);
        for (r, &v) in inner.data().iter().enumerate() {
            design.set(r, col, v);
        }
    }
    let rhs: Vec<C64> = target.data().to_vec();
    let coeffs = lstsq(&design, &rhs);
    let fitted = design.apply(&coeffs);
    let resid = fitted
        .iter()
        .zip(&rhs)
        .map(|(f, r)| (f - r).norm())
        .fold(0.0, f64::max);
    let scale = a.max_norm().max(1.0);
    if resid > 1e-8 * scale {
        return Err(Error::NotPolynomial {
            degree: max_degree,
            residual: resid,
        });
    }
    let mut out = PhasePoly::zero(set.n);
    for ((pa, qb), c) in monos.into_iter().zip(coeffs) {
        if c.norm() > 1e-12 * scale {
            out.add_term(pa, qb, c);
        }
    }
    Ok(out)
}

/// All monomial exponent pairs `(A, B)` with `|A| + |B| ≤ max_degree`.
pub fn phase_monomials(n: usize, max_degree: usize) -> Vec<(MultiIndex, MultiIndex)> {
    let singles = crate::numkit::enumerate_multi_indices(n, max_degree);
    let mut out = Vec::new();
    for pa in &singles {
        for qb in &singles {
            if pa.order() + qb.order() <= max_degree as u32 {
                out.push((pa.clone(), qb.clone()));
            }
        }
    }
    out
}

/// `Ψ_λ(p, q) = Σ (q_k X_k* − λ p_k Y_k*) + λ Z̃*`.
pub fn psi_lambda(p: &[f64], q: &[f64], lambda: f64) -> HeisCoadjPoint {
    HeisCoadjPoint::new(q.to_vec(), p.iter().map(|&x| -lambda * x).collect(), lambda)
}

/// Blockwise quantization of an `End(V)`-valued polynomial symbol to an
/// operator on `L²(ℝⁿ) ⊗ V`.
pub fn weyl_quantize_opvalued(f: &MatrixPhasePoly, set: &IndexSet, lambda: f64) -> KernelOperator {
    let d = f.vdim;
    let basis = Basis::Hermite {
        n: set.n,
        degree: set.degree,
        vdim: d,
    };
    let mut out = DenseMatrix::zeros(basis.clone(), basis);
    for u in 0..d {
        for v in 0..d {
            let block = weyl_quantize_poly(f.entry(u, v), set, lambda).matrix;
            for i in 0..block.rows {
                for j in 0..block.cols {
                    let val = block.get(i, j);
                    if val != C64::new(0.0, 0.0) {
                        out.set(i * d + u, j * d + v, val);
                    }
                }
            }
        }
    }
    KernelOperator {
        lambda,
        matrix: out,
    }
}

/// Scalar phase-space pairing `∫ f g dμ̃` (or `∫ f ḡ dμ̃`),
/// `μ̃ = (2π)^{−n} dp dq`, of two Wigner symbols.  The product of the two
/// Gaussian envelopes is absorbed exactly into the Gauss-Hermite weight via
/// `p = t/√(2λ)`, `q = t√(λ/2)`, and the reduced (envelope-free) values are
/// paired, so the integrand never suffers Gaussian cancellation.
pub fn wigner_pairing(
    f: &WignerSymbol,
    g: &WignerSymbol,
    order: usize,
    conjugate_second: bool,
) -> Result<C64> {
    let n = f.n;
    let lambda = f.lambda;
    assert_eq!(g.n, n);
    assert_eq!(g.lambda, lambda);
    let rule = gauss_hermite(order)?;
    let npts = rule.len();
    let total = npts.pow(2 * n as u32);
    let (sp, sq) = (1.0 / (2.0 * lambda).sqrt(), (lambda / 2.0).sqrt());
    let pref = (2.0 * std::f64::consts::PI).powi(-(n as i32)) * (0.5f64).powi(n as i32);
    let acc = crate::par::sum_indexed(total, |flat| {
        let mut rest = flat;
        let mut p = vec![0.0; n];
        let mut q = vec![0.0; n];
        let mut w = 1.0;
        for k in 0..n {
            let ip = rest % npts;
            rest /= npts;
            let iq = rest % npts;
            rest /= npts;
            p[k] = sp * rule.nodes[ip];
            q[k] = sq * rule.nodes[iq];
            w *= rule.weights[ip] * rule.weights[iq];
        }
        let fv = f.eval_reduced(&p, &q);
        let gv = g.eval_reduced(&p, &q);
        let gv = if conjugate_second { gv.conj() } else { gv };
        w * fv * gv
    });
    Ok(acc * pref)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::{dsigma0_matrix, HeisAlgElement};
    use crate::numkit::{hermite_diff, hermite_mult_x};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn mono(n: usize, p: &[u32], q: &[u32]) -> PhasePoly {
        let mut f = PhasePoly::zero(n);
        f.add_term(MultiIndex(p.to_vec()), MultiIndex(q.to_vec()), c(1.0, 0.0));
        f
    }

    #[test]
    fn quantize_constant_is_identity() {
        let set = IndexSet::new(1, 12);
        let f = PhasePoly::constant(1, c(1.0, 0.0));
        let w = weyl_quantize_poly(&f, &set, 1.0);
        let id = DenseMatrix::identity(Basis::hermite(1, 12));
        assert!(w.matrix.sub(&id).max_norm() < 1e-14);
    }

    #[test]
    fn quantize_linear_matches_ladders() {
        // W₀(p) = x·, W₀(q) = i∂ (derivative formula with u = 1, α = e_k)
        let set = IndexSet::new(1, 14);
        let lambda = 0.9;
        let wp = weyl_quantize_poly(&mono(1, &[1], &[0]), &set, lambda);
        let x = hermite_mult_x(&set, lambda, 0);
        assert!(wp.matrix.sub(&x).max_norm() < 1e-13);

        let wq = weyl_quantize_poly(&mono(1, &[0], &[1]), &set, lambda);
        let idp = hermite_diff(&set, lambda, 0).scaled(C64::i());
        assert!(wq.matrix.sub(&idp).max_norm() < 1e-13);
    }

    #[test]
    fn quantize_pq_is_symmetrized_product() {
        // W₀(p₁q₁) = ½(x·(i∂) + (i∂)·x)
        let set = IndexSet::new(1, 14);
        let lambda = 1.0;
        let w = weyl_quantize_poly(&mono(1, &[1], &[1]), &set, lambda);
        let x = hermite_mult_x(&set, lambda, 0);
        let idp = hermite_diff(&set, lambda, 0).scaled(C64::i());
        let sym = x.mul(&idp).add(&idp.mul(&x)).scaled(c(0.5, 0.0));
        assert!(w.matrix.sub(&sym).interior(2).max_norm() < 1e-13);
    }

    #[test]
    fn two_quantization_paths_agree_to_degree_six() {
        let lambda = 1.1;
        for n in [1usize, 2] {
            let deg = if n == 1 { 10 } else { 6 };
            let set = IndexSet::new(n, deg);
            for (pa, qb) in phase_monomials(n, 6) {
                let mut f = PhasePoly::zero(n);
                f.add_term(pa.clone(), qb.clone(), c(1.0, 0.0));
                let a = weyl_quantize_poly(&f, &set, lambda);
                let b = weyl_quantize_poly_symmetrized(&f, &set, lambda);
                let resid = a.matrix.sub(&b.matrix).max_norm();
                assert!(
                    resid < 1e-11 * (1.0 + a.matrix.max_norm()),
                    "monomial p^{pa:?} q^{qb:?}: {resid}"
                );
            }
        }
    }

    #[test]
    fn dequantize_identity_is_one() {
        let set = IndexSet::new(1, 16);
        let id = DenseMatrix::identity(Basis::hermite(1, 16));
        let f = wigner_dequantize_poly(&id, &set, 1.0, 2).unwrap();
        let one = PhasePoly::constant(1, c(1.0, 0.0));
        assert!(f.max_coeff_diff(&one) < 1e-12);
    }

    #[test]
    fn dequantize_round_trip_on_polynomials() {
        let lambda = 1.0;
        let set = IndexSet::new(1, 18);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let mut f = PhasePoly::zero(1);
            for (pa, qb) in phase_monomials(1, 4) {
                f.add_term(
                    pa,
                    qb,
                    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                );
            }
            let a = weyl_quantize_poly(&f, &set, lambda);
            let back = wigner_dequantize_poly(&a.matrix, &set, lambda, 4).unwrap();
            assert!(back.max_coeff_diff(&f) < 1e-6, "round trip drifted");
        }
    }

    #[test]
    fn dequantize_rejects_non_polynomial() {
        let set = IndexSet::new(1, 16);
        let rank_one = DenseMatrix::unit(Basis::hermite(1, 16), 3, 5);
        assert!(matches!(
            wigner_dequantize_poly(&rank_one, &set, 1.0, 2),
            Err(Error::NotPolynomial { .. })
        ));
    }

    #[test]
    fn moment_map_identity_coefficientwise() {
        // W₀⁻¹(dσ₀(X)) = i⟨Ψ_λ(p,q), X⟩ exactly for all 2n+1 basis X.
        for (n, lambda) in [(1usize, 1.0f64), (2, 0.7)] {
            let set = IndexSet::new(n, 12);
            for x in HeisAlgElement::basis(n) {
                let a = dsigma0_matrix(&x, &set, lambda);
                let f = wigner_dequantize_poly(&a, &set, lambda, 1).unwrap();
                let mut expect = PhasePoly::zero(n);
                for k in 0..n {
                    let mut q = vec![0u32; n];
                    q[k] = 1;
                    expect.add_term(
                        MultiIndex::zeros(n),
                        MultiIndex(q),
                        c(0.0, x.a[k]),
                    );
                    let mut p = vec![0u32; n];
                    p[k] = 1;
                    expect.add_term(
                        MultiIndex(p),
                        MultiIndex::zeros(n),
                        c(0.0, -lambda * x.b[k]),
                    );
                }
                expect.add_term(
                    MultiIndex::zeros(n),
                    MultiIndex::zeros(n),
                    c(0.0, lambda * x.c),
                );
                assert!(
                    f.max_coeff_diff(&expect) < 1e-12,
                    "moment map failed for X = {x:?}"
                );
            }
        }
    }

    #[test]
    fn psi_equivariance_under_group_action() {
        // Ψ_λ(g·(p,q)) = Ad*(g) Ψ_λ(p,q) with g·(p,q) = (p+a, q+λb).
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let lambda = 1.3;
        for _ in 0..50 {
            let g = crate::heisenberg::HeisElement::new(
                (0..2).map(|_| rng.random_range(-1.0..1.0)).collect(),
                (0..2).map(|_| rng.random_range(-1.0..1.0)).collect(),
                rng.random_range(-1.0..1.0),
            );
            let p: Vec<f64> = (0..2).map(|_| rng.random_range(-2.0..2.0)).collect();
            let q: Vec<f64> = (0..2).map(|_| rng.random_range(-2.0..2.0)).collect();
            let (pg, qg) = g.act_on_phase(&p, &q, lambda);
            let lhs = psi_lambda(&pg, &qg, lambda);
            let rhs = crate::heisenberg::h_coadjoint(&g, &psi_lambda(&p, &q, lambda));
            assert!(lhs.max_diff(&rhs) < 1e-13);
        }
    }

    #[test]
    fn psi_matches_phi_through_j() {
        // Φ_λ(q − λpi) = Ψ_λ(p, q)
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let lambda = 0.8;
        for _ in 0..20 {
            let p: Vec<f64> = (0..2).map(|_| rng.random_range(-2.0..2.0)).collect();
            let q: Vec<f64> = (0..2).map(|_| rng.random_range(-2.0..2.0)).collect();
            let z: Vec<C64> = p
                .iter()
                .zip(&q)
                .map(|(&pk, &qk)| C64::new(qk, -lambda * pk))
                .collect();
            let lhs = crate::berezin0::phi_lambda(&z, lambda);
            let rhs = psi_lambda(&p, &q, lambda);
            assert!(lhs.max_diff(&rhs) < 1e-14);
        }
    }

    #[test]
    fn wigner_of_ground_state_is_gaussian() {
        // W₀⁻¹(|h₀⟩⟨h₀|)(p,q) = 2 e^{−λp² − q²/λ}
        let lambda = 1.0;
        let a = DenseMatrix::unit(Basis::hermite(1, 12), 0, 0);
        let f = wigner_dequantize(&a, lambda, 40);
        for &(p, q) in &[(0.0, 0.0), (0.5, -0.3), (1.0, 1.0), (-1.5, 0.7)] {
            let got = f.eval(&[p], &[q]);
            let expect = 2.0 * (-lambda * p * p - q * q / lambda).exp();
            assert!((got - c(expect, 0.0)).norm() < 1e-10, "({p},{q})");
            assert!(f.residual_estimate(&[p], &[q]) < 1e-10);
        }
    }

    #[test]
    fn wigner_reality_and_conjugation() {
        // W₀⁻¹(A*) = conj(W₀⁻¹(A))
        let lambda = 1.0;
        let basis = Basis::hermite(1, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut a = DenseMatrix::zeros(basis.clone(), basis);
        for i in 0..6 {
            for j in 0..6 {
                a.set(
                    i,
                    j,
                    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                );
            }
        }
        let f = wigner_dequantize(&a, lambda, 36);
        let fstar = wigner_dequantize(&a.adjoint(), lambda, 36);
        for &(p, q) in &[(0.3, 0.4), (-1.0, 0.2)] {
            let lhs = fstar.eval(&[p], &[q]);
            let rhs = f.eval(&[p], &[q]).conj();
            assert!((lhs - rhs).norm() < 1e-11);
        }
    }

    #[test]
    fn traciality_on_small_rank_one_family() {
        // |Tr(AB) − ∫ W₀⁻¹(A) W₀⁻¹(B) dμ̃| ≤ 1e−5 (small family; the full
        // indices ≤ 8 sweep runs in the acceptance suite)
        let lambda = 1.0;
        let basis = Basis::hermite(1, 8);
        for (j, k, jp, kp) in [(0usize, 0usize, 0usize, 0usize), (0, 1, 1, 0), (2, 3, 3, 2), (1, 1, 2, 2)] {
            let a = DenseMatrix::unit(basis.clone(), j, k);
            let b = DenseMatrix::unit(basis.clone(), jp, kp);
            let fa = wigner_dequantize(&a, lambda, 16);
            let fb = wigner_dequantize(&b, lambda, 16);
            let integral = wigner_pairing(&fa, &fb, 36, false).unwrap();
            let trace = if k == jp && j == kp { 1.0 } else { 0.0 };
            assert!(
                (integral - c(trace, 0.0)).norm() < 1e-5,
                "({j},{k}),({jp},{kp}): {integral} vs {trace}"
            );
        }
    }

    #[test]
    fn covariance_under_schrodinger_conjugation() {
        // W₀⁻¹(σ₀(g) A σ₀(g)⁻¹)(x) = W₀⁻¹(A)(g⁻¹·x)
        let lambda = 1.0;
        let set = IndexSet::new(1, 18);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = DenseMatrix::unit(Basis::hermite(1, 18), 1, 2);
        for _ in 0..3 {
            let g = crate::heisenberg::HeisElement::new(
                vec![rng.random_range(-0.5..0.5)],
                vec![rng.random_range(-0.5..0.5)],
                rng.random_range(-0.5..0.5),
            );
            let u = crate::heisenberg::sigma0_matrix(&g, &set, lambda, 44).unwrap();
            let ui = crate::heisenberg::sigma0_matrix(&g.inverse(), &set, lambda, 44).unwrap();
            let conj = u.mul(&a).mul(&ui);
            let f = wigner_dequantize(&a, lambda, 40);
            let fc = wigner_dequantize(&conj, lambda, 40);
            for &(p, q) in &[(0.2, 0.1), (-0.4, 0.5)] {
                let ginv = g.inverse();
                let (pb, qb) = ginv.act_on_phase(&[p], &[q], lambda);
                let lhs = fc.eval(&[p], &[q]);
                let rhs = f.eval(&pb, &qb);
                assert!((lhs - rhs).norm() < 1e-6, "covariance at ({p},{q})");
            }
        }
    }

    #[test]
    fn opvalued_quantization_respects_tensor_split() {
        // W(f₀ ⊗ f₁) = W₀(f₀) ⊗ w⁻¹(f₁): with f̂ constant in (p,q) equal to
        // B ∈ End(V), W(f) = W₀(f₀) ⊗ B blockwise.
        let set = IndexSet::new(1, 10);
        let lambda = 1.0;
        let f0 = mono(1, &[1], &[1]);
        let mut bmat = DenseMatrix::zeros(Basis::plain(2), Basis::plain(2));
        bmat.set(0, 0, c(0.3, 0.0));
        bmat.set(0, 1, c(0.1, -0.2));
        bmat.set(1, 0, c(0.1, 0.2));
        bmat.set(1, 1, c(-0.5, 0.0));
        let mut f = MatrixPhasePoly::zero(1, 2);
        for i in 0..2 {
            for j in 0..2 {
                *f.entry_mut(i, j) = f0.scaled(bmat.get(i, j));
            }
        }
        let w = weyl_quantize_opvalued(&f, &set, lambda);
        let w0 = weyl_quantize_poly(&f0, &set, lambda);
        let expect = w0.matrix.kron_v(&bmat);
        assert!(w.matrix.sub(&expect).max_norm() < 1e-13);

        // constant symbol 1 ⊗ I_V quantizes to the identity on L²⊗V
        let mut one = MatrixPhasePoly::zero(1, 2);
        for i in 0..2 {
            *one.entry_mut(i, i) = PhasePoly::constant(1, c(1.0, 0.0));
        }
        let wi = weyl_quantize_opvalued(&one, &set, lambda);
        let id = DenseMatrix::identity(Basis::Hermite {
            n: 1,
            degree: 10,
            vdim: 2,
        });
        assert!(wi.matrix.sub(&id).max_norm() < 1e-14);
    }
}
