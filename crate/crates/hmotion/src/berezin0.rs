//! Scalar Berezin calculus on `ℂⁿ`: symbols `S⁰`, the moment map `Φ_λ`, the
//! Berezin transform `𝓑⁰` in heat-semigroup and integral form, and the
//! unitary part `U⁰` reached through the Weyl route `U¹ = (W₀ J)⁻¹`.
//!
//! `S⁰(A)(z) = ⟨A e_z, e_z⟩ / ⟨e_z, e_z⟩` expands, for a truncated matrix,
//! into a polynomial times the Gaussian `e^{−|z|²/2λ}` ([`GaussPolySymbol`]).
//! Operators that are polynomials in the ladder generators have exact
//! polynomial symbols ([`PolySymbol`]), recovered by projection on the
//! Wick-ordered monomials `z^a ∂^b`, whose symbols are `z^a (z̄/2λ)^b`.
//!
//! The displayed kernel of `𝓑⁰` appears once with exponent `+|z−w|²/2λ` and
//! once with `−|z−w|²/2λ`; only the negative sign makes `𝓑⁰` the Gaussian
//! convolution equal to `exp(λΔ/2)`, so the negative sign is used throughout.

use crate::fock::monomial_norm_sqr;
use crate::heisenberg::HeisCoadjPoint;
use crate::numkit::{gauss_hermite, lstsq, Basis, DenseMatrix, IndexSet, MultiIndex};
use crate::weyl::{wigner_dequantize, wigner_dequantize_poly, WignerSymbol};
use crate::{C64, Error, Result};
use std::collections::BTreeMap;

/// Polynomial in `(z, z̄)`: `Σ c_{αβ} z^α z̄^β`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySymbol {
    pub n: usize,
    pub lambda: f64,
    pub coeffs: BTreeMap<(MultiIndex, MultiIndex), C64>,
}

impl PolySymbol {
    pub fn zero(n: usize, lambda: f64) -> Self {
        PolySymbol {
            n,
            lambda,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, lambda: f64, c: C64) -> Self {
        let mut p = Self::zero(n, lambda);
        p.add_term(MultiIndex::zeros(n), MultiIndex::zeros(n), c);
        p
    }

    pub fn add_term(&mut self, z_exp: MultiIndex, zbar_exp: MultiIndex, c: C64) {
        if c == C64::new(0.0, 0.0) {
            return;
        }
        *self
            .coeffs
            .entry((z_exp, zbar_exp))
            .or_insert(C64::new(0.0, 0.0)) += c;
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((a, b), &v) in &other.coeffs {
            out.add_term(a.clone(), b.clone(), v);
        }
        out
    }

    pub fn scaled(&self, s: C64) -> Self {
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            *v *= s;
        }
        out
    }

    /// Complex conjugation swaps `α ↔ β` and conjugates coefficients.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.n, self.lambda);
        for ((a, b), v) in &self.coeffs {
            out.add_term(b.clone(), a.clone(), v.conj());
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

    pub fn eval(&self, z: &[C64]) -> C64 {
        let zbar: Vec<C64> = z.iter().map(|w| w.conj()).collect();
        self.coeffs
            .iter()
            .map(|((a, b), &c)| c * a.monomial(z) * b.monomial(&zbar))
            .sum()
    }

    /// `Δ = 4 Σ_k ∂²/∂z_k ∂z̄_k` applied once.
    pub fn laplacian(&self) -> Self {
        let mut out = Self::zero(self.n, self.lambda);
        for ((a, b), &c) in &self.coeffs {
            for k in 0..self.n {
                if a.0[k] > 0 && b.0[k] > 0 {
                    let coef = 4.0 * a.0[k] as f64 * b.0[k] as f64;
                    out.add_term(
                        a.lowered(k).unwrap(),
                        b.lowered(k).unwrap(),
                        c * coef,
                    );
                }
            }
        }
        out
    }

    /// `exp(tΔ)` as the finite heat series on coefficients: after `m` loop
    /// rounds `term` holds `(t^m/m!) Δ^m f`, and `Δ` strictly lowers degree,
    /// so the series terminates.
    pub fn heat(&self, t: f64) -> Self {
        let mut out = self.clone();
        let mut term = self.clone();
        let mut m = 1.0;
        loop {
            term = term.laplacian().scaled(C64::new(t / m, 0.0));
            if term.coeffs.is_empty() {
                break;
            }
            out = out.add(&term);
            m += 1.0;
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

    /// Push forward through `j(p,q) = q − λpi`: substitute `z = q − λpi`,
    /// `z̄ = q + λpi` to get a polynomial on phase space.
    pub fn to_phase_poly(&self) -> crate::weyl::PhasePoly {
        let lambda = self.lambda;
        let mut out = crate::weyl::PhasePoly::zero(self.n);
        for ((za, zb), &c) in &self.coeffs {
            let mut terms: BTreeMap<(MultiIndex, MultiIndex), C64> = BTreeMap::new();
            terms.insert((MultiIndex::zeros(self.n), MultiIndex::zeros(self.n)), c);
            for axis in 0..self.n {
                for _ in 0..za.0[axis] {
                    terms = mul_linear_pq(&terms, axis, C64::new(0.0, -lambda), C64::new(1.0, 0.0));
                }
                for _ in 0..zb.0[axis] {
                    terms = mul_linear_pq(&terms, axis, C64::new(0.0, lambda), C64::new(1.0, 0.0));
                }
            }
            for ((pa, qb), v) in terms {
                out.add_term(pa, qb, v);
            }
        }
        out
    }
}

/// Multiply a `(p, q)` coefficient table by `cp·p_axis + cq·q_axis`.
fn mul_linear_pq(
    terms: &BTreeMap<(MultiIndex, MultiIndex), C64>,
    axis: usize,
    cp: C64,
    cq: C64,
) -> BTreeMap<(MultiIndex, MultiIndex), C64> {
    let mut out: BTreeMap<(MultiIndex, MultiIndex), C64> = BTreeMap::new();
    for ((pa, qb), &v) in terms {
        if cp != C64::new(0.0, 0.0) {
            *out.entry((pa.raised(axis), qb.clone()))
                .or_insert(C64::new(0.0, 0.0)) += v * cp;
        }
        if cq != C64::new(0.0, 0.0) {
            *out.entry((pa.clone(), qb.raised(axis)))
                .or_insert(C64::new(0.0, 0.0)) += v * cq;
        }
    }
    out
}

/// `P(z, z̄) · e^{−rate·|z|²}`; symbols of truncated operators carry
/// `rate = 1/2λ`, and the Berezin transform moves the rate (a Gaussian
/// convolution stays Gaussian), so the rate is a field, not a constant.
#[derive(Clone, Debug)]
pub struct GaussPolySymbol {
    pub poly: PolySymbol,
    pub rate: f64,
}

impl GaussPolySymbol {
    pub fn eval(&self, z: &[C64]) -> C64 {
        let zsqr: f64 = z.iter().map(|w| w.norm_sqr()).sum();
        self.poly.eval(z) * (-self.rate * zsqr).exp()
    }

    pub fn conj(&self) -> Self {
        GaussPolySymbol {
            poly: self.poly.conj(),
            rate: self.rate,
        }
    }

    /// Closed-form `∫ f dμ_λ` (requires `rate > 0`): Gaussian moments of the
    /// polynomial part by Wick contraction.
    pub fn integrate_dmu(&self) -> C64 {
        assert!(self.rate > 0.0, "integral against dμ_λ needs Gaussian decay");
        let lambda = self.poly.lambda;
        let n = self.poly.n as i32;
        // ∫ z^γ z̄^δ e^{−r|z|²} dμ_λ = δ_{γδ} γ! r^{−|γ|} (2λr)^{−n}
        let scale = (2.0 * lambda * self.rate).powi(-n);
        let mut acc = C64::new(0.0, 0.0);
        for ((a, b), &c) in &self.poly.coeffs {
            if a == b {
                acc += c * a.factorial() * self.rate.powi(-(a.order() as i32));
            }
        }
        acc * scale
    }

    /// The Berezin transform as an exact Gaussian convolution (Wick
    /// contraction of the polynomial part against the kernel
    /// `e^{−|z−w|²/2λ}` and `dμ_λ`).
    pub fn berezin_transform(&self) -> GaussPolySymbol {
        let lambda = self.poly.lambda;
        let n = self.poly.n;
        let c = self.rate + 1.0 / (2.0 * lambda);
        let mu = 1.0 / (2.0 * lambda * c); // mean scale: m = μ z
        let v = 1.0 / c; // E[ξ_k ξ̄_k]
        let scale = (2.0 * lambda * c).powi(-(n as i32));
        let new_rate = 1.0 / (2.0 * lambda) - 1.0 / (4.0 * lambda * lambda * c);
        let mut out = PolySymbol::zero(n, lambda);
        for ((alpha, beta), &coef) in &self.poly.coeffs {
            // E[(m+ξ)^α (m̄+ξ̄)^β] with matched Wick pairs γ = δ
            for gamma in sub_indices(alpha) {
                if !gamma.le(beta) {
                    continue;
                }
                let rem_a = alpha.minus(&gamma).unwrap();
                let rem_b = beta.minus(&gamma).unwrap();
                let weight = alpha.binomial(&gamma)
                    * beta.binomial(&gamma)
                    * gamma.factorial()
                    * v.powi(gamma.order() as i32)
                    * mu.powi((rem_a.order() + rem_b.order()) as i32)
                    * scale;
                out.add_term(rem_a, rem_b, coef * weight);
            }
        }
        GaussPolySymbol {
            poly: out,
            rate: new_rate,
        }
    }
}

/// All multi-indices `γ ≤ α` componentwise.
fn sub_indices(alpha: &MultiIndex) -> Vec<MultiIndex> {
    let mut out = vec![MultiIndex(vec![])];
    for &cap in &alpha.0 {
        let mut next = Vec::with_capacity(out.len() * (cap as usize + 1));
        for prefix in &out {
            for k in 0..=cap {
                let mut v = prefix.0.clone();
                v.push(k);
                next.push(MultiIndex(v));
            }
        }
        out = next;
    }
    out
}

/// `Φ_λ(z) = Σ (Re z_k X_k* + Im z_k Y_k*) + λ Z̃*`.
pub fn phi_lambda(z: &[C64], lambda: f64) -> HeisCoadjPoint {
    HeisCoadjPoint::new(
        z.iter().map(|w| w.re).collect(),
        z.iter().map(|w| w.im).collect(),
        lambda,
    )
}

/// Berezin symbol of a truncated Fock-basis operator:
/// `S⁰(A)(z) = e^{−|z|²/2λ} Σ_{αβ} A_{αβ} z^α z̄^β / √(ν_α ν_β)`.
/// Exact in coefficients, no quadrature.
pub fn berezin_symbol0(a: &DenseMatrix, set: &IndexSet, lambda: f64) -> GaussPolySymbol {
    assert!(matches!(a.row_basis, Basis::FockMonomial { .. }));
    assert_eq!(a.row_basis.vdim(), 1);
    let mut poly = PolySymbol::zero(set.n, lambda);
    for (i, alpha) in set.indices.iter().enumerate() {
        let na = monomial_norm_sqr(alpha, lambda).sqrt();
        for (j, beta) in set.indices.iter().enumerate() {
            let v = a.get(i, j);
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            let nb = monomial_norm_sqr(beta, lambda).sqrt();
            poly.add_term(alpha.clone(), beta.clone(), v / (na * nb));
        }
    }
    GaussPolySymbol {
        poly,
        rate: 1.0 / (2.0 * lambda),
    }
}

/// Exact polynomial Berezin symbol of an operator that is a polynomial in
/// the ladder generators: projection on the Wick-ordered monomials
/// `z^a ∂^b` (whose symbols are `z^a (z̄/2λ)^b`), matched on the interior
/// block.  Fails with [`Error::NotPolynomial`] otherwise.
pub fn normal_order_symbol(
    a: &DenseMatrix,
    set: &IndexSet,
    lambda: f64,
    max_degree: usize,
) -> Result<PolySymbol> {
    let singles = crate::numkit::enumerate_multi_indices(set.n, max_degree);
    let mut pairs = Vec::new();
    for za in &singles {
        for zb in &singles {
            if za.order() + zb.order() <= max_degree as u32 {
                pairs.push((za.clone(), zb.clone()));
            }
        }
    }
    let ops: Vec<DenseMatrix> = pairs
        .iter()
        .map(|(za, zb)| wick_monomial_op(za, zb, set, lambda))
        .collect();
    let margin = max_degree;
    let target = a.interior(margin);
    let rows = target.rows * target.cols;
    let mut design = DenseMatrix::zeros(Basis::plain(rows), Basis::plain(pairs.len()));
    for (col, op) in ops.iter().enumerate() {
        let inner = op.interior(margin);
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
    let mut out = PolySymbol::zero(set.n, lambda);
    for ((za, zb), c) in pairs.into_iter().zip(coeffs) {
        if c.norm() > 1e-12 * scale {
            let damp = (2.0 * lambda).powi(-(zb.order() as i32));
            out.add_term(za, zb, c * damp);
        }
    }
    Ok(out)
}

/// Matrix of the Wick monomial `z^a ∂^b` (derivatives first), assembled with
/// padding so the kept entries are exact.
fn wick_monomial_op(za: &MultiIndex, zb: &MultiIndex, set: &IndexSet, lambda: f64) -> DenseMatrix {
    let pad = (za.order() + zb.order()) as usize;
    let padded = IndexSet::new(set.n, set.degree + pad);
    let basis = Basis::fock(set.n, padded.degree);
    let mut op = DenseMatrix::identity(basis);
    for k in 0..set.n {
        for _ in 0..zb.0[k] {
            op = crate::fock::diff_z(&padded, lambda, k).mul(&op);
        }
    }
    for k in 0..set.n {
        for _ in 0..za.0[k] {
            op = crate::fock::mult_z(&padded, lambda, k).mul(&op);
        }
    }
    op.truncate_to_degree(set.degree)
}

/// Berezin transform of a polynomial symbol: the finite heat series
/// `exp(λΔ/2)` on coefficients.
pub fn berezin_transform_poly(f: &PolySymbol) -> PolySymbol {
    f.heat(f.lambda / 2.0)
}

/// Half-heat flows `exp(±λΔ/4)` on polynomial symbols (finite series).
pub fn half_heat(f: &PolySymbol, forward: bool) -> PolySymbol {
    let t = if forward { f.lambda / 4.0 } else { -f.lambda / 4.0 };
    f.heat(t)
}

/// Integral form of the Berezin transform at a point, by Gauss-Hermite
/// quadrature of the Gaussian convolution
/// `𝓑⁰(f)(z) = ∫ f(w) e^{−|z−w|²/2λ} dμ_λ(w)`; the oracle against the exact
/// coefficient forms.
pub fn berezin_transform_quadrature<F>(
    f: F,
    n: usize,
    lambda: f64,
    z: &[C64],
    order: usize,
) -> Result<C64>
where
    F: Fn(&[C64]) -> C64 + Sync + Send,
{
    gaussian_convolve(f, n, (2.0 * lambda).sqrt(), z, order)
}

/// Forward half-heat `exp(λΔ/4)` at a point by quadrature:
/// `(πλ)^{−n} ∫ f(w) e^{−|z−w|²/λ} du dv`.
pub fn half_heat_quadrature<F>(f: F, n: usize, lambda: f64, z: &[C64], order: usize) -> Result<C64>
where
    F: Fn(&[C64]) -> C64 + Sync + Send,
{
    gaussian_convolve(f, n, lambda.sqrt(), z, order)
}

/// `π^{−n} Σ w f(z + scale·t)` over the tensor Gauss-Hermite grid: the heat
/// kernel at variance `scale²/2` per real coordinate.
fn gaussian_convolve<F>(f: F, n: usize, scale: f64, z: &[C64], order: usize) -> Result<C64>
where
    F: Fn(&[C64]) -> C64 + Sync + Send,
{
    let rule = gauss_hermite(order)?;
    let npts = rule.len();
    let total = npts.pow(2 * n as u32);
    let pref = std::f64::consts::PI.powi(-(n as i32));
    let acc = crate::par::sum_indexed(total, |flat| {
        let mut rest = flat;
        let mut w = vec![C64::new(0.0, 0.0); n];
        let mut weight = 1.0;
        for (k, slot) in w.iter_mut().enumerate() {
            let ix = rest % npts;
            rest /= npts;
            let iy = rest % npts;
            rest /= npts;
            *slot = z[k] + scale * C64::new(rule.nodes[ix], rule.nodes[iy]);
            weight *= rule.weights[ix] * rule.weights[iy];
        }
        weight * f(&w)
    });
    Ok(acc * pref)
}

/// The `U⁰` symbol of a Fock-side operator through the Weyl route:
/// `U⁰(A) = W₀⁻¹(B₀⁻¹ A B₀) ∘ j⁻¹` with `j(p,q) = q − λpi`
/// (so `j⁻¹(z) = (−Im z/λ, Re z)`).
#[derive(Clone, Debug)]
pub struct WeylRouteSymbol {
    pub lambda: f64,
    hermite_side: DenseMatrix,
    set: IndexSet,
    wigner: WignerSymbol,
}

impl WeylRouteSymbol {
    /// Pointwise evaluation (Hilbert-Schmidt operators).
    pub fn eval(&self, z: &[C64]) -> C64 {
        let p: Vec<f64> = z.iter().map(|w| -w.im / self.lambda).collect();
        let q: Vec<f64> = z.iter().map(|w| w.re).collect();
        self.wigner.eval(&p, &q)
    }

    /// Exact polynomial form (ladder-polynomial operators).
    pub fn to_poly(&self, max_degree: usize) -> Result<PolySymbol> {
        let f = wigner_dequantize_poly(&self.hermite_side, &self.set, self.lambda, max_degree)?;
        Ok(f.to_plane_symbol(self.lambda))
    }
}

/// `U⁰` via the Weyl route (`U¹ = (W₀J)⁻¹` transported by `B₀`).
pub fn u0_via_weyl(
    a: &DenseMatrix,
    sb: &crate::fock::SegalBargmann,
    quad_order: usize,
) -> WeylRouteSymbol {
    let hermite_side = sb.conj_to_hermite(a);
    let set = IndexSet::new(sb.n, sb.degree);
    let wigner = wigner_dequantize(&hermite_side, sb.lambda, quad_order);
    WeylRouteSymbol {
        lambda: sb.lambda,
        hermite_side,
        set,
        wigner,
    }
}
