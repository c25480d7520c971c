//! Truncated Fock space over `ℂⁿ`, coherent states and the Segal-Bargmann
//! transform pair.
//!
//! The Fock space carries the weight `e^{−|z|²/2λ} dμ_λ(z)` with
//! `dμ_λ = (2πλ)^{−n} dx dy`; monomials obey
//! `⟨z^α, z^β⟩ = δ_{αβ} (2λ)^{|α|} α!`, so the orthonormal basis is
//! `e_α(z) = z^α / √((2λ)^{|α|} α!)`.  With the λ-scaled Hermite functions of
//! [`crate::numkit`] the Segal-Bargmann transform is diagonal with phases
//! `i^{|α|}`, which pins every later basis convention.

use crate::numkit::{
    assemble_tensor_1d, gauss_hermite, Basis, DenseMatrix, IndexSet, MultiIndex,
};
use crate::par;
use crate::{C64, Error, Result};

/// `ν_α = (2λ)^{|α|} α!`, the squared norm of the monomial `z^α`.
pub fn monomial_norm_sqr(alpha: &MultiIndex, lambda: f64) -> f64 {
    (2.0 * lambda).powi(alpha.order() as i32) * alpha.factorial()
}

/// Vector of the truncated Fock space in the orthonormal monomial basis.
#[derive(Clone, Debug)]
pub struct FockVector {
    pub n: usize,
    pub degree: usize,
    pub lambda: f64,
    pub coeffs: Vec<C64>,
}

impl FockVector {
    pub fn zeros(set: &IndexSet, lambda: f64) -> Self {
        FockVector {
            n: set.n,
            degree: set.degree,
            lambda,
            coeffs: vec![C64::new(0.0, 0.0); set.len()],
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Coefficient contraction `⟨self, other⟩`.
    pub fn inner(&self, other: &FockVector) -> C64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| a * b.conj())
            .sum()
    }

    /// Polynomial evaluation `F(z) = Σ c_α e_α(z)`.
    pub fn eval(&self, set: &IndexSet, z: &[C64]) -> C64 {
        assert_eq!(set.len(), self.coeffs.len());
        self.coeffs
            .iter()
            .zip(&set.indices)
            .map(|(&c, alpha)| c * alpha.monomial(z) / monomial_norm_sqr(alpha, self.lambda).sqrt())
            .sum()
    }
}

/// Vector of the truncated Schrödinger space in the Hermite basis.
#[derive(Clone, Debug)]
pub struct SchrodingerVector {
    pub n: usize,
    pub degree: usize,
    pub lambda: f64,
    pub coeffs: Vec<C64>,
}

impl SchrodingerVector {
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Coherent state `e_z(w) = exp(z̄w/2λ)` truncated at degree `N`: the
/// coefficient on `e_α` is `z̄^α / √((2λ)^{|α|} α!)`.
pub fn coherent_state(z: &[C64], set: &IndexSet, lambda: f64) -> FockVector {
    assert_eq!(z.len(), set.n);
    let zsqr: f64 = z.iter().map(|w| w.norm_sqr()).sum();
    if zsqr / (2.0 * lambda) > set.degree as f64 / 3.0 {
        log::warn!(
            "coherent_state: |z|²/2λ = {:.2} exceeds N/3 = {:.2}; truncation unreliable",
            zsqr / (2.0 * lambda),
            set.degree as f64 / 3.0
        );
    }
    let zbar: Vec<C64> = z.iter().map(|w| w.conj()).collect();
    let coeffs = set
        .indices
        .iter()
        .map(|alpha| alpha.monomial(&zbar) / monomial_norm_sqr(alpha, lambda).sqrt())
        .collect();
    FockVector {
        n: set.n,
        degree: set.degree,
        lambda,
        coeffs,
    }
}

// ---------------------------------------------------------------------------
// Ladder matrices on the monomial basis
// ---------------------------------------------------------------------------

/// Multiplication by `z_axis`: `z_k e_α = √(2λ(α_k+1)) e_{α+e_k}`.
pub fn mult_z(set: &IndexSet, lambda: f64, axis: usize) -> DenseMatrix {
    let basis = Basis::fock(set.n, set.degree);
    let mut m = DenseMatrix::zeros(basis.clone(), basis);
    for (j, alpha) in set.indices.iter().enumerate() {
        if let Some(i) = set.position(&alpha.raised(axis)) {
            let k = alpha.0[axis] as f64;
            m.set(i, j, C64::new((2.0 * lambda * (k + 1.0)).sqrt(), 0.0));
        }
    }
    m
}

/// `∂/∂z_axis`: `∂_k e_α = √(α_k/2λ) e_{α−e_k}`.
pub fn diff_z(set: &IndexSet, lambda: f64, axis: usize) -> DenseMatrix {
    let basis = Basis::fock(set.n, set.degree);
    let mut m = DenseMatrix::zeros(basis.clone(), basis);
    for (j, alpha) in set.indices.iter().enumerate() {
        if let Some(lower) = alpha.lowered(axis) {
            let i = set.position(&lower).unwrap();
            let k = alpha.0[axis] as f64;
            m.set(i, j, C64::new((k / (2.0 * lambda)).sqrt(), 0.0));
        }
    }
    m
}

/// Shift operator `(T_w F)(z) = F(z + w)`; lowers degree, exact on the
/// truncation.
pub fn shift_op(set: &IndexSet, lambda: f64, w: &[C64]) -> DenseMatrix {
    let basis = Basis::fock(set.n, set.degree);
    let mut m = DenseMatrix::zeros(basis.clone(), basis);
    for (j, beta) in set.indices.iter().enumerate() {
        let nb = monomial_norm_sqr(beta, lambda).sqrt();
        for (i, gamma) in set.indices.iter().enumerate() {
            if !gamma.le(beta) {
                continue;
            }
            let diff = beta.minus(gamma).unwrap();
            let val = diff.monomial(w) * beta.binomial(gamma)
                * (monomial_norm_sqr(gamma, lambda).sqrt() / nb);
            m.set(i, j, val);
        }
    }
    m
}

/// Multiplication operator `F ↦ e^{w·z} F`; raises degree, exact on the
/// truncation (all contributing paths stay inside it).
pub fn mult_exp_op(set: &IndexSet, lambda: f64, w: &[C64]) -> DenseMatrix {
    let basis = Basis::fock(set.n, set.degree);
    let mut m = DenseMatrix::zeros(basis.clone(), basis);
    for (j, beta) in set.indices.iter().enumerate() {
        let nb = monomial_norm_sqr(beta, lambda).sqrt();
        for (i, alpha) in set.indices.iter().enumerate() {
            if !beta.le(alpha) {
                continue;
            }
            let diff = alpha.minus(beta).unwrap();
            let val = diff.monomial(w) / diff.factorial()
                * (monomial_norm_sqr(alpha, lambda).sqrt() / nb);
            m.set(i, j, val);
        }
    }
    m
}

// ---------------------------------------------------------------------------
// Segal-Bargmann transform
// ---------------------------------------------------------------------------

/// Smallest Gauss-Hermite order that makes the `B₀` entry integrals exact
/// (polynomial degree ≤ 2·degree after absorbing the Gaussians).
pub fn segal_bargmann_min_order(degree: usize) -> usize {
    degree + 1
}

/// The Segal-Bargmann pair `B₀ : L²(ℝⁿ) → 𝓕₀`, `B₀⁻¹ = B₀*`, materialized on
/// the truncated graded bases.
#[derive(Clone, Debug)]
pub struct SegalBargmann {
    pub n: usize,
    pub degree: usize,
    pub lambda: f64,
    forward: DenseMatrix,
    inverse: DenseMatrix,
}

impl SegalBargmann {
    /// Entries `⟨B₀ h_β, e_α⟩` by the integral kernel
    /// `(λ/π)^{n/4} e^{z²/4λ + ixz − λx²/2}`: the holomorphic factors are
    /// expanded as exact series in `z`, leaving 1D Gaussian integrals in `x`
    /// that the quadrature resolves exactly.
    pub fn new(set: &IndexSet, lambda: f64, quad_order: usize) -> Result<Self> {
        let needed = segal_bargmann_min_order(set.degree);
        if quad_order < needed {
            return Err(Error::QuadratureTooCoarse {
                order: quad_order,
                trunc: set.degree,
                needed,
            });
        }
        let rule = gauss_hermite(quad_order)?;
        let nmax = set.degree;
        // I_j(k) = ∫ x^j h_k(x) (λ/π)^{1/4} e^{−λx²/2} dx, via t = √λ x.
        let mut moments = vec![vec![0.0f64; nmax + 1]; nmax + 1];
        for (w, t) in rule.weights.iter().zip(&rule.nodes) {
            let phi = crate::numkit::hermite_phi_upto(nmax, *t);
            let mut tj = 1.0;
            for j in 0..=nmax {
                for (k, p) in phi.iter().enumerate() {
                    moments[j][k] += w * tj * p;
                }
                tj *= t;
            }
        }
        let pref = (lambda * lambda / std::f64::consts::PI).powf(0.25);
        for (j, row) in moments.iter_mut().enumerate() {
            let scale = pref * lambda.powf(-((j + 1) as f64) / 2.0);
            for v in row.iter_mut() {
                *v *= scale;
            }
        }
        // 1D entries: ⟨B₀ h_k, e_p⟩ = √((2λ)^p p!) Σ_{2m+j=p} (4λ)^{−m}/m! · i^j/j! · I_j(k)
        let mut b1 = DenseMatrix::zeros(Basis::plain(nmax + 1), Basis::plain(nmax + 1));
        for p in 0..=nmax {
            let norm = ((2.0 * lambda).powi(p as i32) * crate::numkit::factorial(p)).sqrt();
            for k in 0..=nmax {
                let mut acc = C64::new(0.0, 0.0);
                let mut m = 0usize;
                while 2 * m <= p {
                    let j = p - 2 * m;
                    let coef = (4.0 * lambda).powi(-(m as i32))
                        / crate::numkit::factorial(m)
                        / crate::numkit::factorial(j);
                    let ipow = C64::i().powu(j as u32);
                    acc += ipow * coef * moments[j][k];
                    m += 1;
                }
                b1.set(p, k, acc * norm);
            }
        }
        let ops: Vec<DenseMatrix> = vec![b1; set.n];
        let mut forward = assemble_tensor_1d(set, Basis::fock(set.n, set.degree), &ops);
        forward.row_basis = Basis::fock(set.n, set.degree);
        forward.col_basis = Basis::hermite(set.n, set.degree);
        let inverse = forward.adjoint();
        Ok(SegalBargmann {
            n: set.n,
            degree: set.degree,
            lambda,
            forward,
            inverse,
        })
    }

    /// `B₀` as a matrix (Hermite → Fock-monomial).
    pub fn matrix(&self) -> &DenseMatrix {
        &self.forward
    }

    /// `B₀⁻¹ = B₀*` (Fock-monomial → Hermite).
    pub fn inverse_matrix(&self) -> &DenseMatrix {
        &self.inverse
    }

    /// Measured diagonal phases, one per basis index.
    pub fn phases(&self) -> Vec<C64> {
        (0..self.forward.rows)
            .map(|i| self.forward.get(i, i))
            .collect()
    }

    /// Conjugate a Fock-side operator to the Hermite side: `B₀⁻¹ A B₀`.
    pub fn conj_to_hermite(&self, a: &DenseMatrix) -> DenseMatrix {
        self.inverse.mul(&a.mul(&self.forward))
    }

    /// Conjugate a Hermite-side operator to the Fock side: `B₀ A B₀⁻¹`.
    pub fn conj_to_fock(&self, a: &DenseMatrix) -> DenseMatrix {
        self.forward.mul(&a.mul(&self.inverse))
    }
}

/// `𝓕₀` inner product `⟨F, G⟩` by tensor Gauss-Hermite quadrature over the
/// `2n` real coordinates (the oracle against coefficient contraction).
pub fn inner_product_quadrature(
    f: &FockVector,
    g: &FockVector,
    set: &IndexSet,
    quad_order: usize,
) -> Result<C64> {
    let rule = gauss_hermite(quad_order)?;
    let lambda = f.lambda;
    let scale = (2.0 * lambda).sqrt();
    let npts = rule.len();
    let total = npts.pow(2 * set.n as u32);
    let pref = std::f64::consts::PI.powi(-(set.n as i32));
    let acc = par::sum_indexed(total, |flat| {
        let mut rest = flat;
        let mut z = vec![C64::new(0.0, 0.0); set.n];
        let mut w = 1.0;
        for zk in z.iter_mut() {
            let ix = rest % npts;
            rest /= npts;
            let iy = rest % npts;
            rest /= npts;
            *zk = C64::new(scale * rule.nodes[ix], scale * rule.nodes[iy]);
            w *= rule.weights[ix] * rule.weights[iy];
        }
        w * f.eval(set, &z) * g.eval(set, &z).conj()
    });
    Ok(acc * pref)
}
