//! The Heisenberg group `H_n`, its Lie algebra and coadjoint action, and the
//! two classical models: `σ₀` on `L²(ℝⁿ)` (Schrödinger) and `π₀` on the Fock
//! space (Bargmann-Fock), with their differentials.
//!
//! Basis conventions: `{X_k, Y_k, Z̃}` with `[X_k, Y_k] = Z̃`; `[a, b, c]`
//! denotes `exp(Σ a_k X_k + Σ b_k Y_k + c Z̃)`.  The group law is
//! `[a,b,c]·[a',b',c'] = [a+a', b+b', c+c'+½(ab'−a'b)]`, the real form of the
//! symplectic cocycle `½ω`.

use crate::fock::{diff_z, mult_exp_op, mult_z, shift_op};
use crate::numkit::{
    gauss_hermite, hermite_diff, hermite_mult_x, hermite_phi_upto, Basis, DenseMatrix, IndexSet,
};
use crate::{C64, Error, Result};

/// Group element `[a, b, c]`.
#[derive(Clone, Debug, PartialEq)]
pub struct HeisElement {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: f64,
}

impl HeisElement {
    pub fn new(a: Vec<f64>, b: Vec<f64>, c: f64) -> Self {
        assert_eq!(a.len(), b.len(), "dimension mismatch in [a,b,c]");
        HeisElement { a, b, c }
    }

    pub fn identity(n: usize) -> Self {
        HeisElement::new(vec![0.0; n], vec![0.0; n], 0.0)
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// Complex coordinate `z₀ = a + ib` of the `(z, z̄, c)` presentation.
    pub fn z(&self) -> Vec<C64> {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(&x, &y)| C64::new(x, y))
            .collect()
    }

    pub fn from_z(z: &[C64], c: f64) -> Self {
        HeisElement::new(
            z.iter().map(|w| w.re).collect(),
            z.iter().map(|w| w.im).collect(),
            c,
        )
    }

    pub fn inverse(&self) -> Self {
        HeisElement::new(
            self.a.iter().map(|v| -v).collect(),
            self.b.iter().map(|v| -v).collect(),
            -self.c,
        )
    }

    /// Action on `ℂⁿ`: `g·z = z + λ(b − ia)`.
    pub fn act_on_plane(&self, z: &[C64], lambda: f64) -> Vec<C64> {
        z.iter()
            .zip(self.a.iter().zip(&self.b))
            .map(|(&zk, (&ak, &bk))| zk + lambda * C64::new(bk, -ak))
            .collect()
    }

    /// Action on phase space: `g·(p,q) = (p + a, q + λb)`.
    pub fn act_on_phase(&self, p: &[f64], q: &[f64], lambda: f64) -> (Vec<f64>, Vec<f64>) {
        (
            p.iter().zip(&self.a).map(|(x, a)| x + a).collect(),
            q.iter().zip(&self.b).map(|(x, b)| x + lambda * b).collect(),
        )
    }
}

/// Lie algebra element in the basis `{X_k, Y_k, Z̃}`.
#[derive(Clone, Debug, PartialEq)]
pub struct HeisAlgElement {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: f64,
}

impl HeisAlgElement {
    pub fn new(a: Vec<f64>, b: Vec<f64>, c: f64) -> Self {
        assert_eq!(a.len(), b.len(), "dimension mismatch");
        HeisAlgElement { a, b, c }
    }

    pub fn x(n: usize, k: usize) -> Self {
        let mut a = vec![0.0; n];
        a[k] = 1.0;
        HeisAlgElement::new(a, vec![0.0; n], 0.0)
    }

    pub fn y(n: usize, k: usize) -> Self {
        let mut b = vec![0.0; n];
        b[k] = 1.0;
        HeisAlgElement::new(vec![0.0; n], b, 0.0)
    }

    pub fn z_tilde(n: usize) -> Self {
        HeisAlgElement::new(vec![0.0; n], vec![0.0; n], 1.0)
    }

    /// The `2n+1` basis elements `X_1..X_n, Y_1..Y_n, Z̃`.
    pub fn basis(n: usize) -> Vec<Self> {
        let mut out: Vec<Self> = (0..n).map(|k| Self::x(n, k)).collect();
        out.extend((0..n).map(|k| Self::y(n, k)));
        out.push(Self::z_tilde(n));
        out
    }

    /// `[X, Y]`: central with `c = a·b' − a'·b`.
    pub fn bracket(&self, other: &Self) -> Self {
        let n = self.a.len();
        let c = dot(&self.a, &other.b) - dot(&other.a, &self.b);
        HeisAlgElement::new(vec![0.0; n], vec![0.0; n], c)
    }
}

/// Coadjoint point `(α, β, γ)` in the dual basis.
#[derive(Clone, Debug, PartialEq)]
pub struct HeisCoadjPoint {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: f64,
}

impl HeisCoadjPoint {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, gamma: f64) -> Self {
        assert_eq!(alpha.len(), beta.len());
        HeisCoadjPoint { alpha, beta, gamma }
    }

    /// Bilinear pairing `⟨ξ, X⟩ = α·a + β·b + γc`.
    pub fn pair(&self, x: &HeisAlgElement) -> f64 {
        dot(&self.alpha, &x.a) + dot(&self.beta, &x.b) + self.gamma * x.c
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        let mut m = (self.gamma - other.gamma).abs();
        for (a, b) in self.alpha.iter().zip(&other.alpha) {
            m = m.max((a - b).abs());
        }
        for (a, b) in self.beta.iter().zip(&other.beta) {
            m = m.max((a - b).abs());
        }
        m
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Group product with the `½ω` central correction.
pub fn h_mul(g: &HeisElement, h: &HeisElement) -> HeisElement {
    assert_eq!(g.n(), h.n(), "dimension mismatch in h_mul");
    let a: Vec<f64> = g.a.iter().zip(&h.a).map(|(x, y)| x + y).collect();
    let b: Vec<f64> = g.b.iter().zip(&h.b).map(|(x, y)| x + y).collect();
    let c = g.c + h.c + 0.5 * (dot(&g.a, &h.b) - dot(&h.a, &g.b));
    HeisElement::new(a, b, c)
}

/// Coadjoint action `Ad*([a,b,c])(α, β, γ) = (α + γb, β − γa, γ)`.
pub fn h_coadjoint(g: &HeisElement, xi: &HeisCoadjPoint) -> HeisCoadjPoint {
    let alpha = xi
        .alpha
        .iter()
        .zip(&g.b)
        .map(|(al, b)| al + xi.gamma * b)
        .collect();
    let beta = xi
        .beta
        .iter()
        .zip(&g.a)
        .map(|(be, a)| be - xi.gamma * a)
        .collect();
    HeisCoadjPoint::new(alpha, beta, xi.gamma)
}

/// Declared bound on the quadrature order needed by [`sigma0_matrix`] at a
/// given truncation: the polynomial part is exact from `N + 1` on; the small
/// margin absorbs the oscillatory factor at `|b| ≤ 1`.
pub fn sigma0_min_order(degree: usize) -> usize {
    degree + 4
}

/// Matrix of `σ₀(g) f(x) = e^{iλ(c − bx + ½ab)} f(x − a)` on the graded
/// Hermite basis, by per-axis Gauss-Hermite quadrature.
pub fn sigma0_matrix(
    g: &HeisElement,
    set: &IndexSet,
    lambda: f64,
    quad_order: usize,
) -> Result<DenseMatrix> {
    assert!(lambda > 0.0, "λ must be positive");
    let needed = sigma0_min_order(set.degree);
    if quad_order < needed {
        return Err(Error::QuadratureTooCoarse {
            order: quad_order,
            trunc: set.degree,
            needed,
        });
    }
    let rule = gauss_hermite(quad_order)?;
    let nmax = set.degree;
    // Per-axis 1D cross matrices
    //   I(j, i) = ∫ h_j(x) h_i(x − a) e^{−iλbx} dx
    //           = e^{−λa²/4 − iλab/2} Σ_q w_q φ_i(t_q − u) φ_j(t_q + u) e^{−i√λ b t_q}
    // with x = a/2 + t/√λ and u = √λ a / 2; the Gaussians are absorbed exactly.
    let mut axis_ops = Vec::with_capacity(set.n);
    for k in 0..set.n {
        let (a, b) = (g.a[k], g.b[k]);
        let u = lambda.sqrt() * a / 2.0;
        let mut m = DenseMatrix::zeros(Basis::plain(nmax + 1), Basis::plain(nmax + 1));
        for (w, t) in rule.weights.iter().zip(&rule.nodes) {
            let phi_i = hermite_phi_upto(nmax, t - u);
            let phi_j = hermite_phi_upto(nmax, t + u);
            let osc = C64::from_polar(1.0, -lambda.sqrt() * b * t);
            for j in 0..=nmax {
                let wj = *w * phi_j[j];
                for i in 0..=nmax {
                    m.add_to(j, i, wj * phi_i[i] * osc);
                }
            }
        }
        let pref = C64::from_polar((-lambda * a * a / 4.0).exp(), -lambda * a * b / 2.0);
        axis_ops.push(m.scaled(pref));
    }
    let basis = Basis::hermite(set.n, set.degree);
    let mut out = crate::numkit::assemble_tensor_1d(set, basis, &axis_ops);
    // prefactor e^{iλ(c + ab/2)}; the per-axis e^{−iλab/2} factors cancel the
    // symmetrization shift, leaving e^{iλc} overall.
    let phase = C64::from_polar(1.0, lambda * (g.c + 0.5 * dot(&g.a, &g.b)));
    out = out.scaled(phase);
    Ok(out)
}

/// Matrix of `dσ₀(X) = −Σ a_k ∂_k − iλ b·x + iλc` from the Hermite ladder
/// identities; no quadrature.
pub fn dsigma0_matrix(x: &HeisAlgElement, set: &IndexSet, lambda: f64) -> DenseMatrix {
    assert!(lambda > 0.0);
    let basis = Basis::hermite(set.n, set.degree);
    let mut out = DenseMatrix::identity(basis).scaled(C64::new(0.0, lambda * x.c));
    for k in 0..set.n {
        if x.a[k] != 0.0 {
            out = out.add(&hermite_diff(set, lambda, k).scaled(C64::new(-x.a[k], 0.0)));
        }
        if x.b[k] != 0.0 {
            out = out.add(&hermite_mult_x(set, lambda, k).scaled(C64::new(0.0, -lambda * x.b[k])));
        }
    }
    out
}

/// Matrix of `π₀(g)` on the orthonormal monomial basis.
///
/// `π₀(g) F(z) = e^{iλc + ½i z̄₀·z − ¼λ|z₀|²} F(z + iλz₀)` with `z₀ = a + ib`;
/// assembled exactly as (scalar) × (multiplication by `e^{½i z̄₀·z}`) ×
/// (shift by `iλz₀`): both factors are graded-triangular, so every entry of
/// the truncated matrix is an entry of the untruncated operator.
pub fn pi0_matrix(g: &HeisElement, set: &IndexSet, lambda: f64) -> DenseMatrix {
    assert!(lambda > 0.0);
    let z0 = g.z();
    let zsqr: f64 = z0.iter().map(|w| w.norm_sqr()).sum();
    let scalar = C64::from_polar((-lambda * zsqr / 4.0).exp(), lambda * g.c);
    let mult_w: Vec<C64> = z0.iter().map(|w| C64::new(0.0, 0.5) * w.conj()).collect();
    let shift_w: Vec<C64> = z0.iter().map(|w| C64::new(0.0, lambda) * w).collect();
    let m = mult_exp_op(set, lambda, &mult_w);
    let t = shift_op(set, lambda, &shift_w);
    m.mul(&t).scaled(scalar)
}

/// Matrix of `dπ₀(X)`: exact sparse ladder assembly of
/// `dπ₀(X_k) = ½i z_k + iλ ∂_k`, `dπ₀(Y_k) = ½ z_k − λ ∂_k`,
/// `dπ₀(Z̃) = iλ`.
pub fn dpi0_matrix(x: &HeisAlgElement, set: &IndexSet, lambda: f64) -> DenseMatrix {
    assert!(lambda > 0.0);
    let basis = Basis::fock(set.n, set.degree);
    let mut out = DenseMatrix::identity(basis).scaled(C64::new(0.0, lambda * x.c));
    for k in 0..set.n {
        let (ak, bk) = (x.a[k], x.b[k]);
        if ak != 0.0 || bk != 0.0 {
            let zc = C64::new(0.5 * bk, 0.5 * ak);
            let dc = C64::new(-lambda * bk, lambda * ak);
            out = out.add(&mult_z(set, lambda, k).scaled(zc));
            out = out.add(&diff_z(set, lambda, k).scaled(dc));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub(crate) fn random_heis(rng: &mut ChaCha8Rng, n: usize) -> HeisElement {
        HeisElement::new(
            (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
            (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
            rng.random_range(-1.0..1.0),
        )
    }

    #[test]
    fn group_identity_and_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [1usize, 2, 3] {
            let g = random_heis(&mut rng, n);
            let e = HeisElement::identity(n);
            assert_eq!(h_mul(&g, &e), g);
            assert_eq!(h_mul(&e, &g), g);
            let gi = h_mul(&g, &g.inverse());
            assert!(gi.c.abs() < 1e-15);
            assert!(gi.a.iter().all(|v| v.abs() < 1e-15));
        }
    }

    #[test]
    fn commutator_is_central_ab() {
        // [a,0,0]·[0,b,0]·[a,0,0]⁻¹·[0,b,0]⁻¹ = [0,0,ab]
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [1usize, 2] {
            let a: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let ga = HeisElement::new(a.clone(), vec![0.0; n], 0.0);
            let gb = HeisElement::new(vec![0.0; n], b.clone(), 0.0);
            let comm = h_mul(&h_mul(&h_mul(&ga, &gb), &ga.inverse()), &gb.inverse());
            let ab: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
            assert!(comm.a.iter().all(|v| v.abs() < 1e-15));
            assert!(comm.b.iter().all(|v| v.abs() < 1e-15));
            assert!((comm.c - ab).abs() < 1e-13);
        }
    }

    #[test]
    fn associativity_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let (g1, g2, g3) = (
                random_heis(&mut rng, 2),
                random_heis(&mut rng, 2),
                random_heis(&mut rng, 2),
            );
            let left = h_mul(&h_mul(&g1, &g2), &g3);
            let right = h_mul(&g1, &h_mul(&g2, &g3));
            assert!((left.c - right.c).abs() < 1e-12);
            for (x, y) in left.a.iter().zip(&right.a) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn coadjoint_fixes_gamma_zero_and_central_orbit() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = random_heis(&mut rng, 2);
        let xi = HeisCoadjPoint::new(vec![0.3, -0.1], vec![0.7, 0.2], 0.0);
        assert_eq!(h_coadjoint(&g, &xi), xi);

        // Ad*([a,b,c]) λZ̃* = (λb, −λa, λ)
        let lambda = 0.9;
        let xi = HeisCoadjPoint::new(vec![0.0; 2], vec![0.0; 2], lambda);
        let moved = h_coadjoint(&g, &xi);
        for k in 0..2 {
            assert!((moved.alpha[k] - lambda * g.b[k]).abs() < 1e-15);
            assert!((moved.beta[k] + lambda * g.a[k]).abs() < 1e-15);
        }
        assert_eq!(moved.gamma, lambda);
    }

    #[test]
    fn coadjoint_is_group_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let g1 = random_heis(&mut rng, 2);
            let g2 = random_heis(&mut rng, 2);
            let xi = HeisCoadjPoint::new(
                (0..2).map(|_| rng.random_range(-1.0..1.0)).collect(),
                (0..2).map(|_| rng.random_range(-1.0..1.0)).collect(),
                rng.random_range(-1.0..1.0),
            );
            let lhs = h_coadjoint(&h_mul(&g1, &g2), &xi);
            let rhs = h_coadjoint(&g1, &h_coadjoint(&g2, &xi));
            assert!(lhs.max_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn sigma0_of_center_is_character() {
        let set = IndexSet::new(1, 10);
        let lambda = 1.0;
        let g = HeisElement::new(vec![0.0], vec![0.0], 0.8);
        let m = sigma0_matrix(&g, &set, lambda, 30).unwrap();
        let expect =
            DenseMatrix::identity(Basis::hermite(1, 10)).scaled(C64::from_polar(1.0, lambda * 0.8));
        assert!(m.sub(&expect).max_norm() < 1e-12);
    }

    #[test]
    fn sigma0_unitary_on_interior() {
        // displacement leaks across all degrees, so the unitarity defect
        // decays like a coherent tail; margin 14 keeps it below 1e−8 for
        // |a|, |b| ≤ 1 samples
        let set = IndexSet::new(1, 24);
        let lambda = 1.0;
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..3 {
            let g = random_heis(&mut rng, 1);
            let m = sigma0_matrix(&g, &set, lambda, 50).unwrap();
            let prod = m.adjoint().mul(&m).interior(14);
            let id = DenseMatrix::identity(prod.row_basis.clone());
            assert!(prod.sub(&id).max_norm() < 1e-8, "σ₀ not unitary inside");
        }
    }

    #[test]
    fn sigma0_homomorphism_on_interior() {
        let set = IndexSet::new(1, 22);
        let lambda = 1.0;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..3 {
            let g1 = random_heis(&mut rng, 1);
            let g2 = random_heis(&mut rng, 1);
            let prod = sigma0_matrix(&g1, &set, lambda, 48)
                .unwrap()
                .mul(&sigma0_matrix(&g2, &set, lambda, 48).unwrap());
            let direct = sigma0_matrix(&h_mul(&g1, &g2), &set, lambda, 48).unwrap();
            let resid = prod.sub(&direct).interior(12).max_norm();
            assert!(resid < 1e-6, "homomorphism residual {resid}");
        }
    }

    #[test]
    fn sigma0_rejects_coarse_quadrature() {
        let set = IndexSet::new(1, 24);
        let g = HeisElement::identity(1);
        assert!(matches!(
            sigma0_matrix(&g, &set, 1.0, 12),
            Err(Error::QuadratureTooCoarse { .. })
        ));
    }

    #[test]
    fn dsigma0_of_center_and_brackets() {
        let set = IndexSet::new(1, 14);
        let lambda = 0.7;
        let z = dsigma0_matrix(&HeisAlgElement::z_tilde(1), &set, lambda);
        let id = DenseMatrix::identity(Basis::hermite(1, 14)).scaled(c(0.0, lambda));
        assert!(z.sub(&id).max_norm() < 1e-14);

        // [dσ₀(X₁), dσ₀(Y₁)] = iλ I on the interior block
        let dx = dsigma0_matrix(&HeisAlgElement::x(1, 0), &set, lambda);
        let dy = dsigma0_matrix(&HeisAlgElement::y(1, 0), &set, lambda);
        let comm = dx.commutator(&dy).interior(2);
        let expect = DenseMatrix::identity(comm.row_basis.clone()).scaled(c(0.0, lambda));
        assert!(comm.sub(&expect).max_norm() < 1e-12);
        // skew-Hermitian on the interior
        assert!(dx.add(&dx.adjoint()).interior(2).max_norm() < 1e-13);
        assert!(dy.add(&dy.adjoint()).interior(2).max_norm() < 1e-13);
    }

    #[test]
    fn pi0_of_center_is_character() {
        let set = IndexSet::new(2, 6);
        let lambda = 1.2;
        let g = HeisElement::new(vec![0.0; 2], vec![0.0; 2], -0.4);
        let m = pi0_matrix(&g, &set, lambda);
        let expect = DenseMatrix::identity(Basis::fock(2, 6))
            .scaled(C64::from_polar(1.0, -lambda * 0.4));
        assert!(m.sub(&expect).max_norm() < 1e-14);
    }

    #[test]
    fn pi0_vacuum_column_matches_taylor_oracle() {
        // π₀(g) e₀ (z) = e^{iλc − λ|z₀|²/4} e^{½i z̄₀ z}; its orthonormal
        // coefficients are e^{iλc − λ|z₀|²/4} (i z̄₀/2)^γ √(ν_γ)/γ!.
        let set = IndexSet::new(1, 16);
        let lambda = 1.0;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let g = random_heis(&mut rng, 1);
            let m = pi0_matrix(&g, &set, lambda);
            let z0 = g.z()[0];
            let pref = C64::from_polar((-lambda * z0.norm_sqr() / 4.0).exp(), lambda * g.c);
            for (gi, gamma) in set.indices.iter().enumerate() {
                let gq = gamma.0[0];
                let w = (c(0.0, 0.5) * z0.conj()).powu(gq);
                let coeff = pref * w / crate::numkit::factorial(gq as usize)
                    * crate::fock::monomial_norm_sqr(gamma, lambda).sqrt();
                assert!(
                    (m.get(gi, 0) - coeff).norm() < 1e-12,
                    "γ = {gq}: {} vs {coeff}",
                    m.get(gi, 0)
                );
            }
        }
    }

    #[test]
    fn pi0_homomorphism_on_interior() {
        let set = IndexSet::new(1, 22);
        let lambda = 1.0;
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..5 {
            let g1 = random_heis(&mut rng, 1);
            let g2 = random_heis(&mut rng, 1);
            let prod = pi0_matrix(&g1, &set, lambda).mul(&pi0_matrix(&g2, &set, lambda));
            let direct = pi0_matrix(&h_mul(&g1, &g2), &set, lambda);
            let resid = prod.sub(&direct).interior(12).max_norm();
            assert!(resid < 1e-6, "π₀ homomorphism residual {resid}");
        }
    }

    #[test]
    fn pi0_unitary_on_interior() {
        let set = IndexSet::new(1, 18);
        let lambda = 1.0;
        let g = HeisElement::new(vec![0.5], vec![-0.4], 0.3);
        let m = pi0_matrix(&g, &set, lambda);
        let prod = m.adjoint().mul(&m).interior(8);
        let id = DenseMatrix::identity(prod.row_basis.clone());
        assert!(prod.sub(&id).max_norm() < 1e-6);
    }

    #[test]
    fn dpi0_of_center_and_brackets() {
        let set = IndexSet::new(1, 12);
        let lambda = 1.4;
        let z = dpi0_matrix(&HeisAlgElement::z_tilde(1), &set, lambda);
        let expect = DenseMatrix::identity(Basis::fock(1, 12)).scaled(c(0.0, lambda));
        assert!(z.sub(&expect).max_norm() < 1e-14);

        let dx = dpi0_matrix(&HeisAlgElement::x(1, 0), &set, lambda);
        let dy = dpi0_matrix(&HeisAlgElement::y(1, 0), &set, lambda);
        let comm = dx.commutator(&dy).interior(2);
        let id = DenseMatrix::identity(comm.row_basis.clone()).scaled(c(0.0, lambda));
        assert!(comm.sub(&id).max_norm() < 1e-12);
    }

    #[test]
    fn bracket_compatibility_all_basis_pairs() {
        let set = IndexSet::new(2, 8);
        let lambda = 1.0;
        let basis = HeisAlgElement::basis(2);
        for xi in &basis {
            for yj in &basis {
                let br = xi.bracket(yj);
                let lhs = dpi0_matrix(xi, &set, lambda)
                    .commutator(&dpi0_matrix(yj, &set, lambda))
                    .interior(2);
                let rhs = dpi0_matrix(&br, &set, lambda).interior(2);
                assert!(lhs.sub(&rhs).max_norm() < 1e-12);

                let lhs_s = dsigma0_matrix(xi, &set, lambda)
                    .commutator(&dsigma0_matrix(yj, &set, lambda))
                    .interior(2);
                let rhs_s = dsigma0_matrix(&br, &set, lambda).interior(2);
                assert!(lhs_s.sub(&rhs_s).max_norm() < 1e-12);
            }
        }
    }

    #[test]
    fn segal_bargmann_intertwines_the_models() {
        // B₀ dσ₀(X) = dπ₀(X) B₀ and σ₀/π₀ conjugation on the interior block.
        let set = IndexSet::new(1, 20);
        let lambda = 1.0;
        let sb = crate::fock::SegalBargmann::new(&set, lambda, 44).unwrap();
        for x in HeisAlgElement::basis(1) {
            let lhs = sb.matrix().mul(&dsigma0_matrix(&x, &set, lambda));
            let rhs = dpi0_matrix(&x, &set, lambda).mul(sb.matrix());
            let resid = lhs.sub(&rhs).interior(4).max_norm();
            assert!(resid < 1e-6, "intertwining residual {resid}");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..3 {
            let g = random_heis(&mut rng, 1);
            let lhs = sb.conj_to_fock(&sigma0_matrix(&g, &set, lambda, 44).unwrap());
            let rhs = pi0_matrix(&g, &set, lambda);
            let resid = lhs.sub(&rhs).interior(6).max_norm();
            assert!(resid < 1e-6, "σ₀→π₀ conjugation residual {resid}");
        }
    }
}
