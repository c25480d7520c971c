//! The compact factor `K`: the torus `U(1)ⁿ` or `SU(2) ⊂ U(2)`, its
//! irreducible representation `(ρ, V)`, the coadjoint orbit `o(φ₀)` of the
//! highest-weight functional, orbit coherent states, and the small Berezin
//! calculus `s`, `b = ss*`, `w = b^{−1/2}s`.
//!
//! `𝔨*` is represented concretely by coordinate vectors against a fixed
//! basis of `𝔨` — `iE_kk` for the torus, `iσ_k/2` for `su(2)` — and all
//! pairings evaluate against that basis.  The orbit measure `ν` is the
//! normalized invariant surface measure scaled by one calibration constant
//! `γ` fixed so that `∫ w(I) w(I) dν = dim V` (trace duality).

use crate::numkit::{
    exp_anti_hermitian, gauss_legendre, hermitian_eig, hermitian_power, Basis, DenseMatrix,
};
use crate::{C64, Error, Result};

/// Which compact group, and which irreducible representation.
#[derive(Clone, Debug, PartialEq)]
pub enum CompactChoice {
    /// `K = U(1)ⁿ` with the character `ρ(diag e^{iθ_k}) = e^{i m·θ}`.
    Torus { weights: Vec<i64> },
    /// `K = SU(2) ⊂ U(2)` with the spin-`j` representation, `two_j = 2j`.
    Su2 { two_j: u32 },
}

impl CompactChoice {
    pub fn torus(weights: Vec<i64>) -> Self {
        CompactChoice::Torus { weights }
    }

    pub fn su2(two_j: u32) -> Self {
        CompactChoice::Su2 { two_j }
    }

    /// Dimension `n` of the underlying `ℂⁿ` the group acts on.
    pub fn n(&self) -> usize {
        match self {
            CompactChoice::Torus { weights } => weights.len(),
            CompactChoice::Su2 { .. } => 2,
        }
    }

    /// `dim V`.
    pub fn vdim(&self) -> usize {
        match self {
            CompactChoice::Torus { .. } => 1,
            CompactChoice::Su2 { two_j } => *two_j as usize + 1,
        }
    }

    /// Number of basis elements of `𝔨`.
    pub fn k_dim(&self) -> usize {
        match self {
            CompactChoice::Torus { weights } => weights.len(),
            CompactChoice::Su2 { .. } => 3,
        }
    }

    /// Torus with all weights zero: `ρ` is trivial, and with identity
    /// compact parts the motion-group machinery reduces bit for bit to the
    /// scalar Heisenberg case.
    pub fn is_scalar_reduction(&self) -> bool {
        matches!(self, CompactChoice::Torus { weights } if weights.iter().all(|&m| m == 0))
    }
}

/// Element of `K` as a unitary `n × n` matrix.
#[derive(Clone, Debug)]
pub struct KElement {
    pub mat: DenseMatrix,
}

impl KElement {
    pub fn identity(choice: &CompactChoice) -> Self {
        KElement {
            mat: DenseMatrix::identity(Basis::plain(choice.n())),
        }
    }

    pub fn inverse(&self) -> Self {
        KElement {
            mat: self.mat.adjoint(),
        }
    }

    pub fn mul(&self, other: &KElement) -> Self {
        KElement {
            mat: self.mat.mul(&other.mat),
        }
    }

    /// Torus element `diag(e^{iθ_k})`.
    pub fn torus(theta: &[f64]) -> Self {
        let n = theta.len();
        let mut m = DenseMatrix::zeros(Basis::plain(n), Basis::plain(n));
        for (k, &t) in theta.iter().enumerate() {
            m.set(k, k, C64::from_polar(1.0, t));
        }
        KElement { mat: m }
    }

    /// SU(2) section element `k(θ, ϕ) = exp(−ϕA₃) exp(−θA₂)` taking the
    /// north pole of the orbit to spherical angles `(θ, ϕ)`.
    pub fn su2_from_angles(theta: f64, phi: f64) -> Self {
        let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let ep = C64::from_polar(1.0, -phi / 2.0);
        let em = C64::from_polar(1.0, phi / 2.0);
        let mut m = DenseMatrix::zeros(Basis::plain(2), Basis::plain(2));
        // exp(−ϕA₃) = diag(e^{−iϕ/2}, e^{iϕ/2}); exp(−θA₂) = [[c, −s], [s, c]]
        m.set(0, 0, ep * ct);
        m.set(0, 1, ep * (-st));
        m.set(1, 0, em * st);
        m.set(1, 1, em * ct);
        KElement { mat: m }
    }

    /// Membership residual in the chosen `K`.
    pub fn membership_residual(&self, choice: &CompactChoice) -> f64 {
        let n = choice.n();
        if self.mat.rows != n {
            return f64::INFINITY;
        }
        let id = DenseMatrix::identity(Basis::plain(n));
        let unitary = self.mat.adjoint().mul(&self.mat).sub(&id).max_norm();
        match choice {
            CompactChoice::Torus { .. } => {
                let mut off = 0.0f64;
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            off = off.max(self.mat.get(i, j).norm());
                        }
                    }
                }
                unitary.max(off)
            }
            CompactChoice::Su2 { .. } => {
                let det = self.mat.get(0, 0) * self.mat.get(1, 1)
                    - self.mat.get(0, 1) * self.mat.get(1, 0);
                unitary.max((det - C64::new(1.0, 0.0)).norm())
            }
        }
    }

    pub fn check_membership(&self, choice: &CompactChoice) -> Result<()> {
        let r = self.membership_residual(choice);
        if r > 1e-12 {
            return Err(Error::NotInGroup {
                group: match choice {
                    CompactChoice::Torus { .. } => "U(1)^n",
                    CompactChoice::Su2 { .. } => "SU(2)",
                },
                residual: r,
            });
        }
        Ok(())
    }
}

/// Element of `𝔨` as an anti-Hermitian `n × n` matrix.
#[derive(Clone, Debug)]
pub struct KAlgElement {
    pub mat: DenseMatrix,
}

impl KAlgElement {
    pub fn zero(choice: &CompactChoice) -> Self {
        let n = choice.n();
        KAlgElement {
            mat: DenseMatrix::zeros(Basis::plain(n), Basis::plain(n)),
        }
    }

    pub fn bracket(&self, other: &KAlgElement) -> KAlgElement {
        KAlgElement {
            mat: self.mat.commutator(&other.mat),
        }
    }

    pub fn exp(&self) -> KElement {
        KElement {
            mat: exp_anti_hermitian(&self.mat),
        }
    }
}

/// Fixed basis of `𝔨`: `T_k = iE_kk` (torus) or `A_k = iσ_k/2` (su(2)).
pub fn k_basis(choice: &CompactChoice) -> Vec<KAlgElement> {
    match choice {
        CompactChoice::Torus { weights } => {
            let n = weights.len();
            (0..n)
                .map(|k| {
                    let mut m = DenseMatrix::zeros(Basis::plain(n), Basis::plain(n));
                    m.set(k, k, C64::i());
                    KAlgElement { mat: m }
                })
                .collect()
        }
        CompactChoice::Su2 { .. } => {
            let half_i = C64::new(0.0, 0.5);
            let mut a1 = DenseMatrix::zeros(Basis::plain(2), Basis::plain(2));
            a1.set(0, 1, half_i);
            a1.set(1, 0, half_i);
            let mut a2 = DenseMatrix::zeros(Basis::plain(2), Basis::plain(2));
            a2.set(0, 1, C64::new(0.5, 0.0));
            a2.set(1, 0, C64::new(-0.5, 0.0));
            let mut a3 = DenseMatrix::zeros(Basis::plain(2), Basis::plain(2));
            a3.set(0, 0, half_i);
            a3.set(1, 1, -half_i);
            vec![
                KAlgElement { mat: a1 },
                KAlgElement { mat: a2 },
                KAlgElement { mat: a3 },
            ]
        }
    }
}

/// Coordinates of an anti-Hermitian matrix against the fixed `𝔨` basis
/// (the basis is trace-orthogonal, so this is one inner product per slot).
pub fn k_expand(choice: &CompactChoice, m: &DenseMatrix) -> Vec<f64> {
    k_basis(choice)
        .iter()
        .map(|a| {
            let norm = a.mat.hs_inner(&a.mat).re;
            (m.hs_inner(&a.mat).re) / norm
        })
        .collect()
}

/// Linear combination `Σ c_k A_k` of the `𝔨` basis.
pub fn k_combine(choice: &CompactChoice, coords: &[f64]) -> KAlgElement {
    let basis = k_basis(choice);
    let n = choice.n();
    let mut m = DenseMatrix::zeros(Basis::plain(n), Basis::plain(n));
    for (a, &c) in basis.iter().zip(coords) {
        m = m.add(&a.mat.scaled(C64::new(c, 0.0)));
    }
    KAlgElement { mat: m }
}

/// Coadjoint action of `K` on `𝔨*` coordinates:
/// `⟨Ad*(k)φ, A⟩ = ⟨φ, k⁻¹Ak⟩`.
pub fn k_coadjoint(choice: &CompactChoice, k: &KElement, phi: &[f64]) -> Vec<f64> {
    let basis = k_basis(choice);
    let kinv = k.inverse();
    (0..basis.len())
        .map(|i| {
            let moved = kinv.mat.mul(&basis[i].mat).mul(&k.mat);
            let coords = k_expand(choice, &moved);
            coords.iter().zip(phi).map(|(c, p)| c * p).sum()
        })
        .collect()
}

/// Pairing `⟨φ, A⟩` of `𝔨*` coordinates with an algebra element.
pub fn k_pair(choice: &CompactChoice, phi: &[f64], a: &KAlgElement) -> f64 {
    let coords = k_expand(choice, &a.mat);
    coords.iter().zip(phi).map(|(c, p)| c * p).sum()
}

// ---------------------------------------------------------------------------
// The representation (ρ, V)
// ---------------------------------------------------------------------------

/// Spin matrices `J₁, J₂, J₃` for spin `j = two_j/2`, rows ordered from the
/// highest weight `|j, j⟩` down to `|j, −j⟩`.
fn spin_matrices(two_j: u32) -> [DenseMatrix; 3] {
    let d = two_j as usize + 1;
    let j = two_j as f64 / 2.0;
    let basis = Basis::plain(d);
    let mut j3 = DenseMatrix::zeros(basis.clone(), basis.clone());
    let mut jp = DenseMatrix::zeros(basis.clone(), basis.clone());
    for i in 0..d {
        let m = j - i as f64;
        j3.set(i, i, C64::new(m, 0.0));
        if i > 0 {
            // J₊ |j, m⟩ = √(j(j+1) − m(m+1)) |j, m+1⟩
            let amp = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
            jp.set(i - 1, i, C64::new(amp, 0.0));
        }
    }
    let jm = jp.adjoint();
    let j1 = jp.add(&jm).scaled(C64::new(0.5, 0.0));
    let j2 = jp.sub(&jm).scaled(C64::new(0.0, -0.5));
    [j1, j2, j3]
}

/// `dρ(A)` on `V`.
pub fn drho_matrix(choice: &CompactChoice, a: &KAlgElement) -> DenseMatrix {
    match choice {
        CompactChoice::Torus { weights } => {
            // A = diag(iθ_k): dρ(A) = i m·θ = Σ m_k A_kk
            let mut val = C64::new(0.0, 0.0);
            for (k, &m) in weights.iter().enumerate() {
                val += a.mat.get(k, k) * m as f64;
            }
            let mut out = DenseMatrix::zeros(Basis::plain(1), Basis::plain(1));
            out.set(0, 0, val);
            out
        }
        CompactChoice::Su2 { two_j } => {
            let coords = k_expand(choice, &a.mat);
            let js = spin_matrices(*two_j);
            let d = *two_j as usize + 1;
            let mut out = DenseMatrix::zeros(Basis::plain(d), Basis::plain(d));
            for (jmat, &c) in js.iter().zip(&coords) {
                out = out.add(&jmat.scaled(C64::new(0.0, c)));
            }
            out
        }
    }
}

/// `ρ(k)` on `V`.
pub fn rho_matrix(choice: &CompactChoice, k: &KElement) -> Result<DenseMatrix> {
    k.check_membership(choice)?;
    match choice {
        CompactChoice::Torus { weights } => {
            let mut val = C64::new(1.0, 0.0);
            for (l, &m) in weights.iter().enumerate() {
                val *= k.mat.get(l, l).powi(m as i32);
            }
            let mut out = DenseMatrix::zeros(Basis::plain(1), Basis::plain(1));
            out.set(0, 0, val);
            Ok(out)
        }
        CompactChoice::Su2 { .. } => {
            // quaternion coordinates: k = w + x(iσ₁) + y(iσ₂) + z(iσ₃)
            let w = (k.mat.get(0, 0) + k.mat.get(1, 1)).re / 2.0;
            let z = (k.mat.get(0, 0) - k.mat.get(1, 1)).im / 2.0;
            let y = (k.mat.get(0, 1) - k.mat.get(1, 0)).re / 2.0;
            let x = (k.mat.get(0, 1) + k.mat.get(1, 0)).im / 2.0;
            let nu = (x * x + y * y + z * z).sqrt();
            let theta = 2.0 * nu.atan2(w);
            let axis = if nu > 1e-14 {
                [x / nu, y / nu, z / nu]
            } else {
                [0.0, 0.0, 1.0]
            };
            // k = exp(θ û·A): cos(θ/2) + sin(θ/2)(û₁ iσ₁ + û₂ iσ₂ + û₃ iσ₃)
            let gen = k_combine(
                choice,
                &[theta * axis[0], theta * axis[1], theta * axis[2]],
            );
            Ok(exp_anti_hermitian(&drho_matrix(choice, &gen)))
        }
    }
}

// ---------------------------------------------------------------------------
// The orbit o(φ₀)
// ---------------------------------------------------------------------------

/// Point of `o(φ₀)`: `𝔨*` coordinates plus a group representative with
/// `φ = Ad*(k)φ₀` (the section fixing coherent-state phases).
#[derive(Clone, Debug)]
pub struct OrbitPoint {
    pub coords: Vec<f64>,
    pub rep: KElement,
}

/// Base point `φ₀`: the highest weight read against the `𝔨` basis,
/// `⟨φ₀, A⟩ = −i·Λ(A)` on the Cartan part, `0` transversally.
pub fn phi0(choice: &CompactChoice) -> OrbitPoint {
    let coords = match choice {
        CompactChoice::Torus { weights } => weights.iter().map(|&m| m as f64).collect(),
        CompactChoice::Su2 { two_j } => vec![0.0, 0.0, *two_j as f64 / 2.0],
    };
    OrbitPoint {
        coords,
        rep: KElement::identity(choice),
    }
}

/// Move an orbit point by `k`: coordinates by `Ad*(k)`, representative by
/// left multiplication.
pub fn orbit_move(choice: &CompactChoice, k: &KElement, pt: &OrbitPoint) -> OrbitPoint {
    OrbitPoint {
        coords: k_coadjoint(choice, k, &pt.coords),
        rep: k.mul(&pt.rep),
    }
}

/// Section point of the su(2) orbit at spherical angles, or the single torus
/// point.
pub fn orbit_point_at(choice: &CompactChoice, theta: f64, phi: f64) -> OrbitPoint {
    match choice {
        CompactChoice::Torus { .. } => phi0(choice),
        CompactChoice::Su2 { .. } => {
            let k = KElement::su2_from_angles(theta, phi);
            orbit_move(choice, &k, &phi0(choice))
        }
    }
}

/// Orbit coherent state `e_φ̂ = ρ(k) v_hw` (unit norm; symbols do not depend
/// on the phase of the representative).
pub fn orbit_coherent_state(choice: &CompactChoice, pt: &OrbitPoint) -> Result<Vec<C64>> {
    let rho = rho_matrix(choice, &pt.rep)?;
    let d = choice.vdim();
    let mut hw = vec![C64::new(0.0, 0.0); d];
    hw[0] = C64::new(1.0, 0.0);
    Ok(rho.apply(&hw))
}

/// Berezin symbol `s(B)(φ) = ⟨B e_φ̂, e_φ̂⟩ / ⟨e_φ̂, e_φ̂⟩`, stored through its
/// `End(V)` preimage (`s` is injective).
#[derive(Clone, Debug)]
pub struct OrbitSymbol {
    pub choice: CompactChoice,
    pub preimage: DenseMatrix,
}

impl OrbitSymbol {
    pub fn eval(&self, pt: &OrbitPoint) -> Result<C64> {
        let e = orbit_coherent_state(&self.choice, pt)?;
        Ok(symbol_value(&self.preimage, &e))
    }
}

fn symbol_value(b: &DenseMatrix, e: &[C64]) -> C64 {
    let be = b.apply(e);
    let num: C64 = be.iter().zip(e).map(|(&x, &y)| x * y.conj()).sum();
    let den: f64 = e.iter().map(|v| v.norm_sqr()).sum();
    num / den
}

/// `s(B)` as an [`OrbitSymbol`].
pub fn small_symbol(choice: &CompactChoice, b: &DenseMatrix) -> OrbitSymbol {
    OrbitSymbol {
        choice: choice.clone(),
        preimage: b.clone(),
    }
}

// ---------------------------------------------------------------------------
// Quadrature on the orbit, b = ss*, w = b^{−1/2} s
// ---------------------------------------------------------------------------

/// `K`-invariant quadrature on `o(φ₀)`: Gauss-Legendre in `cos θ` times a
/// uniform trapezoid in `ϕ` for the sphere, a point mass for the torus.
#[derive(Clone, Debug)]
pub struct OrbitRule {
    pub points: Vec<OrbitPoint>,
    pub weights: Vec<f64>,
}

impl OrbitRule {
    pub fn new(choice: &CompactChoice, gl_order: usize, phi_points: usize) -> Result<Self> {
        match choice {
            CompactChoice::Torus { .. } => Ok(OrbitRule {
                points: vec![phi0(choice)],
                weights: vec![1.0],
            }),
            CompactChoice::Su2 { .. } => {
                let gl = gauss_legendre(gl_order)?;
                let mut points = Vec::with_capacity(gl_order * phi_points);
                let mut weights = Vec::with_capacity(gl_order * phi_points);
                for (wc, c) in gl.weights.iter().zip(&gl.nodes) {
                    let theta = c.acos();
                    for m in 0..phi_points {
                        let phi = 2.0 * std::f64::consts::PI * m as f64 / phi_points as f64;
                        points.push(orbit_point_at(choice, theta, phi));
                        // normalized surface measure: (1/4π) sinθ dθ dϕ
                        weights.push(wc / (2.0 * phi_points as f64));
                    }
                }
                Ok(OrbitRule { points, weights })
            }
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// The small Berezin calculus with its transform pair: `b = ss*` presented
/// on `End(V)` as `M = s*s` (they agree through `s`), and the unitary part
/// `w(B) = s(M^{−1/2} B)`.
#[derive(Clone, Debug)]
pub struct SmallCalculus {
    pub choice: CompactChoice,
    pub rule: OrbitRule,
    /// orbit coherent states per node
    coherents: Vec<Vec<C64>>,
    /// `M = s*s` on `End(V)` (matrix-unit basis, row-major vec)
    m_op: DenseMatrix,
    m_inv_sqrt: DenseMatrix,
    m_sqrt: DenseMatrix,
    /// measure calibration `ν = γ · ν₀`
    pub gamma: f64,
}

impl SmallCalculus {
    pub fn new(choice: &CompactChoice, gl_order: usize, phi_points: usize) -> Result<Self> {
        let mut rule = OrbitRule::new(choice, gl_order, phi_points)?;
        let mut calc = Self::build(choice, rule.clone())?;
        // one-scalar calibration: ∫ w(I) w(I) dν must equal Tr(I) = dim V
        let d = choice.vdim();
        let id = DenseMatrix::identity(Basis::plain(d));
        let t = calc.pair_w(&id, &id)?.re;
        let gamma = d as f64 / t;
        if (gamma - 1.0).abs() > 1e-10 {
            for w in rule.weights.iter_mut() {
                *w *= gamma;
            }
            calc = Self::build(choice, rule)?;
            calc.gamma = gamma;
        }
        Ok(calc)
    }

    fn build(choice: &CompactChoice, rule: OrbitRule) -> Result<Self> {
        let d = choice.vdim();
        let coherents: Vec<Vec<C64>> = rule
            .points
            .iter()
            .map(|pt| orbit_coherent_state(choice, pt))
            .collect::<Result<_>>()?;
        // M[(ij),(kl)] = ⟨s(E_kl), s(E_ij)⟩_{L²(ν)}, s(E_kl)(φ) = u_l ū_k
        let endv = Basis::EndV { vdim: d };
        let mut m_op = DenseMatrix::zeros(endv.clone(), endv);
        for (w, u) in rule.weights.iter().zip(&coherents) {
            for i in 0..d {
                for j in 0..d {
                    let sij = (u[j] * u[i].conj()).conj();
                    for k in 0..d {
                        for l in 0..d {
                            let skl = u[l] * u[k].conj();
                            m_op.add_to(i * d + j, k * d + l, *w * skl * sij);
                        }
                    }
                }
            }
        }
        m_op.hermitian = true;
        let (eigs, _) = hermitian_eig(&m_op);
        let lmax = eigs.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        if eigs[0] <= 1e-10 * lmax {
            return Err(Error::PositivityLost {
                eigenvalue: eigs[0],
            });
        }
        let m_inv_sqrt = hermitian_power(&m_op, -0.5, 1e-12)?;
        let m_sqrt = hermitian_power(&m_op, 0.5, 1e-12)?;
        Ok(SmallCalculus {
            choice: choice.clone(),
            rule,
            coherents,
            m_op,
            m_inv_sqrt,
            m_sqrt,
            gamma: 1.0,
        })
    }

    pub fn vdim(&self) -> usize {
        self.choice.vdim()
    }

    /// `s(B)` at quadrature node `i`.
    pub fn s_at_node(&self, b: &DenseMatrix, i: usize) -> C64 {
        symbol_value(b, &self.coherents[i])
    }

    /// `b` as a positive map on `End(V)` preimages: `b(s(B)) = s(M B)`.
    pub fn b_apply(&self, b: &DenseMatrix) -> DenseMatrix {
        self.apply_endv(&self.m_op, b)
    }

    /// `M = s*s` on `End(V)` (the matrix of `b` in the symbol
    /// parametrization).
    pub fn m_matrix(&self) -> &DenseMatrix {
        &self.m_op
    }

    /// `w(B) = s(M^{−1/2}B)`: the `End(V)` preimage of the unitary-part
    /// symbol.
    pub fn w_preimage(&self, b: &DenseMatrix) -> DenseMatrix {
        self.apply_endv(&self.m_inv_sqrt, b)
    }

    /// `b^{1/2}` applied to a preimage (for the polar-reconstruction check
    /// `b^{1/2} ∘ w = s`).
    pub fn b_sqrt_apply(&self, b: &DenseMatrix) -> DenseMatrix {
        self.apply_endv(&self.m_sqrt, b)
    }

    fn apply_endv(&self, op: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
        let d = self.vdim();
        assert_eq!(b.rows, d);
        let vec_b: Vec<C64> = (0..d * d).map(|f| b.get(f / d, f % d)).collect();
        let out = op.apply(&vec_b);
        let mut m = DenseMatrix::zeros(Basis::plain(d), Basis::plain(d));
        for (f, v) in out.into_iter().enumerate() {
            m.set(f / d, f % d, v);
        }
        m
    }

    /// `w(B)` at quadrature node `i`.
    pub fn w_at_node(&self, b: &DenseMatrix, i: usize) -> C64 {
        self.s_at_node(&self.w_preimage(b), i)
    }

    /// `w(B)` at an arbitrary orbit point.
    pub fn w_eval(&self, b: &DenseMatrix, pt: &OrbitPoint) -> Result<C64> {
        small_symbol(&self.choice, &self.w_preimage(b)).eval(pt)
    }

    /// `∫ w(A) w(B) dν` (no conjugation: the traciality pairing).
    pub fn pair_w(&self, a: &DenseMatrix, b: &DenseMatrix) -> Result<C64> {
        let wa = self.w_preimage(a);
        let wb = self.w_preimage(b);
        Ok(self
            .rule
            .weights
            .iter()
            .enumerate()
            .map(|(i, w)| *w * self.s_at_node(&wa, i) * self.s_at_node(&wb, i))
            .sum())
    }

    /// `∫ f(φ) g(φ) dν` for node-indexed closures.
    pub fn pair_nodes<F, G>(&self, f: F, g: G) -> C64
    where
        F: Fn(usize) -> C64,
        G: Fn(usize) -> C64,
    {
        self.rule
            .weights
            .iter()
            .enumerate()
            .map(|(i, w)| *w * f(i) * g(i))
            .sum()
    }
}
