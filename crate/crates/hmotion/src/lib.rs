//! Numerical workbench for the harmonic analysis of Heisenberg motion groups
//! `G = H_n ⋊ K` at finite truncation.
//!
//! The crate materializes, as dense matrices over graded Hermite and
//! Fock-monomial bases, the two classical models of the irreducible unitary
//! representations (Schrödinger on `L²(ℝⁿ, V)` and Fock on holomorphic
//! functions), the Segal-Bargmann intertwiner between them, the Berezin and
//! Weyl symbol calculi on both sides, and the Stratonovich-Weyl maps obtained
//! from the unitary parts of the quantization maps.  Everything the theory
//! asserts as an identity (covariance, traciality, moment maps, polar
//! factorizations, tensor decompositions) is executable as a residual check.
//!
//! Modules follow the mathematical layering:
//!
//! * [`numkit`] — multi-indices, Gauss quadrature, Hermite functions, dense
//!   complex matrices and the factorizations used throughout.
//! * [`heisenberg`] — the Heisenberg group `H_n`, its coadjoint action and the
//!   scalar models `σ₀`, `π₀` with differentials.
//! * [`fock`] — truncated Fock space, coherent states, the Segal-Bargmann
//!   pair `B₀`, `B₀⁻¹`.
//! * [`berezin0`] — scalar Berezin calculus on `ℂⁿ`: symbols, the heat / Wick
//!   forms of the Berezin transform, and the unitary part via the Weyl route.
//! * [`weyl`] — Weyl quantization and Wigner dequantization on `ℝ²ⁿ`,
//!   including the operator-valued extension.
//! * [`compactk`] — the compact factor `K` (torus or SU(2)), its coadjoint
//!   orbit, orbit coherent states and the small Berezin calculus `s`, `b`, `w`.
//! * [`motion`] — the motion group itself: group law, coadjoint action, the
//!   Fock model `π`, the Schrödinger model `σ`, and the big symbol map.
//! * [`swc`] — assembled Stratonovich-Weyl maps, the axiom harness and
//!   verification reports.
//! * [`cli`] — batch configuration, suite registry and report tables.
//!
//! All computational entry points are pure functions of immutable inputs;
//! with the default `parallel` feature the embarrassingly parallel loops
//! (matrix columns, quadrature grids, suite checks) run on rayon, and the
//! results are bitwise independent of the thread count.

pub mod berezin0;
pub mod cli;
pub mod compactk;
pub mod fock;
pub mod heisenberg;
pub mod motion;
pub mod numkit;
pub(crate) mod par;
pub mod swc;
pub mod weyl;

use thiserror::Error;

/// Complex scalar used everywhere.
pub type C64 = num_complex::Complex64;

/// Errors surfaced by the workbench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("quadrature order {requested} exceeds the cap {cap}")]
    QuadratureCap { requested: usize, cap: usize },
    #[error("quadrature order {order} too coarse for truncation {trunc} (need at least {needed})")]
    QuadratureTooCoarse {
        order: usize,
        trunc: usize,
        needed: usize,
    },
    #[error("hermite index {k} exceeds the cap {cap}")]
    HermiteCap { k: usize, cap: usize },
    #[error("matrix is rank deficient (smallest singular value {sigma_min:.3e})")]
    RankDeficient { sigma_min: f64 },
    #[error("matrix is not positive definite (eigenvalue {eigenvalue:.3e})")]
    NotPositiveDefinite { eigenvalue: f64 },
    #[error("loss of positivity in the orbit transform (eigenvalue {eigenvalue:.3e}); quadrature too coarse")]
    PositivityLost { eigenvalue: f64 },
    #[error("matrix is not a member of {group} (residual {residual:.3e})")]
    NotInGroup { group: &'static str, residual: f64 },
    #[error("point outside the chart of {map}")]
    OutOfChart { map: &'static str },
    #[error("operator is not a polynomial in the generators up to degree {degree} (residual {residual:.3e})")]
    NotPolynomial { degree: usize, residual: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
