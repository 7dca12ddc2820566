//! Exact symbol calculus for constant-coefficient differential operators.
//!
//! The crate decides constant rank over the complex numbers, builds and
//! verifies Nullstellensatz certificates for annihilator relations, factors
//! one operator through another via iterated gradients, and solves the
//! two-dimensional Poincare problem (recover `v` with `A v = u` from a
//! `B`-free field `u` on the unit square) with a spectral torus inverse.
//!
//! Module map:
//! - [`exactnum`]: arbitrary-precision rationals, Gaussian rationals, exact
//!   dense linear algebra (rref, kernels, right inverses, pseudo-inverse).
//! - [`multipoly`]: multivariate polynomials over those fields with monomial
//!   orders and homogeneity analysis.
//! - [`groebner`]: Buchberger engine with cofactor tracking, ideal
//!   membership with explicit representations, power membership and the
//!   variety-is-origin test.
//! - [`opcore`]: differential operators, Fourier symbols, the operator zoo,
//!   homogenization and order reduction.
//! - [`crank`]: certified constant-rank analysis of symbols.
//! - [`nullsatz`]: construction and verification of certificates
//!   `q^m * b_i = sum_j h_j * p_ij`.
//! - [`factor`]: factorization through iterated gradients and the
//!   symbol-kernel-equality decision with plane-wave witnesses.
//! - [`spectral`]: grid fields on the torus, discrete Fourier transforms and
//!   Fourier coefficients of edge measures.
//! - [`poincare2d`]: the boundary-corrector pipeline on the unit square.

// index-parallel loops over matrix/vector pairs read better with explicit
// indices in this codebase
#![allow(clippy::needless_range_loop)]

pub mod crank;
pub mod exactnum;
pub mod factor;
pub mod groebner;
pub mod multipoly;
pub mod nullsatz;
pub mod opcore;
pub mod poincare2d;
pub mod spectral;

pub use exactnum::{FieldMatrix, GaussianRational, Rational};
pub use multipoly::{Monomial, MonomialOrder, MultiPoly};
pub use opcore::{Operator, SymbolMatrix};

/// Default seed for every randomized (but reproducible) computation.
pub const DEFAULT_SEED: u64 = 0x5EED;
