//! Forward and inverse scattering for matrix Schrödinger operators
//! -Ψ'' + V(x)Ψ = k²Ψ with a Hermitian n x n potential, on the half line
//! (with a general self-adjoint boundary condition) and on the full line.
//!
//! The toolkit computes Jost solutions for real and complex wavenumbers
//! (including analytic continuation into the strip Im k > -γ available for
//! exponentially decaying potentials), assembles Jost and scattering
//! matrices, locates bound states, extracts normalization and weight
//! matrices by contour-integral residue formulas, cross-validates them
//! against their direct Gram-integral definitions, and closes the loop by
//! reconstructing half-line potentials from scattering data with a
//! Marchenko solver (Dirichlet boundary).
//!
//! Entry points:
//! - [`potential`]: potential models, decay certificates, JSON/CSV I/O.
//! - [`jost`]: Jost solutions f±(k, x) and Wronskians.
//! - [`halfline`]: Jost matrix, S(k), bound states, normalization matrices.
//! - [`fullline`]: transmission/reflection coefficients, weight matrices,
//!   Weyl matrix from the left reflection coefficient.
//! - [`marchenko`]: kernel construction, integral-equation solve, round trips.
//! - [`harness`]: batch job configuration and the CLI surface.

pub mod contour;
pub mod error;
pub mod fullline;
pub mod halfline;
pub mod harness;
pub mod jost;
pub mod linalg;
pub mod marchenko;
pub mod ode;
pub mod potential;
pub mod quad;
pub mod rootfind;

pub use error::{Error, Result};
pub use linalg::{C64, CMat};
