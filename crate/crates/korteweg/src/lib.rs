//! Spherically symmetric compressible Navier–Stokes–Korteweg flows on an
//! exterior domain, reduced to Lagrangian mass coordinates.
//!
//! The moving fluid region { r ≥ a } is mapped onto the static half-line
//! x ∈ [0, ∞) through the cumulative mass x = ∫ₐʳ zᵐ ρ₀(z) dz, where
//! m = d − 1 is the geometric factor of the spherical divergence. The
//! unknowns are the specific volume v = 1/ρ and the radial velocity u:
//!
//! ```text
//! v_t = (rᵐ u)_x
//! u_t + rᵐ p(v)_x = rᵐ [ viscous stress − (r²ᵐ v^{−(β+5)} v_x)_x
//!                        − (β+5)/2 · r²ᵐ v^{−(β+6)} v_x² ]_x + sources
//! ```
//!
//! with p(v) = v^{−γ} and the capillarity law κ(v) = v^{−β}. Two viscosity
//! families are implemented (see [`model::ModelKind`]): constant shear
//! viscosity with volume-dependent bulk viscosity, and fully
//! volume-dependent viscosities.
//!
//! Beyond the solver itself, the crate evaluates the discrete counterparts of
//! the analytical machinery that controls such flows: the energy ledger
//! (entropy + kinetic + capillary energy against accumulated dissipation and
//! boundary flux), pointwise specific-volume brackets obtained by inverting a
//! Kanel-type functional, weighted Sobolev norms, convexity (Jensen) window
//! checks, and a classifier for the admissible (α, β, γ) parameter regions of
//! the two constitutive families.
//!
//! The `examples/` directory contains one runnable program per major
//! capability; the thin `korteweg` binary exposes the same machinery as
//! `simulate` / `classify` / `sweep` / `mms` subcommands.

// Index-based stencil loops and NaN-aware negated comparisons (e.g.
// `!(v > 0.0)`, which also rejects NaN) are deliberate in the numerical
// kernels.
#![allow(clippy::needless_range_loop)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::manual_memcpy)]
#![allow(clippy::manual_is_multiple_of)]

pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod geometry;
pub mod integrate;
pub mod model;
mod num;
pub mod output;
pub mod regime;
pub mod spatial;
pub mod verify;

pub use diagnostics::EnergyLedger;
pub use geometry::RadialGrid;
pub use integrate::{RunConfig, RunSummary, Termination};
pub use model::{ModelKind, ModelParams};
pub use regime::RegimeVerdict;
pub use spatial::State;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A precondition on the mathematical domain was violated
    /// (non-positive specific volume, NaN input, non-monotone table, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed configuration file or command-line input.
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
