//! Large-scale asymptotics of the thermal Rényi entanglement entropy of the
//! free Fermi gas in continuous space.
//!
//! The library computes the two coefficients of the large-scale expansion of
//! the local thermal Rényi entropy of a bounded region `L·Ω`,
//!
//! ```text
//! S_α(T, LΩ) = s_α(T) |Ω| L^d  +  η_α(T, ∂Ω) L^{d-1}  +  …
//! ```
//!
//! by three independent routes and cross-checks them against each other:
//!
//! * [`thermo`] — the bulk entropy density `s_α(T)` from Fermi–Dirac
//!   thermodynamics, together with pressure, chemical-potential inversion and
//!   low-/high-temperature asymptotic reports;
//! * [`boundary`] — the surface coefficient `η_α(T, ∂Ω)` from a singular
//!   double integral of the two-point entropy function over boundary-crossing
//!   mode pairs;
//! * [`oracle`] — a direct, formula-independent spectral computation in one
//!   dimension that discretizes the reduced Fermi operator on `L·Ω`,
//!   diagonalizes it, and recovers both coefficients from the eigenvalues.
//!
//! [`crossover`] implements the conformal-field-theory interpolation formula
//! and its consistency comparison against the exact coefficients, [`fit`]
//! provides the shared regression utilities, and [`verify`] bundles the whole
//! cross-validation suite behind a single machine-readable report.

pub mod boundary;
pub mod commands;
pub mod config;
pub mod crossover;
pub mod dispersion;
pub mod domain;
pub mod entropy;
pub mod fit;
pub mod oracle;
pub mod output;
pub mod quad;
pub mod thermo;
pub mod verify;

pub use boundary::{eta_coefficient, fermi_surface_factor, u_functional, FermiProfile};
pub use dispersion::Dispersion;
pub use domain::Domain;
pub use entropy::{fermi_function, renyi_entropy_function, u_alpha, RenyiIndex};
pub use oracle::{build_reduced_kernel, ReducedKernelMatrix};
pub use thermo::ThermoPoint;

use thiserror::Error;

/// Errors shared by the computational modules.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A value that must lie in `[0, 1]` (an occupation or eigenvalue) was
    /// outside the clamping tolerance. Signals an under-resolved or invalid
    /// operator upstream.
    #[error("value {value} outside [0, 1] beyond clamping tolerance {tolerance}")]
    ClampViolation { value: f64, tolerance: f64 },

    /// A quadrature did not reach the requested accuracy. Carries the error
    /// estimate that was achieved.
    #[error("quadrature failed to converge: achieved error estimate {achieved:.3e}, requested {requested:.3e}")]
    QuadratureNonconvergence { achieved: f64, requested: f64 },

    /// Root bracketing failed, e.g. the requested density is not attainable.
    #[error("bracket search failed: {0}")]
    BracketFailure(String),

    /// The chemical potential lies below the spectrum: the Fermi surface is
    /// empty and surface coefficients are not defined.
    #[error("no Fermi surface: N(mu) = 0 at mu = {mu}")]
    NoFermiSurface { mu: f64 },

    /// A combination of dispersion, dimension and domain that the solver does
    /// not support.
    #[error("unsupported-configuration: {0}")]
    UnsupportedConfiguration(String),

    /// The kernel discretization cannot resolve the requested state.
    #[error("insufficient resolution: {0}")]
    Resolution(String),

    /// A scaling fit was refused because the design matrix is numerically
    /// degenerate.
    #[error("ill-conditioned fit: condition number {condition:.3e} exceeds {limit:.3e}")]
    IllConditionedFit { condition: f64, limit: f64 },

    /// Data passed to a fitter violated its preconditions.
    #[error("invalid fit data: {0}")]
    FitData(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
