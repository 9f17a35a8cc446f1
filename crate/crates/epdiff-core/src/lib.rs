//! Pseudo-spectral solver for the Euler-Arnold (EPDiff) equation on the
//! circle, m_t + u m_x + 2 m u_x = 0 with m = Au, for pluggable
//! Fourier-multiplier inertia operators A — together with a verification
//! suite that numerically certifies the identities, decompositions, and
//! estimates behind the blow-up criterion for metrics of order 3/2.
//!
//! Modules:
//! - [`spectral`]: field algebra on truncated Fourier series (transforms,
//!   derivatives, Hilbert transform, dealiased products, norms).
//! - [`operators`]: construction, certification, inversion, and asymptotic
//!   decomposition of multiplier symbols.
//! - [`solver`]: RK4 time integration with energy and blow-up diagnostics.
//! - [`flow_map`]: Lagrangian flow of the velocity field and evaluation of
//!   the right-invariant metric.
//! - [`verify`]: the estimate checks (sup-norm lemmas, the eight-term
//!   decomposition of the stretching term, the Gronwall certificate).
//! - [`corpus`]: fixed-seed random field ensembles for the sweeps.
//!
//! Data-parallel sweeps use rayon when the default `parallel` feature is
//! enabled and fall back to sequential loops without it; results are
//! identical either way.

pub mod corpus;
pub mod error;
pub mod fft;
pub mod flow_map;
pub mod operators;
pub mod par;
pub mod solver;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use operators::{InertiaOperator, MultiplierSymbol};
pub use spectral::{analyze, FourierField, GridField};
