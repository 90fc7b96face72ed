//! Spectral laboratory for the linearized Taylor model of magnetohydrodynamics
//! on the torus `T³`.
//!
//! Each horizontal Fourier mode `ξ ∈ (2πZ)²` of the perturbation field is a
//! triple of truncated Fourier series in `x₃`. The crate builds the per-mode
//! operators of the linearized induction equation, the explicit eigenbasis of
//! the leading skew-adjoint part, the first-order normal form, and an exact
//! exponential propagator, with diagnostics for each.

pub mod background;
pub mod constraints;
pub mod error;
pub mod evolution;
pub mod experiment;
pub mod field;
pub mod fourier;
pub mod linalg;
pub mod normal_form;
pub mod operators;
pub mod spectral;

pub use background::{BackgroundField, BackgroundTerm, ModeContext, WaveVector};
pub use error::{Error, Result};
pub use field::{ModeField, OperatorMatrix};
pub use fourier::FourierSeries;
