//! Three-level Λ system driven by probe and control fields: master-equation
//! dynamics, full counting statistics of the emitted photon current, slow-light
//! optics and dressed states.
//!
//! Everything is generic over the scalar type ([`Real`], implemented for `f32`
//! and `f64`). Rates and frequencies are in units of the `|1⟩→|3⟩` decay rate.

pub mod dressed;
pub mod dynamics;
pub mod error;
pub mod fcs;
pub mod jet;
pub mod linalg;
pub mod model;
pub mod ode;
pub mod optics;
pub mod scalar;

pub use error::{Error, Result};
pub use jet::Jet;
pub use linalg::{CMat, CVec};
pub use model::{DensityMatrix, StateTolerance, SystemParams};
pub use scalar::{Real, C};
pub use dressed::DressedSystem;
pub use dynamics::{SteadyState, SteadyStateMethod};
pub use fcs::{CharPolyJets, CumulantMethod, CumulantResult};
pub use optics::{MediumParams, OpticalResponse};

pub type SystemParamsF64 = SystemParams<f64>;
pub type SystemParamsF32 = SystemParams<f32>;
pub type DensityMatrixF64 = DensityMatrix<f64>;
pub type DensityMatrixF32 = DensityMatrix<f32>;
pub type SteadyStateF64 = SteadyState<f64>;
pub type CumulantResultF64 = CumulantResult<f64>;
pub type MediumParamsF64 = MediumParams<f64>;
pub type DressedSystemF64 = DressedSystem<f64>;
