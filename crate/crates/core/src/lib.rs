//! Channel estimation for RIS-assisted mmWave MIMO uplinks with a blocked
//! direct path.
//!
//! The UE→RIS→BS link is a single LoS ray. The RIS–BS geometry is known; the
//! crate recovers the UE angle of departure, the 2D angle of arrival at the
//! RIS and the overall complex path gain from `L ≥ 2` pilot soundings taken
//! under different RIS phase configurations.
//!
//! Angles are radians internally ([`geometry::Angle`]) and degrees in
//! configuration files, CLI flags and outputs.

pub mod channel;
pub mod error;
pub mod estimator;
pub mod geometry;
pub mod harness;
pub mod metrics;
pub mod rng;
pub mod sounding;

pub use error::{Error, Result};

pub type C64 = num_complex::Complex<f64>;
pub type CVector = nalgebra::DVector<C64>;
pub type CMatrix = nalgebra::DMatrix<C64>;
