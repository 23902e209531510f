//! Manifold constraint control with flexible boundaries for strict-feedback
//! plants under input saturation.
//!
//! The controller drives an iterative sliding manifold built from smooth
//! negative feedback laws, keeps it inside time-varying boundaries through
//! a barrier map, and widens those boundaries while the actuator saturates.
//! States are reconstructed from the tracking error by a high-gain
//! differentiator.

pub mod constraint;
pub mod control;
pub mod error;
pub mod harness;
pub mod manifold;
pub mod numeric;
pub mod observer;
pub mod plant;
pub mod xfun;

pub use error::{Error, Result};
