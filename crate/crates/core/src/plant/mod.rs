//! Benchmark plants, the fixed-step integrator and the closed-loop driver.

mod models;
mod rk4;
mod simulate;

pub use models::{Plant, PlantId};
pub use rk4::rk4_step;
pub use simulate::{simulate, ControlDesign, SimOutput, SimRecord, SimSettings};
