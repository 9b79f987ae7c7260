//! Model, singular-tilt analysis, leveling controller and simulator for a
//! coupling-tiltable underwater quadrotor.

pub mod allocation;
pub mod config;
pub mod controller;
pub mod dynamics;
pub mod par;
pub mod params;
pub mod sim;
pub mod state;
pub mod stta;
pub mod sweep;
pub mod validate;

pub use allocation::AllocationVectors;
pub use dynamics::Vehicle;
pub use params::VehicleParams;
pub use state::{ActuatorCommand, RigidState};
