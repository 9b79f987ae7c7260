//! Vehicle state and actuator command values.

use nalgebra::{Vector4, Vector6};
use std::f64::consts::FRAC_PI_2;
use thiserror::Error;

/// Largest admissible |pitch| before the Euler rate transform is considered
/// singular, rad (80°).
pub const THETA_MAX: f64 = 80.0 * std::f64::consts::PI / 180.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("pitch {theta:.4} rad exceeds the Euler singularity guard ±{THETA_MAX:.4} rad")]
    AttitudeSingular { theta: f64 },
    #[error("state contains non-finite entries")]
    NonFinite,
    #[error("tilt angle {0} rad outside [-pi/2, pi/2]")]
    TiltOutOfRange(f64),
    #[error("motor input {index} = {value} outside [0, {u_max}]")]
    MotorOutOfRange { index: usize, value: f64, u_max: f64 },
}

/// Pose `eta = [x, y, z, phi, theta, psi]` in the inertial frame and body
/// velocity `nu = [u, v, w, p, q, r]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RigidState {
    pub eta: Vector6<f64>,
    pub nu: Vector6<f64>,
}

impl RigidState {
    pub fn new(eta: Vector6<f64>, nu: Vector6<f64>) -> Self {
        Self { eta, nu }
    }

    pub fn roll(&self) -> f64 {
        self.eta[3]
    }

    pub fn pitch(&self) -> f64 {
        self.eta[4]
    }

    pub fn yaw(&self) -> f64 {
        self.eta[5]
    }

    pub fn is_finite(&self) -> bool {
        self.eta.iter().chain(self.nu.iter()).all(|v| v.is_finite())
    }

    pub fn check(&self) -> Result<(), StateError> {
        if !self.is_finite() {
            return Err(StateError::NonFinite);
        }
        check_pitch(self.pitch())
    }
}

pub(crate) fn check_pitch(theta: f64) -> Result<(), StateError> {
    if theta.abs() >= THETA_MAX {
        Err(StateError::AttitudeSingular { theta })
    } else {
        Ok(())
    }
}

/// Symmetric thrust tilt angle plus four squared rotor speeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuatorCommand {
    pub beta: f64,
    pub motor_sq: Vector4<f64>,
}

impl ActuatorCommand {
    pub fn new(beta: f64, motor_sq: [f64; 4]) -> Self {
        Self {
            beta,
            motor_sq: Vector4::from_column_slice(&motor_sq),
        }
    }

    pub fn check(&self, u_max: f64) -> Result<(), StateError> {
        if !(-FRAC_PI_2..=FRAC_PI_2).contains(&self.beta) {
            return Err(StateError::TiltOutOfRange(self.beta));
        }
        for (index, &value) in self.motor_sq.iter().enumerate() {
            if !(0.0..=u_max).contains(&value) {
                return Err(StateError::MotorOutOfRange {
                    index,
                    value,
                    u_max,
                });
            }
        }
        Ok(())
    }
}
