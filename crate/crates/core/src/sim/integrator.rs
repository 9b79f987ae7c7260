//! Fixed-step classical Runge–Kutta on the 12-dimensional state.

use nalgebra::Vector6;

use crate::dynamics::Vehicle;
use crate::state::{ActuatorCommand, RigidState, StateError};

fn axpy(s: &RigidState, k: &RigidState, h: f64) -> RigidState {
    RigidState {
        eta: s.eta + k.eta * h,
        nu: s.nu + k.nu * h,
    }
}

/// One RK4 step with the body wrench `tau` held over the step.
pub fn rk4_step_wrench(
    v: &Vehicle,
    s: &RigidState,
    tau: &Vector6<f64>,
    dt: f64,
) -> Result<RigidState, StateError> {
    s.check()?;
    let k1 = v.state_derivative(s, tau)?;
    let k2 = v.state_derivative(&axpy(s, &k1, 0.5 * dt), tau)?;
    let k3 = v.state_derivative(&axpy(s, &k2, 0.5 * dt), tau)?;
    let k4 = v.state_derivative(&axpy(s, &k3, dt), tau)?;
    let next = RigidState {
        eta: s.eta + (k1.eta + (k2.eta + k3.eta) * 2.0 + k4.eta) * (dt / 6.0),
        nu: s.nu + (k1.nu + (k2.nu + k3.nu) * 2.0 + k4.nu) * (dt / 6.0),
    };
    next.check()?;
    Ok(next)
}

/// RK4 step with `τ = B(β) u + disturbance`.
pub fn rk4_step(
    v: &Vehicle,
    s: &RigidState,
    cmd: &ActuatorCommand,
    disturbance: &Vector6<f64>,
    dt: f64,
) -> Result<RigidState, StateError> {
    let tau = v.generalized_force(cmd.beta, &cmd.motor_sq) + disturbance;
    rk4_step_wrench(v, s, &tau, dt)
}
