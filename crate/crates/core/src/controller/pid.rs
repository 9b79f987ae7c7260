//! PID laws for the tilt servo and the auxiliary moment channel.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

/// |δ| below this keeps the previous control sign, N.
pub const SIGN_DEADBAND: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Bound on the accumulated error integral (anti-windup).
    pub integral_limit: f64,
}

impl PidGains {
    pub fn new(kp: f64, ki: f64, kd: f64, integral_limit: f64) -> Self {
        Self {
            kp,
            ki,
            kd,
            integral_limit,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.kp >= 0.0 && self.ki >= 0.0 && self.kd >= 0.0 && self.integral_limit > 0.0
    }
}

/// Integrator memory of one PID channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PidState {
    pub integral: f64,
    /// Last control sign taken from the force demand (β loop only).
    pub sign: f64,
}

impl Default for PidState {
    fn default() -> Self {
        Self {
            integral: 0.0,
            sign: 1.0,
        }
    }
}

impl PidState {
    /// `kp x + kd ẋ + ki ∫x`, with the integral clamped to the limit.
    pub fn pid(&mut self, g: &PidGains, x: f64, x_dot: f64, dt: f64) -> f64 {
        self.integral = (self.integral + x * dt).clamp(-g.integral_limit, g.integral_limit);
        g.kp * x + g.kd * x_dot + g.ki * self.integral
    }
}

/// Sign of the force demand with a deadband around zero.
pub fn deadband_sign(delta: f64, previous: f64) -> f64 {
    if delta.abs() < SIGN_DEADBAND {
        previous
    } else {
        delta.signum()
    }
}

/// Tilt correction `β = -sgn(δ) (K_P x + K_D ẋ + K_I ∫x)`, clamped to
/// `[-π/2, π/2]`. `x` is the primary-channel attitude error.
pub fn beta_pid_step(
    g: &PidGains,
    state: &mut PidState,
    x: f64,
    x_dot: f64,
    delta_axis: f64,
    dt: f64,
) -> f64 {
    debug_assert!(dt > 0.0);
    state.sign = deadband_sign(delta_axis, state.sign);
    let u = state.pid(g, x, x_dot, dt);
    (-state.sign * u).clamp(-FRAC_PI_2, FRAC_PI_2)
}
