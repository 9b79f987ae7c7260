//! Saturated Nussbaum gain for the auxiliary channel.
//!
//! `N(ζ) = Sat(cos(πζ/2) e^{ζ²})` changes sign at every odd integer, which
//! lets the auxiliary loop recover when its control direction is wrong.
//! The adaptation state only grows: `ζ̇ = K_ζ |ω| |u_aux|`.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

/// Above this ζ² the exponential would overflow; the sign of the cosine
/// alone fixes the saturated value there.
const EXP_CUTOFF: f64 = 700.0;

pub fn nussbaum_value(zeta: f64, sat_bound: f64) -> f64 {
    let c = (FRAC_PI_2 * zeta).cos();
    let z2 = zeta * zeta;
    if z2 > EXP_CUTOFF {
        return if c == 0.0 { 0.0 } else { sat_bound.copysign(c) };
    }
    (c * z2.exp()).clamp(-sat_bound, sat_bound)
}

/// One explicit-Euler step of the adaptation law.
pub fn nussbaum_update(zeta: f64, omega_aux: f64, u_aux: f64, k_zeta: f64, dt: f64) -> f64 {
    zeta + k_zeta * omega_aux.abs() * u_aux.abs() * dt
}

/// Adaptation states for roll and pitch, with their gains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NussbaumState {
    pub zeta_phi: f64,
    pub zeta_theta: f64,
    /// Diagonal of `K_ζ`, `[roll, pitch]`.
    pub k_zeta: [f64; 2],
    pub sat_bound: f64,
}

impl NussbaumState {
    pub fn new(k_zeta: f64, sat_bound: f64) -> Self {
        Self {
            zeta_phi: 0.0,
            zeta_theta: 0.0,
            k_zeta: [k_zeta; 2],
            sat_bound,
        }
    }

    pub fn gains(&self) -> [f64; 2] {
        [
            nussbaum_value(self.zeta_phi, self.sat_bound),
            nussbaum_value(self.zeta_theta, self.sat_bound),
        ]
    }
}

/// `M_b = diag(N(ζ_φ), N(ζ_θ)) u_aux`, ordered `[roll, pitch]`.
pub fn aux_moment(ns: &NussbaumState, u_aux: [f64; 2]) -> [f64; 2] {
    let n = ns.gains();
    [n[0] * u_aux[0], n[1] * u_aux[1]]
}
