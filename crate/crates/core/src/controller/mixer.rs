//! Motor mixer: collective, primary force, auxiliary and yaw moments to
//! squared rotor speeds.
//!
//! Each term inverts one row of `B(β)` along its own direction pattern.
//! The patterns are mutually orthogonal, so the differential terms add no
//! collective and do not leak into each other's rows.

use serde::Serialize;
use thiserror::Error;

use super::switch::{Channel, ChannelSelection};
use crate::allocation::AllocationVectors;
use crate::dynamics::{moment_coeffs, CEM_SCALE};
use crate::params::VehicleParams;

/// Relative size below which a moment coefficient counts as vanished.
const DEGENERATE_REL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MixerError {
    #[error("{channel} moment coefficient vanishes at beta = {beta:.6} rad")]
    AuxSingular { channel: Channel, beta: f64 },
    #[error("no vertical thrust at beta = {beta:.6} rad but net weight is {net:.4} N")]
    NoVerticalAuthority { beta: f64, net: f64 },
    #[error("primary force has no planar authority at beta = {beta:.6} rad")]
    NoPlanarAuthority { beta: f64 },
}

/// Commanded quantities handed to the mixer.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MixerDemand {
    /// Body planar force `[δ_x, δ_y]`, N. Only the primary axis is used.
    pub delta: [f64; 2],
    /// Auxiliary-channel body moment, N·m.
    pub aux_moment: f64,
    /// Yaw moment, N·m.
    pub yaw_moment: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixerOutput {
    pub motor_sq: [f64; 4],
    /// Collective share per motor before the differential terms.
    pub base: f64,
    /// Fraction of the differential actually applied, in `[0, 1]`.
    pub scale: f64,
    pub saturated: bool,
}

fn moment_scale(p: &VehicleParams) -> f64 {
    p.k_t * p.l + p.k_m.abs()
}

pub fn mixer(
    demand: &MixerDemand,
    sel: ChannelSelection,
    p: &VehicleParams,
    beta: f64,
    e: &AllocationVectors,
    u_max: f64,
) -> Result<MixerOutput, MixerError> {
    let (sb, cb) = beta.sin_cos();
    let k = moment_coeffs(p, beta);
    let tiny = DEGENERATE_REL * moment_scale(p);

    let net = p.net_weight();
    let base = if net == 0.0 {
        0.0
    } else {
        if sb.abs() * p.k_t < tiny {
            return Err(MixerError::NoVerticalAuthority { beta, net });
        }
        (net / (4.0 * sb * p.k_t)).max(0.0)
    };

    let mut diff = [0.0; 4];
    let mut add = |pattern: &[f64; 4], gain: f64| {
        for (d, &s) in diff.iter_mut().zip(pattern) {
            *d += s * gain;
        }
    };

    let (force, f_pattern) = match sel.primary {
        Channel::Pitch => (demand.delta[0], &e.e_x),
        Channel::Roll => (demand.delta[1], &e.e_y),
    };
    if force != 0.0 {
        let h = CEM_SCALE * cb * p.k_t;
        if h.abs() < tiny {
            return Err(MixerError::NoPlanarAuthority { beta });
        }
        add(f_pattern, force / (4.0 * h));
    }

    if demand.aux_moment != 0.0 {
        let (k_aux, pattern) = match sel.auxiliary {
            Channel::Roll => (k.k1, &e.e_phi),
            Channel::Pitch => (k.k2, &e.e_theta),
        };
        if k_aux.abs() < tiny {
            return Err(MixerError::AuxSingular {
                channel: sel.auxiliary,
                beta,
            });
        }
        add(pattern, demand.aux_moment / (4.0 * CEM_SCALE * k_aux));
    }

    // Yaw row scale is √2·(√2/2) = 1. Near β*_ψ there is no yaw authority
    // and the demand is dropped rather than amplified.
    if demand.yaw_moment != 0.0 && k.k3.abs() >= tiny {
        add(&e.e_psi, demand.yaw_moment / (4.0 * k.k3));
    }

    // Largest fraction of the differential that keeps every motor in range.
    let mut scale: f64 = 1.0;
    let base_c = base.min(u_max);
    for &d in &diff {
        if d > 0.0 && base_c + d > u_max {
            scale = scale.min((u_max - base_c) / d);
        } else if d < 0.0 && base_c + d < 0.0 {
            scale = scale.min(base_c / -d);
        }
    }
    scale = scale.max(0.0);
    let saturated = scale < 1.0 || base > u_max;
    let motor_sq = diff.map(|d| (base_c + scale * d).clamp(0.0, u_max));
    Ok(MixerOutput {
        motor_sq,
        base: base_c,
        scale,
        saturated,
    })
}
