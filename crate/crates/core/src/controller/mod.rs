//! Leveling controller: tilt PID toward the singular tilt angle of the
//! primary channel, Nussbaum-gain auxiliary moment loop, channel switch
//! and mixer.

pub mod mixer;
pub mod nussbaum;
pub mod pid;
pub mod switch;

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;
use thiserror::Error;

pub use mixer::{mixer, MixerDemand, MixerError, MixerOutput};
pub use nussbaum::{aux_moment, nussbaum_update, nussbaum_value, NussbaumState};
pub use pid::{beta_pid_step, PidGains, PidState};
pub use switch::{hysteresis_band, primary_aux_switch, BetaSource, Channel, ChannelSelection};

use crate::allocation::AllocationVectors;
use crate::params::VehicleParams;
use crate::state::RigidState;
use crate::stta::{beta_phi, beta_theta, SttaError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ControllerError {
    #[error(transparent)]
    Mixer(#[from] MixerError),
    #[error(transparent)]
    Stta(#[from] SttaError),
    #[error("controller period must be positive (got {0})")]
    BadPeriod(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerConfig {
    /// Tilt correction gains.
    pub beta_gains: PidGains,
    /// Auxiliary attitude loop gains, N·m/rad.
    pub aux_gains: PidGains,
    pub sat_bound: f64,
    pub k_zeta: f64,
    /// Hysteresis as a fraction of the larger force demand.
    pub hysteresis_fraction: f64,
    /// Lower bound on the hysteresis band, N.
    pub hysteresis_floor: f64,
    /// Upper bound on each squared rotor speed, (rad/s)².
    pub u_max: f64,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            beta_gains: PidGains::new(0.5, 0.05, 0.1, 1.0),
            aux_gains: PidGains::new(2.0, 0.2, 0.5, 1.0),
            sat_bound: 2.0,
            k_zeta: 1.0,
            hysteresis_fraction: 0.05,
            hysteresis_floor: 0.01,
            u_max: 1.0e6,
        }
    }
}

/// Switches reproducing the ablation study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerFlags {
    pub nussbaum_enabled: bool,
    /// Negates the auxiliary moment before mixing, so the loop sees the
    /// opposite control direction from the one it was designed for.
    pub flip_aux_sign: bool,
}

impl Default for ControllerFlags {
    fn default() -> Self {
        Self {
            nussbaum_enabled: true,
            flip_aux_sign: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControllerState {
    pub beta_pid: PidState,
    /// Auxiliary PID memory, `[roll, pitch]`.
    pub aux_pid: [PidState; 2],
    pub nussbaum: NussbaumState,
    pub selection: Option<ChannelSelection>,
    pub handovers: usize,
}

impl ControllerState {
    pub fn new(cfg: &ControllerConfig) -> Self {
        Self {
            beta_pid: PidState::default(),
            aux_pid: [PidState::default(); 2],
            nussbaum: NussbaumState::new(cfg.k_zeta, cfg.sat_bound),
            selection: None,
            handovers: 0,
        }
    }
}

/// Commanded planar force and optional yaw moment for one controller tick.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Demand {
    pub delta: [f64; 2],
    #[serde(default)]
    pub yaw_moment: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    pub nussbaum_gain_phi: f64,
    pub nussbaum_gain_theta: f64,
    pub aux_moment: f64,
    pub active_channel: Channel,
    pub saturated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ControllerOutput {
    pub beta_cmd: f64,
    pub motor_sq: [f64; 4],
    pub diagnostics: Diagnostics,
}

/// Precomputed singular tilt angles seen by the controller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feedforward {
    pub beta_phi: f64,
    pub beta_theta: f64,
}

impl Feedforward {
    pub fn new(p: &VehicleParams) -> Result<Self, SttaError> {
        Ok(Self {
            beta_phi: beta_phi(p)?,
            beta_theta: beta_theta(p)?,
        })
    }

    fn get(&self, src: BetaSource) -> f64 {
        match src {
            BetaSource::Phi => self.beta_phi,
            BetaSource::Theta => self.beta_theta,
        }
    }
}

/// Everything fixed for the duration of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerContext<'a> {
    pub cfg: &'a ControllerConfig,
    pub flags: ControllerFlags,
    pub params: &'a VehicleParams,
    pub alloc: &'a AllocationVectors,
    pub feedforward: Feedforward,
}

fn attitude(s: &RigidState, c: Channel) -> (f64, f64) {
    match c {
        Channel::Roll => (s.eta[3], s.nu[3]),
        Channel::Pitch => (s.eta[4], s.nu[4]),
    }
}

/// One tick: switch, tilt PID, auxiliary loop with Nussbaum gain, mixer.
///
/// The tilt command is the primary channel's singular angle plus the PID
/// correction, so a level vehicle flies exactly at the singular angle.
pub fn controller_step(
    ctx: &ControllerContext<'_>,
    st: &mut ControllerState,
    measured: &RigidState,
    demand: &Demand,
    dt: f64,
) -> Result<ControllerOutput, ControllerError> {
    if dt.is_nan() || dt <= 0.0 {
        return Err(ControllerError::BadPeriod(dt));
    }
    let cfg = ctx.cfg;
    let delta = demand.delta;

    let sel = match st.selection {
        None => ChannelSelection::from_demand(delta),
        Some(prev) => {
            let h = hysteresis_band(delta, cfg.hysteresis_fraction, cfg.hysteresis_floor);
            let next = primary_aux_switch(delta, prev, h);
            if next.primary != prev.primary {
                st.handovers += 1;
                st.beta_pid = PidState {
                    sign: st.beta_pid.sign,
                    ..PidState::default()
                };
                st.aux_pid[next.auxiliary.index()] = PidState::default();
            }
            next
        }
    };
    st.selection = Some(sel);

    let (x, x_dot) = attitude(measured, sel.primary);
    let delta_axis = match sel.primary {
        Channel::Pitch => delta[0],
        Channel::Roll => delta[1],
    };
    let correction = beta_pid_step(&cfg.beta_gains, &mut st.beta_pid, x, x_dot, delta_axis, dt);
    let beta_cmd = (ctx.feedforward.get(sel.beta_source) + correction).clamp(-FRAC_PI_2, FRAC_PI_2);

    let aux = sel.auxiliary;
    let i = aux.index();
    let (xa, xa_dot) = attitude(measured, aux);
    let u_aux = -st.aux_pid[i].pid(&cfg.aux_gains, xa, xa_dot, dt);

    let gain = if ctx.flags.nussbaum_enabled {
        let ns = &mut st.nussbaum;
        let z = match aux {
            Channel::Roll => &mut ns.zeta_phi,
            Channel::Pitch => &mut ns.zeta_theta,
        };
        *z = nussbaum_update(*z, xa_dot, u_aux, ns.k_zeta[i], dt);
        ns.gains()[i]
    } else {
        1.0
    };
    let mut m_aux = gain * u_aux;
    if ctx.flags.flip_aux_sign {
        m_aux = -m_aux;
    }

    let md = MixerDemand {
        delta,
        aux_moment: m_aux,
        yaw_moment: demand.yaw_moment,
    };
    let out = mixer(&md, sel, ctx.params, beta_cmd, ctx.alloc, cfg.u_max)?;

    let [n_phi, n_theta] = if ctx.flags.nussbaum_enabled {
        st.nussbaum.gains()
    } else {
        [1.0, 1.0]
    };
    Ok(ControllerOutput {
        beta_cmd,
        motor_sq: out.motor_sq,
        diagnostics: Diagnostics {
            nussbaum_gain_phi: n_phi,
            nussbaum_gain_theta: n_theta,
            aux_moment: m_aux,
            active_channel: sel.primary,
            saturated: out.saturated,
        },
    })
}
