//! Closed- and open-loop time-domain simulation.
//!
//! Physics runs at `dt_physics` with RK4; the controller and the logger run
//! every `controller_rate`-th of a second. Motors and the tilt servo are
//! first-order lags, discretized exactly between physics steps.

pub mod disturbance;
pub mod integrator;
pub mod log;
pub mod metrics;

use nalgebra::Vector6;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use disturbance::{Disturbance, DisturbanceGenerator};
pub use integrator::{rk4_step, rk4_step_wrench};
pub use log::{LogRow, TrajectoryLog, CSV_HEADER};
pub use metrics::{metrics, ScenarioMetrics, DEFAULT_DIVERGENCE_DEG};

use crate::allocation::{AllocationError, AllocationVectors};
use crate::controller::{
    controller_step, Channel, ControllerConfig, ControllerContext, ControllerError,
    ControllerFlags, ControllerState, Demand, Feedforward,
};
use crate::dynamics::{pendulum_potential, Vehicle};
use crate::params::{ParamsError, VehicleParams};
use crate::state::{ActuatorCommand, RigidState, StateError};
use crate::stta::{stta_set, SttaError, SttaKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Allocation(#[from] AllocationError),
    #[error(transparent)]
    Stta(#[from] SttaError),
    #[error("invalid simulation config: {0}")]
    Config(String),
    #[error("initial state rejected: {0}")]
    InitialState(StateError),
    #[error("controller failed at t = 0: {0}")]
    Controller(ControllerError),
}

fn config_err(msg: impl Into<String>) -> SimError {
    SimError::Config(msg.into())
}

/// One piece of the piecewise-constant demand schedule, active from `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandSegment {
    pub t: f64,
    pub delta: [f64; 2],
    #[serde(default)]
    pub yaw_moment: f64,
}

/// One piece of an open-loop input schedule, active from `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSegment {
    pub t: f64,
    pub motor_sq: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OpenLoopInputs {
    Schedule { segments: Vec<InputSegment> },
    /// Collective that exactly cancels the net weight at the given tilt,
    /// split in the surge pattern `base·(1 + f·e_x)`.
    Leveling { surge_fraction: f64 },
}

/// Fixed tilt and scheduled rotor inputs, no controller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpenLoop {
    /// Tilt, rad; an offset when `beta_relative_to` is set.
    #[serde(default)]
    pub beta: f64,
    #[serde(default)]
    pub beta_relative_to: Option<SttaKind>,
    pub inputs: OpenLoopInputs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ActuatorConfig {
    /// Motor time constant, s. Zero disables the lag.
    pub tau_motor: f64,
    /// Tilt servo time constant, s. Zero disables the lag.
    pub tau_servo: f64,
}

impl Default for ActuatorConfig {
    fn default() -> Self {
        Self {
            tau_motor: 0.02,
            tau_servo: 0.08,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialState {
    pub eta: [f64; 6],
    pub nu: [f64; 6],
}

impl From<InitialState> for RigidState {
    fn from(s: InitialState) -> Self {
        RigidState::new(Vector6::from(s.eta), Vector6::from(s.nu))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub vehicle: VehicleParams,
    pub allocation: AllocationVectors,
    pub initial_state: InitialState,
    pub dt_physics: f64,
    pub controller_rate: f64,
    pub duration: f64,
    pub delta_schedule: Vec<DemandSegment>,
    pub disturbance: Disturbance,
    pub controller: ControllerConfig,
    pub actuators: ActuatorConfig,
    pub seed: u64,
    pub flags: ControllerFlags,
    /// Replaces the controller when present.
    pub open_loop: Option<OpenLoop>,
    pub divergence_threshold_deg: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            vehicle: VehicleParams::reference(),
            allocation: AllocationVectors::default(),
            initial_state: InitialState::default(),
            dt_physics: 0.001,
            controller_rate: 500.0,
            duration: 10.0,
            delta_schedule: Vec::new(),
            disturbance: Disturbance::default(),
            controller: ControllerConfig::default(),
            actuators: ActuatorConfig::default(),
            seed: 0,
            flags: ControllerFlags::default(),
            open_loop: None,
            divergence_threshold_deg: DEFAULT_DIVERGENCE_DEG,
        }
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "reason", content = "detail", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    /// Attitude beyond the divergence threshold.
    Diverged(String),
    /// Integration failed (non-finite state or Euler singularity).
    StateError(String),
    ControllerError(String),
}

/// Kinetic and total (kinetic plus pendulum) energy increases over logged
/// steps of an unforced run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyCheck {
    pub max_kinetic_increase: f64,
    pub max_total_increase: f64,
    pub kinetic_non_increasing: bool,
    pub total_non_increasing: bool,
}

pub const ENERGY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimOutput {
    pub log: TrajectoryLog,
    pub metrics: ScenarioMetrics,
    pub termination: Termination,
    pub energy: Option<EnergyCheck>,
}

impl SimConfig {
    /// Physics steps per controller tick.
    pub fn substeps(&self) -> Result<usize, SimError> {
        if self.dt_physics <= 0.0 || !self.dt_physics.is_finite() {
            return Err(config_err("dt_physics must be positive"));
        }
        if self.controller_rate <= 0.0 || !self.controller_rate.is_finite() {
            return Err(config_err("controller_rate must be positive"));
        }
        let ratio = 1.0 / (self.controller_rate * self.dt_physics);
        let n = ratio.round();
        if n < 1.0 || (ratio - n).abs() > 1e-9 * ratio {
            return Err(config_err(format!(
                "controller period must be an integer multiple of dt_physics (ratio {ratio})"
            )));
        }
        Ok(n as usize)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.substeps()?;
        if self.duration <= 0.0 || !self.duration.is_finite() {
            return Err(config_err("duration must be positive"));
        }
        if !self.disturbance.is_valid() {
            return Err(config_err("disturbance std must be non-negative and finite"));
        }
        if self.actuators.tau_motor < 0.0 || self.actuators.tau_servo < 0.0 {
            return Err(config_err("actuator time constants must be non-negative"));
        }
        let c = &self.controller;
        if !c.beta_gains.is_valid() || !c.aux_gains.is_valid() {
            return Err(config_err("PID gains must be >= 0 with positive integral limit"));
        }
        if c.sat_bound.is_nan() || c.sat_bound <= 0.0 || c.k_zeta < 0.0 || c.hysteresis_fraction < 0.0 {
            return Err(config_err(
                "sat_bound must be positive, k_zeta and hysteresis non-negative",
            ));
        }
        if c.u_max.is_nan() || c.u_max <= 0.0 {
            return Err(config_err("u_max must be positive"));
        }
        if self.delta_schedule.windows(2).any(|w| w[1].t < w[0].t)
            || self.delta_schedule.iter().any(|s| !s.t.is_finite())
        {
            return Err(config_err("delta_schedule times must be finite and sorted"));
        }
        if self.divergence_threshold_deg.is_nan() || self.divergence_threshold_deg <= 0.0 {
            return Err(config_err("divergence_threshold_deg must be positive"));
        }
        if let Some(ol) = &self.open_loop {
            if let OpenLoopInputs::Schedule { segments } = &ol.inputs {
                if segments.windows(2).any(|w| w[1].t < w[0].t) {
                    return Err(config_err("open-loop input times must be sorted"));
                }
                if segments.iter().any(|s| s.motor_sq.iter().any(|&u| u.is_nan() || u < 0.0)) {
                    return Err(config_err("open-loop motor inputs must be >= 0"));
                }
            }
        }
        self.allocation.check()?;
        Ok(())
    }

    pub fn demand_at(&self, t: f64) -> Demand {
        self.delta_schedule
            .iter()
            .rev()
            .find(|s| s.t <= t)
            .map(|s| Demand {
                delta: s.delta,
                yaw_moment: s.yaw_moment,
            })
            .unwrap_or_default()
    }
}

/// Resolved open-loop inputs.
struct OpenLoopPlan {
    beta: f64,
    segments: Vec<InputSegment>,
}

impl OpenLoopPlan {
    fn new(ol: &OpenLoop, p: &VehicleParams, e: &AllocationVectors) -> Result<Self, SimError> {
        let beta = match ol.beta_relative_to {
            Some(kind) => stta_set(p)?.get(kind) + ol.beta,
            None => ol.beta,
        };
        if !(-std::f64::consts::FRAC_PI_2..=std::f64::consts::FRAC_PI_2).contains(&beta) {
            return Err(config_err(format!("open-loop tilt {beta} outside [-pi/2, pi/2]")));
        }
        let segments = match &ol.inputs {
            OpenLoopInputs::Schedule { segments } => segments.clone(),
            OpenLoopInputs::Leveling { surge_fraction } => {
                let s = beta.sin();
                if s * p.k_t == 0.0 {
                    return Err(config_err("leveling inputs need a nonzero tilt"));
                }
                let base = p.net_weight() / (4.0 * s * p.k_t);
                let u = std::array::from_fn(|i| base * (1.0 + surge_fraction * e.e_x[i]));
                if u.iter().any(|&v: &f64| v < 0.0) {
                    return Err(config_err("leveling inputs would be negative"));
                }
                vec![InputSegment { t: 0.0, motor_sq: u }]
            }
        };
        Ok(Self { beta, segments })
    }

    fn at(&self, t: f64) -> [f64; 4] {
        self.segments
            .iter()
            .rev()
            .find(|s| s.t <= t)
            .map_or([0.0; 4], |s| s.motor_sq)
    }

    fn unforced(&self) -> bool {
        self.segments
            .iter()
            .all(|s| s.motor_sq.iter().all(|&u| u == 0.0))
    }
}

fn lag_gain(tau: f64, dt: f64) -> f64 {
    if tau > 0.0 {
        1.0 - (-dt / tau).exp()
    } else {
        1.0
    }
}

struct TickCommand {
    beta: f64,
    motor_sq: [f64; 4],
    channel: Option<Channel>,
    aux_moment: f64,
    saturated: bool,
}

/// Runs one scenario. Deterministic for a fixed config and seed.
pub fn simulate(cfg: &SimConfig) -> Result<SimOutput, SimError> {
    cfg.validate()?;
    let n_sub = cfg.substeps()?;
    let vehicle = Vehicle::new(cfg.vehicle.clone(), cfg.allocation)?;
    let p = vehicle.params();
    let period = n_sub as f64 * cfg.dt_physics;
    let ticks = (cfg.duration / period + 1e-9).floor() as usize;
    if ticks == 0 {
        return Err(config_err("duration shorter than one controller period"));
    }

    let mut state: RigidState = cfg.initial_state.into();
    state.check().map_err(SimError::InitialState)?;

    let plan = match &cfg.open_loop {
        Some(ol) => Some(OpenLoopPlan::new(ol, p, &cfg.allocation)?),
        None => None,
    };
    let ctx = ControllerContext {
        cfg: &cfg.controller,
        flags: cfg.flags,
        params: p,
        alloc: &cfg.allocation,
        feedforward: match plan {
            Some(_) => Feedforward {
                beta_phi: 0.0,
                beta_theta: 0.0,
            },
            None => Feedforward::new(p)?,
        },
    };
    let mut ctl = ControllerState::new(&cfg.controller);
    let mut dist = DisturbanceGenerator::new(cfg.disturbance, cfg.seed, cfg.dt_physics);
    let unforced = plan.as_ref().is_some_and(|pl| pl.unforced()) && cfg.disturbance.is_zero();

    let a_motor = lag_gain(cfg.actuators.tau_motor, cfg.dt_physics);
    let a_servo = lag_gain(cfg.actuators.tau_servo, cfg.dt_physics);
    let threshold = cfg.divergence_threshold_deg.to_radians();

    let mut log = TrajectoryLog::default();
    let mut termination = Termination::Completed;
    let mut actuators: Option<ActuatorCommand> = None;
    let mut wrench = dist.sample();

    'run: for k in 0..=ticks {
        let t = k as f64 * period;
        let tick = match &plan {
            Some(pl) => TickCommand {
                beta: pl.beta,
                motor_sq: pl.at(t),
                channel: None,
                aux_moment: 0.0,
                saturated: false,
            },
            None => {
                let demand = cfg.demand_at(t);
                match controller_step(&ctx, &mut ctl, &state, &demand, period) {
                    Ok(out) => TickCommand {
                        beta: out.beta_cmd,
                        motor_sq: out.motor_sq,
                        channel: Some(out.diagnostics.active_channel),
                        aux_moment: out.diagnostics.aux_moment,
                        saturated: out.diagnostics.saturated,
                    },
                    Err(e) if k == 0 => return Err(SimError::Controller(e)),
                    Err(e) => {
                        termination = Termination::ControllerError(e.to_string());
                        break 'run;
                    }
                }
            }
        };
        let cmd = ActuatorCommand::new(tick.beta, tick.motor_sq);
        // actuators start trimmed at the first command
        let act = actuators.get_or_insert(cmd);
        let tau = vehicle.generalized_force(act.beta, &act.motor_sq) + wrench;
        let (n_phi, n_theta) = if plan.is_none() && cfg.flags.nussbaum_enabled {
            let g = ctl.nussbaum.gains();
            (g[0], g[1])
        } else {
            (1.0, 1.0)
        };
        log.push(LogRow {
            t,
            eta: state.eta.into(),
            nu: state.nu.into(),
            beta_cmd: tick.beta,
            motor_sq: tick.motor_sq,
            zeta_phi: ctl.nussbaum.zeta_phi,
            zeta_theta: ctl.nussbaum.zeta_theta,
            n_phi,
            n_theta,
            channel: tick.channel,
            tau: tau.into(),
            beta_act: act.beta,
            aux_moment: tick.aux_moment,
            saturated: tick.saturated,
        });
        if k == ticks {
            break;
        }
        for _ in 0..n_sub {
            act.beta += (cmd.beta - act.beta) * a_servo;
            act.motor_sq += (cmd.motor_sq - act.motor_sq) * a_motor;
            let tau = vehicle.generalized_force(act.beta, &act.motor_sq) + wrench;
            match rk4_step_wrench(&vehicle, &state, &tau, cfg.dt_physics) {
                Ok(next) => state = next,
                Err(e) => {
                    termination = Termination::StateError(e.to_string());
                    break 'run;
                }
            }
            wrench = dist.sample();
            if state.roll().abs() > threshold || state.pitch().abs() > threshold {
                termination = Termination::Diverged(format!(
                    "roll {:.2} deg, pitch {:.2} deg",
                    state.roll().to_degrees(),
                    state.pitch().to_degrees()
                ));
                break 'run;
            }
        }
    }

    if !matches!(termination, Termination::Completed) {
        push_terminal_row(&mut log, &state, period);
    }

    let energy = unforced.then(|| energy_check(&vehicle, &log));
    let mut m = metrics(&log, cfg.divergence_threshold_deg);
    if matches!(termination, Termination::StateError(_)) {
        m.diverged = true;
    }
    Ok(SimOutput {
        log,
        metrics: m,
        termination,
        energy,
    })
}

/// Appends the state that ended the run, stamped one period after the last
/// regular row.
fn push_terminal_row(log: &mut TrajectoryLog, state: &RigidState, period: f64) {
    if let Some(last) = log.rows.last().copied() {
        log.push(LogRow {
            t: last.t + period,
            eta: state.eta.into(),
            nu: state.nu.into(),
            ..last
        });
    }
}

fn energy_check(v: &Vehicle, log: &TrajectoryLog) -> EnergyCheck {
    let mut dk: f64 = f64::NEG_INFINITY;
    let mut dt: f64 = f64::NEG_INFINITY;
    let energies: Vec<(f64, f64)> = log
        .rows
        .iter()
        .map(|r| {
            let nu = Vector6::from(r.nu);
            let eta = Vector6::from(r.eta);
            let ke = v.kinetic_energy(&nu);
            (ke, ke + pendulum_potential(v.params(), &eta))
        })
        .collect();
    for w in energies.windows(2) {
        dk = dk.max(w[1].0 - w[0].0);
        dt = dt.max(w[1].1 - w[0].1);
    }
    if energies.len() < 2 {
        dk = 0.0;
        dt = 0.0;
    }
    EnergyCheck {
        max_kinetic_increase: dk,
        max_total_increase: dt,
        kinetic_non_increasing: dk <= ENERGY_TOL,
        total_non_increasing: dt <= ENERGY_TOL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn neutral() -> SimConfig {
        SimConfig {
            vehicle: VehicleParams {
                b: 29.43,
                ..VehicleParams::reference()
            },
            duration: 1.0,
            open_loop: Some(OpenLoop {
                beta: 0.0,
                beta_relative_to: None,
                inputs: OpenLoopInputs::Schedule { segments: vec![] },
            }),
            ..Default::default()
        }
    }

    #[test]
    fn quiet_run_has_zero_metrics() {
        let out = simulate(&neutral()).unwrap();
        assert_eq!(out.termination, Termination::Completed);
        assert_eq!(out.log.len(), 501);
        assert_eq!(out.metrics.max_abs_roll, 0.0);
        assert_eq!(out.metrics.heave_drift, 0.0);
        assert!(out.energy.unwrap().kinetic_non_increasing);
    }

    #[test]
    fn times_strictly_increase_with_fixed_stride() {
        let out = simulate(&neutral()).unwrap();
        for (i, r) in out.log.rows.iter().enumerate() {
            assert_eq!(r.t, i as f64 * 0.002);
        }
    }

    #[test]
    fn deterministic() {
        let mut cfg = SimConfig {
            duration: 1.0,
            delta_schedule: vec![DemandSegment {
                t: 0.0,
                delta: [0.0, 0.3],
                yaw_moment: 0.0,
            }],
            ..Default::default()
        };
        cfg.disturbance.noise_std = [0.05; 6];
        cfg.disturbance.noise_bandwidth = 2.0;
        cfg.seed = 9;
        let a = simulate(&cfg).unwrap().log.to_csv_string();
        let b = simulate(&cfg).unwrap().log.to_csv_string();
        assert_eq!(a, b);
    }

    #[test]
    fn bad_rate_ratio_rejected() {
        let cfg = SimConfig {
            controller_rate: 300.0,
            ..Default::default()
        };
        assert!(matches!(simulate(&cfg), Err(SimError::Config(_))));
    }

    #[test]
    fn zero_duration_rejected() {
        let cfg = SimConfig {
            duration: 0.0,
            ..Default::default()
        };
        assert!(simulate(&cfg).is_err());
    }

    #[test]
    fn demand_schedule_is_piecewise_constant() {
        let cfg = SimConfig {
            delta_schedule: vec![
                DemandSegment {
                    t: 1.0,
                    delta: [0.0, 1.0],
                    yaw_moment: 0.0,
                },
                DemandSegment {
                    t: 2.0,
                    delta: [1.0, 0.0],
                    yaw_moment: 0.1,
                },
            ],
            ..Default::default()
        };
        assert_eq!(cfg.demand_at(0.5).delta, [0.0, 0.0]);
        assert_eq!(cfg.demand_at(1.0).delta, [0.0, 1.0]);
        assert_eq!(cfg.demand_at(5.0).yaw_moment, 0.1);
    }
}
