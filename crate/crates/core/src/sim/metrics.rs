//! Scenario summary statistics.

use serde::Serialize;

use super::log::TrajectoryLog;

pub const DEFAULT_DIVERGENCE_DEG: f64 = 45.0;
/// Attitude band for the settling time, deg.
pub const SETTLING_BAND_DEG: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioMetrics {
    pub max_abs_roll: f64,
    pub max_abs_pitch: f64,
    pub diverged: bool,
    pub heave_drift: f64,
    /// First time after which both attitudes stay inside the settling
    /// band; `None` if the final sample is outside it.
    pub settling_time: Option<f64>,
    pub handovers: usize,
    /// `[min, max]` of the two Nussbaum gains over the run.
    pub n_phi_range: [f64; 2],
    pub n_theta_range: [f64; 2],
    pub saturated_fraction: f64,
    pub duration: f64,
}

fn range(it: impl Iterator<Item = f64>) -> [f64; 2] {
    it.fold([f64::INFINITY, f64::NEG_INFINITY], |[lo, hi], v| {
        [lo.min(v), hi.max(v)]
    })
}

/// Maxima over the log. `threshold_deg` is the divergence limit.
pub fn metrics(log: &TrajectoryLog, threshold_deg: f64) -> ScenarioMetrics {
    let rows = &log.rows;
    assert!(!rows.is_empty(), "metrics of an empty log");
    let deg = f64::to_degrees;
    let mut max_roll: f64 = 0.0;
    let mut max_pitch: f64 = 0.0;
    let mut diverged = false;
    let z0 = rows[0].eta[2];
    let mut drift: f64 = 0.0;
    for r in rows {
        let finite = r.eta.iter().chain(&r.nu).all(|v| v.is_finite());
        let (roll, pitch) = (deg(r.eta[3].abs()), deg(r.eta[4].abs()));
        if !finite || roll > threshold_deg || pitch > threshold_deg {
            diverged = true;
        }
        if finite {
            max_roll = max_roll.max(roll);
            max_pitch = max_pitch.max(pitch);
            drift = drift.max((r.eta[2] - z0).abs());
        } else {
            max_roll = f64::INFINITY;
            max_pitch = f64::INFINITY;
        }
    }

    let inside = |i: usize| {
        let r = &rows[i];
        deg(r.eta[3].abs()) <= SETTLING_BAND_DEG && deg(r.eta[4].abs()) <= SETTLING_BAND_DEG
    };
    let settling_time = if inside(rows.len() - 1) {
        let first_out = (0..rows.len()).rev().find(|&i| !inside(i));
        Some(first_out.map_or(rows[0].t, |i| rows[i + 1].t))
    } else {
        None
    };

    let handovers = rows
        .windows(2)
        .filter(|w| matches!((w[0].channel, w[1].channel), (Some(a), Some(b)) if a != b))
        .count();
    let saturated = rows.iter().filter(|r| r.saturated).count();

    ScenarioMetrics {
        max_abs_roll: max_roll,
        max_abs_pitch: max_pitch,
        diverged,
        heave_drift: drift,
        settling_time,
        handovers,
        n_phi_range: range(rows.iter().map(|r| r.n_phi)),
        n_theta_range: range(rows.iter().map(|r| r.n_theta)),
        saturated_fraction: saturated as f64 / rows.len() as f64,
        duration: rows[rows.len() - 1].t - rows[0].t,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controller::Channel;
    use crate::sim::log::tests::row;

    fn log_of(n: usize) -> TrajectoryLog {
        TrajectoryLog {
            rows: (0..n).map(|i| row(i as f64 * 0.01)).collect(),
        }
    }

    #[test]
    fn zero_log_gives_zero_metrics() {
        let m = metrics(&log_of(50), DEFAULT_DIVERGENCE_DEG);
        assert_eq!(m.max_abs_roll, 0.0);
        assert_eq!(m.max_abs_pitch, 0.0);
        assert!(!m.diverged);
        assert_eq!(m.heave_drift, 0.0);
        assert_eq!(m.settling_time, Some(0.0));
        assert_eq!(m.handovers, 0);
    }

    #[test]
    fn pitch_spike() {
        let mut log = log_of(50);
        log.rows[20].eta[4] = 6f64.to_radians();
        let m = metrics(&log, DEFAULT_DIVERGENCE_DEG);
        assert!((m.max_abs_pitch - 6.0).abs() < 1e-12);
        assert!(!m.diverged);
        assert_eq!(m.settling_time, Some(log.rows[21].t));
    }

    #[test]
    fn threshold_crossing_diverges() {
        let mut log = log_of(10);
        log.rows[9].eta[3] = 50f64.to_radians();
        let m = metrics(&log, DEFAULT_DIVERGENCE_DEG);
        assert!(m.diverged);
        assert_eq!(m.settling_time, None);
        let mut log = log_of(10);
        log.rows[9].nu[0] = f64::NAN;
        assert!(metrics(&log, DEFAULT_DIVERGENCE_DEG).diverged);
    }

    #[test]
    fn handovers_counted() {
        let mut log = log_of(10);
        for (i, r) in log.rows.iter_mut().enumerate() {
            r.channel = Some(if i < 4 { Channel::Roll } else { Channel::Pitch });
        }
        assert_eq!(metrics(&log, DEFAULT_DIVERGENCE_DEG).handovers, 1);
    }
}
