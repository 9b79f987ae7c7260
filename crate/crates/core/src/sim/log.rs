//! Trajectory log and its CSV form.

use std::io::Write;

use serde::Serialize;

use crate::controller::Channel;

pub const CSV_HEADER: [&str; 29] = [
    "t", "x", "y", "z", "phi", "theta", "psi", "u", "v", "w", "p", "q", "r", "beta_cmd", "w1_sq",
    "w2_sq", "w3_sq", "w4_sq", "zeta_phi", "zeta_theta", "n_phi", "n_theta", "channel", "tau_1",
    "tau_2", "tau_3", "tau_4", "tau_5", "tau_6",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogRow {
    pub t: f64,
    pub eta: [f64; 6],
    pub nu: [f64; 6],
    pub beta_cmd: f64,
    pub motor_sq: [f64; 4],
    pub zeta_phi: f64,
    pub zeta_theta: f64,
    pub n_phi: f64,
    pub n_theta: f64,
    /// `None` for open-loop runs.
    pub channel: Option<Channel>,
    /// Body wrench acting at `t` (actuators plus disturbance).
    pub tau: [f64; 6],
    pub beta_act: f64,
    pub aux_moment: f64,
    pub saturated: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct TrajectoryLog {
    pub rows: Vec<LogRow>,
}

impl TrajectoryLog {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn push(&mut self, row: LogRow) {
        debug_assert!(self.rows.last().is_none_or(|r| r.t < row.t));
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(CSV_HEADER)?;
        let mut rec: Vec<String> = Vec::with_capacity(CSV_HEADER.len());
        for r in &self.rows {
            rec.clear();
            rec.push(r.t.to_string());
            rec.extend(r.eta.iter().chain(&r.nu).map(f64::to_string));
            rec.push(r.beta_cmd.to_string());
            rec.extend(r.motor_sq.iter().map(f64::to_string));
            for v in [r.zeta_phi, r.zeta_theta, r.n_phi, r.n_theta] {
                rec.push(v.to_string());
            }
            rec.push(r.channel.map_or("none", Channel::as_str).to_string());
            rec.extend(r.tau.iter().map(f64::to_string));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}
