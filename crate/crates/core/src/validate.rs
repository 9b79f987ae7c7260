//! Invariant suite run by the `validate` subcommand.

use nalgebra::{Matrix6, Vector4, Vector6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::allocation::AllocationVectors;
use crate::dynamics::{
    cem, coriolis_matrix, mass_matrix, pendulum_potential, transform, transform_derivative,
    Vehicle,
};
use crate::params::VehicleParams;
use crate::sim::rk4_step_wrench;
use crate::state::RigidState;
use crate::stta::{
    longitudinal_allocation, rank_deficiency, stta_set, transverse_residual_scale,
    transverse_singularity_residual, RANK_TOL,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn res(name: &'static str, passed: bool, detail: impl Into<String>) -> InvariantResult {
    InvariantResult {
        name,
        passed,
        detail: detail.into(),
    }
}

fn random_nu(rng: &mut ChaCha8Rng, scale: f64) -> Vector6<f64> {
    Vector6::from_fn(|_, _| rng.random_range(-scale..scale))
}

/// Measured convergence order of RK4 on the decoupled heave problem
/// `M33 ẇ + Z_w w = F + (G - B)`, against its closed form.
pub fn rk4_heave_order(p: &VehicleParams) -> Result<f64, String> {
    let p = VehicleParams {
        z_g: 0.0,
        x_qdot: 0.0,
        y_pdot: 0.0,
        ..p.clone()
    };
    let v = Vehicle::new(p.clone(), AllocationVectors::default()).map_err(|e| e.to_string())?;
    let m33 = p.m - p.z_wdot;
    if p.z_w <= 0.0 {
        return Err("heave damping must be positive for the order study".into());
    }
    let f = 0.5;
    let lam = p.z_w / m33;
    let w_ss = (f + p.net_weight()) / p.z_w;
    let w0 = 0.3;
    let t_end = 2.0;
    let exact = w_ss + (w0 - w_ss) * (-lam * t_end).exp();
    let tau = Vector6::new(0.0, 0.0, f, 0.0, 0.0, 0.0);
    let err = |n: usize| -> Result<f64, String> {
        let dt = t_end / n as f64;
        let mut s = RigidState::default();
        s.nu[2] = w0;
        for _ in 0..n {
            s = rk4_step_wrench(&v, &s, &tau, dt).map_err(|e| e.to_string())?;
        }
        Ok((s.nu[2] - exact).abs())
    };
    let (e1, e2) = (err(10)?, err(20)?);
    Ok((e1 / e2).log2())
}

/// Runs every check against `p` and `e`.
pub fn run_invariants(p: &VehicleParams, e: &AllocationVectors) -> Vec<InvariantResult> {
    let mut out = Vec::new();
    let vehicle = match Vehicle::new(p.clone(), *e) {
        Ok(v) => {
            out.push(res(
                "construction",
                true,
                format!("mass matrix condition {:.3e}", v.mass_condition()),
            ));
            v
        }
        Err(err) => {
            out.push(res("construction", false, err.to_string()));
            return out;
        }
    };

    out.push(match e.check() {
        Ok(()) => res("allocation_independence", true, "stack rank 4"),
        Err(err) => res("allocation_independence", false, err.to_string()),
    });

    let m = mass_matrix(p);
    out.push(res(
        "mass_symmetry",
        m == m.transpose(),
        "M == M^T entrywise",
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut skew_ok = true;
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let nu = random_nu(&mut rng, 2.0);
        let c = coriolis_matrix(p, &nu);
        skew_ok &= c + c.transpose() == Matrix6::zeros();
        worst = worst.max(nu.dot(&(c * nu)).abs());
    }
    out.push(res(
        "coriolis_skew",
        skew_ok && worst < 1e-12,
        format!("max |nu^T C nu| = {worst:.2e}"),
    ));

    out.push(match stta_set(p) {
        Ok(set) => {
            let b0 = cem(p, set.beta_heave, e);
            let bpsi = cem(p, set.beta_psi, e);
            let scale = cem(p, 0.0, e).norm().max(f64::MIN_POSITIVE);
            let heave = b0.row(2).norm() / scale;
            let heading = bpsi.row(5).norm() / scale;
            let lon = longitudinal_allocation(p, 0.1, set.beta_theta, e);
            let rep = rank_deficiency(&lon, RANK_TOL);
            let trans =
                transverse_singularity_residual(p, set.beta_phi).abs() / transverse_residual_scale(p);
            let ok = heave < 1e-9 && heading < 1e-9 && rep.null_rows == [2] && trans < 1e-9;
            res(
                "stta_null_rows",
                ok,
                format!(
                    "heave {heave:.1e}, heading {heading:.1e}, longitudinal null rows {:?}, transverse {trans:.1e}",
                    rep.null_rows
                ),
            )
        }
        Err(err) => res("stta_null_rows", false, err.to_string()),
    });

    out.push(energy_invariant(p, e, &mut rng));

    out.push(match rk4_heave_order(p) {
        Ok(order) => res("rk4_order", order >= 3.9, format!("order {order:.3}")),
        Err(err) => res("rk4_order", false, err),
    });

    let mut worst: f64 = 0.0;
    let mut failure = None;
    for _ in 0..100 {
        let mut s = RigidState::default();
        for i in 3..6 {
            s.eta[i] = rng.random_range(-0.6..0.6);
        }
        s.nu = random_nu(&mut rng, 1.0);
        let beta = rng.random_range(-1.5..1.5);
        let u = Vector4::from_fn(|_, _| rng.random_range(0.0..1e5));
        match vehicle.eframe_dynamics(&s, beta) {
            Ok(ed) => {
                let tau = vehicle.generalized_force(beta, &u);
                let j = transform(&s.eta).expect("pitch in range");
                let jd = transform_derivative(&s.eta, &s.nu).expect("pitch in range");
                let body = jd * s.nu + j * vehicle.acceleration(&s, &tau);
                let d = (ed.eta_ddot(&u) - body).amax() / body.amax().max(1.0);
                worst = worst.max(d);
            }
            Err(err) => failure = Some(err.to_string()),
        }
    }
    out.push(match failure {
        Some(f) => res("eframe_consistency", false, f),
        None => res(
            "eframe_consistency",
            worst < 1e-9,
            format!("max relative gap {worst:.2e}"),
        ),
    });
    out
}

/// Neutrally buoyant, unforced run from random velocities: kinetic energy
/// must not grow with the CoG on the CoB, and kinetic plus pendulum energy
/// must not grow in general.
fn energy_invariant(
    p: &VehicleParams,
    e: &AllocationVectors,
    rng: &mut ChaCha8Rng,
) -> InvariantResult {
    let neutral = VehicleParams {
        b: p.g,
        ..p.clone()
    };
    let centred = VehicleParams {
        z_g: 0.0,
        ..neutral.clone()
    };
    let mut worst_ke: f64 = f64::NEG_INFINITY;
    let mut worst_total: f64 = f64::NEG_INFINITY;
    for (pp, kinetic_only) in [(&centred, true), (&neutral, false)] {
        let v = match Vehicle::new(pp.clone(), *e) {
            Ok(v) => v,
            Err(err) => return res("energy_dissipation", false, err.to_string()),
        };
        for _ in 0..5 {
            let mut s = RigidState::new(Vector6::zeros(), random_nu(rng, 0.5));
            let energy = |s: &RigidState| {
                let ke = v.kinetic_energy(&s.nu);
                if kinetic_only {
                    ke
                } else {
                    ke + pendulum_potential(pp, &s.eta)
                }
            };
            let mut prev = energy(&s);
            for _ in 0..2000 {
                s = match rk4_step_wrench(&v, &s, &Vector6::zeros(), 0.002) {
                    Ok(n) => n,
                    Err(err) => return res("energy_dissipation", false, err.to_string()),
                };
                let now = energy(&s);
                if kinetic_only {
                    worst_ke = worst_ke.max(now - prev);
                } else {
                    worst_total = worst_total.max(now - prev);
                }
                prev = now;
            }
        }
    }
    res(
        "energy_dissipation",
        worst_ke <= 1e-10 && worst_total <= 1e-10,
        format!("max step increase: kinetic {worst_ke:.2e}, total {worst_total:.2e}"),
    )
}
