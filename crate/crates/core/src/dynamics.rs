//! Six-degree-of-freedom hydrodynamic model.
//!
//! Body dynamics follow `M ν̇ + C(ν) ν + D ν + g(η) = τ` with `η̇ = J(η) ν`,
//! where `τ = B(β) u` is produced by four rotors sharing one tilt angle β.
//! Two Coriolis entries deliberately differ from the textbook derivation:
//!
//! * `C13 = -m v + Y_v̇ v + Y_ṗ p` has no `z_g` factor on the `p` term;
//! * `C18 = -m (z_g p + u) + X_u̇ u + X_q̇ q` uses `p` where pitch coupling
//!   would suggest `q`.
//!
//! Both sit in mirrored positions, so `C(ν)` stays skew-symmetric either way.

use nalgebra::{Matrix3, Matrix6, SMatrix, Vector4, Vector6};
use std::f64::consts::FRAC_1_SQRT_2;

use crate::allocation::{row, AllocationVectors};
use crate::params::{ParamsError, VehicleParams};
use crate::state::{check_pitch, RigidState, StateError};

/// Control effectiveness matrix type: six wrench rows, four rotors.
pub type Cem = SMatrix<f64, 6, 4>;

/// Mass matrix, rigid body plus added mass.
pub fn mass_matrix(p: &VehicleParams) -> Matrix6<f64> {
    let mut m = Matrix6::zeros();
    m[(0, 0)] = p.m - p.x_udot;
    m[(1, 1)] = p.m - p.y_vdot;
    m[(2, 2)] = p.m - p.z_wdot;
    m[(3, 3)] = p.i_xx - p.k_pdot;
    m[(4, 4)] = p.i_yy - p.m_qdot;
    m[(5, 5)] = p.i_zz - p.n_rdot;
    let m15 = p.m * p.z_g - p.x_qdot;
    let m14 = -p.m * p.z_g - p.y_pdot;
    m[(0, 4)] = m15;
    m[(4, 0)] = m15;
    m[(1, 3)] = m14;
    m[(3, 1)] = m14;
    m
}

/// Linear damping, `diag(X_u, Y_v, Z_w, K_p, M_q, N_r)`.
pub fn damping_matrix(p: &VehicleParams) -> Matrix6<f64> {
    Matrix6::from_diagonal(&Vector6::new(p.x_u, p.y_v, p.z_w, p.k_p, p.m_q, p.n_r))
}

/// Scalar Coriolis/centripetal entries, named as in the model sheet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoriolisTerms {
    pub c11: f64,
    pub c12: f64,
    pub c13: f64,
    pub c14: f64,
    pub c15: f64,
    pub c16: f64,
    pub c17: f64,
    pub c18: f64,
    pub c21: f64,
    pub c22: f64,
    pub c23: f64,
    pub c24: f64,
    pub c25: f64,
    pub c26: f64,
}

impl CoriolisTerms {
    pub fn new(p: &VehicleParams, nu: &Vector6<f64>) -> Self {
        let (u, v, w, pr, q, r) = (nu[0], nu[1], nu[2], nu[3], nu[4], nu[5]);
        let c11 = p.m * p.z_g * r;
        let c12 = p.m * w - p.z_wdot * w;
        let c21 = p.i_zz * r - p.n_rdot * r;
        let c22 = -p.i_yy * q + p.m_qdot * q;
        let c24 = p.i_xx * pr - p.k_pdot * pr;
        Self {
            c11,
            c12,
            c13: -p.m * v + p.y_vdot * v + p.y_pdot * pr,
            c14: -c12,
            c15: c11,
            c16: p.m * u - p.x_udot * u - p.x_qdot * q,
            c17: -p.m * (p.z_g * pr - v) - p.y_vdot * v - p.y_pdot * pr,
            c18: -p.m * (p.z_g * pr + u) + p.x_udot * u + p.x_qdot * q,
            c21,
            c22,
            c23: -c21,
            c24,
            c25: -c22,
            c26: -c24,
        }
    }
}

/// Coriolis/centripetal matrix `C(ν)`. Skew-symmetric by construction.
pub fn coriolis_matrix(p: &VehicleParams, nu: &Vector6<f64>) -> Matrix6<f64> {
    let c = CoriolisTerms::new(p, nu);
    let mut m = Matrix6::zeros();
    m[(0, 3)] = c.c11;
    m[(0, 4)] = c.c12;
    m[(0, 5)] = c.c13;
    m[(1, 3)] = c.c14;
    m[(1, 4)] = c.c15;
    m[(1, 5)] = c.c16;
    m[(2, 3)] = c.c17;
    m[(2, 4)] = c.c18;
    m[(3, 0)] = -c.c11;
    m[(3, 1)] = c.c12;
    m[(3, 2)] = -c.c17;
    m[(3, 4)] = c.c21;
    m[(3, 5)] = c.c22;
    m[(4, 0)] = c.c14;
    m[(4, 1)] = -c.c15;
    m[(4, 2)] = -c.c18;
    m[(4, 3)] = c.c23;
    m[(4, 5)] = c.c24;
    m[(5, 0)] = -c.c13;
    m[(5, 1)] = -c.c16;
    m[(5, 3)] = c.c25;
    m[(5, 4)] = c.c26;
    m
}

/// Gravity/buoyancy restoring vector `g(η)`.
pub fn restoring_vector(p: &VehicleParams, eta: &Vector6<f64>) -> Vector6<f64> {
    let (sphi, cphi) = eta[3].sin_cos();
    let (sth, cth) = eta[4].sin_cos();
    let net = p.g - p.b;
    Vector6::new(
        net * sth,
        -net * cth * sphi,
        -net * cth * cphi,
        p.z_g * p.g * cth * sphi,
        p.z_g * p.g * sth,
        0.0,
    )
}

/// Potential whose body-frame gradient is the restoring moment, for the
/// neutrally buoyant case. Used to state the passivity invariant when the
/// CoG sits off the CoB.
pub fn pendulum_potential(p: &VehicleParams, eta: &Vector6<f64>) -> f64 {
    p.z_g * p.g * (1.0 - eta[3].cos() * eta[4].cos())
}

/// Body-to-inertial rotation, ZYX (yaw, pitch, roll) Euler convention.
pub fn rotation_matrix(phi: f64, theta: f64, psi: f64) -> Matrix3<f64> {
    let (sf, cf) = phi.sin_cos();
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = psi.sin_cos();
    Matrix3::new(
        cp * ct,
        -sp * cf + cp * st * sf,
        sp * sf + cp * cf * st,
        sp * ct,
        cp * cf + sf * st * sp,
        -cp * sf + st * sp * cf,
        -st,
        ct * sf,
        ct * cf,
    )
}

/// Body angular rate to Euler angle rate transform.
fn euler_rate_transform(phi: f64, theta: f64) -> Matrix3<f64> {
    let (sf, cf) = phi.sin_cos();
    let (st, ct) = theta.sin_cos();
    let tt = st / ct;
    Matrix3::new(
        1.0,
        sf * tt,
        cf * tt,
        0.0,
        cf,
        -sf,
        0.0,
        sf / ct,
        cf / ct,
    )
}

fn euler_rate_transform_inverse(phi: f64, theta: f64) -> Matrix3<f64> {
    let (sf, cf) = phi.sin_cos();
    let (st, ct) = theta.sin_cos();
    Matrix3::new(1.0, 0.0, -st, 0.0, cf, ct * sf, 0.0, -sf, ct * cf)
}

fn skew(w: &nalgebra::Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -w[2], w[1], w[2], 0.0, -w[0], -w[1], w[0], 0.0)
}

fn block_diag(a: &Matrix3<f64>, b: &Matrix3<f64>) -> Matrix6<f64> {
    let mut m = Matrix6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(a);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(b);
    m
}

/// `J(η) = diag(R_b^e, S⁻¹)`.
pub fn transform(eta: &Vector6<f64>) -> Result<Matrix6<f64>, StateError> {
    check_pitch(eta[4])?;
    Ok(block_diag(
        &rotation_matrix(eta[3], eta[4], eta[5]),
        &euler_rate_transform(eta[3], eta[4]),
    ))
}

/// `J⁻¹(η) = diag(Rᵀ, S)`.
pub fn transform_inverse(eta: &Vector6<f64>) -> Result<Matrix6<f64>, StateError> {
    check_pitch(eta[4])?;
    Ok(block_diag(
        &rotation_matrix(eta[3], eta[4], eta[5]).transpose(),
        &euler_rate_transform_inverse(eta[3], eta[4]),
    ))
}

/// Analytic time derivative of `J` along the motion `(η, ν)`: `Ṙ = R [ω]×`
/// and the chain rule through the Euler rates for the angular block.
pub fn transform_derivative(
    eta: &Vector6<f64>,
    nu: &Vector6<f64>,
) -> Result<Matrix6<f64>, StateError> {
    check_pitch(eta[4])?;
    let (phi, theta) = (eta[3], eta[4]);
    let omega = nu.fixed_rows::<3>(3).into_owned();
    let r = rotation_matrix(phi, theta, eta[5]);
    let r_dot = r * skew(&omega);

    let rates = euler_rate_transform(phi, theta) * omega;
    let (phi_dot, theta_dot) = (rates[0], rates[1]);
    let (sf, cf) = phi.sin_cos();
    let (st, ct) = theta.sin_cos();
    let tt = st / ct;
    let c2 = ct * ct;
    let d_phi = Matrix3::new(
        0.0,
        cf * tt,
        -sf * tt,
        0.0,
        -sf,
        -cf,
        0.0,
        cf / ct,
        -sf / ct,
    );
    let d_theta = Matrix3::new(
        0.0,
        sf / c2,
        cf / c2,
        0.0,
        0.0,
        0.0,
        0.0,
        sf * st / c2,
        cf * st / c2,
    );
    let t_dot = d_phi * phi_dot + d_theta * theta_dot;
    Ok(block_diag(&r_dot, &t_dot))
}

/// Body moment coefficients of the tilted rotor plate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentCoeffs {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

pub fn moment_coeffs(p: &VehicleParams, beta: f64) -> MomentCoeffs {
    let (sb, cb) = beta.sin_cos();
    MomentCoeffs {
        k1: p.l * sb * p.k_t + cb * (p.k_m - p.z_t * p.k_t),
        k2: -p.l * sb * p.k_t + cb * (p.k_m + p.z_t * p.k_t),
        k3: p.k_t * p.l * cb - sb * p.k_m,
    }
}

/// Common row scale of the effectiveness matrix, `√2/2`.
pub const CEM_SCALE: f64 = FRAC_1_SQRT_2;

/// Control effectiveness matrix `B(β)` mapping squared rotor speeds to the
/// body wrench.
pub fn cem(p: &VehicleParams, beta: f64, e: &AllocationVectors) -> Cem {
    let (sb, cb) = beta.sin_cos();
    let k = moment_coeffs(p, beta);
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut b = Cem::zeros();
    b.set_row(0, &(row(&e.e_x) * (cb * p.k_t)));
    b.set_row(1, &(row(&e.e_y) * (cb * p.k_t)));
    b.set_row(2, &(row(&e.e_z) * (-sqrt2 * sb * p.k_t)));
    b.set_row(3, &(row(&e.e_phi) * k.k1));
    b.set_row(4, &(row(&e.e_theta) * k.k2));
    b.set_row(5, &(row(&e.e_psi) * (sqrt2 * k.k3)));
    b * CEM_SCALE
}

/// `τ = B(β) u`.
pub fn generalized_force(
    p: &VehicleParams,
    beta: f64,
    u: &Vector4<f64>,
    e: &AllocationVectors,
) -> Vector6<f64> {
    cem(p, beta, e) * u
}

/// Inertial-frame form of the dynamics, `η̈ = B_e u + f(η, η̇)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EframeDynamics {
    pub b_e: Cem,
    pub f: Vector6<f64>,
}

impl EframeDynamics {
    pub fn eta_ddot(&self, u: &Vector4<f64>) -> Vector6<f64> {
        self.b_e * u + self.f
    }
}

/// A parameter set together with its state-independent matrices. The mass
/// matrix is inverted once at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Vehicle {
    params: VehicleParams,
    alloc: AllocationVectors,
    mass: Matrix6<f64>,
    mass_inv: Matrix6<f64>,
    damping: Matrix6<f64>,
    condition: f64,
}

impl Vehicle {
    pub fn new(params: VehicleParams, alloc: AllocationVectors) -> Result<Self, ParamsError> {
        params.validate()?;
        let mass = mass_matrix(&params);
        let sv = mass.singular_values();
        let (smax, smin) = (sv.max(), sv.min());
        let det = mass.determinant();
        if smin <= 1e-12 * smax || det.abs() < f64::MIN_POSITIVE {
            return Err(ParamsError::SingularMass { det });
        }
        let mass_inv = mass
            .try_inverse()
            .ok_or(ParamsError::SingularMass { det })?;
        Ok(Self {
            damping: damping_matrix(&params),
            params,
            alloc,
            mass,
            mass_inv,
            condition: smax / smin,
        })
    }

    pub fn params(&self) -> &VehicleParams {
        &self.params
    }

    pub fn alloc(&self) -> &AllocationVectors {
        &self.alloc
    }

    pub fn mass(&self) -> &Matrix6<f64> {
        &self.mass
    }

    pub fn mass_inv(&self) -> &Matrix6<f64> {
        &self.mass_inv
    }

    pub fn damping(&self) -> &Matrix6<f64> {
        &self.damping
    }

    /// 2-norm condition number of the mass matrix.
    pub fn mass_condition(&self) -> f64 {
        self.condition
    }

    pub fn cem(&self, beta: f64) -> Cem {
        cem(&self.params, beta, &self.alloc)
    }

    pub fn generalized_force(&self, beta: f64, u: &Vector4<f64>) -> Vector6<f64> {
        generalized_force(&self.params, beta, u, &self.alloc)
    }

    /// `ν̇ = M⁻¹ (τ - C(ν) ν - D ν - g(η))`.
    pub fn acceleration(&self, s: &RigidState, tau: &Vector6<f64>) -> Vector6<f64> {
        let c = coriolis_matrix(&self.params, &s.nu);
        let g = restoring_vector(&self.params, &s.eta);
        self.mass_inv * (tau - c * s.nu - self.damping * s.nu - g)
    }

    /// Time derivative of the 12-dimensional state.
    pub fn state_derivative(
        &self,
        s: &RigidState,
        tau: &Vector6<f64>,
    ) -> Result<RigidState, StateError> {
        let j = transform(&s.eta)?;
        Ok(RigidState {
            eta: j * s.nu,
            nu: self.acceleration(s, tau),
        })
    }

    /// `½ νᵀ M ν`.
    pub fn kinetic_energy(&self, nu: &Vector6<f64>) -> f64 {
        0.5 * nu.dot(&(self.mass * nu))
    }

    /// `B_e = J M⁻¹ B(β)` and
    /// `f = (J̇ - J M⁻¹ C - J M⁻¹ D) J⁻¹ η̇ - J M⁻¹ g`.
    pub fn eframe_dynamics(&self, s: &RigidState, beta: f64) -> Result<EframeDynamics, StateError> {
        let j = transform(&s.eta)?;
        let j_inv = transform_inverse(&s.eta)?;
        let j_dot = transform_derivative(&s.eta, &s.nu)?;
        let eta_dot = j * s.nu;
        let c = coriolis_matrix(&self.params, &s.nu);
        let g = restoring_vector(&self.params, &s.eta);
        let jm = j * self.mass_inv;
        let b_e = jm * self.cem(beta);
        let f = (j_dot - jm * c - jm * self.damping) * j_inv * eta_dot - jm * g;
        Ok(EframeDynamics { b_e, f })
    }
}
