//! Physical constants of the vehicle.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while validating a [`VehicleParams`] set.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamsError {
    #[error("parameter `{name}` must be finite (got {value})")]
    NonFinite { name: &'static str, value: f64 },
    #[error("parameter `{name}` must be strictly positive (got {value})")]
    NotPositive { name: &'static str, value: f64 },
    #[error("damping coefficient `{name}` must be non-negative (got {value})")]
    NegativeDamping { name: &'static str, value: f64 },
    #[error("mass matrix is singular (|det| = {det:e})")]
    SingularMass { det: f64 },
}

/// Rigid-body, hydrodynamic and thruster constants.
///
/// Added-mass coefficients follow the marine convention: they are usually
/// negative and enter the mass matrix as subtractions (`M11 = m - x_udot`).
/// Linear damping coefficients are stored as positive dissipation magnitudes
/// and are placed on the diagonal of `D` unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VehicleParams {
    /// Mass, kg.
    pub m: f64,
    /// Vertical CoG offset below the CoB, m.
    pub z_g: f64,
    /// Distance from the rotor force plane to the CoB, m.
    pub z_t: f64,
    /// Wheelbase, m.
    pub l: f64,
    /// Thrust coefficient, N/(rad/s)^2.
    pub k_t: f64,
    /// Rotor drag torque coefficient, N·m/(rad/s)^2.
    pub k_m: f64,
    pub i_xx: f64,
    pub i_yy: f64,
    pub i_zz: f64,
    pub x_udot: f64,
    pub y_vdot: f64,
    pub z_wdot: f64,
    pub k_pdot: f64,
    pub m_qdot: f64,
    pub n_rdot: f64,
    pub x_qdot: f64,
    pub y_pdot: f64,
    pub x_u: f64,
    pub y_v: f64,
    pub z_w: f64,
    pub k_p: f64,
    pub m_q: f64,
    pub n_r: f64,
    /// Gravity force, N.
    pub g: f64,
    /// Buoyancy force, N.
    pub b: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self::reference()
    }
}

impl VehicleParams {
    /// Reference parameter set for a ~3 kg vehicle. Plausible magnitudes, not
    /// identified values.
    pub fn reference() -> Self {
        Self {
            m: 3.0,
            z_g: 0.02,
            z_t: 0.05,
            l: 0.2,
            k_t: 1e-5,
            k_m: 1e-7,
            i_xx: 0.03,
            i_yy: 0.03,
            i_zz: 0.05,
            x_udot: -1.0,
            y_vdot: -1.0,
            z_wdot: -2.0,
            k_pdot: -0.01,
            m_qdot: -0.01,
            n_rdot: -0.02,
            x_qdot: -0.05,
            y_pdot: -0.05,
            x_u: 5.0,
            y_v: 5.0,
            z_w: 5.0,
            k_p: 0.1,
            m_q: 0.1,
            n_r: 0.1,
            g: 29.43,
            b: 29.0,
        }
    }

    /// Net weight `G - B`, N.
    pub fn net_weight(&self) -> f64 {
        self.g - self.b
    }

    fn fields(&self) -> [(&'static str, f64); 25] {
        [
            ("m", self.m),
            ("z_g", self.z_g),
            ("z_t", self.z_t),
            ("l", self.l),
            ("k_t", self.k_t),
            ("k_m", self.k_m),
            ("i_xx", self.i_xx),
            ("i_yy", self.i_yy),
            ("i_zz", self.i_zz),
            ("x_udot", self.x_udot),
            ("y_vdot", self.y_vdot),
            ("z_wdot", self.z_wdot),
            ("k_pdot", self.k_pdot),
            ("m_qdot", self.m_qdot),
            ("n_rdot", self.n_rdot),
            ("x_qdot", self.x_qdot),
            ("y_pdot", self.y_pdot),
            ("x_u", self.x_u),
            ("y_v", self.y_v),
            ("z_w", self.z_w),
            ("k_p", self.k_p),
            ("m_q", self.m_q),
            ("n_r", self.n_r),
            ("g", self.g),
            ("b", self.b),
        ]
    }

    /// Checks the scalar invariants. Invertibility of the assembled mass
    /// matrix is checked by [`crate::dynamics::Vehicle::new`].
    pub fn validate(&self) -> Result<(), ParamsError> {
        for (name, value) in self.fields() {
            if !value.is_finite() {
                return Err(ParamsError::NonFinite { name, value });
            }
        }
        for (name, value) in [
            ("m", self.m),
            ("i_xx", self.i_xx),
            ("i_yy", self.i_yy),
            ("i_zz", self.i_zz),
            ("k_t", self.k_t),
            ("l", self.l),
        ] {
            if value <= 0.0 {
                return Err(ParamsError::NotPositive { name, value });
            }
        }
        for (name, value) in [
            ("x_u", self.x_u),
            ("y_v", self.y_v),
            ("z_w", self.z_w),
            ("k_p", self.k_p),
            ("m_q", self.m_q),
            ("n_r", self.n_r),
        ] {
            if value < 0.0 {
                return Err(ParamsError::NegativeDamping { name, value });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_set_is_valid() {
        VehicleParams::reference().validate().unwrap();
    }

    #[test]
    fn zero_inertia_rejected() {
        let p = VehicleParams {
            i_xx: 0.0,
            ..VehicleParams::reference()
        };
        assert_eq!(
            p.validate(),
            Err(ParamsError::NotPositive {
                name: "i_xx",
                value: 0.0
            })
        );
    }

    #[test]
    fn negative_damping_rejected() {
        let p = VehicleParams {
            m_q: -0.1,
            ..VehicleParams::reference()
        };
        assert!(matches!(
            p.validate(),
            Err(ParamsError::NegativeDamping { name: "m_q", .. })
        ));
    }

    #[test]
    fn json_field_names_are_snake_case_symbols() {
        let json = serde_json::to_value(VehicleParams::reference()).unwrap();
        for key in ["x_udot", "k_t", "k_m", "z_g", "y_pdot", "n_r", "g", "b"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        let bad = r#"{"m": 1.0, "mass": 2.0}"#;
        assert!(serde_json::from_str::<VehicleParams>(bad).is_err());
    }
}
