//! Rotor direction patterns used by the control effectiveness matrix.

use nalgebra::{Matrix4, RowVector4};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AllocationError {
    #[error("allocation vector `{0}` must contain only +1/-1 entries")]
    NotUnitSigned(&'static str),
    #[error("roll pattern must equal the sway pattern (e_phi = e_y)")]
    RollSwayMismatch,
    #[error("pitch pattern must be the negated surge pattern (e_theta = -e_x)")]
    PitchSurgeMismatch,
    #[error("[e_z; e_phi; e_theta; e_psi] has rank {0}, expected 4")]
    Dependent(usize),
}

/// Unit direction row vectors, one entry per rotor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AllocationVectors {
    pub e_x: [f64; 4],
    pub e_y: [f64; 4],
    pub e_z: [f64; 4],
    pub e_phi: [f64; 4],
    pub e_theta: [f64; 4],
    pub e_psi: [f64; 4],
}

impl Default for AllocationVectors {
    fn default() -> Self {
        let e_phi = [-1.0, 1.0, 1.0, -1.0];
        let e_theta = [-1.0, 1.0, -1.0, 1.0];
        Self {
            e_x: e_theta.map(|v| -v),
            e_y: e_phi,
            e_z: [1.0; 4],
            e_phi,
            e_theta,
            e_psi: [1.0, 1.0, -1.0, -1.0],
        }
    }
}

pub(crate) fn row(v: &[f64; 4]) -> RowVector4<f64> {
    RowVector4::from_row_slice(v)
}

impl AllocationVectors {
    /// The 4×4 stack `[e_z; e_phi; e_theta; e_psi]`.
    pub fn stack(&self) -> Matrix4<f64> {
        Matrix4::from_rows(&[
            row(&self.e_z),
            row(&self.e_phi),
            row(&self.e_theta),
            row(&self.e_psi),
        ])
    }

    /// Numerical rank of [`Self::stack`].
    pub fn stack_rank(&self) -> usize {
        let sv = self.stack().singular_values();
        let max = sv.max();
        if max == 0.0 {
            return 0;
        }
        sv.iter().filter(|&&s| s > 1e-9 * max).count()
    }

    pub fn check(&self) -> Result<(), AllocationError> {
        for (name, v) in [
            ("e_x", &self.e_x),
            ("e_y", &self.e_y),
            ("e_z", &self.e_z),
            ("e_phi", &self.e_phi),
            ("e_theta", &self.e_theta),
            ("e_psi", &self.e_psi),
        ] {
            if v.iter().any(|&x| x != 1.0 && x != -1.0) {
                return Err(AllocationError::NotUnitSigned(name));
            }
        }
        if self.e_phi != self.e_y {
            return Err(AllocationError::RollSwayMismatch);
        }
        if self.e_theta != self.e_x.map(|v| -v) {
            return Err(AllocationError::PitchSurgeMismatch);
        }
        match self.stack_rank() {
            4 => Ok(()),
            r => Err(AllocationError::Dependent(r)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_patterns_are_consistent() {
        let e = AllocationVectors::default();
        e.check().unwrap();
        assert_eq!(e.e_x, [1.0, -1.0, 1.0, -1.0]);
        // Hadamard rows: mutually orthogonal.
        let s = e.stack();
        let gram = s * s.transpose();
        assert_eq!(gram, Matrix4::identity() * 4.0);
    }

    #[test]
    fn duplicated_row_is_rank_deficient() {
        let mut e = AllocationVectors::default();
        e.e_z = e.e_psi;
        assert_eq!(e.check(), Err(AllocationError::Dependent(3)));
    }

    #[test]
    fn single_flipped_entry_keeps_full_rank() {
        let e = AllocationVectors {
            e_z: [1.0, 1.0, 1.0, -1.0],
            ..Default::default()
        };
        assert_eq!(e.stack_rank(), 4);
    }

    #[test]
    fn relation_violations_reported() {
        let e = AllocationVectors {
            e_y: [1.0, 1.0, -1.0, -1.0],
            ..Default::default()
        };
        assert_eq!(e.check(), Err(AllocationError::RollSwayMismatch));
        let d = AllocationVectors::default();
        let e = AllocationVectors { e_x: d.e_theta, ..d };
        assert_eq!(e.check(), Err(AllocationError::PitchSurgeMismatch));
        let mut e = AllocationVectors::default();
        e.e_psi[0] = 0.5;
        assert_eq!(e.check(), Err(AllocationError::NotUnitSigned("e_psi")));
    }
}
