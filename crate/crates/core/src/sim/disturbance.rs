//! Constant wrench plus band-limited Gaussian noise.

use nalgebra::Vector6;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Disturbance {
    /// Body wrench, N and N·m.
    pub constant_wrench: [f64; 6],
    /// Stationary standard deviation of the noise per axis.
    pub noise_std: [f64; 6],
    /// Corner frequency of the first-order noise filter, Hz. Zero or
    /// negative gives white noise at the sample rate.
    pub noise_bandwidth: f64,
}

impl Disturbance {
    pub fn is_valid(&self) -> bool {
        self.constant_wrench.iter().all(|v| v.is_finite())
            && self.noise_std.iter().all(|&s| s >= 0.0 && s.is_finite())
            && self.noise_bandwidth.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.constant_wrench.iter().all(|&v| v == 0.0) && self.noise_std.iter().all(|&v| v == 0.0)
    }
}

/// Sampler for one run; owns its RNG and filter memory.
#[derive(Debug, Clone)]
pub struct DisturbanceGenerator {
    d: Disturbance,
    rng: ChaCha8Rng,
    a: f64,
    b: f64,
    x: [f64; 6],
}

impl DisturbanceGenerator {
    /// `dt` is the sample period. The filter starts in its stationary
    /// distribution so the variance is flat from the first sample.
    pub fn new(d: Disturbance, seed: u64, dt: f64) -> Self {
        let a = if d.noise_bandwidth > 0.0 {
            (-2.0 * std::f64::consts::PI * d.noise_bandwidth * dt).exp()
        } else {
            0.0
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = [0.0; 6];
        for (xi, s) in x.iter_mut().zip(d.noise_std) {
            if s > 0.0 {
                let n: f64 = StandardNormal.sample(&mut rng);
                *xi = s * n;
            }
        }
        Self {
            d,
            rng,
            a,
            b: (1.0 - a * a).sqrt(),
            x,
        }
    }

    pub fn sample(&mut self) -> Vector6<f64> {
        let mut out = Vector6::from_column_slice(&self.d.constant_wrench);
        for i in 0..6 {
            let s = self.d.noise_std[i];
            if s > 0.0 {
                let n: f64 = StandardNormal.sample(&mut self.rng);
                self.x[i] = self.a * self.x[i] + self.b * s * n;
                out[i] += self.x[i];
            }
        }
        out
    }
}
