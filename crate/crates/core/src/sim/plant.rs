use rand::RngCore;

use crate::linalg::dot;
use crate::noise::NoiseModel;

/// Threshold sequence `c_k`.
#[derive(Debug, Clone, PartialEq)]
pub enum ThresholdSchedule {
    Constant(f64),
    /// `c_k = offset + amplitude · sin(2πk / period)`.
    Sine {
        offset: f64,
        amplitude: f64,
        period: f64,
    },
}

impl ThresholdSchedule {
    pub fn at(&self, k: u64) -> f64 {
        match *self {
            Self::Constant(c) => c,
            Self::Sine {
                offset,
                amplitude,
                period,
            } => offset + amplitude * (std::f64::consts::TAU * k as f64 / period).sin(),
        }
    }

    /// `sup_k |c_k|`.
    pub fn bound(&self) -> f64 {
        match *self {
            Self::Constant(c) => c.abs(),
            Self::Sine {
                offset, amplitude, ..
            } => offset.abs() + amplitude.abs(),
        }
    }
}

/// Linear regression plant read through a one-bit sensor:
/// `y_{k+1} = φ_kᵀθ + v_{k+1}`, `s_{k+1} = I(y_{k+1} >= c_k)`.
#[derive(Debug, Clone)]
pub struct Plant {
    pub theta_true: Vec<f64>,
    pub noise: NoiseModel<f64>,
    pub threshold: ThresholdSchedule,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantOutput {
    pub y: f64,
    pub s: bool,
    pub v: f64,
}

impl Plant {
    /// Output and bit for a given noise realisation.
    pub fn observe(&self, phi: &[f64], k: u64, v: f64) -> PlantOutput {
        let y = dot(phi, &self.theta_true) + v;
        PlantOutput {
            y,
            s: y >= self.threshold.at(k),
            v,
        }
    }

    /// Draws `v_{k+1}` and produces `(y_{k+1}, s_{k+1})`.
    pub fn step(&self, phi: &[f64], k: u64, rng: &mut dyn RngCore) -> PlantOutput {
        let v = self.noise.sample(k + 1, rng);
        self.observe(phi, k, v)
    }

    /// Bit-level martingale difference `ω_{k+1} = s_{k+1} − 1 + F_{k+1}(c_k − θᵀφ_k)`.
    pub fn omega(&self, phi: &[f64], k: u64, s: bool) -> f64 {
        let bit = if s { 1.0 } else { 0.0 };
        bit - 1.0 + self.noise.cdf(k + 1, self.threshold.at(k) - dot(phi, &self.theta_true))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn plant(theta: Vec<f64>) -> Plant {
        Plant {
            theta_true: theta,
            noise: NoiseModel::gaussian(1.0),
            threshold: ThresholdSchedule::Constant(0.0),
        }
    }

    #[test]
    fn boundary_counts_as_one() {
        let p = plant(vec![0.5, -0.5]);
        let out = p.observe(&[1.0, 1.0], 0, 0.0);
        assert_eq!(out.y, 0.0);
        assert!(out.s);
    }

    #[test]
    fn below_threshold_is_zero() {
        let mut p = plant(vec![0.0, 0.0]);
        p.threshold = ThresholdSchedule::Constant(0.5);
        for v in [-3.0, 0.0, 0.49] {
            assert!(!p.observe(&[1.0, 2.0], 7, v).s);
        }
    }

    #[test]
    fn one_rate_matches_cdf() {
        let p = plant(vec![0.5, -0.5]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let ones = (0..n).filter(|&k| p.step(&[1.0, 0.0], k, &mut rng).s).count();
        let rate = ones as f64 / n as f64;
        assert!((rate - 0.6914625).abs() < 0.005, "{rate}");
    }

    #[test]
    fn sine_threshold_bound() {
        let t = ThresholdSchedule::Sine {
            offset: 0.1,
            amplitude: 0.4,
            period: 20.0,
        };
        assert!((t.bound() - 0.5).abs() < 1e-15);
        assert!((0..200).all(|k| t.at(k).abs() <= 0.5 + 1e-15));
    }
}
