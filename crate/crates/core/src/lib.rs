//! Recursive identification of linear stochastic regression models observed
//! through binary-valued sensors with (possibly time-varying) thresholds,
//! plus the adaptive predictor and tracking controller built on top of it.
//!
//! The numerical core ([`noise`], [`geometry`], [`estimator`],
//! [`adaptation`]) is generic over the scalar type; [`sim`] and [`config`]
//! drive `f64` experiments.

pub mod adaptation;
pub mod config;
pub mod error;
pub mod estimator;
pub mod geometry;
pub mod linalg;
pub mod noise;
pub mod plots;
pub mod scalar;
pub mod sim;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Matrix64 = linalg::Matrix<f64>;
pub type Matrix32 = linalg::Matrix<f32>;
pub type ConvexBox64 = geometry::ConvexBox<f64>;
pub type ConvexBox32 = geometry::ConvexBox<f32>;
pub type WeightedMetric64 = geometry::WeightedMetric<f64>;
pub type NoiseModel64 = noise::NoiseModel<f64>;
pub type NoiseModel32 = noise::NoiseModel<f32>;
pub type EstimatorConfig64 = estimator::EstimatorConfig<f64>;
pub type Estimator64 = estimator::Estimator<f64>;
pub type Estimator32 = estimator::Estimator<f32>;
pub type TrackingMetrics64 = adaptation::TrackingMetrics<f64>;
