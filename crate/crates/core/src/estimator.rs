//! Projected quasi-Newton identification from binary-valued observations.
//!
//! One step consumes the regressor `φ_k`, the threshold `c_k` and the bit
//! `s_{k+1} = I(y_{k+1} >= c_k)` and performs, in order:
//!
//! ```text
//! a_k       = 1 / (1 + β_k² φᵀ P_k φ)
//! e_{k+1}   = s_{k+1} − 1 + F_{k+1}(c_k − φᵀ θ̂_k)
//! P_{k+1}   = P_k − β_k² a_k P_k φ φᵀ P_k            (then symmetrised)
//! P_{k+1}⁻¹ = P_k⁻¹ + β_k² φ φᵀ
//! θ̂_{k+1}   = Π_{P_{k+1}⁻¹}( θ̂_k + a_k β_k P_k φ e_{k+1} )
//! β_{k+1}   = min(β_k, inf_{|x| <= LM+C} f_{k+2}(x))
//! ```
//!
//! `P_k⁻¹` is carried alongside `P_k` through its own additive recursion, so
//! the product of the two is a live check on the rank-one downdate.

use crate::error::{Error, Result};
use crate::geometry::{project, ConvexBox, WeightedMetric};
use crate::linalg::{dot, norm, Matrix};
use crate::noise::NoiseModel;
use crate::scalar::Real;

/// Steps between mutual-inverse checks of `P` and `P⁻¹`.
pub const INVERSE_CHECK_PERIOD: u64 = 1000;

#[derive(Debug, Clone)]
pub struct EstimatorConfig<T> {
    /// Parameter set `D`.
    pub domain: ConvexBox<T>,
    /// `M`, the regressor norm bound.
    pub regressor_bound: T,
    /// `C`, the threshold magnitude bound.
    pub threshold_bound: T,
    pub noise: NoiseModel<T>,
    pub beta0: T,
    pub p0: Matrix<T>,
    pub theta0: Vec<T>,
}

impl<T: Real> EstimatorConfig<T> {
    /// `L·M + C`, the half-width of the interval on which the noise density must stay positive.
    pub fn density_radius(&self) -> T {
        self.domain.radius() * self.regressor_bound + self.threshold_bound
    }

    /// Supremum of admissible `β_0`: `min(1, inf_{|x| <= LM+C} f_1(x))`.
    pub fn beta0_bound(&self) -> Result<T> {
        Ok(T::one().min(self.noise.inf_density(1, self.density_radius())?))
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.domain.dim();
        if self.theta0.len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: self.theta0.len(),
            });
        }
        if self.p0.rows() != p || self.p0.cols() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: self.p0.rows(),
            });
        }
        if !(self.regressor_bound > T::zero() && self.regressor_bound.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "regressor bound M = {} must be positive and finite",
                self.regressor_bound
            )));
        }
        if !(self.threshold_bound >= T::zero() && self.threshold_bound.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "threshold bound C = {} must be nonnegative and finite",
                self.threshold_bound
            )));
        }
        if !self.domain.contains(&self.theta0) {
            return Err(Error::InvalidConfig(format!(
                "theta0 {:?} lies outside the parameter box [{:?}, {:?}]",
                self.theta0,
                self.domain.lo(),
                self.domain.hi()
            )));
        }
        if self.p0.max_asymmetry() > T::zero() || self.p0.cholesky().is_none() {
            return Err(Error::InvalidConfig(
                "P0 must be symmetric positive definite".into(),
            ));
        }
        let bound = self.beta0_bound()?;
        if !(self.beta0 > T::zero() && self.beta0 < bound) {
            return Err(Error::InvalidConfig(format!(
                "beta0 = {} must lie in the open interval (0, min{{1, inf_{{|x|<=LM+C}} f_1(x)}}) = (0, {}) with LM+C = {}",
                self.beta0,
                bound,
                self.density_radius()
            )));
        }
        Ok(())
    }
}

/// Diagnostic output of a single step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome<T> {
    /// Innovation `e_{k+1}`, in `[s − 1, s]`.
    pub e: T,
    /// Gain scalar `a_k`, in `(0, 1]`.
    pub a: T,
    /// `β_k` used by this step.
    pub beta: T,
    /// Iterate before projection.
    pub theta_pre: Vec<T>,
    /// `θ̂_{k+1}`.
    pub theta_hat: Vec<T>,
    /// Model probability of a one bit, `1 − F_{k+1}(c_k − φᵀθ̂_k)`.
    pub predicted_prob: T,
    /// `‖φ_k‖ > M` for this step.
    pub regressor_out_of_bound: bool,
}

#[derive(Debug, Clone)]
pub struct Estimator<T> {
    domain: ConvexBox<T>,
    noise: NoiseModel<T>,
    radius: T,
    regressor_bound: T,
    k: u64,
    theta_hat: Vec<T>,
    p: Matrix<T>,
    p_inv: Matrix<T>,
    beta: T,
    bound_violations: u64,
    max_inverse_residual: T,
}

impl<T: Real> Estimator<T> {
    pub fn new(config: EstimatorConfig<T>) -> Result<Self> {
        config.validate()?;
        let p_inv = config
            .p0
            .inverse()
            .ok_or_else(|| Error::InvalidConfig("P0 is singular".into()))?;
        let radius = config.density_radius();
        Ok(Self {
            radius,
            regressor_bound: config.regressor_bound,
            k: 0,
            theta_hat: config.theta0,
            p: config.p0,
            p_inv,
            beta: config.beta0,
            bound_violations: 0,
            max_inverse_residual: T::zero(),
            domain: config.domain,
            noise: config.noise,
        })
    }

    pub fn step(&mut self, phi: &[T], c: T, s: bool) -> Result<StepOutcome<T>> {
        let dim = self.theta_hat.len();
        if phi.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: phi.len(),
            });
        }
        if phi.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput("regressor"));
        }
        if !c.is_finite() {
            return Err(Error::NonFiniteInput("threshold"));
        }
        let out_of_bound = norm(phi) > self.regressor_bound;

        // β_{k+1} depends only on the noise law; fail before touching the state.
        let next_inf = self.noise.inf_density(self.k + 2, self.radius)?;

        let beta = self.beta;
        let beta2 = beta * beta;
        let p_phi = self.p.mul_vec(phi);
        let a = T::one() / (T::one() + beta2 * dot(phi, &p_phi));

        let prob_zero = self.noise.cdf(self.k + 1, c - dot(phi, &self.theta_hat));
        let bit = if s { T::one() } else { T::zero() };
        let e = bit - T::one() + prob_zero;

        let mut p_next = self.p.clone();
        p_next.add_outer(-(beta2 * a), &p_phi, &p_phi);
        p_next.symmetrize();
        let mut p_inv_next = self.p_inv.clone();
        p_inv_next.add_outer(beta2, phi, phi);

        let gain = a * beta * e;
        let theta_pre: Vec<T> = self
            .theta_hat
            .iter()
            .zip(&p_phi)
            .map(|(&t, &g)| t + gain * g)
            .collect();
        let theta_next = if self.domain.contains(&theta_pre) {
            theta_pre.clone()
        } else {
            let metric = WeightedMetric::new(p_inv_next.clone())?;
            project(&metric, &self.domain, &theta_pre)?
        };
        if !p_next.is_finite() || theta_next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput("state became non-finite"));
        }

        self.p = p_next;
        self.p_inv = p_inv_next;
        self.theta_hat = theta_next.clone();
        self.beta = beta.min(next_inf);
        self.k += 1;
        if out_of_bound {
            self.bound_violations += 1;
            if self.bound_violations == 1 {
                log::warn!(
                    "regressor norm {} exceeds the configured bound M = {} at step {}",
                    norm(phi),
                    self.regressor_bound,
                    self.k - 1
                );
            }
        }
        if self.k.is_multiple_of(INVERSE_CHECK_PERIOD) {
            let r = self.inverse_residual();
            if r > self.max_inverse_residual {
                self.max_inverse_residual = r;
            }
        }

        Ok(StepOutcome {
            e,
            a,
            beta,
            theta_pre,
            theta_hat: theta_next,
            predicted_prob: T::one() - prob_zero,
            regressor_out_of_bound: out_of_bound,
        })
    }

    /// `θ̂_k`.
    pub fn estimate(&self) -> &[T] {
        &self.theta_hat
    }

    /// `P_k⁻¹`.
    pub fn covariance_inverse(&self) -> &Matrix<T> {
        &self.p_inv
    }

    /// `P_k`.
    pub fn covariance(&self) -> &Matrix<T> {
        &self.p
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    /// `γ_k = 1/β_k`.
    pub fn gamma(&self) -> T {
        T::one() / self.beta
    }

    pub fn steps(&self) -> u64 {
        self.k
    }

    pub fn domain(&self) -> &ConvexBox<T> {
        &self.domain
    }

    pub fn noise(&self) -> &NoiseModel<T> {
        &self.noise
    }

    /// `L·M + C`.
    pub fn density_radius(&self) -> T {
        self.radius
    }

    /// Number of steps so far whose regressor exceeded `M`.
    pub fn bound_violations(&self) -> u64 {
        self.bound_violations
    }

    /// `‖P_k · P_k⁻¹ − I‖_max`.
    pub fn inverse_residual(&self) -> T {
        self.p.matmul(&self.p_inv).identity_residual()
    }

    /// Largest residual seen at the periodic checks.
    pub fn max_inverse_residual(&self) -> T {
        self.max_inverse_residual
    }
}
