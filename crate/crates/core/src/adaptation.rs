//! Adaptive prediction, regret, and certainty-equivalence tracking control.

use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::scalar::Real;

/// Default lower bound on `|θ̂ᵀh|` before the control denominator is clamped.
pub const DEFAULT_GAIN_FLOOR: f64 = 0.3;

fn same_len(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: a,
            found: b,
        })
    }
}

/// Adaptive predictor `ŷ_{k+1} = θ̂_kᵀφ_k + E(v_{k+1} | past)`.
pub fn predict<T: Real>(theta_hat: &[T], phi: &[T], mean_next: T) -> Result<T> {
    same_len(theta_hat.len(), phi.len())?;
    Ok(dot(theta_hat, phi) + mean_next)
}

/// Regret `R_k = ((θ − θ̂_k)ᵀ φ_k)²`.
pub fn regret<T: Real>(theta_true: &[T], theta_hat: &[T], phi: &[T]) -> Result<T> {
    same_len(theta_true.len(), theta_hat.len())?;
    same_len(theta_true.len(), phi.len())?;
    let r: T = theta_true
        .iter()
        .zip(theta_hat)
        .zip(phi)
        .map(|((&t, &h), &f)| (t - h) * f)
        .sum();
    Ok(r * r)
}

/// Regressor affine in the scalar input: `φ(u) = g + h·u`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineRegressor<T> {
    g: Vec<T>,
    h: Vec<T>,
}

impl<T: Real> AffineRegressor<T> {
    pub fn new(g: Vec<T>, h: Vec<T>) -> Result<Self> {
        same_len(g.len(), h.len())?;
        if h.iter().all(|&v| v == T::zero()) {
            return Err(Error::InvalidConfig("input direction h must be nonzero".into()));
        }
        Ok(Self { g, h })
    }

    /// `φ = [1, u]`.
    pub fn intercept_and_input() -> Self {
        Self {
            g: vec![T::one(), T::zero()],
            h: vec![T::zero(), T::one()],
        }
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn regressor(&self, u: T) -> Vec<T> {
        self.g.iter().zip(&self.h).map(|(&g, &h)| g + h * u).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlAction<T> {
    pub u: T,
    /// The denominator `θ̂ᵀh` was below the gain floor and got replaced.
    pub clamped: bool,
}

/// Input solving `θ̂ᵀφ(u) + E(v_{k+1} | past) = y*`.
///
/// When `|θ̂ᵀh| < gain_floor` the denominator becomes `sign(θ̂ᵀh)·gain_floor`
/// (with `sign(0) = +1`) and the action is flagged.
pub fn control_input<T: Real>(
    theta_hat: &[T],
    builder: &AffineRegressor<T>,
    y_star: T,
    mean_next: T,
    gain_floor: T,
) -> Result<ControlAction<T>> {
    same_len(builder.dim(), theta_hat.len())?;
    let gain = dot(theta_hat, &builder.h);
    let offset = dot(theta_hat, &builder.g);
    let (den, clamped) = if gain.abs() < gain_floor {
        let sign = if gain < T::zero() { -T::one() } else { T::one() };
        (sign * gain_floor, true)
    } else {
        (gain, false)
    };
    Ok(ControlAction {
        u: (y_star - mean_next - offset) / den,
        clamped,
    })
}

/// Running tracking and regret statistics for one replication.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrackingMetrics<T> {
    n: u64,
    sum_sq_tracking: T,
    sum_sigma_sq: T,
    regret_sum: T,
    theta_err_sq: T,
}

impl<T: Real> TrackingMetrics<T> {
    pub fn new() -> Self {
        Self {
            n: 0,
            sum_sq_tracking: T::zero(),
            sum_sigma_sq: T::zero(),
            regret_sum: T::zero(),
            theta_err_sq: T::zero(),
        }
    }

    /// Folds in step `k` (0-based): output `y_{k+1}`, reference `y*_{k+1}`,
    /// `σ²_{k+1}`, regret `R_k`, and `‖θ − θ̂_{k+1}‖²`.
    pub fn update(&mut self, k: u64, y: T, y_star: T, sigma_sq: T, regret: T, theta_err_sq: T) {
        debug_assert_eq!(k, self.n, "steps must be folded in order");
        let d = y - y_star;
        self.n += 1;
        self.sum_sq_tracking += d * d;
        self.sum_sigma_sq += sigma_sq;
        self.regret_sum += regret;
        self.theta_err_sq = theta_err_sq;
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `Σ R_k` over the folded steps.
    pub fn regret_sum(&self) -> T {
        self.regret_sum
    }

    /// `J_n`, the averaged squared tracking error.
    pub fn j_n(&self) -> Option<T> {
        (self.n > 0).then(|| self.sum_sq_tracking / self.count())
    }

    /// `(1/n) Σ σ_k²`, the minimum achievable `J_n`.
    pub fn mean_sigma_sq(&self) -> Option<T> {
        (self.n > 0).then(|| self.sum_sigma_sq / self.count())
    }

    /// `|J_n − (1/n)Σσ²| · √(n / log log n)`, defined for `n >= 3`.
    pub fn l_n(&self) -> Option<T> {
        if self.n < 3 {
            return None;
        }
        let n = self.count();
        let dev = (self.j_n()? - self.mean_sigma_sq()?).abs();
        Some(dev * (n / n.ln().ln()).sqrt())
    }

    /// `‖θ̃_n‖² · √n / log n`, defined for `n >= 3`.
    pub fn g_n(&self) -> Option<T> {
        if self.n < 3 {
            return None;
        }
        let n = self.count();
        Some(self.theta_err_sq * n.sqrt() / n.ln())
    }

    /// `Σ R_k / log n`, defined for `n >= 3`.
    pub fn regret_over_log_n(&self) -> Option<T> {
        (self.n >= 3).then(|| self.regret_sum / self.count().ln())
    }

    /// `Σ R_k / n`.
    pub fn regret_over_n(&self) -> Option<T> {
        (self.n > 0).then(|| self.regret_sum / self.count())
    }

    pub fn theta_err_sq(&self) -> T {
        self.theta_err_sq
    }

    fn count(&self) -> T {
        T::lit(self.n as f64)
    }
}
