//! Conditional noise laws.
//!
//! The estimator never sees the noise, but its step sizes and innovations are
//! built from the (known) conditional distribution of `v_k`: the cdf `F_k`
//! enters every innovation, and the infimum of the density `f_k` over the
//! interval `|x| <= L·M + C` caps the gain scalar `β_k`.
//!
//! Laws here depend on the time index only. Dependence on the full observed
//! past is not modelled.

use std::fmt;
use std::sync::Arc;

use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Number of uniform grid intervals used for the density infimum of custom laws.
pub const CUSTOM_INF_GRID: usize = 10_000;

/// A user supplied conditional law for `v_k`.
pub trait CustomNoise<T: Real>: Send + Sync {
    fn cdf(&self, k: u64, x: T) -> T;
    fn pdf(&self, k: u64, x: T) -> T;
    fn mean(&self, k: u64) -> T;
    fn variance(&self, k: u64) -> T;
    fn sample(&self, k: u64, rng: &mut dyn RngCore) -> T;
}

/// Deterministic standard-deviation schedule `k ↦ σ_k`.
#[derive(Clone)]
pub struct SigmaSchedule<T> {
    label: String,
    sigma: Arc<dyn Fn(u64) -> T + Send + Sync>,
}

impl<T: Real> SigmaSchedule<T> {
    pub fn new(label: impl Into<String>, sigma: impl Fn(u64) -> T + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            sigma: Arc::new(sigma),
        }
    }

    /// `σ_k = scale · (max(log k, 1))^{-1/4}`, so that the variance decays like `1/√(log k)`.
    /// Indices with `log k <= 1` (including `k = 0`) use `σ_k = scale`.
    pub fn log_decay(scale: T) -> Self {
        Self::new("log-decay", move |k| {
            let lk = if k == 0 { T::zero() } else { T::lit((k as f64).ln()) };
            scale * lk.max(T::one()).powf(T::lit(-0.25))
        })
    }

    #[inline]
    pub fn at(&self, k: u64) -> T {
        (self.sigma)(k)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl<T> fmt::Debug for SigmaSchedule<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SigmaSchedule")
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

#[derive(Clone)]
pub enum NoiseModel<T> {
    GaussianConstant { sigma: T },
    GaussianSchedule(SigmaSchedule<T>),
    Custom(Arc<dyn CustomNoise<T>>),
}

impl<T: fmt::Debug> fmt::Debug for NoiseModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::GaussianConstant { sigma } => {
                f.debug_struct("GaussianConstant").field("sigma", sigma).finish()
            }
            Self::GaussianSchedule(s) => f.debug_tuple("GaussianSchedule").field(s).finish(),
            Self::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl<T: Real> NoiseModel<T> {
    pub fn gaussian(sigma: T) -> Self {
        Self::GaussianConstant { sigma }
    }

    pub fn gaussian_log_decay(scale: T) -> Self {
        Self::GaussianSchedule(SigmaSchedule::log_decay(scale))
    }

    pub fn custom(law: impl CustomNoise<T> + 'static) -> Self {
        Self::Custom(Arc::new(law))
    }

    /// Standard deviation at index `k` for the Gaussian families.
    pub fn sigma(&self, k: u64) -> Option<T> {
        match self {
            Self::GaussianConstant { sigma } => Some(*sigma),
            Self::GaussianSchedule(s) => Some(s.at(k)),
            Self::Custom(_) => None,
        }
    }

    /// `F_k(x)`.
    pub fn cdf(&self, k: u64, x: T) -> T {
        match self.sigma(k) {
            Some(s) => std_normal_cdf(x / s),
            None => self.custom_law().cdf(k, x),
        }
    }

    /// `f_k(x)`.
    pub fn pdf(&self, k: u64, x: T) -> T {
        match self.sigma(k) {
            Some(s) => std_normal_pdf(x / s) / s,
            None => self.custom_law().pdf(k, x),
        }
    }

    /// `inf_{|x| <= radius} f_k(x)`.
    ///
    /// Gaussian laws are symmetric and unimodal, so the infimum sits at the
    /// endpoint. Custom laws are minimised over a uniform grid that includes
    /// both endpoints.
    pub fn inf_density(&self, k: u64, radius: T) -> Result<T> {
        let r = radius.abs();
        let value = match self {
            Self::GaussianConstant { .. } | Self::GaussianSchedule(_) => self.pdf(k, r),
            Self::Custom(law) => {
                let n = CUSTOM_INF_GRID;
                let step = (r + r) / T::lit(n as f64);
                (0..=n)
                    .map(|i| {
                        let x = if i == n { r } else { -r + step * T::lit(i as f64) };
                        law.pdf(k, x)
                    })
                    .fold(T::infinity(), |m, v| if v < m || v.is_nan() { v } else { m })
            }
        };
        if value > T::zero() {
            Ok(value)
        } else {
            Err(Error::NonpositiveDensity {
                k,
                radius: r.to_f64_lossy(),
                value: value.to_f64_lossy(),
            })
        }
    }

    /// `E(v_k | past)`.
    pub fn conditional_mean(&self, k: u64) -> T {
        match self {
            Self::Custom(law) => law.mean(k),
            _ => T::zero(),
        }
    }

    /// Conditional variance `σ_k²`.
    pub fn variance(&self, k: u64) -> T {
        match self.sigma(k) {
            Some(s) => s * s,
            None => self.custom_law().variance(k),
        }
    }

    /// Draws `v_k`.
    pub fn sample(&self, k: u64, rng: &mut dyn RngCore) -> T {
        match self.sigma(k) {
            Some(s) => {
                let z: f64 = StandardNormal.sample(rng);
                s * T::lit(z)
            }
            None => self.custom_law().sample(k, rng),
        }
    }

    fn custom_law(&self) -> &dyn CustomNoise<T> {
        match self {
            Self::Custom(law) => law.as_ref(),
            _ => unreachable!("gaussian families are handled in closed form"),
        }
    }
}

/// Standard normal density.
pub fn std_normal_pdf<T: Real>(z: T) -> T {
    let inv_sqrt_2pi = T::FRAC_1_SQRT_2() * T::FRAC_2_SQRT_PI() * T::lit(0.5);
    inv_sqrt_2pi * (-(z * z) * T::lit(0.5)).exp()
}

/// Standard normal cdf `Φ(z) = erfc(−z/√2)/2`.
pub fn std_normal_cdf<T: Real>(z: T) -> T {
    if z.is_nan() {
        return z;
    }
    let half = T::lit(0.5);
    let x = z.abs() * T::FRAC_1_SQRT_2();
    let tail = half * erfc_nonneg(x);
    if z < T::zero() {
        tail
    } else {
        T::one() - tail
    }
}

/// Complementary error function.
pub fn erfc<T: Real>(x: T) -> T {
    if x < T::zero() {
        T::lit(2.0) - erfc_nonneg(-x)
    } else {
        erfc_nonneg(x)
    }
}

/// Error function.
pub fn erf<T: Real>(x: T) -> T {
    if x.abs() < T::lit(SERIES_CUTOFF) {
        erf_series(x)
    } else {
        T::one() - erfc(x)
    }
}

const SERIES_CUTOFF: f64 = 2.5;

fn erfc_nonneg<T: Real>(x: T) -> T {
    if x < T::lit(SERIES_CUTOFF) {
        T::one() - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

// erf(x) = (2/√π) e^{-x²} Σ_n 2^n x^{2n+1} / (1·3·…·(2n+1)); every term is positive.
fn erf_series<T: Real>(x: T) -> T {
    let two_x2 = x * x * T::lit(2.0);
    let mut term = x;
    let mut sum = x;
    let mut n = 0u32;
    while term.abs() > sum.abs() * T::epsilon() * T::lit(0.5) && n < 500 {
        n += 1;
        term = term * two_x2 / T::lit(f64::from(2 * n + 1));
        sum += term;
    }
    T::FRAC_2_SQRT_PI() * (-(x * x)).exp() * sum
}

// erfc(x) = e^{-x²}/√π · 1/(x + (1/2)/(x + (2/2)/(x + (3/2)/(x + …)))), modified Lentz.
fn erfc_continued_fraction<T: Real>(x: T) -> T {
    let tiny = T::min_positive_value() * T::lit(1e10);
    let mut f = x;
    let mut c = f;
    let mut d = T::zero();
    for n in 1..1000u32 {
        let a = T::lit(f64::from(n) * 0.5);
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = T::one() / d;
        let delta = c * d;
        f *= delta;
        if (delta - T::one()).abs() <= T::epsilon() {
            break;
        }
    }
    let inv_sqrt_pi = T::FRAC_2_SQRT_PI() * T::lit(0.5);
    (-(x * x)).exp() * inv_sqrt_pi / f
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    // Composite Simpson quadrature of the density; independent of the erf code path.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let n = if n % 2 == 1 { n + 1 } else { n };
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + h * i as f64);
        }
        s * h / 3.0
    }

    fn phi_oracle(x: f64) -> f64 {
        let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
        if x <= 0.0 {
            // the tail beyond -12 is below 1e-32
            simpson(pdf, -12.0, x, 200_000)
        } else {
            0.5 + simpson(pdf, 0.0, x, 200_000)
        }
    }

    #[test]
    fn cdf_examples() {
        let n = NoiseModel::gaussian(1.0);
        assert_eq!(n.cdf(1, 0.0), 0.5);
        let oracle = phi_oracle(-0.5);
        assert!((oracle - 0.3085375).abs() < 5e-8);
        assert!((n.cdf(1, -0.5) - oracle).abs() < 1e-12);
        let wide = NoiseModel::gaussian(2.0f64);
        assert!((wide.cdf(1, 1e9) - 1.0).abs() < 1e-12);
        assert!(wide.cdf(1, -1e9) < 1e-300);
    }

    #[test]
    fn cdf_matches_quadrature_across_branches() {
        for &x in &[-8.0, -5.0, -3.6, -3.5, -3.4, -2.0, -1.0, -0.1, 0.3, 1.7, 3.3, 3.6, 6.0] {
            let got = std_normal_cdf(x);
            let want = phi_oracle(x);
            assert!((got - want).abs() < 1e-12, "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn erf_known_values() {
        assert!((erf(1.0f64) - 0.842_700_792_949_714_9).abs() < 1e-15);
        assert!((erfc(3.0f64) - 2.209_049_699_858_544e-5).abs() < 1e-18);
        assert!((erf(-0.5f64) + 0.520_499_877_813_046_5).abs() < 1e-15);
    }

    #[test]
    fn pdf_examples() {
        let n = NoiseModel::gaussian(1.0);
        let oracle0 = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        assert!((n.pdf(1, 0.0) - oracle0).abs() < 1e-15);
        assert!((n.pdf(1, 0.0) - 0.3989423).abs() < 5e-8);
        assert!((n.pdf(1, 2.0) - 0.0539910).abs() < 5e-8);
        let sched = NoiseModel::GaussianSchedule(SigmaSchedule::new("const", |_| 1.0));
        for &x in &[-1.0, 0.0, 0.7, 2.0] {
            assert_eq!(sched.pdf(5, x), n.pdf(5, x));
            assert_eq!(sched.cdf(5, x), n.cdf(5, x));
        }
    }

    #[test]
    fn inf_density_examples() {
        let n = NoiseModel::gaussian(1.0f64);
        assert!((n.inf_density(1, 2.0).unwrap() - 0.0539910).abs() < 5e-8);
        assert!((n.inf_density(1, 0.0).unwrap() - 0.3989423).abs() < 5e-8);

        let sched = NoiseModel::gaussian_log_decay(1.0);
        let k = 4f64.exp().round() as u64; // 55
        let sigma = ((k as f64).ln()).powf(-0.25);
        let closed = std_normal_pdf(2.0 / sigma) / sigma;
        let got = sched.inf_density(k, 2.0).unwrap();
        assert!((got - closed).abs() < 1e-15);
        // grid oracle over [-2, 2]
        let grid = (0..=4000)
            .map(|i| sched.pdf(k, -2.0 + i as f64 * 1e-3))
            .fold(f64::INFINITY, f64::min);
        assert!((got - grid).abs() < 1e-12);
        assert!((sigma - 4f64.powf(-0.25)).abs() < 0.01);
    }

    #[test]
    fn inf_density_rejects_zero() {
        let n = NoiseModel::gaussian(1.0);
        assert!(matches!(
            n.inf_density(1, 50.0),
            Err(Error::NonpositiveDensity { .. })
        ));
    }

    #[test]
    fn log_decay_schedule_is_defined_early() {
        let s = SigmaSchedule::log_decay(1.0f64);
        assert_eq!(s.at(0), 1.0);
        assert_eq!(s.at(1), 1.0);
        assert_eq!(s.at(2), 1.0);
        let k = 1000u64;
        let var = s.at(k).powi(2);
        assert!((var - (1000f64).ln().powf(-0.5)).abs() < 1e-14);
    }

    #[test]
    fn moments() {
        let n = NoiseModel::gaussian(1.0);
        assert_eq!(n.conditional_mean(3), 0.0);
        assert_eq!(n.variance(3), 1.0);
        let ld = NoiseModel::gaussian_log_decay(1.0);
        assert!((ld.variance(100) - (100f64).ln().powf(-0.5)).abs() < 1e-14);
    }

    struct ShiftedUniform;

    impl CustomNoise<f64> for ShiftedUniform {
        fn cdf(&self, _k: u64, x: f64) -> f64 {
            ((x + 1.0) / 2.0).clamp(0.0, 1.0)
        }
        fn pdf(&self, _k: u64, x: f64) -> f64 {
            if x.abs() <= 1.0 {
                0.5
            } else {
                0.0
            }
        }
        fn mean(&self, _k: u64) -> f64 {
            0.0
        }
        fn variance(&self, _k: u64) -> f64 {
            1.0 / 3.0
        }
        fn sample(&self, _k: u64, rng: &mut dyn RngCore) -> f64 {
            let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
            2.0 * u - 1.0
        }
    }

    #[test]
    fn custom_law_grid_infimum_and_mean() {
        let n = NoiseModel::custom(ShiftedUniform);
        assert_eq!(n.inf_density(1, 0.5).unwrap(), 0.5);
        assert!(n.inf_density(1, 1.5).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = 100_000;
        let mean = (0..m).map(|_| n.sample(1, &mut rng)).sum::<f64>() / m as f64;
        let sd = n.variance(1).sqrt();
        assert!(mean.abs() < 4.0 * sd / (m as f64).sqrt());
    }

    #[test]
    fn works_in_single_precision() {
        let n = NoiseModel::gaussian(1.0f32);
        assert!((n.cdf(1, -0.5) - 0.308_537_5).abs() < 1e-6);
        assert!((n.pdf(1, 2.0) - 0.053_991).abs() < 1e-6);
    }
}
