//! Excitation diagnostics and small statistics helpers.

use crate::error::Result;
use crate::geometry::SymEigen;
use crate::linalg::Matrix;

/// Incrementally maintained `A_n = P_0⁻¹ + Σ_{i<=n} φ_i φ_iᵀ`.
#[derive(Debug, Clone)]
pub struct ExcitationDiagnostics {
    a: Matrix<f64>,
    n: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcitationSnapshot {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `log λ_max(A_n) / λ_min(A_n)`.
    pub lai_wei_ratio: f64,
    /// `log det P_{n}⁻¹` of the estimator.
    pub logdet: f64,
}

impl ExcitationDiagnostics {
    pub fn new(p0_inv: Matrix<f64>) -> Self {
        Self { a: p0_inv, n: 0 }
    }

    pub fn push(&mut self, phi: &[f64]) {
        self.a.add_outer(1.0, phi, phi);
        self.n += 1;
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn accumulated(&self) -> &Matrix<f64> {
        &self.a
    }

    /// Eigen-solves `A_n` and the estimator's `P⁻¹`.
    pub fn snapshot(&self, p_inv: &Matrix<f64>) -> Result<ExcitationSnapshot> {
        snapshot_of(&self.a, p_inv)
    }
}

pub fn snapshot_of(a: &Matrix<f64>, p_inv: &Matrix<f64>) -> Result<ExcitationSnapshot> {
    let e = SymEigen::new(a)?;
    let logdet = SymEigen::new(p_inv)?.log_det();
    Ok(ExcitationSnapshot {
        lambda_min: e.min(),
        lambda_max: e.max(),
        lai_wei_ratio: e.max().ln() / e.min(),
        logdet,
    })
}

/// From-scratch `P_0⁻¹ + Σ φφᵀ`.
pub fn accumulate(p0_inv: &Matrix<f64>, phis: &[Vec<f64>]) -> Matrix<f64> {
    let mut a = p0_inv.clone();
    for phi in phis {
        a.add_outer(1.0, phi, phi);
    }
    a
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Linear-interpolated sample quantile, `q ∈ [0, 1]`. NaN values are ignored.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

pub fn median(values: &[f64]) -> f64 {
    quantile(values, 0.5)
}
