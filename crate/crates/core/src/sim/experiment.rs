//! Closed-loop replications and the Monte Carlo runner.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::diagnostics::{quantile, ExcitationDiagnostics};
use super::excitation::ExcitationSource;
use super::plant::Plant;
use super::trace::{fmt_f64, CsvTraceWriter, RecordSink, StepRecord};
use crate::adaptation::{control_input, predict, regret, AffineRegressor, TrackingMetrics};
use crate::error::{Error, Result};
use crate::estimator::{Estimator, EstimatorConfig};
use crate::linalg::sub;

/// Rows are written for every step up to this `n`, then every `stride`-th step.
pub const FULL_TRACE_UNTIL: u64 = 10_000;

const NOISE_STREAM: u64 = 0;
const EXCITATION_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceSignal {
    Constant(f64),
    /// `y*_{k+1}` for `k = 0, 1, …`.
    Sequence(Vec<f64>),
}

impl ReferenceSignal {
    /// `y*_{k+1}`.
    pub fn at(&self, k: u64) -> f64 {
        match self {
            Self::Constant(y) => *y,
            Self::Sequence(v) => v[k as usize],
        }
    }
}

#[derive(Debug, Clone)]
pub struct ControlSettings {
    pub regressor: AffineRegressor<f64>,
    pub reference: ReferenceSignal,
    pub gain_floor: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub n: u64,
    pub seeds: u64,
    pub base_seed: u64,
    pub stride: u64,
}

/// A fully validated experiment.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub plant: Plant,
    pub excitation: ExcitationSource,
    pub estimator: EstimatorConfig<f64>,
    pub control: Option<ControlSettings>,
    pub run: RunSettings,
}

/// Checkpoint indices: every power of ten from 100 up to `n`, plus `n` itself.
pub fn checkpoints(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut c = 100u64;
    while c <= n {
        out.push(c);
        match c.checked_mul(10) {
            Some(next) => c = next,
            None => break,
        }
    }
    if n > 0 && out.last() != Some(&n) {
        out.push(n);
    }
    out
}

/// Summary of a replication after `n` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub n: u64,
    /// `‖θ − θ̂_n‖²`.
    pub theta_err_sq: f64,
    pub g_n: Option<f64>,
    pub regret_over_log_n: Option<f64>,
    pub regret_over_n: Option<f64>,
    pub j_n: Option<f64>,
    pub l_n: Option<f64>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lai_wei: f64,
    pub logdet: f64,
}

/// Range checks on every step of a replication.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RangeAudit {
    pub steps: u64,
    pub e_out_of_range: u64,
    pub a_out_of_range: u64,
    pub beta_increases: u64,
    pub theta_outside_domain: u64,
}

impl RangeAudit {
    pub fn violations(&self) -> u64 {
        self.e_out_of_range + self.a_out_of_range + self.beta_increases + self.theta_outside_domain
    }
}

#[derive(Debug, Clone)]
pub struct ReplicationSummary {
    pub seed: u64,
    pub n: u64,
    pub checkpoints: Vec<Checkpoint>,
    pub audit: RangeAudit,
    /// Sample mean of `ω_{k+1}` over the whole run.
    pub omega_mean: f64,
    pub clamp_count: u64,
    pub bound_violations: u64,
    pub max_inverse_residual: f64,
    pub final_theta: Vec<f64>,
}

impl ReplicationSummary {
    pub fn at(&self, n: u64) -> Option<&Checkpoint> {
        self.checkpoints.iter().find(|c| c.n == n)
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs one seed through the closed loop, feeding every step to `sink`.
pub fn run_replication(
    exp: &Experiment,
    seed: u64,
    sink: &mut dyn RecordSink,
) -> Result<ReplicationSummary> {
    let n = exp.run.n;
    let mut noise_rng = rng_for(seed, NOISE_STREAM);
    let mut excitation_rng = rng_for(seed, EXCITATION_STREAM);

    let p0_inv = exp
        .estimator
        .p0
        .inverse()
        .ok_or_else(|| Error::InvalidConfig("P0 is singular".into()))?;
    let mut est = Estimator::new(exp.estimator.clone())?;
    let mut diag = ExcitationDiagnostics::new(p0_inv);
    let mut metrics = TrackingMetrics::<f64>::new();
    let mut audit = RangeAudit::default();
    let cps = checkpoints(n);
    let mut cp_iter = cps.iter().peekable();
    let mut summary_cps = Vec::with_capacity(cps.len());
    let plant = &exp.plant;
    let theta = &plant.theta_true;
    let mut omega_sum = 0.0;
    let mut clamp_count = 0;
    let mut prev_beta = est.beta();

    for k in 0..n {
        let theta_prev = est.estimate().to_vec();
        let mean_next = plant.noise.conditional_mean(k + 1);

        let (phi, clamped, reference) = match (&exp.excitation, &exp.control) {
            (ExcitationSource::FromController, Some(ctl)) => {
                let y_star = ctl.reference.at(k);
                let act = control_input(&theta_prev, &ctl.regressor, y_star, mean_next, ctl.gain_floor)?;
                (ctl.regressor.regressor(act.u), act.clamped, y_star)
            }
            (src, _) => {
                let phi = src.regressor(k, &mut excitation_rng).ok_or_else(|| {
                    Error::InvalidConfig("controller excitation requires control settings".into())
                })?;
                let y_hat = predict(&theta_prev, &phi, mean_next)?;
                (phi, false, y_hat)
            }
        };
        if clamped {
            clamp_count += 1;
        }

        let c = plant.threshold.at(k);
        let out = plant.step(&phi, k, &mut noise_rng);
        let omega = plant.omega(&phi, k, out.s);
        omega_sum += omega;
        let r_k = regret(theta, &theta_prev, &phi)?;

        let step = est.step(&phi, c, out.s)?;
        diag.push(&phi);

        audit.steps += 1;
        let bit = if out.s { 1.0 } else { 0.0 };
        if !(step.e >= bit - 1.0 && step.e <= bit) {
            audit.e_out_of_range += 1;
        }
        if !(step.a > 0.0 && step.a <= 1.0) {
            audit.a_out_of_range += 1;
        }
        if step.beta > prev_beta || est.beta() > step.beta {
            audit.beta_increases += 1;
        }
        prev_beta = est.beta();
        if !est.domain().contains(&step.theta_hat) {
            audit.theta_outside_domain += 1;
        }

        let err = sub(theta, &step.theta_hat);
        let err_sq: f64 = err.iter().map(|x| x * x).sum();
        metrics.update(k, out.y, reference, plant.noise.variance(k + 1), r_k, err_sq);

        let n_done = k + 1;
        let at_checkpoint = cp_iter.peek() == Some(&&n_done);
        let snapshot = if at_checkpoint {
            cp_iter.next();
            Some(diag.snapshot(est.covariance_inverse())?)
        } else {
            None
        };
        if let Some(s) = snapshot {
            summary_cps.push(Checkpoint {
                n: n_done,
                theta_err_sq: err_sq,
                g_n: metrics.g_n(),
                regret_over_log_n: metrics.regret_over_log_n(),
                regret_over_n: metrics.regret_over_n(),
                j_n: metrics.j_n(),
                l_n: metrics.l_n(),
                lambda_min: s.lambda_min,
                lambda_max: s.lambda_max,
                lai_wei: s.lai_wei_ratio,
                logdet: s.logdet,
            });
        }

        let rec = StepRecord {
            k,
            phi,
            c,
            y: out.y,
            s: out.s,
            theta: step.theta_hat,
            e: step.e,
            a: step.a,
            beta: step.beta,
            omega,
            regret: r_k,
            cum_regret: metrics.regret_sum(),
            lambda_min: snapshot.map(|s| s.lambda_min),
            lambda_max: snapshot.map(|s| s.lambda_max),
            lai_wei: snapshot.map(|s| s.lai_wei_ratio),
            g_n: metrics.g_n(),
            j_n: metrics.j_n(),
            l_n: metrics.l_n(),
            clamped,
            v: out.v,
            reference,
        };
        sink.record(&rec, at_checkpoint)?;
    }
    sink.finish()?;

    Ok(ReplicationSummary {
        seed,
        n,
        checkpoints: summary_cps,
        audit,
        omega_mean: if n > 0 { omega_sum / n as f64 } else { 0.0 },
        clamp_count,
        bound_violations: est.bound_violations(),
        max_inverse_residual: est.max_inverse_residual().max(est.inverse_residual()),
        final_theta: est.estimate().to_vec(),
    })
}

/// Per-seed results plus cross-seed quantiles.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub replications: Vec<ReplicationSummary>,
}

/// Cross-seed statistics at one checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileRow {
    pub n: u64,
    pub metric: &'static str,
    pub q10: f64,
    pub median: f64,
    pub q90: f64,
}

pub const SUMMARY_METRICS: [&str; 10] = [
    "theta_err_sq",
    "G_n",
    "regret_over_log_n",
    "regret_over_n",
    "J_n",
    "L_n",
    "lambda_min",
    "lambda_max",
    "lai_wei",
    "logdet",
];

fn metric_value(c: &Checkpoint, metric: &str) -> Option<f64> {
    match metric {
        "theta_err_sq" => Some(c.theta_err_sq),
        "G_n" => c.g_n,
        "regret_over_log_n" => c.regret_over_log_n,
        "regret_over_n" => c.regret_over_n,
        "J_n" => c.j_n,
        "L_n" => c.l_n,
        "lambda_min" => Some(c.lambda_min),
        "lambda_max" => Some(c.lambda_max),
        "lai_wei" => Some(c.lai_wei),
        "logdet" => Some(c.logdet),
        _ => None,
    }
}

impl ExperimentReport {
    /// Values of `metric` at checkpoint `n`, one per seed that reached it.
    pub fn values(&self, n: u64, metric: &str) -> Vec<f64> {
        self.replications
            .iter()
            .filter_map(|r| r.at(n).and_then(|c| metric_value(c, metric)))
            .collect()
    }

    pub fn median(&self, n: u64, metric: &str) -> f64 {
        quantile(&self.values(n, metric), 0.5)
    }

    pub fn quantiles(&self) -> Vec<QuantileRow> {
        let ns = self
            .replications
            .first()
            .map(|r| r.checkpoints.iter().map(|c| c.n).collect::<Vec<_>>())
            .unwrap_or_default();
        let mut rows = Vec::new();
        for n in ns {
            for metric in SUMMARY_METRICS {
                let v = self.values(n, metric);
                rows.push(QuantileRow {
                    n,
                    metric,
                    q10: quantile(&v, 0.1),
                    median: quantile(&v, 0.5),
                    q90: quantile(&v, 0.9),
                });
            }
        }
        rows
    }

    pub fn write_summary(&self, out: &mut dyn Write) -> std::io::Result<()> {
        writeln!(
            out,
            "seed,n,theta_err_sq,G_n,regret_over_log_n,regret_over_n,J_n,L_n,lambda_min,lambda_max,lai_wei,logdet,omega_mean,clamp_count,range_violations"
        )?;
        let opt = |x: Option<f64>| x.filter(|v| v.is_finite()).map(fmt_f64).unwrap_or_default();
        for r in &self.replications {
            for c in &r.checkpoints {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    r.seed,
                    c.n,
                    fmt_f64(c.theta_err_sq),
                    opt(c.g_n),
                    opt(c.regret_over_log_n),
                    opt(c.regret_over_n),
                    opt(c.j_n),
                    opt(c.l_n),
                    fmt_f64(c.lambda_min),
                    fmt_f64(c.lambda_max),
                    fmt_f64(c.lai_wei),
                    opt(Some(c.logdet)),
                    fmt_f64(r.omega_mean),
                    r.clamp_count,
                    r.audit.violations()
                )?;
            }
        }
        Ok(())
    }

    pub fn write_quantiles(&self, out: &mut dyn Write) -> std::io::Result<()> {
        writeln!(out, "n,metric,q10,median,q90")?;
        let f = |x: f64| if x.is_finite() { fmt_f64(x) } else { String::new() };
        for row in self.quantiles() {
            writeln!(out, "{},{},{},{},{}", row.n, row.metric, f(row.q10), f(row.median), f(row.q90))?;
        }
        Ok(())
    }
}

pub fn trace_path(dir: &Path, seed: u64) -> PathBuf {
    dir.join(format!("trace_seed_{seed}.csv"))
}

/// Runs every seed (concurrently). With an output directory, each seed writes
/// its own trace file and the aggregate summaries are written once all
/// replications finish.
pub fn run_experiment(exp: &Experiment, out_dir: Option<&Path>) -> Result<ExperimentReport> {
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
    }
    let seeds: Vec<u64> = (0..exp.run.seeds)
        .map(|i| exp.run.base_seed.wrapping_add(i))
        .collect();
    let p = exp.estimator.domain.dim();
    let replications = seeds
        .par_iter()
        .map(|&seed| match out_dir {
            Some(dir) => {
                let file = BufWriter::new(File::create(trace_path(dir, seed))?);
                let mut sink = CsvTraceWriter::new(file, p, exp.run.stride, FULL_TRACE_UNTIL);
                run_replication(exp, seed, &mut sink)
            }
            None => run_replication(exp, seed, &mut super::trace::NullSink),
        })
        .collect::<Result<Vec<_>>>()?;
    let report = ExperimentReport { replications };
    if let Some(dir) = out_dir {
        let mut f = BufWriter::new(File::create(dir.join("summary.csv"))?);
        report.write_summary(&mut f)?;
        f.flush()?;
        let mut f = BufWriter::new(File::create(dir.join("quantiles.csv"))?);
        report.write_quantiles(&mut f)?;
        f.flush()?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkpoint_indices() {
        assert!(checkpoints(0).is_empty());
        assert_eq!(checkpoints(50), vec![50]);
        assert_eq!(checkpoints(100_000), vec![100, 1_000, 10_000, 100_000]);
        assert_eq!(checkpoints(2_500), vec![100, 1_000, 2_500]);
    }
}
