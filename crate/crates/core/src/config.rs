//! Experiment configuration files and the bundled example experiments.
//!
//! Configs are TOML with one section per concern:
//!
//! ```toml
//! [plant]
//! theta_true = [0.5, -0.5]
//! threshold = 0.0
//!
//! [noise]
//! family = "gaussian-constant"   # or "gaussian-logdecay"
//! sigma = 1.0
//!
//! [domain]
//! lo = [-2.0, -2.0]
//! hi = [2.0, 2.0]
//!
//! [bounds]
//! M = 0.3
//! C = 0.0
//!
//! [estimator]
//! beta0 = 0.27
//! p0 = "identity"                # or a diagonal, e.g. [1.0, 2.0]
//! theta0 = [1.0, -1.0]
//!
//! [excitation]
//! kind = "decaying-gaussian"     # constant-gaussian | controller | file
//! exponent = 0.25
//!
//! [control]
//! enabled = false
//! y_star = 1.0
//! gain_floor = 0.3
//!
//! [run]
//! n = 100000
//! seeds = 20
//! base_seed = 1
//! stride = 10
//!
//! [output]
//! directory = "out"
//! emit_plots = true
//! ```
//!
//! Parsing and semantic validation go through [`ExperimentConfig::build`],
//! which is what both `binid validate` and `binid run` call.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::adaptation::{AffineRegressor, DEFAULT_GAIN_FLOOR};
use crate::error::{Error, Result};
use crate::estimator::EstimatorConfig;
use crate::geometry::ConvexBox;
use crate::linalg::Matrix;
use crate::noise::NoiseModel;
use crate::sim::excitation::parse_rows;
use crate::sim::{
    ControlSettings, ExcitationSource, Experiment, Plant, ReferenceSignal, RunSettings,
    ThresholdSchedule,
};

pub const DEFAULT_STEPS: u64 = 100_000;
pub const DEFAULT_SEEDS: u64 = 20;
pub const DEFAULT_STRIDE: u64 = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub plant: PlantSection,
    pub noise: NoiseSection,
    pub domain: DomainSection,
    pub bounds: BoundsSection,
    pub estimator: EstimatorSection,
    pub excitation: ExcitationSection,
    #[serde(default)]
    pub control: ControlSection,
    pub run: RunSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantSection {
    pub theta_true: Vec<f64>,
    /// Constant threshold, or the offset of a sinusoidal one.
    #[serde(default)]
    pub threshold: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold_amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold_period: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseFamily {
    GaussianConstant,
    GaussianLogdecay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub family: NoiseFamily,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "C")]
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialCovariance {
    Named(String),
    Diagonal(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSection {
    pub beta0: f64,
    pub p0: InitialCovariance,
    pub theta0: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExcitationKind {
    DecayingGaussian,
    ConstantGaussian,
    Controller,
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExcitationSection {
    pub kind: ExcitationKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSection {
    #[serde(default)]
    pub enabled: bool,
    #[serde(default = "default_y_star")]
    pub y_star: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_star_file: Option<PathBuf>,
    #[serde(default = "default_gain_floor")]
    pub gain_floor: f64,
    /// Regressor offset `g` in `φ(u) = g + h·u`; defaults to `[1, 0]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<f64>>,
    /// Input direction `h`; defaults to `[0, 1]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<f64>>,
}

fn default_y_star() -> f64 {
    1.0
}

fn default_gain_floor() -> f64 {
    DEFAULT_GAIN_FLOOR
}

impl Default for ControlSection {
    fn default() -> Self {
        Self {
            enabled: false,
            y_star: default_y_star(),
            y_star_file: None,
            gain_floor: default_gain_floor(),
            g: None,
            h: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub n: u64,
    #[serde(default = "default_seeds")]
    pub seeds: u64,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_stride")]
    pub stride: u64,
}

fn default_seeds() -> u64 {
    DEFAULT_SEEDS
}

fn default_stride() -> u64 {
    DEFAULT_STRIDE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<PathBuf>,
    #[serde(default = "default_true")]
    pub emit_plots: bool,
}

fn default_true() -> bool {
    true
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: None,
            emit_plots: true,
        }
    }
}

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seeds: Option<u64>,
    pub base_seed: Option<u64>,
    pub steps: Option<u64>,
    pub out: Option<PathBuf>,
    pub no_plots: bool,
    pub stride: Option<u64>,
}

/// Quantities derived from a config, shown by `binid validate`.
#[derive(Debug, Clone, PartialEq)]
pub struct Derived {
    /// `L = sup_{x ∈ D} ‖x‖`.
    pub domain_radius: f64,
    /// `L·M + C`.
    pub density_radius: f64,
    /// Upper end of the admissible `β_0` interval.
    pub beta0_bound: f64,
    /// `β_0 … β_9`.
    pub beta_preview: Vec<f64>,
}

impl std::fmt::Display for Derived {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "L (domain radius)        = {}", self.domain_radius)?;
        writeln!(f, "L*M + C (density radius) = {}", self.density_radius)?;
        writeln!(f, "beta0 admissible in      (0, {})", self.beta0_bound)?;
        let preview = self
            .beta_preview
            .iter()
            .map(|b| format!("{b:.6e}"))
            .collect::<Vec<_>>()
            .join(", ");
        write!(f, "beta_0..beta_9           = [{preview}]")
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let de = toml::de::Deserializer::parse(text).map_err(|e| Error::Config(e.to_string()))?;
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let msg = inner.to_string();
            let msg = msg.trim_end();
            let missing = msg
                .split("missing field `")
                .nth(1)
                .and_then(|rest| rest.split('`').next());
            if let Some(field) = missing {
                let key = if path.is_empty() || path == "." {
                    field.to_string()
                } else {
                    format!("{path}.{field}")
                };
                Error::Config(format!("missing key `{key}`\n{msg}"))
            } else if path.is_empty() || path == "." {
                Error::Config(msg.to_string())
            } else {
                Error::Config(format!("at key `{path}`: {msg}"))
            }
        })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serialises to TOML")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.seeds {
            self.run.seeds = v;
        }
        if let Some(v) = o.base_seed {
            self.run.base_seed = v;
        }
        if let Some(v) = o.steps {
            self.run.n = v;
        }
        if let Some(v) = o.stride {
            self.run.stride = v;
        }
        if let Some(v) = &o.out {
            self.output.directory = Some(v.clone());
        }
        if o.no_plots {
            self.output.emit_plots = false;
        }
    }

    fn noise_model(&self) -> Result<NoiseModel<f64>> {
        let sigma = self.noise.sigma;
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "noise.sigma = {sigma} must be positive and finite"
            )));
        }
        Ok(match self.noise.family {
            NoiseFamily::GaussianConstant => NoiseModel::gaussian(sigma),
            NoiseFamily::GaussianLogdecay => NoiseModel::gaussian_log_decay(sigma),
        })
    }

    fn threshold(&self) -> Result<ThresholdSchedule> {
        let p = &self.plant;
        match (p.threshold_amplitude, p.threshold_period) {
            (None, None) => Ok(ThresholdSchedule::Constant(p.threshold)),
            (Some(amplitude), Some(period)) if period > 0.0 => Ok(ThresholdSchedule::Sine {
                offset: p.threshold,
                amplitude,
                period,
            }),
            _ => Err(Error::InvalidConfig(
                "plant.threshold_amplitude and plant.threshold_period must be given together, with a positive period".into(),
            )),
        }
    }

    fn p0(&self, p: usize) -> Result<Matrix<f64>> {
        match &self.estimator.p0 {
            InitialCovariance::Named(name) if name == "identity" => Ok(Matrix::identity(p)),
            InitialCovariance::Named(name) => Err(Error::InvalidConfig(format!(
                "estimator.p0 = {name:?}: expected \"identity\" or a diagonal array"
            ))),
            InitialCovariance::Diagonal(d) => {
                if d.len() != p {
                    return Err(Error::InvalidConfig(format!(
                        "estimator.p0 has {} entries, parameter dimension is {p}",
                        d.len()
                    )));
                }
                Ok(Matrix::from_diag(d))
            }
        }
    }

    fn estimator_config(&self) -> Result<EstimatorConfig<f64>> {
        let domain = ConvexBox::new(self.domain.lo.clone(), self.domain.hi.clone())
            .map_err(|e| Error::InvalidConfig(format!("domain: {e}")))?;
        let p = domain.dim();
        Ok(EstimatorConfig {
            p0: self.p0(p)?,
            domain,
            regressor_bound: self.bounds.m,
            threshold_bound: self.bounds.c,
            noise: self.noise_model()?,
            beta0: self.estimator.beta0,
            theta0: self.estimator.theta0.clone(),
        })
    }

    /// Parses auxiliary files and checks every cross-field invariant.
    pub fn build(&self) -> Result<Experiment> {
        let estimator = self.estimator_config()?;
        estimator.validate()?;
        let p = estimator.domain.dim();

        if self.plant.theta_true.len() != p {
            return Err(Error::InvalidConfig(format!(
                "plant.theta_true has {} entries, parameter dimension is {p}",
                self.plant.theta_true.len()
            )));
        }
        if !estimator.domain.contains(&self.plant.theta_true) {
            return Err(Error::InvalidConfig(format!(
                "plant.theta_true {:?} lies outside the parameter box",
                self.plant.theta_true
            )));
        }
        let threshold = self.threshold()?;
        if threshold.bound() > self.bounds.c {
            return Err(Error::InvalidConfig(format!(
                "threshold magnitude can reach {}, above bounds.C = {}",
                threshold.bound(),
                self.bounds.c
            )));
        }
        if self.run.stride == 0 {
            return Err(Error::InvalidConfig("run.stride must be at least 1".into()));
        }
        if self.run.seeds == 0 {
            return Err(Error::InvalidConfig("run.seeds must be at least 1".into()));
        }

        let n = self.run.n;
        let excitation = match self.excitation.kind {
            ExcitationKind::DecayingGaussian => {
                let exponent = self.excitation.exponent.ok_or_else(|| {
                    Error::InvalidConfig("excitation.exponent is required for decaying-gaussian".into())
                })?;
                ExcitationSource::DecayingGaussian { exponent }
            }
            ExcitationKind::ConstantGaussian => ExcitationSource::ConstantGaussian,
            ExcitationKind::Controller => ExcitationSource::FromController,
            ExcitationKind::File => {
                let path = self.excitation.file.as_ref().ok_or_else(|| {
                    Error::InvalidConfig("excitation.file is required for kind = \"file\"".into())
                })?;
                let rows = read_rows(path)?;
                if (rows.len() as u64) < n {
                    return Err(Error::InvalidConfig(format!(
                        "{} has {} regressor rows, run.n = {n}",
                        path.display(),
                        rows.len()
                    )));
                }
                if let Some(bad) = rows.iter().position(|r| r.len() != p) {
                    return Err(Error::InvalidConfig(format!(
                        "{} row {} has {} entries, parameter dimension is {p}",
                        path.display(),
                        bad + 1,
                        rows[bad].len()
                    )));
                }
                ExcitationSource::FromFile(rows)
            }
        };
        if let Some(d) = excitation.dim() {
            if d != p {
                return Err(Error::InvalidConfig(format!(
                    "excitation produces {d}-dimensional regressors, parameter dimension is {p}"
                )));
            }
        }

        let is_controller = self.excitation.kind == ExcitationKind::Controller;
        if self.control.enabled != is_controller {
            return Err(Error::InvalidConfig(
                "control.enabled = true requires excitation.kind = \"controller\" and vice versa".into(),
            ));
        }
        let control = if self.control.enabled {
            let c = &self.control;
            if c.gain_floor.is_nan() || c.gain_floor <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "control.gain_floor = {} must be positive",
                    c.gain_floor
                )));
            }
            let regressor = AffineRegressor::new(
                c.g.clone().unwrap_or_else(|| vec![1.0, 0.0]),
                c.h.clone().unwrap_or_else(|| vec![0.0, 1.0]),
            )?;
            if regressor.dim() != p {
                return Err(Error::InvalidConfig(format!(
                    "control regressor has dimension {}, parameter dimension is {p}",
                    regressor.dim()
                )));
            }
            let reference = match &c.y_star_file {
                None => ReferenceSignal::Constant(c.y_star),
                Some(path) => {
                    let seq: Vec<f64> = read_rows(path)?.into_iter().flatten().collect();
                    if (seq.len() as u64) < n {
                        return Err(Error::InvalidConfig(format!(
                            "{} has {} reference values, run.n = {n}",
                            path.display(),
                            seq.len()
                        )));
                    }
                    ReferenceSignal::Sequence(seq)
                }
            };
            Some(ControlSettings {
                regressor,
                reference,
                gain_floor: c.gain_floor,
            })
        } else {
            None
        };

        Ok(Experiment {
            plant: Plant {
                theta_true: self.plant.theta_true.clone(),
                noise: estimator.noise.clone(),
                threshold,
            },
            excitation,
            estimator,
            control,
            run: RunSettings {
                n,
                seeds: self.run.seeds,
                base_seed: self.run.base_seed,
                stride: self.run.stride,
            },
        })
    }

    pub fn derived(&self) -> Result<Derived> {
        let est = self.estimator_config()?;
        let radius = est.density_radius();
        let mut beta = self.estimator.beta0;
        let mut preview = vec![beta];
        for k in 0..9u64 {
            beta = beta.min(est.noise.inf_density(k + 2, radius)?);
            preview.push(beta);
        }
        Ok(Derived {
            domain_radius: est.domain.radius(),
            density_radius: radius,
            beta0_bound: est.beta0_bound()?,
            beta_preview: preview,
        })
    }

    /// Human-readable validation report; errors carry the violated invariant.
    pub fn validation_report(&self) -> Result<String> {
        let exp = self.build()?;
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.derived()?);
        let _ = write!(
            out,
            "parameter dimension {}, {} steps x {} seeds (base seed {})",
            exp.estimator.domain.dim(),
            exp.run.n,
            exp.run.seeds,
            exp.run.base_seed
        );
        Ok(out)
    }
}

fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse_rows(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Regressor-norm bound `M` used by the bundled examples.
///
/// `M` only enters through the `β` ceiling `inf_{|x| ≤ LM+C} f_k(x)`. The
/// examples' regressors `[1, u_k]` always exceed it; a literal bound would
/// drive `β` below 1e-12 under the log-decay noise and freeze the estimate.
pub const EXAMPLE_REGRESSOR_BOUND: f64 = 0.3;

/// The three bundled experiments.
pub fn example_config(id: u8) -> Option<ExperimentConfig> {
    let base = |theta_true: Vec<f64>, lo: Vec<f64>, hi: Vec<f64>, theta0: Vec<f64>| ExperimentConfig {
        plant: PlantSection {
            theta_true,
            threshold: 0.0,
            threshold_amplitude: None,
            threshold_period: None,
        },
        noise: NoiseSection {
            family: NoiseFamily::GaussianConstant,
            sigma: 1.0,
        },
        domain: DomainSection { lo, hi },
        bounds: BoundsSection {
            m: EXAMPLE_REGRESSOR_BOUND,
            c: 0.0,
        },
        estimator: EstimatorSection {
            beta0: 0.0,
            p0: InitialCovariance::Named("identity".into()),
            theta0,
        },
        excitation: ExcitationSection {
            kind: ExcitationKind::DecayingGaussian,
            exponent: Some(0.25),
            file: None,
        },
        control: ControlSection::default(),
        run: RunSection {
            n: DEFAULT_STEPS,
            seeds: DEFAULT_SEEDS,
            base_seed: 1,
            stride: DEFAULT_STRIDE,
        },
        output: OutputSection {
            directory: Some(PathBuf::from(format!("out/example{id}"))),
            emit_plots: true,
        },
    };
    let mut cfg = match id {
        1 => base(vec![0.5, -0.5], vec![-2.0, -2.0], vec![2.0, 2.0], vec![1.0, -1.0]),
        2 => {
            let mut c = base(vec![1.0, 1.0], vec![-3.0, -3.0], vec![3.0, 3.0], vec![-2.0, 2.0]);
            c.noise.family = NoiseFamily::GaussianLogdecay;
            c
        }
        3 => {
            let mut c = base(vec![0.5, 0.8], vec![-2.0, 0.3], vec![2.0, 2.0], vec![1.0, 1.0]);
            c.excitation = ExcitationSection {
                kind: ExcitationKind::Controller,
                exponent: None,
                file: None,
            };
            c.control.enabled = true;
            c
        }
        _ => return None,
    };
    cfg.estimator.beta0 = EXAMPLE_BETA0_FRACTION * cfg.derived().ok()?.beta0_bound;
    Some(cfg)
}

/// The bundled examples take `β_0` at this fraction of its admissible supremum.
pub const EXAMPLE_BETA0_FRACTION: f64 = 0.99;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples_build() {
        for id in 1..=3 {
            let cfg = example_config(id).unwrap();
            cfg.build().unwrap();
        }
        assert!(example_config(4).is_none());
    }

    #[test]
    fn example1_matches_setup() {
        let cfg = example_config(1).unwrap();
        let exp = cfg.build().unwrap();
        assert_eq!(exp.estimator.domain.lo(), &[-2.0, -2.0]);
        assert_eq!(exp.estimator.domain.hi(), &[2.0, 2.0]);
        assert_eq!(exp.estimator.theta0, vec![1.0, -1.0]);
        assert_eq!(exp.estimator.p0, Matrix::identity(2));
        assert_eq!(exp.excitation, ExcitationSource::DecayingGaussian { exponent: 0.25 });
        assert_eq!(exp.plant.threshold, ThresholdSchedule::Constant(0.0));
    }

    #[test]
    fn example3_matches_setup() {
        let exp = example_config(3).unwrap().build().unwrap();
        assert_eq!(exp.estimator.domain.lo(), &[-2.0, 0.3]);
        assert_eq!(exp.estimator.domain.hi(), &[2.0, 2.0]);
        assert_eq!(exp.estimator.theta0, vec![1.0, 1.0]);
        let ctl = exp.control.unwrap();
        assert_eq!(ctl.reference, ReferenceSignal::Constant(1.0));
        assert_eq!(ctl.gain_floor, 0.3);
    }

    #[test]
    fn toml_round_trip() {
        let cfg = example_config(2).unwrap();
        let text = cfg.to_toml_string();
        let back = ExperimentConfig::from_toml_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn missing_run_n_names_key() {
        let mut text = example_config(1).unwrap().to_toml_string();
        text = text
            .lines()
            .filter(|l| !l.starts_with("n = "))
            .collect::<Vec<_>>()
            .join("\n");
        let err = ExperimentConfig::from_toml_str(&text).unwrap_err().to_string();
        assert!(err.contains("`run.n`"), "{err}");
    }

    #[test]
    fn beta0_too_large_is_rejected() {
        let mut cfg = example_config(1).unwrap();
        cfg.estimator.beta0 = 0.5;
        let err = cfg.build().unwrap_err().to_string();
        assert!(err.contains("beta0") && err.contains("open interval"), "{err}");
    }

    #[test]
    fn control_requires_controller_excitation() {
        let mut cfg = example_config(1).unwrap();
        cfg.control.enabled = true;
        assert!(cfg.build().is_err());
        let mut cfg = example_config(3).unwrap();
        cfg.control.enabled = false;
        assert!(cfg.build().is_err());
    }

    #[test]
    fn theta_true_must_lie_in_domain() {
        let mut cfg = example_config(1).unwrap();
        cfg.plant.theta_true = vec![2.5, 0.0];
        assert!(cfg.build().unwrap_err().to_string().contains("theta_true"));
    }

    #[test]
    fn threshold_bound_checked() {
        let mut cfg = example_config(1).unwrap();
        cfg.plant.threshold = 0.5;
        assert!(cfg.build().is_err());
    }

    #[test]
    fn overrides_apply() {
        let mut cfg = example_config(1).unwrap();
        cfg.apply(&Overrides {
            seeds: Some(3),
            base_seed: Some(42),
            steps: Some(500),
            out: Some("x".into()),
            no_plots: true,
            stride: Some(5),
        });
        assert_eq!((cfg.run.seeds, cfg.run.base_seed, cfg.run.n, cfg.run.stride), (3, 42, 500, 5));
        assert!(!cfg.output.emit_plots);
    }

    #[test]
    fn derived_preview() {
        let cfg = example_config(2).unwrap();
        let d = cfg.derived().unwrap();
        assert_eq!(d.beta_preview.len(), 10);
        assert!(d.beta_preview.windows(2).all(|w| w[1] <= w[0]));
        assert!((d.domain_radius - 18f64.sqrt()).abs() < 1e-15);
    }
}
