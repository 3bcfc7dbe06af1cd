//! On-disk experiment description (TOML).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{Relaxation, Scheme, Solver, StepConfig};
use crate::error::{Error, Result};
use crate::linalg::{SketchConfig, Truncation};
use crate::models::{Domain, MlpSpec};

/// Environment variable overriding every seed in a configuration.
pub const SEED_ENV: &str = "DFO_SEED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub problem: ProblemSpec,
    pub model: ModelSpec,
    pub dynamics: DynamicsSpec,
    pub collocation: CollocationSpec,
    pub time: TimeSpec,
    #[serde(default)]
    pub initial: InitialSpec,
    #[serde(default)]
    pub seeds: Seeds,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub reference: ReferenceSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProblemSpec {
    /// First-order wave system on `[−12, 12)`.
    Wave {
        #[serde(default)]
        rho: f64,
        #[serde(default = "one")]
        c: f64,
    },
    /// `∂t u = −c ∂x u − κ u + s` on `[0, 2π)`.
    AdvectionReaction {
        #[serde(default = "one")]
        c: f64,
        #[serde(default = "one")]
        kappa: f64,
    },
    /// Transport through the separable flow field on `[−1, 1)²`.
    Transport {
        #[serde(default)]
        x0: f64,
        #[serde(default)]
        y0: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl ProblemSpec {
    pub fn domain(&self) -> Domain {
        use std::f64::consts::TAU;
        match self {
            ProblemSpec::Wave { .. } => Domain::periodic_box(&[-12.0], &[12.0]),
            ProblemSpec::AdvectionReaction { .. } => Domain::periodic_box(&[0.0], &[TAU]),
            ProblemSpec::Transport { .. } => Domain::periodic_box(&[-1.0, -1.0], &[1.0, 1.0]),
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            ProblemSpec::Wave { .. } => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelSpec {
    /// Two-bump ansatz of the wave toy; `ρ` and `c` come from the problem.
    TwoGaussian,
    /// `sin θ₁ sin x + sin θ₂ cos x`.
    SineAmplitude,
    PeriodicMlp(MlpSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSpec {
    pub scheme: Scheme,
    pub dt: f64,
    /// Onsager relaxation time; exactly one of `tau` and `beta` must be set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default)]
    pub lambda: f64,
    pub truncation: Truncation,
    #[serde(default)]
    pub solver: SolverSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SolverSpec {
    #[default]
    Tsvd,
    Tikhonov {
        gamma: f64,
    },
    /// Randomized SVD; the sketch seed is `seeds.sketch`.
    Rsvd {
        sketch_size: usize,
        #[serde(default = "default_oversampling")]
        oversampling: usize,
    },
}

fn default_oversampling() -> usize {
    SketchConfig::DEFAULT_OVERSAMPLING
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CollocationSpec {
    /// Equispaced tensor grid (right endpoints excluded).
    Grid { sizes: Vec<usize> },
    /// Uniform random points, either drawn once or redrawn every step.
    Uniform {
        count: usize,
        #[serde(default)]
        resample: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    #[serde(default)]
    pub t0: f64,
    pub t_end: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialSpec {
    /// Closed-form parameters of the toy problems at `t0`.
    #[default]
    Exact,
    Values {
        theta: Vec<f64>,
    },
    /// Whitespace-separated parameter values, as written by `run` and `fit`.
    File {
        path: PathBuf,
    },
    Fit(FitConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    #[serde(default = "FitConfig::default_lr")]
    pub learning_rate: f64,
    #[serde(default = "FitConfig::default_beta1")]
    pub beta1: f64,
    #[serde(default = "FitConfig::default_beta2")]
    pub beta2: f64,
    #[serde(default = "FitConfig::default_eps")]
    pub epsilon: f64,
    #[serde(default = "FitConfig::default_iterations")]
    pub iterations: usize,
    /// Stop as soon as the loss is at or below this value.
    #[serde(default)]
    pub tolerance: f64,
    /// Fit grid; the collocation grid when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<usize>>,
    /// Seed for the network initialization; `seeds.init` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "FitConfig::default_log_every")]
    pub log_every: usize,
}

impl FitConfig {
    fn default_lr() -> f64 {
        1e-3
    }
    fn default_beta1() -> f64 {
        0.9
    }
    fn default_beta2() -> f64 {
        0.999
    }
    fn default_eps() -> f64 {
        1e-8
    }
    fn default_iterations() -> usize {
        100_000
    }
    fn default_log_every() -> usize {
        1000
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::Config("fit needs at least one iteration".into()));
        }
        if !(self.learning_rate > 0.0) || !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::Config("Adam step size must be positive and β₁, β₂ in [0, 1)".into()));
        }
        if !(self.epsilon > 0.0) || !(self.tolerance >= 0.0) {
            return Err(Error::Config("Adam ε must be positive and the tolerance non-negative".into()));
        }
        Ok(())
    }
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            learning_rate: Self::default_lr(),
            beta1: Self::default_beta1(),
            beta2: Self::default_beta2(),
            epsilon: Self::default_eps(),
            iterations: Self::default_iterations(),
            tolerance: 0.0,
            grid: None,
            seed: None,
            log_every: Self::default_log_every(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Seeds {
    #[serde(default)]
    pub init: u64,
    #[serde(default)]
    pub sketch: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Output directory; `runs/<name>` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// Steps between metric rows. The last step is always reported.
    #[serde(default = "OutputSpec::default_every")]
    pub every: usize,
    /// Write measured wall-clock time; `false` writes zeros so that repeated
    /// runs produce byte-identical files.
    #[serde(default = "OutputSpec::default_wall_time")]
    pub wall_time: bool,
}

impl OutputSpec {
    fn default_every() -> usize {
        50
    }
    fn default_wall_time() -> bool {
        true
    }
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            dir: None,
            every: Self::default_every(),
            wall_time: Self::default_wall_time(),
        }
    }
}

/// Where the error metric is evaluated.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceSpec {
    /// Error grid; defaults to 600 nodes for the wave, 512 for
    /// advection-reaction and the finite-difference grid for transport.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<usize>>,
    /// Finite-difference grid for transport (default 256²).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fd_grid: Option<[usize; 2]>,
    /// Finite-difference step; the largest divisor `dt/k` passing the CFL check
    /// when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fd_dt: Option<f64>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Read, apply the seed override from the environment and validate.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        cfg.apply_seed_env()?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Apply `DFO_SEED` when it is set.
    pub fn apply_seed_env(&mut self) -> Result<()> {
        if let Ok(value) = std::env::var(SEED_ENV) {
            let seed = value
                .trim()
                .parse::<u64>()
                .map_err(|_| Error::Config(format!("{SEED_ENV} must be an unsigned integer, got {value:?}")))?;
            self.override_seeds(seed);
        }
        Ok(())
    }

    pub fn override_seeds(&mut self, seed: u64) {
        self.seeds = Seeds { init: seed, sketch: seed };
        if let InitialSpec::Fit(fit) = &mut self.initial {
            fit.seed = Some(seed);
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output
            .dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("runs").join(&self.name))
    }

    pub fn step_config(&self) -> Result<StepConfig> {
        let d = &self.dynamics;
        let relaxation = match (d.tau, d.beta) {
            (Some(tau), None) => Relaxation::Tau(tau),
            (None, Some(beta)) => Relaxation::Beta(beta),
            (None, None) if d.lambda == 0.0 => Relaxation::Tau(1.0),
            _ => {
                return Err(Error::Config(
                    "dynamics needs exactly one of `tau` and `beta`".into(),
                ))
            }
        };
        let solver = match d.solver {
            SolverSpec::Tsvd => Solver::Tsvd,
            SolverSpec::Tikhonov { gamma } => Solver::Tikhonov { gamma },
            SolverSpec::Rsvd {
                sketch_size,
                oversampling,
            } => Solver::Rsvd(SketchConfig {
                sketch_size,
                oversampling,
                seed: self.seeds.sketch,
            }),
        };
        let cfg = StepConfig {
            dt: d.dt,
            relaxation,
            lambda: d.lambda,
            truncation: d.truncation,
            scheme: d.scheme,
            solver,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(Error::Config(format!("invalid run name {:?}", self.name)));
        }
        self.step_config()?;
        let domain = self.problem.domain();
        match (&self.problem, &self.model) {
            (ProblemSpec::Wave { .. }, ModelSpec::TwoGaussian)
            | (ProblemSpec::AdvectionReaction { .. }, ModelSpec::SineAmplitude)
            | (ProblemSpec::AdvectionReaction { .. }, ModelSpec::PeriodicMlp(_))
            | (ProblemSpec::Transport { .. }, ModelSpec::PeriodicMlp(_)) => {}
            (p, m) => {
                return Err(Error::Config(format!(
                    "model {m:?} is not supported for problem {p:?}"
                )))
            }
        }
        if let ModelSpec::PeriodicMlp(spec) = &self.model {
            if spec.input_dim != domain.dim() || spec.period.len() != domain.dim() || spec.output_dim != 1 {
                return Err(Error::Config(format!(
                    "network must map {} inputs to one output with one period per input",
                    domain.dim()
                )));
            }
            if spec.embed_width == 0 || spec.hidden.contains(&0) || spec.period.iter().any(|p| !(*p > 0.0)) {
                return Err(Error::Config("network widths and periods must be positive".into()));
            }
        }
        if let ProblemSpec::Wave { rho, c } = self.problem {
            if !(rho > -1.0) || !c.is_finite() {
                return Err(Error::Config(format!("wave needs ρ > −1 and finite c, got ρ = {rho}, c = {c}")));
            }
        }
        match &self.collocation {
            CollocationSpec::Grid { sizes } => {
                if sizes.len() != domain.dim() || sizes.contains(&0) {
                    return Err(Error::Config(format!(
                        "collocation grid needs {} positive sizes, got {sizes:?}",
                        domain.dim()
                    )));
                }
            }
            CollocationSpec::Uniform { count, .. } => {
                if *count == 0 {
                    return Err(Error::Config("collocation needs at least one point".into()));
                }
            }
        }
        let TimeSpec { t0, t_end } = self.time;
        if !(t0.is_finite() && t_end.is_finite() && t_end >= t0) {
            return Err(Error::Config(format!("invalid time span [{t0}, {t_end}]")));
        }
        if self.output.every == 0 {
            return Err(Error::Config("output.every must be at least 1".into()));
        }
        if let Some(grid) = &self.reference.grid {
            if grid.len() != domain.dim() || grid.contains(&0) {
                return Err(Error::Config(format!("reference grid {grid:?} does not match the domain")));
            }
        }
        match (&self.initial, &self.model) {
            (InitialSpec::Exact, ModelSpec::PeriodicMlp(_)) => {
                return Err(Error::Config("networks have no closed-form initial parameters; use a fit".into()));
            }
            (InitialSpec::Exact, _) if matches!(self.problem, ProblemSpec::AdvectionReaction { .. }) => {
                if !(t0.abs() < std::f64::consts::FRAC_PI_2) {
                    return Err(Error::Config("closed-form parameters exist only for |t0| < π/2".into()));
                }
            }
            (InitialSpec::Fit(fit), _) => {
                fit.validate()?;
                if matches!(self.problem, ProblemSpec::Transport { .. }) && t0 != 0.0 {
                    return Err(Error::Config("the transport initial condition is given at t = 0".into()));
                }
            }
            _ => {}
        }
        if matches!(self.problem, ProblemSpec::Transport { .. }) && t0 != 0.0 {
            return Err(Error::Config("transport runs start at t = 0".into()));
        }
        Ok(())
    }
}
