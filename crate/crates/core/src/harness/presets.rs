//! Shipped experiment configurations.

use crate::dynamics::Scheme;
use crate::error::{Error, Result};
use crate::harness::config::*;
use crate::linalg::Truncation;
use crate::models::MlpSpec;

/// Gain for which the continuous DFO flow follows the exact crossing of the
/// wave toy: `λ = (1 − e^{−2/τ})⁻¹`.
pub fn wave_exact_gain(tau: f64) -> f64 {
    1.0 / (1.0 - (-2.0 / tau).exp())
}

const WAVE_DT: f64 = 3e-4;
const WAVE_TAU: f64 = 0.5;
/// Relative truncation for the wave presets. The smallest singular value
/// near the collision behaves like `|θ₁ − θ₂|/2 · σ_max` and the discrete
/// centers pass each other in increments of `2δt`, so a tolerance of `δt`
/// always catches the step closest to the collision.
const WAVE_EPS_REL: f64 = WAVE_DT;
/// Ill-conditioned (non-collapsing) variant of the wave toy.
pub const WAVE_ILL_RHO: f64 = 4.635e-6;

fn wave(name: &str, rho: f64, lambda: f64) -> ExperimentConfig {
    ExperimentConfig {
        name: name.into(),
        problem: ProblemSpec::Wave { rho, c: 1.0 },
        model: ModelSpec::TwoGaussian,
        dynamics: DynamicsSpec {
            scheme: Scheme::SemiImplicitEuler,
            dt: WAVE_DT,
            tau: Some(WAVE_TAU),
            beta: None,
            lambda,
            truncation: Truncation::relative(WAVE_EPS_REL),
            solver: SolverSpec::Tsvd,
        },
        collocation: CollocationSpec::Grid { sizes: vec![151] },
        time: TimeSpec { t0: 0.0, t_end: 4.0 },
        initial: InitialSpec::Exact,
        seeds: Seeds::default(),
        output: OutputSpec::default(),
        reference: ReferenceSpec {
            grid: Some(vec![600]),
            ..ReferenceSpec::default()
        },
    }
}

fn advreact(name: &str, lambda: f64) -> ExperimentConfig {
    ExperimentConfig {
        name: name.into(),
        problem: ProblemSpec::AdvectionReaction { c: 1.0, kappa: 1.0 },
        model: ModelSpec::SineAmplitude,
        dynamics: DynamicsSpec {
            scheme: Scheme::SemiImplicitEuler,
            dt: 1e-4,
            tau: Some(0.05),
            beta: None,
            lambda,
            truncation: Truncation::new(1e-10, 1e-3),
            solver: SolverSpec::Tsvd,
        },
        collocation: CollocationSpec::Grid { sizes: vec![512] },
        time: TimeSpec { t0: 0.0, t_end: 6.0 },
        initial: InitialSpec::Exact,
        seeds: Seeds::default(),
        output: OutputSpec::default(),
        reference: ReferenceSpec {
            grid: Some(vec![512]),
            ..ReferenceSpec::default()
        },
    }
}

fn transport(name: &str, lambda: f64) -> ExperimentConfig {
    ExperimentConfig {
        name: name.into(),
        problem: ProblemSpec::Transport { x0: 0.0, y0: 0.0 },
        model: ModelSpec::PeriodicMlp(MlpSpec::uniform(2, 3, 32, 2.0)),
        dynamics: DynamicsSpec {
            scheme: Scheme::Rk4StageEma,
            dt: 4e-3,
            tau: None,
            beta: Some(0.2),
            lambda,
            truncation: Truncation::relative(1e-4),
            solver: SolverSpec::Tsvd,
        },
        collocation: CollocationSpec::Grid { sizes: vec![128, 128] },
        time: TimeSpec { t0: 0.0, t_end: 2.0 },
        initial: InitialSpec::Fit(FitConfig::default()),
        seeds: Seeds::default(),
        output: OutputSpec::default(),
        reference: ReferenceSpec {
            grid: None,
            fd_grid: Some([256, 256]),
            fd_dt: None,
        },
    }
}

const NAMES: [&str; 9] = [
    "wave-collapse-df",
    "wave-collapse-dfo",
    "wave-collapse-dfo-exact",
    "wave-illcond-df",
    "wave-illcond-dfo",
    "advreact-df",
    "advreact-dfo",
    "transport-mlp-df",
    "transport-mlp-dfo",
];

pub fn names() -> &'static [&'static str] {
    &NAMES
}

pub fn get(name: &str) -> Result<ExperimentConfig> {
    let cfg = match name {
        "wave-collapse-df" => wave(name, 0.0, 0.0),
        "wave-collapse-dfo" => wave(name, 0.0, 1.0),
        "wave-collapse-dfo-exact" => wave(name, 0.0, wave_exact_gain(WAVE_TAU)),
        "wave-illcond-df" => wave(name, WAVE_ILL_RHO, 0.0),
        "wave-illcond-dfo" => wave(name, WAVE_ILL_RHO, 1.0),
        "advreact-df" => advreact(name, 0.0),
        "advreact-dfo" => advreact(name, 1e-5),
        "transport-mlp-df" => transport(name, 0.0),
        "transport-mlp-dfo" => transport(name, 1.0),
        _ => {
            return Err(Error::Config(format!(
                "unknown preset {name:?}; available: {}",
                NAMES.join(", ")
            )))
        }
    };
    Ok(cfg)
}

/// One-line description for `presets list`.
pub fn describe(name: &str) -> &'static str {
    match name {
        "wave-collapse-df" => "colliding Gaussians, rho = 0, plain DF",
        "wave-collapse-dfo" => "colliding Gaussians, rho = 0, DFO with lambda = 1",
        "wave-collapse-dfo-exact" => "colliding Gaussians, rho = 0, DFO with the exact-recovery gain",
        "wave-illcond-df" => "colliding Gaussians, ill-conditioned rho, plain DF",
        "wave-illcond-dfo" => "colliding Gaussians, ill-conditioned rho, DFO",
        "advreact-df" => "advection-reaction with sine amplitudes, plain DF",
        "advreact-dfo" => "advection-reaction with sine amplitudes, DFO",
        "transport-mlp-df" => "2D transport, periodic MLP 3x32, DF + tSVD",
        "transport-mlp-dfo" => "2D transport, periodic MLP 3x32, DFO",
        _ => "",
    }
}
