//! DF and DFO time steppers.
//!
//! Both schemes carry a parameter vector `θ` and a momentum (history) vector
//! `m`. At every evaluation the regularized least-squares solve provides the
//! minimal-norm velocity `η̄` and the retained right singular basis `V`; the
//! momentum is relaxed towards `η̄` by an exponential moving average and only
//! its component orthogonal to `V` is added to the velocity. With `λ = 0` both
//! steppers reduce exactly to plain DF.

use std::borrow::Cow;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, LsqResult, SketchConfig, Truncation};
use crate::models::{assemble_system, Parametrization, PdeProblem, PointSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Forward Euler on `θ`, backward Euler on `m`.
    SemiImplicitEuler,
    /// Classical RK4 on `θ` with the EMA threaded through the four stages.
    Rk4StageEma,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Solver {
    Tsvd,
    Tikhonov { gamma: f64 },
    Rsvd(SketchConfig),
}

/// How the EMA coefficient is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relaxation {
    /// Onsager relaxation time; `β = τ / (τ + h)` for a step of length `h`.
    Tau(f64),
    /// Fixed EMA coefficient regardless of the step length.
    Beta(f64),
}

impl Relaxation {
    pub fn beta(&self, h: f64) -> f64 {
        match *self {
            Relaxation::Tau(tau) => tau / (tau + h),
            Relaxation::Beta(beta) => beta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConfig {
    pub dt: f64,
    pub relaxation: Relaxation,
    pub lambda: f64,
    pub truncation: Truncation,
    pub scheme: Scheme,
    pub solver: Solver,
}

impl StepConfig {
    /// Plain DF: no momentum injection.
    pub fn df(dt: f64, truncation: Truncation, scheme: Scheme) -> Self {
        Self {
            dt,
            relaxation: Relaxation::Tau(1.0),
            lambda: 0.0,
            truncation,
            scheme,
            solver: Solver::Tsvd,
        }
    }

    pub fn dfo(dt: f64, tau: f64, lambda: f64, truncation: Truncation, scheme: Scheme) -> Self {
        Self {
            dt,
            relaxation: Relaxation::Tau(tau),
            lambda,
            truncation,
            scheme,
            solver: Solver::Tsvd,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("time step must be positive, got {}", self.dt)));
        }
        match self.relaxation {
            Relaxation::Tau(tau) if !(tau > 0.0 && tau.is_finite()) => {
                return Err(Error::Config(format!("relaxation time must be positive, got {tau}")));
            }
            Relaxation::Beta(beta) if !(beta > 0.0 && beta < 1.0) => {
                return Err(Error::Config(format!("EMA coefficient must lie in (0, 1), got {beta}")));
            }
            _ => {}
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::Config(format!("momentum gain must be non-negative, got {}", self.lambda)));
        }
        self.truncation
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        if let Solver::Tikhonov { gamma } = self.solver {
            if !(gamma > 0.0) {
                return Err(Error::Config(format!("Tikhonov parameter must be positive, got {gamma}")));
            }
        }
        Ok(())
    }
}

/// Onsager history variable.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumState {
    pub m: DVector<f64>,
}

impl MomentumState {
    pub fn zeros(p: usize) -> Self {
        Self { m: DVector::zeros(p) }
    }
}

/// `β m + (1 − β) v`
pub fn ema_update(m: &DVector<f64>, v: &DVector<f64>, beta: f64) -> DVector<f64> {
    m * beta + v * (1.0 - beta)
}

/// Per-step diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    /// Time at the end of the step.
    pub t: f64,
    pub theta: DVector<f64>,
    /// `‖J η̄ − f‖` at the start of the step.
    pub residual_norm: f64,
    pub retained_rank: usize,
    pub sigma_max: f64,
    pub sigma_min_retained: f64,
    pub momentum_norm: f64,
    pub projected_momentum_norm: f64,
    /// Shorter than `dt` because the time span is not a multiple of it.
    pub partial: bool,
}

/// One least-squares solve with its residual.
#[derive(Debug, Clone)]
pub struct VelocitySolve {
    pub lsq: LsqResult,
    pub residual_norm: f64,
}

fn solve_system(
    j: &nalgebra::DMatrix<f64>,
    f: &DVector<f64>,
    solver: &Solver,
    truncation: Truncation,
) -> Result<LsqResult> {
    match solver {
        Solver::Tsvd => linalg::solve_truncated(j, f, truncation),
        Solver::Tikhonov { gamma } => {
            // The projector comes from the truncated basis of the same factorization.
            let dec = linalg::decompose(j, f)?;
            let mut lsq = dec.truncated(truncation);
            lsq.eta_bar = dec.tikhonov(*gamma)?;
            Ok(lsq)
        }
        Solver::Rsvd(sketch) => {
            let dec = linalg::decompose_randomized(j, f, sketch)?;
            Ok(dec.truncated(truncation))
        }
    }
}

/// Assemble `(J, f)` at `θ` and solve for the reference velocity.
pub fn solve_velocity<M, P>(
    problem: &P,
    model: &M,
    theta: &[f64],
    t: f64,
    points: &PointSet,
    solver: &Solver,
    truncation: Truncation,
) -> Result<VelocitySolve>
where
    M: Parametrization + ?Sized,
    P: PdeProblem<M> + ?Sized,
{
    let (j, f) = assemble_system(problem, model, theta, t, points)?;
    let lsq = solve_system(&j, &f, solver, truncation)?;
    let residual_norm = (&j * &lsq.eta_bar - &f).norm();
    Ok(VelocitySolve { lsq, residual_norm })
}

/// Minimal-norm (or Tikhonov) DF velocity with the retained basis.
pub fn df_velocity<M, P>(
    problem: &P,
    model: &M,
    theta: &[f64],
    t: f64,
    points: &PointSet,
    solver: &Solver,
    truncation: Truncation,
) -> Result<LsqResult>
where
    M: Parametrization + ?Sized,
    P: PdeProblem<M> + ?Sized,
{
    Ok(solve_velocity(problem, model, theta, t, points, solver, truncation)?.lsq)
}

/// Source of collocation points, queried once per macro step.
pub trait PointsProvider {
    fn points(&mut self, step: usize, t: f64) -> Cow<'_, PointSet>;
}

impl PointsProvider for PointSet {
    fn points(&mut self, _step: usize, _t: f64) -> Cow<'_, PointSet> {
        Cow::Borrowed(self)
    }
}

/// Wraps a closure `(step, t) -> PointSet` as a [`PointsProvider`].
pub struct PointsFn<F>(pub F);

impl<F: FnMut(usize, f64) -> PointSet> PointsProvider for PointsFn<F> {
    fn points(&mut self, step: usize, t: f64) -> Cow<'_, PointSet> {
        Cow::Owned((self.0)(step, t))
    }
}

/// Output of [`Integrator::integrate`].
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub records: Vec<StepRecord>,
    pub theta: DVector<f64>,
    pub momentum: MomentumState,
}

/// DF/DFO stepper bound to a problem and a parametrization.
pub struct Integrator<'a, P: ?Sized, M: ?Sized> {
    pub problem: &'a P,
    pub model: &'a M,
    pub cfg: StepConfig,
}

impl<'a, P, M> Integrator<'a, P, M>
where
    M: Parametrization + ?Sized,
    P: PdeProblem<M> + ?Sized,
{
    pub fn new(problem: &'a P, model: &'a M, cfg: StepConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { problem, model, cfg })
    }

    fn velocity(&self, theta: &DVector<f64>, t: f64, points: &PointSet) -> Result<VelocitySolve> {
        solve_velocity(
            self.problem,
            self.model,
            theta.as_slice(),
            t,
            points,
            &self.cfg.solver,
            self.cfg.truncation,
        )
    }

    /// Semi-implicit Euler step of length `h`:
    ///
    /// ```text
    /// m_{k+1} = β m_k + (1 − β) η̄_k
    /// θ_{k+1} = θ_k + h (η̄_k + λ P_k m_{k+1})
    /// ```
    pub fn euler_step(
        &self,
        theta: &DVector<f64>,
        m: &MomentumState,
        t: f64,
        h: f64,
        points: &PointSet,
    ) -> Result<(DVector<f64>, MomentumState, StepRecord)> {
        let sol = self.velocity(theta, t, points)?;
        let beta = self.cfg.relaxation.beta(h);
        let m_next = ema_update(&m.m, &sol.lsq.eta_bar, beta);
        let m_perp = linalg::project_complement(&sol.lsq.basis, &m_next)?;

        let mut velocity = sol.lsq.eta_bar.clone();
        if self.cfg.lambda != 0.0 {
            velocity.axpy(self.cfg.lambda, &m_perp, 1.0);
        }
        let theta_next = theta + velocity * h;

        let record = StepRecord {
            t: t + h,
            theta: theta_next.clone(),
            residual_norm: sol.residual_norm,
            retained_rank: sol.lsq.retained_rank(),
            sigma_max: sol.lsq.sigma_max,
            sigma_min_retained: sol.lsq.sigma_min_retained(),
            momentum_norm: m_next.norm(),
            projected_momentum_norm: m_perp.norm(),
            partial: false,
        };
        Ok((theta_next, MomentumState { m: m_next }, record))
    }

    /// RK4 macro step of length `h` with the stage-coupled EMA.
    ///
    /// Stage `s` uses the sub-step `h_s ∈ {h, h/2, h/2, h}`; the momentum
    /// accumulates the stage displacements `h_s η̄_s` and is injected as
    /// `λ P_s m_s / h_s`. The diagnostics in the returned record describe the
    /// first stage (the system at `θ_k`).
    pub fn rk4_step(
        &self,
        theta: &DVector<f64>,
        m: &MomentumState,
        t: f64,
        h: f64,
        points: &PointSet,
    ) -> Result<(DVector<f64>, MomentumState, StepRecord)> {
        const SUBSTEP: [f64; 4] = [1.0, 0.5, 0.5, 1.0];
        let beta = self.cfg.relaxation.beta(h);

        let mut momentum = m.m.clone();
        let mut slopes: Vec<DVector<f64>> = Vec::with_capacity(4);
        let mut first: Option<VelocitySolve> = None;
        let mut m_perp_last = DVector::zeros(theta.len());

        for (s, &frac) in SUBSTEP.iter().enumerate() {
            let hs = frac * h;
            let stage_theta = match s {
                0 => theta.clone(),
                _ => theta + &slopes[s - 1] * hs,
            };
            let sol = self.velocity(&stage_theta, t + if s == 0 { 0.0 } else { hs }, points)?;

            let displacement = &sol.lsq.eta_bar * hs;
            momentum = ema_update(&momentum, &displacement, beta);
            let m_perp = linalg::project_complement(&sol.lsq.basis, &momentum)?;

            let mut k = sol.lsq.eta_bar.clone();
            if self.cfg.lambda != 0.0 {
                k.axpy(self.cfg.lambda / hs, &m_perp, 1.0);
            }
            slopes.push(k);
            m_perp_last = m_perp;
            if s == 0 {
                first = Some(sol);
            }
        }

        let increment = (&slopes[0] + &slopes[1] * 2.0 + &slopes[2] * 2.0 + &slopes[3]) * (h / 6.0);
        let theta_next = theta + increment;
        let first = first.expect("four stages evaluated");
        let record = StepRecord {
            t: t + h,
            theta: theta_next.clone(),
            residual_norm: first.residual_norm,
            retained_rank: first.lsq.retained_rank(),
            sigma_max: first.lsq.sigma_max,
            sigma_min_retained: first.lsq.sigma_min_retained(),
            momentum_norm: momentum.norm(),
            projected_momentum_norm: m_perp_last.norm(),
            partial: false,
        };
        Ok((theta_next, MomentumState { m: momentum }, record))
    }

    pub fn step(
        &self,
        theta: &DVector<f64>,
        m: &MomentumState,
        t: f64,
        h: f64,
        points: &PointSet,
    ) -> Result<(DVector<f64>, MomentumState, StepRecord)> {
        match self.cfg.scheme {
            Scheme::SemiImplicitEuler => self.euler_step(theta, m, t, h, points),
            Scheme::Rk4StageEma => self.rk4_step(theta, m, t, h, points),
        }
    }

    /// Integrate from `t_span.0` to `t_span.1` with `m₀ = 0`.
    ///
    /// A trailing step shorter than `dt` is taken when the span is not a
    /// multiple of `dt` (its record has `partial = true`). `observe` is called
    /// after every step.
    pub fn integrate_with<Pts, Obs>(
        &self,
        theta0: &DVector<f64>,
        t_span: (f64, f64),
        points: &mut Pts,
        mut observe: Obs,
    ) -> Result<Trajectory>
    where
        Pts: PointsProvider + ?Sized,
        Obs: FnMut(&StepRecord) -> Result<()>,
    {
        let (t0, t_end) = t_span;
        if !(t_end >= t0) {
            return Err(Error::Config(format!("invalid time span [{t0}, {t_end}]")));
        }
        if theta0.len() != self.model.param_count() {
            return Err(Error::input(format!(
                "initial parameters have length {} but model expects {}",
                theta0.len(),
                self.model.param_count()
            )));
        }
        let dt = self.cfg.dt;
        let span = t_end - t0;
        let ratio = span / dt;
        let full_steps = (ratio + 1e-9).floor() as usize;
        let remainder = span - full_steps as f64 * dt;
        let has_partial = remainder > 1e-9 * dt.max(span);
        let total = full_steps + usize::from(has_partial);

        let mut theta = theta0.clone();
        let mut momentum = MomentumState::zeros(theta.len());
        let mut records = Vec::with_capacity(total);
        for k in 0..total {
            let t = t0 + k as f64 * dt;
            let partial = k == full_steps;
            let h = if partial { t_end - t } else { dt };
            let pts = points.points(k, t);
            let (next, m_next, mut record) = self.step(&theta, &momentum, t, h, &pts)?;
            if next.iter().any(|v| !v.is_finite()) || m_next.m.iter().any(|v| !v.is_finite()) {
                return Err(Error::Integration { step: k, t });
            }
            record.partial = partial;
            if k + 1 == full_steps && !has_partial {
                record.t = t_end;
            }
            observe(&record)?;
            records.push(record);
            theta = next;
            momentum = m_next;
        }
        Ok(Trajectory {
            records,
            theta,
            momentum,
        })
    }

    pub fn integrate<Pts: PointsProvider + ?Sized>(
        &self,
        theta0: &DVector<f64>,
        t_span: (f64, f64),
        points: &mut Pts,
    ) -> Result<Trajectory> {
        self.integrate_with(theta0, t_span, points, |_| Ok(()))
    }
}
