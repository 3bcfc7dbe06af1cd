//! Initial-condition fitting with Adam on the mean squared error.

use crate::error::{Error, Result};
use crate::harness::config::FitConfig;
use crate::models::{Parametrization, PointSet};

#[derive(Debug, Clone, PartialEq)]
pub struct FitOutcome {
    pub theta: Vec<f64>,
    /// Loss at the returned parameters.
    pub loss: f64,
    /// Adam updates performed.
    pub iterations: usize,
    /// `(iteration, loss)` every `log_every` iterations.
    pub history: Vec<(usize, f64)>,
}

/// Minimize `mean((û(θ, x) − u₀(x))²)` over `points`, starting at `theta`.
///
/// Stops early once the loss reaches `fit.tolerance`. A non-finite loss is
/// reported with the iteration at which it appeared.
pub fn fit_initial_condition<M, F>(
    model: &M,
    u0: F,
    fit: &FitConfig,
    points: &PointSet,
    theta: Vec<f64>,
) -> Result<FitOutcome>
where
    M: Parametrization + ?Sized,
    F: Fn(&[f64]) -> Vec<f64>,
{
    fit.validate()?;
    if theta.len() != model.param_count() {
        return Err(Error::input(format!(
            "initial guess has length {} but model expects {}",
            theta.len(),
            model.param_count()
        )));
    }
    if points.is_empty() || points.dim() != model.spatial_dim() {
        return Err(Error::input("fit points do not match the model input dimension"));
    }
    let q = model.output_dim();
    let mut targets = Vec::with_capacity(points.len() * q);
    for x in points.iter() {
        let v = u0(x);
        if v.len() != q {
            return Err(Error::input(format!("target has {} components, model has {q}", v.len())));
        }
        targets.extend_from_slice(&v);
    }

    let mut theta = theta;
    let p = theta.len();
    let mut m = vec![0.0; p];
    let mut v = vec![0.0; p];
    let (mut b1t, mut b2t) = (1.0, 1.0);
    let mut history = Vec::new();

    let mut it = 0;
    loop {
        let (loss, grad) = model.mse_and_gradient(&theta, points, &targets);
        if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::FitDiverged { iteration: it, loss });
        }
        if fit.log_every > 0 && it % fit.log_every == 0 {
            history.push((it, loss));
        }
        if loss <= fit.tolerance || it == fit.iterations {
            return Ok(FitOutcome {
                theta,
                loss,
                iterations: it,
                history,
            });
        }
        b1t *= fit.beta1;
        b2t *= fit.beta2;
        for k in 0..p {
            m[k] = fit.beta1 * m[k] + (1.0 - fit.beta1) * grad[k];
            v[k] = fit.beta2 * v[k] + (1.0 - fit.beta2) * grad[k] * grad[k];
            let m_hat = m[k] / (1.0 - b1t);
            let v_hat = v[k] / (1.0 - b2t);
            theta[k] -= fit.learning_rate * m_hat / (v_hat.sqrt() + fit.epsilon);
        }
        it += 1;
    }
}
