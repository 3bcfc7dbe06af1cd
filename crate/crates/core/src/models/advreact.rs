use std::f64::consts::TAU;

use nalgebra::DMatrix;

use super::{Domain, Parametrization, PdeProblem};

/// `û(θ, x) = sin θ₁ sin x + sin θ₂ cos x`.
///
/// Both Jacobian columns vanish at `θ = (π/2, π/2)`: the tangent space
/// collapses to `{0}`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AdvReactSine;

impl Parametrization for AdvReactSine {
    fn param_count(&self) -> usize {
        2
    }

    fn spatial_dim(&self) -> usize {
        1
    }

    fn output_dim(&self) -> usize {
        1
    }

    fn evaluate(&self, theta: &[f64], x: &[f64]) -> Vec<f64> {
        let (s, c) = x[0].sin_cos();
        vec![theta[0].sin() * s + theta[1].sin() * c]
    }

    fn param_gradient(&self, theta: &[f64], x: &[f64]) -> DMatrix<f64> {
        let (s, c) = x[0].sin_cos();
        DMatrix::from_row_slice(1, 2, &[theta[0].cos() * s, theta[1].cos() * c])
    }

    fn spatial_gradient(&self, theta: &[f64], x: &[f64]) -> DMatrix<f64> {
        let (s, c) = x[0].sin_cos();
        DMatrix::from_element(1, 1, theta[0].sin() * c - theta[1].sin() * s)
    }
}

/// Source term making `u = sin t sin x + sin t cos x` an exact solution of
/// `∂t u = −c ∂x u − κ u + s`.
pub fn advreact_source(t: f64, x: f64, c: f64, kappa: f64) -> f64 {
    let (st, ct) = t.sin_cos();
    let (sx, cx) = x.sin_cos();
    (ct + (kappa - c) * st) * sx + (ct + (kappa + c) * st) * cx
}

/// `∂t u = −c ∂x u − κ u + s(t, x)` on the periodic interval `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdvectionReaction {
    pub c: f64,
    pub kappa: f64,
}

impl Default for AdvectionReaction {
    fn default() -> Self {
        Self { c: 1.0, kappa: 1.0 }
    }
}

impl<M: Parametrization + ?Sized> PdeProblem<M> for AdvectionReaction {
    fn domain(&self) -> Domain {
        Domain::periodic_box(&[0.0], &[TAU])
    }

    fn rhs_at(&self, model: &M, theta: &[f64], t: f64, x: &[f64]) -> Vec<f64> {
        let u = model.evaluate(theta, x)[0];
        let ux = model.spatial_gradient(theta, x)[(0, 0)];
        vec![-self.c * ux - self.kappa * u + advreact_source(t, x[0], self.c, self.kappa)]
    }
}
