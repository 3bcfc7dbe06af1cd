//! Two colliding Gaussian waves in first-order form.
//!
//! The state is `(u, ∂t u)` and the ansatz carries two bump centers for the
//! displacement and two for the velocity field:
//!
//! ```text
//! û⁽¹⁾ = φ₀(x; θ₁) + φ_ρ(x; θ₂)
//! û⁽²⁾ = c ∂μ φ₀(x; θ₃) − c ∂μ φ_ρ(x; θ₄)
//! ```
//!
//! with `φ_ρ(x; μ) = exp(−½ (x − μ)² / (1 + ρ))`. When `ρ = 0` and the two
//! centers coincide, the Jacobian loses rank.

use nalgebra::DMatrix;

use super::{Domain, Parametrization, PdeProblem};

/// Gaussian bump `φ_ρ(x; μ)` and its `μ`-derivatives.
pub mod gaussian {
    pub fn value(x: f64, mu: f64, rho: f64) -> f64 {
        let s = 1.0 + rho;
        let r = x - mu;
        (-0.5 * r * r / s).exp()
    }

    /// `∂μ φ = (x − μ)/s · φ`
    pub fn d_mu(x: f64, mu: f64, rho: f64) -> f64 {
        let s = 1.0 + rho;
        (x - mu) / s * value(x, mu, rho)
    }

    /// `∂²μ φ = ((x − μ)²/s² − 1/s) φ`, equal to `∂²x φ`.
    pub fn d2_mu(x: f64, mu: f64, rho: f64) -> f64 {
        let s = 1.0 + rho;
        let r = x - mu;
        (r * r / (s * s) - 1.0 / s) * value(x, mu, rho)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveTwoGaussian {
    pub rho: f64,
    pub c: f64,
}

impl WaveTwoGaussian {
    pub fn new(rho: f64, c: f64) -> Self {
        Self { rho, c }
    }

    /// `∂²x û⁽¹⁾(θ, x)` in closed form.
    pub fn displacement_xx(&self, theta: &[f64], x: f64) -> f64 {
        gaussian::d2_mu(x, theta[0], 0.0) + gaussian::d2_mu(x, theta[1], self.rho)
    }

    /// Parameters reproducing the exact solution at time `t`:
    /// `[−2 + ct, 2 − ct, −2 + ct, 2 − ct]`.
    pub fn exact_parameters(&self, t: f64) -> [f64; 4] {
        let s = self.c * t;
        [-2.0 + s, 2.0 - s, -2.0 + s, 2.0 - s]
    }
}

impl Default for WaveTwoGaussian {
    fn default() -> Self {
        Self { rho: 0.0, c: 1.0 }
    }
}

impl Parametrization for WaveTwoGaussian {
    fn param_count(&self) -> usize {
        4
    }

    fn spatial_dim(&self) -> usize {
        1
    }

    fn output_dim(&self) -> usize {
        2
    }

    fn evaluate(&self, theta: &[f64], x: &[f64]) -> Vec<f64> {
        let x = x[0];
        let (rho, c) = (self.rho, self.c);
        vec![
            gaussian::value(x, theta[0], 0.0) + gaussian::value(x, theta[1], rho),
            c * gaussian::d_mu(x, theta[2], 0.0) - c * gaussian::d_mu(x, theta[3], rho),
        ]
    }

    fn param_gradient(&self, theta: &[f64], x: &[f64]) -> DMatrix<f64> {
        let x = x[0];
        let (rho, c) = (self.rho, self.c);
        DMatrix::from_row_slice(
            2,
            4,
            &[
                gaussian::d_mu(x, theta[0], 0.0),
                gaussian::d_mu(x, theta[1], rho),
                0.0,
                0.0,
                0.0,
                0.0,
                c * gaussian::d2_mu(x, theta[2], 0.0),
                -c * gaussian::d2_mu(x, theta[3], rho),
            ],
        )
    }

    fn spatial_gradient(&self, theta: &[f64], x: &[f64]) -> DMatrix<f64> {
        let x = x[0];
        let (rho, c) = (self.rho, self.c);
        DMatrix::from_row_slice(
            2,
            1,
            &[
                -gaussian::d_mu(x, theta[0], 0.0) - gaussian::d_mu(x, theta[1], rho),
                -c * gaussian::d2_mu(x, theta[2], 0.0) + c * gaussian::d2_mu(x, theta[3], rho),
            ],
        )
    }
}

/// `∂t (u, v) = (v, c² ∂²x u)` on a periodic interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveEquation {
    pub lower: f64,
    pub upper: f64,
}

impl Default for WaveEquation {
    fn default() -> Self {
        Self {
            lower: -12.0,
            upper: 12.0,
        }
    }
}

impl PdeProblem<WaveTwoGaussian> for WaveEquation {
    fn domain(&self) -> Domain {
        Domain::periodic_box(&[self.lower], &[self.upper])
    }

    fn rhs_at(&self, model: &WaveTwoGaussian, theta: &[f64], _t: f64, x: &[f64]) -> Vec<f64> {
        let u = model.evaluate(theta, x);
        vec![u[1], model.c * model.c * model.displacement_xx(theta, x[0])]
    }
}
