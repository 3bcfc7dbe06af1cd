use std::f64::consts::TAU;

use super::{Domain, Parametrization, PdeProblem};

/// Separable advection speeds
/// `c_x(x) = 1.0 (1 + 0.6 sin(2π·3 (x − x₀)/L_x))`,
/// `c_y(y) = 0.8 (1 + 0.3 cos(2π·2 (y − y₀)/L_y))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowField {
    pub x0: f64,
    pub y0: f64,
    pub lx: f64,
    pub ly: f64,
}

impl Default for FlowField {
    fn default() -> Self {
        Self {
            x0: 0.0,
            y0: 0.0,
            lx: 2.0,
            ly: 2.0,
        }
    }
}

impl FlowField {
    pub fn cx(&self, x: f64) -> f64 {
        1.0 * (1.0 + 0.6 * (TAU * 3.0 * (x - self.x0) / self.lx).sin())
    }

    pub fn cy(&self, y: f64) -> f64 {
        0.8 * (1.0 + 0.3 * (TAU * 2.0 * (y - self.y0) / self.ly).cos())
    }

    /// Upper bound on `max |c_x|` and `max |c_y|`.
    pub fn max_speed(&self) -> f64 {
        1.6
    }
}

/// `∂t u = −c_x(x) ∂x u − c_y(y) ∂y u` on the periodic square `[−1, 1)²`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Transport2d {
    pub flow: FlowField,
}

impl<M: Parametrization + ?Sized> PdeProblem<M> for Transport2d {
    fn domain(&self) -> Domain {
        Domain::periodic_box(&[-1.0, -1.0], &[1.0, 1.0])
    }

    fn rhs_at(&self, model: &M, theta: &[f64], _t: f64, x: &[f64]) -> Vec<f64> {
        let g = model.spatial_gradient(theta, x);
        let (cx, cy) = (self.flow.cx(x[0]), self.flow.cy(x[1]));
        (0..model.output_dim())
            .map(|o| -cx * g[(o, 0)] - cy * g[(o, 1)])
            .collect()
    }
}
