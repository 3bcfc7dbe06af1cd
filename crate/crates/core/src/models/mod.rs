//! Parametrizations `û(θ, x)`, PDE right-hand sides and batch system assembly.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

mod advreact;
mod mlp;
mod transport;
mod wave;

pub use advreact::{advreact_source, AdvReactSine, AdvectionReaction};
pub use mlp::{MlpSpec, PeriodicMlp};
pub use transport::{FlowField, Transport2d};
pub use wave::{gaussian, WaveEquation, WaveTwoGaussian};

/// A differentiable ansatz `û(θ, ·) : ℝᵈ → ℝ^q` with `p` parameters.
pub trait Parametrization: Send + Sync {
    fn param_count(&self) -> usize;
    fn spatial_dim(&self) -> usize;
    fn output_dim(&self) -> usize;

    /// `û(θ, x)`, length `q`.
    fn evaluate(&self, theta: &[f64], x: &[f64]) -> Vec<f64>;

    /// `∂θ û(θ, x)` as a `q × p` matrix.
    fn param_gradient(&self, theta: &[f64], x: &[f64]) -> DMatrix<f64>;

    /// `∂x û(θ, x)` as a `q × d` matrix.
    fn spatial_gradient(&self, theta: &[f64], x: &[f64]) -> DMatrix<f64>;

    /// Mean squared error `mean((û − target)²)` over all points and outputs,
    /// with its parameter gradient. `targets` is stacked like the batch rows.
    fn mse_and_gradient(&self, theta: &[f64], points: &PointSet, targets: &[f64]) -> (f64, Vec<f64>) {
        let q = self.output_dim();
        let total = (points.len() * q) as f64;
        let mut loss = 0.0;
        let mut grad = vec![0.0; self.param_count()];
        for (i, x) in points.iter().enumerate() {
            let u = self.evaluate(theta, x);
            let jac = self.param_gradient(theta, x);
            for o in 0..q {
                let r = u[o] - targets[i * q + o];
                loss += r * r;
                for (k, g) in grad.iter_mut().enumerate() {
                    *g += 2.0 * r * jac[(o, k)] / total;
                }
            }
        }
        (loss / total, grad)
    }
}

/// Spatial domain as an axis-aligned box.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub periodic: Vec<bool>,
}

impl Domain {
    pub fn periodic_box(lower: &[f64], upper: &[f64]) -> Self {
        Self {
            lower: lower.to_vec(),
            upper: upper.to_vec(),
            periodic: vec![true; lower.len()],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&xi, (&lo, &hi))| xi >= lo && xi <= hi)
    }

    /// Tensor-product grid with `sizes[i]` equispaced nodes per axis.
    ///
    /// Periodic axes exclude the right endpoint. The first axis varies
    /// slowest.
    pub fn grid(&self, sizes: &[usize]) -> PointSet {
        assert_eq!(sizes.len(), self.dim(), "one grid size per dimension");
        let axes: Vec<Vec<f64>> = (0..self.dim())
            .map(|i| {
                let n = sizes[i];
                let (lo, hi) = (self.lower[i], self.upper[i]);
                let denom = if self.periodic[i] || n == 1 { n } else { n - 1 };
                let h = (hi - lo) / denom as f64;
                (0..n).map(|k| lo + k as f64 * h).collect()
            })
            .collect();
        let total: usize = sizes.iter().product();
        let mut coords = Vec::with_capacity(total * self.dim());
        let mut idx = vec![0usize; self.dim()];
        for _ in 0..total {
            for (axis, &k) in idx.iter().enumerate() {
                coords.push(axes[axis][k]);
            }
            for axis in (0..self.dim()).rev() {
                idx[axis] += 1;
                if idx[axis] < sizes[axis] {
                    break;
                }
                idx[axis] = 0;
            }
        }
        PointSet::new(self.dim(), coords)
    }
}

/// Collocation points stored contiguously, `dim` coordinates per point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize, coords: Vec<f64>) -> Self {
        assert!(dim > 0, "points need at least one coordinate");
        assert_eq!(coords.len() % dim, 0, "coordinate count not a multiple of dim");
        Self { dim, coords }
    }

    pub fn from_1d(xs: &[f64]) -> Self {
        Self::new(1, xs.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }
}

/// Right-hand side `F(û)` of `∂t u = F(u)` for a given parametrization type.
pub trait PdeProblem<M: Parametrization + ?Sized>: Send + Sync {
    fn domain(&self) -> Domain;

    /// `F(û(θ, ·))(x)` at one point, length `q`.
    fn rhs_at(&self, model: &M, theta: &[f64], t: f64, x: &[f64]) -> Vec<f64>;

    /// Values stacked over points, then output components.
    fn rhs(&self, model: &M, theta: &[f64], t: f64, points: &PointSet) -> DVector<f64> {
        let q = model.output_dim();
        let mut out = DVector::zeros(points.len() * q);
        for (i, x) in points.iter().enumerate() {
            let v = self.rhs_at(model, theta, t, x);
            out.rows_mut(i * q, q).copy_from_slice(&v);
        }
        out
    }
}

/// Batch Jacobian `J_ij = ∂θⱼ û(θ, xᵢ)` and right-hand side `fᵢ = F(û)(xᵢ)`.
///
/// Rows are ordered point-major: all `q` output components of point 0, then
/// point 1, and so on.
pub fn assemble_system<M, P>(
    problem: &P,
    model: &M,
    theta: &[f64],
    t: f64,
    points: &PointSet,
) -> Result<(DMatrix<f64>, DVector<f64>)>
where
    M: Parametrization + ?Sized,
    P: PdeProblem<M> + ?Sized,
{
    let p = model.param_count();
    let q = model.output_dim();
    if theta.len() != p {
        return Err(Error::input(format!(
            "parameter vector has length {} but model expects {p}",
            theta.len()
        )));
    }
    if points.is_empty() {
        return Err(Error::input("no collocation points"));
    }
    if points.dim() != model.spatial_dim() {
        return Err(Error::input(format!(
            "points are {}-dimensional but model expects {}",
            points.dim(),
            model.spatial_dim()
        )));
    }
    if theta.iter().any(|v| !v.is_finite()) {
        return Err(Error::input("non-finite parameter vector"));
    }
    let domain = problem.domain();

    let n = points.len() * q;
    let mut j = DMatrix::zeros(n, p);
    let mut f = DVector::zeros(n);
    for (i, x) in points.iter().enumerate() {
        if !domain.contains(x) {
            return Err(Error::input(format!("collocation point {i} lies outside the domain")));
        }
        let grad = model.param_gradient(theta, x);
        if grad.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                point: i,
                what: "parameter gradient".into(),
            });
        }
        let rhs = problem.rhs_at(model, theta, t, x);
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                point: i,
                what: "right-hand side".into(),
            });
        }
        j.rows_mut(i * q, q).copy_from(&grad);
        f.rows_mut(i * q, q).copy_from_slice(&rhs);
    }
    Ok((j, f))
}
