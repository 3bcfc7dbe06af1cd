//! Ground-truth fields: closed-form solutions of the two toy problems and a
//! method-of-lines finite-difference solver for 2D transport.

use crate::error::{Error, Result};
use crate::models::{gaussian, Domain, FlowField, Parametrization, PointSet};

/// Field values on a tensor-product grid at one time.
///
/// Values are stored point-major in the ordering of [`Domain::grid`], with
/// `components` entries per point.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceField {
    pub domain: Domain,
    pub sizes: Vec<usize>,
    pub components: usize,
    pub t: f64,
    pub values: Vec<f64>,
}

impl ReferenceField {
    pub fn sample<F>(domain: &Domain, sizes: &[usize], components: usize, t: f64, f: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64>,
    {
        let points = domain.grid(sizes);
        let mut values = Vec::with_capacity(points.len() * components);
        for x in points.iter() {
            let v = f(x);
            debug_assert_eq!(v.len(), components);
            values.extend_from_slice(&v);
        }
        Self {
            domain: domain.clone(),
            sizes: sizes.to_vec(),
            components,
            t,
            values,
        }
    }

    /// Evaluate a parametrization on the grid.
    pub fn from_model<M: Parametrization + ?Sized>(
        model: &M,
        theta: &[f64],
        domain: &Domain,
        sizes: &[usize],
        t: f64,
    ) -> Self {
        Self::sample(domain, sizes, model.output_dim(), t, |x| model.evaluate(theta, x))
    }

    pub fn points(&self) -> PointSet {
        self.domain.grid(&self.sizes)
    }

    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Restrict a 2D field to a grid whose sizes divide the current ones.
    pub fn subsample(&self, sizes: &[usize]) -> Result<Self> {
        if sizes.len() != 2 || self.sizes.len() != 2 {
            return Err(Error::input("subsampling is implemented for 2D grids"));
        }
        let (nx, ny) = (self.sizes[0], self.sizes[1]);
        if sizes[0] == 0 || sizes[1] == 0 || nx % sizes[0] != 0 || ny % sizes[1] != 0 {
            return Err(Error::input(format!(
                "grid {:?} is not a divisor of {:?}",
                sizes, self.sizes
            )));
        }
        let (sx, sy) = (nx / sizes[0], ny / sizes[1]);
        let q = self.components;
        let mut values = Vec::with_capacity(sizes[0] * sizes[1] * q);
        for i in 0..sizes[0] {
            for j in 0..sizes[1] {
                let k = (i * sx * ny + j * sy) * q;
                values.extend_from_slice(&self.values[k..k + q]);
            }
        }
        Ok(Self {
            domain: self.domain.clone(),
            sizes: sizes.to_vec(),
            components: q,
            t: self.t,
            values,
        })
    }
}

/// Exact solution of the first-order wave system for the two-bump toy:
/// `u = φ₀(x; −2 + ct) + φ_ρ(x; 2 − ct)` and its time derivative.
pub fn wave_exact(t: f64, x: f64, rho: f64, c: f64) -> (f64, f64) {
    let (left, right) = (-2.0 + c * t, 2.0 - c * t);
    let u = gaussian::value(x, left, 0.0) + gaussian::value(x, right, rho);
    let ut = c * gaussian::d_mu(x, left, 0.0) - c * gaussian::d_mu(x, right, rho);
    (u, ut)
}

/// `sin t sin x + sin t cos x`
pub fn advreact_exact(t: f64, x: f64) -> f64 {
    t.sin() * (x.sin() + x.cos())
}

/// Gaussian bump initial condition for 2D transport, centered at `(−0.2, 0)`.
pub fn transport_initial_condition(x: f64, y: f64) -> f64 {
    const SIGMA: f64 = 8e-3;
    let r2 = (x + 0.2).powi(2) + y * y;
    (-r2 / (std::f64::consts::PI * SIGMA)).exp()
}

/// Largest admissible `(max|c_x|/h_x + max|c_y|/h_y)·δt`.
///
/// RK4 with the fourth-order central stencil is stable up to roughly 2.06 per
/// direction; a combined bound of 1 leaves a factor of about two.
pub const CFL_LIMIT: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct FdConfig {
    pub sizes: [usize; 2],
    pub dt: f64,
}

/// RK4 + fourth-order periodic central differences for
/// `∂t u = −c_x(x) ∂x u − c_y(y) ∂y u` on `[−1, 1)²`.
#[derive(Debug, Clone)]
pub struct FdTransport {
    cfg: FdConfig,
    cx: Vec<f64>,
    cy: Vec<f64>,
    hx: f64,
    hy: f64,
}

impl FdTransport {
    pub fn domain() -> Domain {
        Domain::periodic_box(&[-1.0, -1.0], &[1.0, 1.0])
    }

    pub fn new(flow: &FlowField, cfg: FdConfig) -> Result<Self> {
        Self::with_speeds(|x| flow.cx(x), |y| flow.cy(y), cfg)
    }

    pub fn with_speeds<Fx, Fy>(cx: Fx, cy: Fy, cfg: FdConfig) -> Result<Self>
    where
        Fx: Fn(f64) -> f64,
        Fy: Fn(f64) -> f64,
    {
        let [nx, ny] = cfg.sizes;
        if nx < 5 || ny < 5 {
            return Err(Error::Config(format!("grid {nx}x{ny} too small for the 5-point stencil")));
        }
        if !(cfg.dt > 0.0 && cfg.dt.is_finite()) {
            return Err(Error::Config(format!("reference time step must be positive, got {}", cfg.dt)));
        }
        let (hx, hy) = (2.0 / nx as f64, 2.0 / ny as f64);
        let cx: Vec<f64> = (0..nx).map(|i| cx(-1.0 + i as f64 * hx)).collect();
        let cy: Vec<f64> = (0..ny).map(|j| cy(-1.0 + j as f64 * hy)).collect();
        let amax = |v: &[f64]| v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let cfl = (amax(&cx) / hx + amax(&cy) / hy) * cfg.dt;
        if cfl > CFL_LIMIT {
            return Err(Error::Config(format!(
                "CFL number {cfl:.3} exceeds {CFL_LIMIT} (grid {nx}x{ny}, dt {})",
                cfg.dt
            )));
        }
        Ok(Self { cfg, cx, cy, hx, hy })
    }

    pub fn config(&self) -> &FdConfig {
        &self.cfg
    }

    fn rhs(&self, u: &[f64], out: &mut [f64]) {
        let [nx, ny] = self.cfg.sizes;
        let (wx, wy) = (1.0 / (12.0 * self.hx), 1.0 / (12.0 * self.hy));
        for i in 0..nx {
            let im2 = (i + nx - 2) % nx;
            let im1 = (i + nx - 1) % nx;
            let ip1 = (i + 1) % nx;
            let ip2 = (i + 2) % nx;
            let row = |k: usize| &u[k * ny..(k + 1) * ny];
            let (a, b, c, d, e) = (row(im2), row(im1), row(i), row(ip1), row(ip2));
            let o = &mut out[i * ny..(i + 1) * ny];
            let cxi = self.cx[i];
            let point = |j: usize, jm2: usize, jm1: usize, jp1: usize, jp2: usize| {
                let ux = (a[j] - 8.0 * b[j] + 8.0 * d[j] - e[j]) * wx;
                let uy = (c[jm2] - 8.0 * c[jm1] + 8.0 * c[jp1] - c[jp2]) * wy;
                -cxi * ux - self.cy[j] * uy
            };
            let interior = o[2..ny - 2]
                .iter_mut()
                .zip(c.windows(5))
                .zip(&self.cy[2..])
                .zip(a[2..].iter().zip(&b[2..]))
                .zip(d[2..].iter().zip(&e[2..]));
            for ((((oj, w), cyj), (aj, bj)), (dj, ej)) in interior {
                let ux = (aj - 8.0 * bj + 8.0 * dj - ej) * wx;
                let uy = (w[0] - 8.0 * w[1] + 8.0 * w[3] - w[4]) * wy;
                *oj = -cxi * ux - cyj * uy;
            }
            for j in [0, 1, ny - 2, ny - 1] {
                o[j] = point(j, (j + ny - 2) % ny, (j + ny - 1) % ny, (j + 1) % ny, (j + 2) % ny);
            }
        }
    }

    fn rk4_step(&self, u: &mut [f64], h: f64, scratch: &mut [Vec<f64>; 3]) {
        let [k, acc, stage] = scratch;
        self.rhs(u, k);
        for idx in 0..u.len() {
            acc[idx] = k[idx];
            stage[idx] = u[idx] + 0.5 * h * k[idx];
        }
        self.rhs(stage, k);
        for idx in 0..u.len() {
            acc[idx] += 2.0 * k[idx];
            stage[idx] = u[idx] + 0.5 * h * k[idx];
        }
        self.rhs(stage, k);
        for idx in 0..u.len() {
            acc[idx] += 2.0 * k[idx];
            stage[idx] = u[idx] + h * k[idx];
        }
        self.rhs(stage, k);
        for idx in 0..u.len() {
            u[idx] += h / 6.0 * (acc[idx] + k[idx]);
        }
    }

    /// Advance `field` in place to `t_target` using whole steps of `dt` plus
    /// one shorter step if needed.
    pub fn advance(&self, field: &mut ReferenceField, t_target: f64) -> Result<()> {
        if field.sizes.as_slice() != self.cfg.sizes || field.components != 1 {
            return Err(Error::input(format!(
                "field grid {:?} does not match solver grid {:?}",
                field.sizes, self.cfg.sizes
            )));
        }
        if t_target < field.t {
            return Err(Error::input("reference fields cannot be advanced backwards"));
        }
        let n = field.values.len();
        let mut scratch = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        let span = t_target - field.t;
        let whole = (span / self.cfg.dt + 1e-9).floor() as usize;
        let t0 = field.t;
        for _ in 0..whole {
            self.rk4_step(&mut field.values, self.cfg.dt, &mut scratch);
        }
        let rest = t_target - (t0 + whole as f64 * self.cfg.dt);
        if rest > 1e-12 * self.cfg.dt {
            self.rk4_step(&mut field.values, rest, &mut scratch);
        }
        field.t = t_target;
        if field.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Integration { step: whole, t: t_target });
        }
        Ok(())
    }
}

/// Integrate the transport reference from `ic` and return snapshots at `times`
/// (ascending, not earlier than `ic.t`).
pub fn fd_transport_reference(
    ic: &ReferenceField,
    flow: &FlowField,
    cfg: FdConfig,
    times: &[f64],
) -> Result<Vec<ReferenceField>> {
    let solver = FdTransport::new(flow, cfg)?;
    let mut field = ic.clone();
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        solver.advance(&mut field, t)?;
        out.push(field.clone());
    }
    Ok(out)
}
