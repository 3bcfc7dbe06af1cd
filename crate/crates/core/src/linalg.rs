//! Regularized least-squares solves for the batch system `J η ≈ f`.
//!
//! Every solver goes through a thin QR factorization of `J` followed by a
//! dense SVD of the triangular factor (or, for the randomized variant, of the
//! sketched matrix `Qᵀ J`). The right singular vectors are the only basis the
//! rest of the crate needs: they define both the minimal-norm velocity and the
//! projector onto the approximate nullspace.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Singular value cutoff `ε = max(abs, rel · σ_max)`.
///
/// Modes with `σ ≥ ε` are retained. Exact zeros are never retained, so the
/// zero matrix always yields an empty basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub rel: f64,
    #[serde(default)]
    pub abs: f64,
}

impl Truncation {
    pub fn relative(rel: f64) -> Self {
        Self { rel, abs: 0.0 }
    }

    pub fn new(rel: f64, abs: f64) -> Self {
        Self { rel, abs }
    }

    pub fn threshold(&self, sigma_max: f64) -> f64 {
        (self.rel * sigma_max).max(self.abs)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.rel) {
            return Err(Error::input(format!(
                "relative tolerance must lie in [0, 1), got {}",
                self.rel
            )));
        }
        if !(self.abs >= 0.0 && self.abs.is_finite()) {
            return Err(Error::input(format!(
                "absolute tolerance must be finite and non-negative, got {}",
                self.abs
            )));
        }
        Ok(())
    }
}

/// Output of one regularized solve.
#[derive(Debug, Clone, PartialEq)]
pub struct LsqResult {
    /// Minimal-norm velocity `V_ε Σ_ε⁻¹ U_εᵀ f`.
    pub eta_bar: DVector<f64>,
    /// Retained right singular vectors, `p × r`, orthonormal columns.
    pub basis: DMatrix<f64>,
    /// Retained singular values, nonincreasing.
    pub singulars: DVector<f64>,
    /// Largest singular value of the decomposed matrix (0 for `J = 0`).
    pub sigma_max: f64,
}

impl LsqResult {
    pub fn retained_rank(&self) -> usize {
        self.basis.ncols()
    }

    /// Smallest retained singular value, `0` when nothing was retained.
    pub fn sigma_min_retained(&self) -> f64 {
        self.singulars.iter().copied().last().unwrap_or(0.0)
    }
}

/// Gaussian sketch used by [`solve_min_norm_randomized`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SketchConfig {
    pub sketch_size: usize,
    #[serde(default = "SketchConfig::default_oversampling")]
    pub oversampling: usize,
    #[serde(default)]
    pub seed: u64,
}

impl SketchConfig {
    pub const DEFAULT_OVERSAMPLING: usize = 10;

    pub fn new(sketch_size: usize, seed: u64) -> Self {
        Self {
            sketch_size,
            oversampling: Self::DEFAULT_OVERSAMPLING,
            seed,
        }
    }

    fn default_oversampling() -> usize {
        Self::DEFAULT_OVERSAMPLING
    }
}

/// Right-singular data of `J` together with the projected right-hand side.
///
/// Holds `σ` (sorted nonincreasing), the matching columns of `V` and the
/// coefficients `Ũᵀ Qᵀ f`. Truncated and Tikhonov solutions are both cheap
/// functions of this triple, so a caller needing both only factors once.
#[derive(Debug, Clone)]
pub struct Decomposition {
    sigma: Vec<f64>,
    v: DMatrix<f64>,
    coeffs: Vec<f64>,
    p: usize,
}

impl Decomposition {
    pub fn sigma_max(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.sigma
    }

    /// Truncated pseudoinverse solution and retained basis.
    pub fn truncated(&self, trunc: Truncation) -> LsqResult {
        let sigma_max = self.sigma_max();
        let eps = trunc.threshold(sigma_max);
        let rank = self
            .sigma
            .iter()
            .take_while(|&&s| s > 0.0 && s >= eps)
            .count();

        let basis = self.v.columns(0, rank).into_owned();
        let mut eta_bar = DVector::zeros(self.p);
        for i in 0..rank {
            eta_bar.axpy(self.coeffs[i] / self.sigma[i], &self.v.column(i), 1.0);
        }
        LsqResult {
            eta_bar,
            basis,
            singulars: DVector::from_row_slice(&self.sigma[..rank]),
            sigma_max,
        }
    }

    /// `(JᵀJ + γI)⁻¹ Jᵀ f` through the filter `σ ↦ σ / (σ² + γ)`.
    pub fn tikhonov(&self, gamma: f64) -> Result<DVector<f64>> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::input(format!(
                "Tikhonov parameter must be positive, got {gamma}"
            )));
        }
        let mut eta = DVector::zeros(self.p);
        for (i, (&s, &c)) in self.sigma.iter().zip(&self.coeffs).enumerate() {
            if s > 0.0 {
                eta.axpy(c * s / (s * s + gamma), &self.v.column(i), 1.0);
            }
        }
        Ok(eta)
    }
}

fn check_system(j: &DMatrix<f64>, f: &DVector<f64>) -> Result<()> {
    let (n, p) = j.shape();
    if n == 0 || p == 0 {
        return Err(Error::input(format!("empty matrix ({n}x{p})")));
    }
    if f.len() != n {
        return Err(Error::input(format!(
            "right-hand side has length {} but J has {n} rows",
            f.len()
        )));
    }
    if let Some(idx) = j.iter().position(|v| !v.is_finite()) {
        return Err(Error::input(format!(
            "non-finite entry in J at ({}, {})",
            idx % n,
            idx / n
        )));
    }
    if let Some(i) = f.iter().position(|v| !v.is_finite()) {
        return Err(Error::input(format!("non-finite entry in f at {i}")));
    }
    Ok(())
}

/// Dense SVD of `b`, returning `(σ, V, Ũᵀ g)` sorted by nonincreasing σ.
fn right_svd(b: DMatrix<f64>, g: &DVector<f64>, p: usize) -> Decomposition {
    let svd = b.svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sv = svd.singular_values;

    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));

    let mut v = DMatrix::zeros(p, order.len());
    let mut sigma = Vec::with_capacity(order.len());
    let mut coeffs = Vec::with_capacity(order.len());
    for (dst, &src) in order.iter().enumerate() {
        sigma.push(sv[src]);
        coeffs.push(u.column(src).dot(g));
        v.set_column(dst, &v_t.row(src).transpose());
    }
    Decomposition { sigma, v, coeffs, p }
}

/// Thin QR of `J` followed by an SVD of the triangular factor.
pub fn decompose(j: &DMatrix<f64>, f: &DVector<f64>) -> Result<Decomposition> {
    check_system(j, f)?;
    let (n, p) = j.shape();
    let k = n.min(p);

    let qr = j.clone().qr();
    let r = qr.r();
    let mut qtf = f.clone();
    qr.q_tr_mul(&mut qtf);
    let qtf = qtf.rows(0, k).into_owned();

    Ok(right_svd(r, &qtf, p))
}

/// Minimal-norm solution of `min ‖Jη − f‖` with singular values below
/// `eps_rel · σ_max` discarded.
pub fn solve_min_norm(j: &DMatrix<f64>, f: &DVector<f64>, eps_rel: f64) -> Result<LsqResult> {
    solve_truncated(j, f, Truncation::relative(eps_rel))
}

/// Like [`solve_min_norm`] with the two-threshold cutoff of [`Truncation`].
pub fn solve_truncated(j: &DMatrix<f64>, f: &DVector<f64>, trunc: Truncation) -> Result<LsqResult> {
    trunc.validate()?;
    Ok(decompose(j, f)?.truncated(trunc))
}

pub fn solve_tikhonov(j: &DMatrix<f64>, f: &DVector<f64>, gamma: f64) -> Result<DVector<f64>> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::input(format!(
            "Tikhonov parameter must be positive, got {gamma}"
        )));
    }
    decompose(j, f)?.tikhonov(gamma)
}

/// `z − V (Vᵀ z)`: the component of `z` orthogonal to the retained basis.
pub fn project_complement(basis: &DMatrix<f64>, z: &DVector<f64>) -> Result<DVector<f64>> {
    if basis.ncols() == 0 {
        return Ok(z.clone());
    }
    if basis.nrows() != z.len() {
        return Err(Error::input(format!(
            "basis has {} rows but vector has length {}",
            basis.nrows(),
            z.len()
        )));
    }
    let coeffs = basis.tr_mul(z);
    Ok(z - basis * coeffs)
}

/// Randomized range finder: `Y = JΓ`, `Q = orth(Y)`, SVD of `B = QᵀJ`.
///
/// `Γ` is `p × s` standard normal with `s = min(sketch_size + oversampling, p)`,
/// drawn from a ChaCha8 stream seeded by `sketch.seed`, so results are
/// reproducible across platforms. No power iterations are applied.
pub fn decompose_randomized(
    j: &DMatrix<f64>,
    f: &DVector<f64>,
    sketch: &SketchConfig,
) -> Result<Decomposition> {
    check_system(j, f)?;
    if sketch.sketch_size == 0 {
        return Err(Error::input("sketch size must be at least 1"));
    }
    let (_, p) = j.shape();
    let s = (sketch.sketch_size + sketch.oversampling).min(p);

    let mut rng = ChaCha8Rng::seed_from_u64(sketch.seed);
    let gamma = DMatrix::<f64>::from_fn(p, s, |_, _| StandardNormal.sample(&mut rng));

    let y = j * gamma;
    let q = y.qr().q();
    let b = q.tr_mul(j);
    let qtf = q.tr_mul(f);
    Ok(right_svd(b, &qtf, p))
}

pub fn solve_min_norm_randomized(
    j: &DMatrix<f64>,
    f: &DVector<f64>,
    eps_rel: f64,
    sketch: &SketchConfig,
) -> Result<LsqResult> {
    let trunc = Truncation::relative(eps_rel);
    trunc.validate()?;
    Ok(decompose_randomized(j, f, sketch)?.truncated(trunc))
}
