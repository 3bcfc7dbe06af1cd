//! Shared test oracles. Nothing here calls into the solver code under test.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// One-sided (Hestenes) Jacobi SVD of a row-major `n × p` matrix.
///
/// Returns `(σ, U, V)` with `U` as `k` columns of length `n` and `V` as `k`
/// columns of length `p`, `k = p`. Columns whose norm is zero get `σ = 0`.
pub struct JacobiSvd {
    pub sigma: Vec<f64>,
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
}

pub fn jacobi_svd(a: &[Vec<f64>]) -> JacobiSvd {
    let n = a.len();
    let p = a[0].len();
    // Work on columns.
    let mut cols: Vec<Vec<f64>> = (0..p).map(|j| (0..n).map(|i| a[i][j]).collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..p)
        .map(|j| (0..p).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();

    for _sweep in 0..100 {
        let mut rotated = false;
        for j in 0..p {
            for k in j + 1..p {
                let alpha = dot(&cols[j], &cols[j]);
                let beta = dot(&cols[k], &cols[k]);
                let gamma = dot(&cols[j], &cols[k]);
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let (x, y) = (cols[j][i], cols[k][i]);
                    cols[j][i] = c * x - s * y;
                    cols[k][i] = s * x + c * y;
                }
                for i in 0..p {
                    let (x, y) = (v[j][i], v[k][i]);
                    v[j][i] = c * x - s * y;
                    v[k][i] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let sigma: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    let u = cols
        .iter()
        .zip(&sigma)
        .map(|(c, &s)| if s > 0.0 { c.iter().map(|x| x / s).collect() } else { vec![0.0; n] })
        .collect();
    JacobiSvd { sigma, u, v }
}

/// Truncated pseudoinverse solution `Σ_{σ ≥ ε σ_max} vᵢ (uᵢᵀ f) / σᵢ`.
pub fn pinv_solve(a: &[Vec<f64>], f: &[f64], eps_rel: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let svd = jacobi_svd(a);
    let smax = svd.sigma.iter().cloned().fold(0.0, f64::max);
    let p = a[0].len();
    let mut x = vec![0.0; p];
    let mut basis = Vec::new();
    for i in 0..svd.sigma.len() {
        let s = svd.sigma[i];
        if s > 0.0 && s >= eps_rel * smax {
            let c: f64 = svd.u[i].iter().zip(f).map(|(u, f)| u * f).sum::<f64>() / s;
            for k in 0..p {
                x[k] += c * svd.v[i][k];
            }
            basis.push(svd.v[i].clone());
        }
    }
    (x, basis)
}

pub fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, n: usize, p: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, p, |_, _| StandardNormal.sample(rng))
}

pub fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

/// Orthonormal `n × k` columns from Gram-Schmidt on a Gaussian matrix.
pub fn orthonormal(rng: &mut ChaCha8Rng, n: usize, k: usize) -> DMatrix<f64> {
    let mut q = gaussian_matrix(rng, n, k);
    for j in 0..k {
        for _ in 0..2 {
            for i in 0..j {
                let proj = q.column(i).dot(&q.column(j));
                let qi = q.column(i).into_owned();
                q.column_mut(j).axpy(-proj, &qi, 1.0);
            }
        }
        let norm = q.column(j).norm();
        q.column_mut(j).scale_mut(1.0 / norm);
    }
    q
}

/// Random `n × p` matrix of exact rank `r` as a product of Gaussian factors.
pub fn rank_deficient(rng: &mut ChaCha8Rng, n: usize, p: usize, r: usize) -> DMatrix<f64> {
    gaussian_matrix(rng, n, r) * gaussian_matrix(rng, r, p)
}

/// `n × p` matrix with prescribed singular values on random orthonormal frames.
pub fn with_singular_values(rng: &mut ChaCha8Rng, n: usize, p: usize, sigma: &[f64]) -> DMatrix<f64> {
    let k = sigma.len();
    let u = orthonormal(rng, n, k);
    let v = orthonormal(rng, p, k);
    let s = DMatrix::from_diagonal(&DVector::from_column_slice(sigma));
    u * s * v.transpose()
}

/// Random shape with `n, p ∈ [2, 40]` and a rank that may be deficient.
pub fn random_system(seed: u64) -> (DMatrix<f64>, DVector<f64>) {
    let mut r = rng(seed);
    let n = r.random_range(2..=40);
    let p = r.random_range(2..=40);
    let full = n.min(p);
    let j = match seed % 3 {
        0 => gaussian_matrix(&mut r, n, p),
        1 => {
            let rank = r.random_range(1..=full);
            rank_deficient(&mut r, n, p, rank)
        }
        _ => {
            let rank = r.random_range(1..=full);
            let sigma: Vec<f64> = (0..rank).map(|i| 10f64.powf(-3.0 * i as f64 / rank as f64)).collect();
            with_singular_values(&mut r, n, p, &sigma)
        }
    };
    let f = gaussian_vector(&mut r, n);
    (j, f)
}

pub fn orthogonal_projector(cols: &DMatrix<f64>) -> DMatrix<f64> {
    cols * cols.transpose()
}

pub fn projector_from_rows(basis: &[Vec<f64>], p: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(p, p);
    for b in basis {
        for i in 0..p {
            for k in 0..p {
                m[(i, k)] += b[i] * b[k];
            }
        }
    }
    m
}

/// Central difference of a vector-valued function along coordinate `k`.
pub fn central_diff<F: Fn(&[f64]) -> Vec<f64>>(f: F, at: &[f64], k: usize, h: f64) -> Vec<f64> {
    let mut plus = at.to_vec();
    let mut minus = at.to_vec();
    plus[k] += h;
    minus[k] -= h;
    f(&plus).iter().zip(f(&minus)).map(|(a, b)| (a - b) / (2.0 * h)).collect()
}
