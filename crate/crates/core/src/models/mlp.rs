//! Multilayer perceptron with a periodic input embedding.
//!
//! Each of the `w` embedding channels computes
//! `y_c = Σᵢ a_ci cos(kᵢ xᵢ + φ_ci) + b_ci` with `kᵢ = 2π / Pᵢ`, so the network
//! is exactly periodic in every input. The embedding feeds a stack of dense
//! swish layers and a final linear layer.
//!
//! Parameter layout (flat vector):
//! 1. phases `φ`, `w × d` row-major;
//! 2. amplitudes `a` and offsets `b` (only when the embedding is trainable);
//! 3. per dense layer: weights `out × in` row-major, then biases.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Parametrization, PointSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub input_dim: usize,
    pub embed_width: usize,
    pub hidden: Vec<usize>,
    #[serde(default = "one")]
    pub output_dim: usize,
    /// Period per input dimension.
    pub period: Vec<f64>,
    /// Train embedding amplitudes and offsets too (otherwise `a ≡ 1`, `b ≡ 0`).
    #[serde(default)]
    pub trainable_embedding: bool,
}

fn one() -> usize {
    1
}

impl MlpSpec {
    /// `layers` hidden swish layers of the given width on a periodic box.
    pub fn uniform(input_dim: usize, layers: usize, width: usize, period: f64) -> Self {
        Self {
            input_dim,
            embed_width: width,
            hidden: vec![width; layers],
            output_dim: 1,
            period: vec![period; input_dim],
            trainable_embedding: false,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Layer {
    inputs: usize,
    outputs: usize,
    weights: usize,
    biases: usize,
}

#[derive(Debug, Clone)]
pub struct PeriodicMlp {
    spec: MlpSpec,
    wavenumbers: Vec<f64>,
    amplitudes: Option<usize>,
    offsets: Option<usize>,
    layers: Vec<Layer>,
    param_count: usize,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn swish(z: f64) -> f64 {
    z * sigmoid(z)
}

fn swish_prime(z: f64) -> f64 {
    let s = sigmoid(z);
    s + z * s * (1.0 - s)
}

/// Activations of one forward pass at a single point.
struct Tape {
    /// `kᵢ xᵢ + φ_ci`, `w × d`.
    args: Vec<f64>,
    /// Inputs to each dense layer (`h₀ = y`, the embedding output).
    inputs: Vec<Vec<f64>>,
    /// Pre-activations of the hidden layers.
    pre: Vec<Vec<f64>>,
    output: Vec<f64>,
}

impl PeriodicMlp {
    pub fn new(spec: MlpSpec) -> Self {
        assert!(spec.input_dim > 0 && spec.embed_width > 0 && spec.output_dim > 0);
        assert_eq!(spec.period.len(), spec.input_dim, "one period per input dimension");
        let (w, d) = (spec.embed_width, spec.input_dim);
        let mut offset = w * d;
        let (amplitudes, offsets) = if spec.trainable_embedding {
            let a = offset;
            offset += w * d;
            let b = offset;
            offset += w * d;
            (Some(a), Some(b))
        } else {
            (None, None)
        };
        let mut widths = vec![w];
        widths.extend(&spec.hidden);
        widths.push(spec.output_dim);
        let layers = widths
            .windows(2)
            .map(|io| {
                let weights = offset;
                offset += io[0] * io[1];
                let biases = offset;
                offset += io[1];
                Layer {
                    inputs: io[0],
                    outputs: io[1],
                    weights,
                    biases,
                }
            })
            .collect();
        let wavenumbers = spec.period.iter().map(|p| TAU / p).collect();
        Self {
            spec,
            wavenumbers,
            amplitudes,
            offsets,
            layers,
            param_count: offset,
        }
    }

    pub fn spec(&self) -> &MlpSpec {
        &self.spec
    }

    /// Seeded initialization: phases uniform on `[0, 2π)`, weights uniform
    /// with He-style fan-in scale `√(6 / fan_in)`, biases zero, `a = 1`, `b = 0`.
    pub fn init(&self, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut theta = vec![0.0; self.param_count];
        let wd = self.spec.embed_width * self.spec.input_dim;
        for v in &mut theta[..wd] {
            *v = rng.random_range(0.0..TAU);
        }
        if let Some(a) = self.amplitudes {
            theta[a..a + wd].fill(1.0);
        }
        for layer in &self.layers {
            let bound = (6.0 / layer.inputs as f64).sqrt();
            for v in &mut theta[layer.weights..layer.weights + layer.inputs * layer.outputs] {
                *v = rng.random_range(-bound..bound);
            }
        }
        theta
    }

    fn amplitude(&self, theta: &[f64], idx: usize) -> f64 {
        self.amplitudes.map_or(1.0, |a| theta[a + idx])
    }

    fn offset(&self, theta: &[f64], idx: usize) -> f64 {
        self.offsets.map_or(0.0, |b| theta[b + idx])
    }

    /// `kᵢ xᵢ + φ_ci` with `xᵢ` wrapped into `[0, Pᵢ)`, so shifted copies of a
    /// point produce bit-identical arguments.
    fn phase_arg(&self, theta: &[f64], x: &[f64], idx: usize, i: usize) -> f64 {
        self.wavenumbers[i] * x[i].rem_euclid(self.spec.period[i]) + theta[idx]
    }

    fn forward(&self, theta: &[f64], x: &[f64]) -> Tape {
        let (w, d) = (self.spec.embed_width, self.spec.input_dim);
        let mut args = vec![0.0; w * d];
        let mut y = vec![0.0; w];
        for c in 0..w {
            for i in 0..d {
                let idx = c * d + i;
                let arg = self.phase_arg(theta, x, idx, i);
                args[idx] = arg;
                y[c] += self.amplitude(theta, idx) * arg.cos() + self.offset(theta, idx);
            }
        }
        let mut inputs = vec![y];
        let mut pre = Vec::with_capacity(self.layers.len() - 1);
        let last = self.layers.len() - 1;
        let mut output = Vec::new();
        for (l, layer) in self.layers.iter().enumerate() {
            let h = &inputs[l];
            let wts = &theta[layer.weights..layer.weights + layer.inputs * layer.outputs];
            let z: Vec<f64> = (0..layer.outputs)
                .map(|o| {
                    let row = &wts[o * layer.inputs..(o + 1) * layer.inputs];
                    theta[layer.biases + o] + row.iter().zip(h).map(|(a, b)| a * b).sum::<f64>()
                })
                .collect();
            if l == last {
                output = z;
            } else {
                inputs.push(z.iter().map(|&v| swish(v)).collect());
                pre.push(z);
            }
        }
        Tape {
            args,
            inputs,
            pre,
            output,
        }
    }

    /// Accumulate `Σ_o seed_o ∂θ û_o` into `grad`.
    fn backward(&self, theta: &[f64], tape: &Tape, seed: &[f64], grad: &mut [f64]) {
        let (w, d) = (self.spec.embed_width, self.spec.input_dim);
        let mut delta = seed.to_vec();
        for (l, layer) in self.layers.iter().enumerate().rev() {
            if l + 1 < self.layers.len() {
                for (dz, &z) in delta.iter_mut().zip(&tape.pre[l]) {
                    *dz *= swish_prime(z);
                }
            }
            let h = &tape.inputs[l];
            for (o, &dz) in delta.iter().enumerate() {
                if dz == 0.0 {
                    continue;
                }
                let row = &mut grad[layer.weights + o * layer.inputs..layer.weights + (o + 1) * layer.inputs];
                for (g, &hv) in row.iter_mut().zip(h) {
                    *g += dz * hv;
                }
                grad[layer.biases + o] += dz;
            }
            let wts = &theta[layer.weights..layer.weights + layer.inputs * layer.outputs];
            let mut next = vec![0.0; layer.inputs];
            for (o, &dz) in delta.iter().enumerate() {
                let row = &wts[o * layer.inputs..(o + 1) * layer.inputs];
                for (n, &wv) in next.iter_mut().zip(row) {
                    *n += dz * wv;
                }
            }
            delta = next;
        }
        for c in 0..w {
            for i in 0..d {
                let idx = c * d + i;
                let (s, co) = tape.args[idx].sin_cos();
                grad[idx] -= delta[c] * self.amplitude(theta, idx) * s;
                if let Some(a) = self.amplitudes {
                    grad[a + idx] += delta[c] * co;
                }
                if let Some(b) = self.offsets {
                    grad[b + idx] += delta[c];
                }
            }
        }
    }

    /// Value and exact spatial gradient (`q × d`) by forward-mode propagation.
    pub fn forward_with_derivatives(&self, theta: &[f64], x: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
        let tape = self.forward(theta, x);
        let (w, d) = (self.spec.embed_width, self.spec.input_dim);
        // tangent[c][i] = ∂(layer input c)/∂xᵢ
        let mut tangent = vec![0.0; w * d];
        for c in 0..w {
            for i in 0..d {
                let idx = c * d + i;
                tangent[idx] = -self.amplitude(theta, idx) * self.wavenumbers[i] * tape.args[idx].sin();
            }
        }
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let wts = &theta[layer.weights..layer.weights + layer.inputs * layer.outputs];
            let mut next = vec![0.0; layer.outputs * d];
            for o in 0..layer.outputs {
                let row = &wts[o * layer.inputs..(o + 1) * layer.inputs];
                let scale = if l == last { 1.0 } else { swish_prime(tape.pre[l][o]) };
                for i in 0..d {
                    let dot: f64 = row.iter().enumerate().map(|(k, wv)| wv * tangent[k * d + i]).sum();
                    next[o * d + i] = scale * dot;
                }
            }
            tangent = next;
        }
        let grad = DMatrix::from_row_slice(self.spec.output_dim, d, &tangent);
        (tape.output, grad)
    }

    /// Mean squared error over the points and its parameter gradient, using
    /// dense matrix products over the whole batch.
    fn batched_mse(&self, theta: &[f64], points: &PointSet, targets: &[f64]) -> (f64, Vec<f64>) {
        let (w, d, q) = (self.spec.embed_width, self.spec.input_dim, self.spec.output_dim);
        let n = points.len();

        let mut sines = vec![0.0; w * d * n];
        let mut h = DMatrix::<f64>::zeros(w, n);
        for (col, x) in points.iter().enumerate() {
            for c in 0..w {
                let mut acc = 0.0;
                for i in 0..d {
                    let idx = c * d + i;
                    let (s, co) = self.phase_arg(theta, x, idx, i).sin_cos();
                    sines[idx * n + col] = s;
                    acc += self.amplitude(theta, idx) * co + self.offset(theta, idx);
                }
                h[(c, col)] = acc;
            }
        }

        let last = self.layers.len() - 1;
        let mut hs = Vec::with_capacity(self.layers.len());
        let mut zs = Vec::with_capacity(last);
        let mut weights = Vec::with_capacity(self.layers.len());
        for (l, layer) in self.layers.iter().enumerate() {
            let wm = DMatrix::from_row_slice(
                layer.outputs,
                layer.inputs,
                &theta[layer.weights..layer.weights + layer.inputs * layer.outputs],
            );
            let mut z = &wm * &h;
            for (o, mut row) in z.row_iter_mut().enumerate() {
                row.add_scalar_mut(theta[layer.biases + o]);
            }
            weights.push(wm);
            hs.push(h);
            if l == last {
                h = z;
            } else {
                h = z.map(swish);
                zs.push(z);
            }
        }

        let total = (n * q) as f64;
        let mut delta = DMatrix::<f64>::zeros(q, n);
        let mut loss = 0.0;
        for col in 0..n {
            for o in 0..q {
                let r = h[(o, col)] - targets[col * q + o];
                loss += r * r;
                delta[(o, col)] = 2.0 * r / total;
            }
        }
        loss /= total;

        let mut grad = vec![0.0; self.param_count];
        for (l, layer) in self.layers.iter().enumerate().rev() {
            if l < last {
                delta.zip_apply(&zs[l], |dz, z| *dz *= swish_prime(z));
            }
            let gw = &delta * hs[l].transpose();
            for o in 0..layer.outputs {
                for k in 0..layer.inputs {
                    grad[layer.weights + o * layer.inputs + k] = gw[(o, k)];
                }
                grad[layer.biases + o] = delta.row(o).sum();
            }
            delta = weights[l].tr_mul(&delta);
        }
        for (col, x) in points.iter().enumerate() {
            for c in 0..w {
                let dy = delta[(c, col)];
                for i in 0..d {
                    let idx = c * d + i;
                    grad[idx] -= dy * self.amplitude(theta, idx) * sines[idx * n + col];
                    if let Some(a) = self.amplitudes {
                        grad[a + idx] += dy * self.phase_arg(theta, x, idx, i).cos();
                    }
                    if let Some(b) = self.offsets {
                        grad[b + idx] += dy;
                    }
                }
            }
        }
        (loss, grad)
    }
}

impl Parametrization for PeriodicMlp {
    fn param_count(&self) -> usize {
        self.param_count
    }

    fn spatial_dim(&self) -> usize {
        self.spec.input_dim
    }

    fn output_dim(&self) -> usize {
        self.spec.output_dim
    }

    fn evaluate(&self, theta: &[f64], x: &[f64]) -> Vec<f64> {
        self.forward(theta, x).output
    }

    fn param_gradient(&self, theta: &[f64], x: &[f64]) -> DMatrix<f64> {
        let tape = self.forward(theta, x);
        let q = self.spec.output_dim;
        let mut out = DMatrix::zeros(q, self.param_count);
        let mut seed = vec![0.0; q];
        let mut grad = vec![0.0; self.param_count];
        for o in 0..q {
            seed.fill(0.0);
            seed[o] = 1.0;
            grad.fill(0.0);
            self.backward(theta, &tape, &seed, &mut grad);
            for (k, &g) in grad.iter().enumerate() {
                out[(o, k)] = g;
            }
        }
        out
    }

    fn spatial_gradient(&self, theta: &[f64], x: &[f64]) -> DMatrix<f64> {
        self.forward_with_derivatives(theta, x).1
    }

    fn mse_and_gradient(&self, theta: &[f64], points: &PointSet, targets: &[f64]) -> (f64, Vec<f64>) {
        self.batched_mse(theta, points, targets)
    }
}
