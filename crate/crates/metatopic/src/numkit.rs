//! Numeric kernels: stable nonlinearities, batch normalization with running
//! statistics, seeded Gaussian sampling, and a finite-difference gradient
//! checker. Every forward operation has a matching backward so the model can
//! compose exact gradients without an autodiff graph.
//!
//! All arithmetic is `f64`. Matrices are row-major [`ndarray`] arrays with
//! rows as batch entries.

use ndarray::{Array1, Array2, Axis};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};

pub type Matrix = Array2<f64>;
pub type Vector = Array1<f64>;

/// Whether a forward pass uses batch statistics (training) or the stored
/// running statistics (evaluation).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

/// Errors if any entry of `values` is NaN or infinite.
pub fn ensure_finite<'a>(name: &str, values: impl IntoIterator<Item = &'a f64>) -> Result<()> {
    for v in values {
        if !v.is_finite() {
            return Err(Error::NonFinite(name.to_string()));
        }
    }
    Ok(())
}

/// Numerically stable softmax via max subtraction.
pub fn softmax(v: &Vector) -> Result<Vector> {
    ensure_finite("softmax input", v.iter())?;
    Ok(softmax_unchecked(v))
}

pub(crate) fn softmax_unchecked(v: &Vector) -> Vector {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out = v.mapv(|x| (x - max).exp());
    let sum = out.sum();
    out.mapv_inplace(|x| x / sum);
    out
}

/// Row-wise softmax of a batch. Inputs are assumed finite; the model checks
/// its boundaries.
pub fn softmax_rows(m: &Matrix) -> Matrix {
    let mut out = m.clone();
    for mut row in out.rows_mut() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|x| (x - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|x| x / sum);
    }
    out
}

/// Row-wise `log(softmax(x))` computed as `x - logsumexp(x)`.
pub fn log_softmax_rows(m: &Matrix) -> Matrix {
    let mut out = m.clone();
    for mut row in out.rows_mut() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + row.iter().map(|x| (x - max).exp()).sum::<f64>().ln();
        row.mapv_inplace(|x| x - lse);
    }
    out
}

/// Backward of `y = softmax(x)` given `y` and the output gradient:
/// `gx = y * (gy - <y, gy>)`.
pub fn softmax_backward(y: &Vector, gy: &Vector) -> Vector {
    let dot = y.dot(gy);
    y * &(gy - dot)
}

/// Overflow-safe `log(1 + exp(x))` using `max(x, 0) + ln(1 + exp(-|x|))`.
pub fn softplus_scalar(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

pub fn softplus(v: &Vector) -> Vector {
    v.mapv(softplus_scalar)
}

pub fn softplus_mat(m: &Matrix) -> Matrix {
    m.mapv(softplus_scalar)
}

/// Stable logistic function; the derivative of softplus.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Backward of `softplus`: `gx = gout * sigmoid(x)`.
pub fn softplus_backward(x: &Vector, gout: &Vector) -> Vector {
    gout * &x.mapv(sigmoid)
}

/// Batch normalization over the batch (row) axis with a learnable affine and
/// exponentially-decayed running statistics. The running variance uses the
/// biased batch estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchNormState {
    pub gamma: Vector,
    pub beta: Vector,
    pub running_mean: Vector,
    pub running_var: Vector,
    pub momentum: f64,
    pub epsilon: f64,
}

/// Cached activations from a batchnorm forward pass, needed by the backward.
#[derive(Debug, Clone)]
pub struct BatchNormCache {
    pub x_hat: Matrix,
    pub inv_std: Vector,
    pub mode: Mode,
}

/// Gradients of a batchnorm layer.
#[derive(Debug, Clone)]
pub struct BatchNormGrads {
    pub gx: Matrix,
    pub ggamma: Vector,
    pub gbeta: Vector,
}

impl BatchNormState {
    /// Fresh state: identity affine, zero running mean, unit running variance.
    pub fn new(dim: usize) -> Self {
        BatchNormState {
            gamma: Array1::ones(dim),
            beta: Array1::zeros(dim),
            running_mean: Array1::zeros(dim),
            running_var: Array1::ones(dim),
            momentum: 0.99,
            epsilon: 1e-5,
        }
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    /// Train mode normalizes by batch statistics and folds them into the
    /// running statistics; eval mode normalizes by the running statistics.
    pub fn forward(&mut self, x: &Matrix, mode: Mode) -> Result<(Matrix, BatchNormCache)> {
        if x.ncols() != self.dim() {
            return Err(Error::shape("batchnorm", self.dim(), x.ncols()));
        }
        let (x_hat, inv_std) = match mode {
            Mode::Train => {
                let n = x.nrows();
                if n < 2 {
                    return Err(Error::Invalid(
                        "batchnorm requires a batch of at least 2 in train mode".into(),
                    ));
                }
                let mean = x.mean_axis(Axis(0)).expect("nonempty batch");
                let var = x
                    .mapv(|v| v * v)
                    .mean_axis(Axis(0))
                    .expect("nonempty batch")
                    - &mean.mapv(|m| m * m);
                let var = var.mapv(|v| v.max(0.0));
                let inv_std = var.mapv(|v| 1.0 / (v + self.epsilon).sqrt());
                let x_hat = (x - &mean) * &inv_std;
                self.running_mean = self.momentum * &self.running_mean + (1.0 - self.momentum) * &mean;
                self.running_var = self.momentum * &self.running_var + (1.0 - self.momentum) * &var;
                (x_hat, inv_std)
            }
            Mode::Eval => {
                let inv_std = self.running_var.mapv(|v| 1.0 / (v + self.epsilon).sqrt());
                let x_hat = (x - &self.running_mean) * &inv_std;
                (x_hat, inv_std)
            }
        };
        let out = &x_hat * &self.gamma + &self.beta;
        Ok((
            out,
            BatchNormCache {
                x_hat,
                inv_std,
                mode,
            },
        ))
    }

    /// Backward through the normalization. In train mode the batch mean and
    /// variance are functions of the input, which couples the rows.
    pub fn backward(&self, cache: &BatchNormCache, gout: &Matrix) -> BatchNormGrads {
        let ggamma = (gout * &cache.x_hat).sum_axis(Axis(0));
        let gbeta = gout.sum_axis(Axis(0));
        let gx_hat = gout * &self.gamma;
        let gx = match cache.mode {
            Mode::Train => {
                let n = gout.nrows() as f64;
                let sum_g = gx_hat.sum_axis(Axis(0));
                let sum_gx = (&gx_hat * &cache.x_hat).sum_axis(Axis(0));
                let inner = n * &gx_hat - &sum_g - &cache.x_hat * &sum_gx;
                inner * &cache.inv_std / n
            }
            Mode::Eval => gx_hat * &cache.inv_std,
        };
        BatchNormGrads { gx, ggamma, gbeta }
    }
}

/// Deterministic random source: ChaCha8 keyed by a 64-bit seed. Uniforms take
/// the top 53 bits of each `u64`; normals come from the Box-Muller transform,
/// two uniforms per draw. The same seed yields the same stream on every
/// platform.
#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream for a substream identified by `tag` (e.g. one
    /// stream per document id). FNV-1a folds the tag into the seed.
    pub fn for_tag(seed: u64, tag: &str) -> Self {
        SeededRng::new(seed ^ fnv1a(tag.as_bytes()))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on (0, 1]; never zero, safe under `ln`.
    fn uniform_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// One standard normal draw: `sqrt(-2 ln u1) * cos(2 pi u2)`.
    pub fn standard_normal(&mut self) -> f64 {
        let u1 = self.uniform_open();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// Unbiased integer in [0, n) by rejection.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0);
        let n = n as u64;
        let zone = (u64::MAX / n) * n;
        loop {
            let v = self.next_u64();
            if v < zone {
                return (v % n) as usize;
            }
        }
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, slice: &mut [T]) {
        for i in (1..slice.len()).rev() {
            let j = self.index(i + 1);
            slice.swap(i, j);
        }
    }
}

/// 64-bit FNV-1a; stable across platforms, used only for stream derivation.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x1000_0000_01b3);
    }
    hash
}

/// I.i.d. standard normal matrix from the seeded stream.
pub fn sample_standard_normal(shape: (usize, usize), rng: &mut SeededRng) -> Matrix {
    Array2::from_shape_simple_fn(shape, || rng.standard_normal())
}

/// Compares an analytic gradient against central finite differences of `f`
/// at `point` with step `h`. Returns the max over coordinates of
/// `|fd - analytic| / max(|fd|, |analytic|, 1e-8)`.
pub fn check_gradient(
    f: &mut dyn FnMut(&Vector) -> f64,
    analytic: &Vector,
    point: &Vector,
    h: f64,
) -> f64 {
    assert_eq!(analytic.len(), point.len());
    let mut worst = 0.0f64;
    let mut x = point.clone();
    for i in 0..point.len() {
        let orig = x[i];
        x[i] = orig + h;
        let fp = f(&x);
        x[i] = orig - h;
        let fm = f(&x);
        x[i] = orig;
        let fd = (fp - fm) / (2.0 * h);
        let a = analytic[i];
        let err = (fd - a).abs() / fd.abs().max(a.abs()).max(1e-8);
        worst = worst.max(err);
    }
    worst
}
