//! Gaussian-process regression on the unit cube with a squared-exponential
//! ARD kernel, marginal-likelihood hyperparameter fitting and posterior
//! prediction.
//!
//! Targets are standardized per dataset and the prior mean is zero in
//! standardized units. [`GpModel::predict_raw`] maps predictions back.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::{Cholesky, Matrix};
use crate::optim::golden_section_max;
use crate::scalar::Scalar;

/// Smallest noise variance a model is conditioned with.
pub const NOISE_FLOOR: f64 = 1e-10;
/// Jitter escalation stops once the noise variance would exceed this.
pub const MAX_JITTER: f64 = 1e-2;
/// Log-space search box used by [`fit`].
pub const LENGTHSCALE_BOX: (f64, f64) = (0.01, 10.0);
pub const SIGNAL_VARIANCE_BOX: (f64, f64) = (0.01, 100.0);
pub const NOISE_VARIANCE_BOX: (f64, f64) = (1e-8, 1.0);
/// Coordinate sweeps per restart.
pub const FIT_SWEEPS: usize = 3;
/// Golden-section evaluations per coordinate line search.
pub const FIT_LINE_EVALS: usize = 12;
pub const DEFAULT_RESTARTS: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GpError {
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("input {index} is outside the unit cube or has the wrong dimension")]
    InvalidInput { index: usize },
    #[error("{inputs} inputs but {targets} targets")]
    LengthMismatch { inputs: usize, targets: usize },
}

/// Observations on the unit cube with standardized targets.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    dims: usize,
    inputs: Vec<Vec<T>>,
    targets: Vec<T>,
    raw_mean: T,
    raw_std: T,
}

impl<T: Scalar> Dataset<T> {
    pub fn empty(dims: usize) -> Self {
        Self {
            dims,
            inputs: Vec::new(),
            targets: Vec::new(),
            raw_mean: T::zero(),
            raw_std: T::one(),
        }
    }

    /// Standardizes `raw_targets` to zero mean and unit (population) variance.
    /// A constant target vector keeps `raw_std = 1`.
    pub fn from_raw(dims: usize, inputs: Vec<Vec<T>>, raw_targets: &[T]) -> Result<Self, GpError> {
        if inputs.len() != raw_targets.len() {
            return Err(GpError::LengthMismatch {
                inputs: inputs.len(),
                targets: raw_targets.len(),
            });
        }
        for (index, x) in inputs.iter().enumerate() {
            if x.len() != dims || x.iter().any(|&v| !(v >= T::zero() && v <= T::one())) {
                return Err(GpError::InvalidInput { index });
            }
        }
        let t = raw_targets.len();
        let (raw_mean, raw_std) = if t == 0 {
            (T::zero(), T::one())
        } else {
            let n = T::from_usize(t).unwrap();
            let mean = raw_targets.iter().copied().sum::<T>() / n;
            let var = raw_targets.iter().map(|&y| (y - mean) * (y - mean)).sum::<T>() / n;
            let std = var.sqrt();
            let tiny = T::epsilon() * mean.abs().max(T::one());
            (mean, if std > tiny && std.is_finite() { std } else { T::one() })
        };
        let targets = raw_targets.iter().map(|&y| (y - raw_mean) / raw_std).collect();
        Ok(Self {
            dims,
            inputs,
            targets,
            raw_mean,
            raw_std,
        })
    }

    /// Uses `targets` as already-standardized values (`raw_mean = 0`, `raw_std = 1`).
    pub fn standardized(dims: usize, inputs: Vec<Vec<T>>, targets: Vec<T>) -> Result<Self, GpError> {
        let mut ds = Self::from_raw(dims, inputs, &targets)?;
        ds.targets = targets;
        ds.raw_mean = T::zero();
        ds.raw_std = T::one();
        Ok(ds)
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn inputs(&self) -> &[Vec<T>] {
        &self.inputs
    }

    pub fn targets(&self) -> &[T] {
        &self.targets
    }

    pub fn raw_mean(&self) -> T {
        self.raw_mean
    }

    pub fn raw_std(&self) -> T {
        self.raw_std
    }

    pub fn standardize(&self, raw: T) -> T {
        (raw - self.raw_mean) / self.raw_std
    }

    pub fn destandardize(&self, value: T) -> T {
        value * self.raw_std + self.raw_mean
    }
}

/// Kernel and noise parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GpHyperparams<T> {
    pub lengthscales: Vec<T>,
    pub signal_variance: T,
    pub noise_variance: T,
}

impl<T: Scalar> GpHyperparams<T> {
    /// Lengthscale 0.5 per dimension, unit signal variance, small noise.
    pub fn default_for(dims: usize) -> Self {
        Self {
            lengthscales: vec![T::lit(0.5); dims],
            signal_variance: T::one(),
            noise_variance: T::lit(1e-6),
        }
    }

    fn to_log(&self) -> Vec<T> {
        let mut v: Vec<T> = self.lengthscales.iter().map(|l| l.ln()).collect();
        v.push(self.signal_variance.ln());
        v.push(self.noise_variance.ln());
        v
    }

    fn from_log(v: &[T]) -> Self {
        let d = v.len() - 2;
        Self {
            lengthscales: v[..d].iter().map(|x| x.exp()).collect(),
            signal_variance: v[d].exp(),
            noise_variance: v[d + 1].exp(),
        }
    }
}

/// `σ² · exp(−½ Σ ((x_d − x'_d)/ℓ_d)²)`.
pub fn kernel_eval<T: Scalar>(hyper: &GpHyperparams<T>, x: &[T], x2: &[T]) -> T {
    let r2: T = x
        .iter()
        .zip(x2)
        .zip(&hyper.lengthscales)
        .map(|((&a, &b), &l)| {
            let z = (a - b) / l;
            z * z
        })
        .sum();
    hyper.signal_variance * (T::lit(-0.5) * r2).exp()
}

/// Squared coordinate differences for every training pair (lower triangle).
struct PairDistances<T> {
    dims: usize,
    n: usize,
    sq: Vec<T>,
}

impl<T: Scalar> PairDistances<T> {
    fn new(dataset: &Dataset<T>) -> Self {
        let n = dataset.len();
        let dims = dataset.dims();
        let mut sq = Vec::with_capacity(n * (n + 1) / 2 * dims);
        for i in 0..n {
            for j in 0..=i {
                for d in 0..dims {
                    let diff = dataset.inputs[i][d] - dataset.inputs[j][d];
                    sq.push(diff * diff);
                }
            }
        }
        Self { dims, n, sq }
    }

    fn covariance(&self, hyper: &GpHyperparams<T>, noise: T) -> Matrix<T> {
        let inv: Vec<T> = hyper.lengthscales.iter().map(|&l| T::lit(-0.5) / (l * l)).collect();
        let mut k = Matrix::zeros(self.n, self.n);
        let mut p = 0;
        for i in 0..self.n {
            for j in 0..=i {
                let mut e = T::zero();
                for w in &inv {
                    e = e + *w * self.sq[p];
                    p += 1;
                }
                let v = hyper.signal_variance * e.exp();
                k[(i, j)] = v;
                k[(j, i)] = v;
            }
            k[(i, i)] = k[(i, i)] + noise;
        }
        debug_assert_eq!(p, self.sq.len());
        debug_assert!(self.dims == inv.len());
        k
    }
}

/// Factorizes `K + noise·I`, multiplying the noise by ten on failure up to [`MAX_JITTER`].
fn factorize<T: Scalar>(
    pairs: &PairDistances<T>,
    hyper: &GpHyperparams<T>,
) -> Result<(Cholesky<T>, T), GpError> {
    let mut noise = hyper.noise_variance.max(T::lit(NOISE_FLOOR));
    loop {
        let k = pairs.covariance(hyper, noise);
        match Cholesky::new(&k, T::epsilon()) {
            Ok(c) => return Ok((c, noise)),
            Err(e) => {
                noise = noise * T::lit(10.0);
                if noise > T::lit(MAX_JITTER) {
                    return Err(GpError::Numerical(e.to_string()));
                }
            }
        }
    }
}

fn lml_with<T: Scalar>(pairs: &PairDistances<T>, hyper: &GpHyperparams<T>, targets: &[T]) -> Result<T, GpError> {
    let (chol, _) = factorize(pairs, hyper)?;
    let t = T::from_usize(targets.len()).unwrap();
    let z = chol.solve_lower(targets);
    let quad: T = z.iter().map(|&v| v * v).sum();
    let value = T::lit(-0.5) * quad - chol.half_log_det() - T::lit(0.5) * t * (T::TAU()).ln();
    if value.is_finite() {
        Ok(value)
    } else {
        Err(GpError::Numerical("non-finite log marginal likelihood".into()))
    }
}

/// `−½ yᵀα − Σ log Lᵢᵢ − (t/2) log 2π` on the standardized targets.
pub fn log_marginal_likelihood<T: Scalar>(hyper: &GpHyperparams<T>, dataset: &Dataset<T>) -> Result<T, GpError> {
    lml_with(&PairDistances::new(dataset), hyper, dataset.targets())
}

/// Conditioned Gaussian process.
#[derive(Debug, Clone, PartialEq)]
pub struct GpModel<T> {
    hyper: GpHyperparams<T>,
    dataset: Dataset<T>,
    chol: Option<Cholesky<T>>,
    alpha: Vec<T>,
    log_likelihood: Option<T>,
}

impl<T: Scalar> GpModel<T> {
    /// Conditions the prior on `dataset` with fixed hyperparameters.
    /// The stored noise variance reflects any jitter escalation.
    pub fn condition(mut hyper: GpHyperparams<T>, dataset: Dataset<T>) -> Result<Self, GpError> {
        assert_eq!(hyper.lengthscales.len(), dataset.dims(), "lengthscale count must match dims");
        hyper.noise_variance = hyper.noise_variance.max(T::lit(NOISE_FLOOR));
        if dataset.is_empty() {
            return Ok(Self {
                hyper,
                dataset,
                chol: None,
                alpha: Vec::new(),
                log_likelihood: None,
            });
        }
        let pairs = PairDistances::new(&dataset);
        let (chol, noise) = factorize(&pairs, &hyper)?;
        hyper.noise_variance = noise;
        let alpha = chol.solve(dataset.targets());
        let log_likelihood = lml_with(&pairs, &hyper, dataset.targets()).ok();
        Ok(Self {
            hyper,
            dataset,
            chol: Some(chol),
            alpha,
            log_likelihood,
        })
    }

    pub fn hyper(&self) -> &GpHyperparams<T> {
        &self.hyper
    }

    pub fn dataset(&self) -> &Dataset<T> {
        &self.dataset
    }

    pub fn cholesky(&self) -> Option<&Cholesky<T>> {
        self.chol.as_ref()
    }

    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }

    pub fn log_likelihood(&self) -> Option<T> {
        self.log_likelihood
    }

    /// Posterior mean and variance before the variance is clamped at zero.
    pub fn predict_unclamped(&self, x: &[T]) -> (T, T) {
        let prior = self.hyper.signal_variance;
        let Some(chol) = &self.chol else {
            return (T::zero(), prior);
        };
        let k_star: Vec<T> = self
            .dataset
            .inputs
            .iter()
            .map(|xi| kernel_eval(&self.hyper, xi, x))
            .collect();
        let mean = k_star.iter().zip(&self.alpha).map(|(&k, &a)| k * a).sum();
        let v = chol.solve_lower(&k_star);
        let explained: T = v.iter().map(|&z| z * z).sum();
        (mean, prior - explained)
    }

    /// Posterior `(mean, variance)` in standardized units.
    pub fn predict(&self, x: &[T]) -> (T, T) {
        let (m, v) = self.predict_unclamped(x);
        (m, v.max(T::zero()))
    }

    /// Posterior `(mean, variance)` in the units of the raw targets.
    pub fn predict_raw(&self, x: &[T]) -> (T, T) {
        let (m, v) = self.predict(x);
        let s = self.dataset.raw_std();
        (self.dataset.destandardize(m), v * s * s)
    }
}

fn log_box<T: Scalar>(dims: usize) -> Vec<(T, T)> {
    let ln = |(lo, hi): (f64, f64)| (T::lit(lo.ln()), T::lit(hi.ln()));
    let mut b = vec![ln(LENGTHSCALE_BOX); dims];
    b.push(ln(SIGNAL_VARIANCE_BOX));
    b.push(ln(NOISE_VARIANCE_BOX));
    b
}

/// Coordinate-wise golden-section ascent of the log marginal likelihood from one start.
fn local_search<T: Scalar>(
    pairs: &PairDistances<T>,
    targets: &[T],
    bounds: &[(T, T)],
    start: Vec<T>,
) -> Option<(Vec<T>, T)> {
    let eval = |v: &[T]| {
        lml_with(pairs, &GpHyperparams::from_log(v), targets).unwrap_or(T::neg_infinity())
    };
    let mut x = start;
    let mut best = eval(&x);
    for _ in 0..FIT_SWEEPS {
        for k in 0..x.len() {
            let (lo, hi) = bounds[k];
            let mut probe = x.clone();
            let (arg, val) = golden_section_max(
                |t| {
                    probe[k] = t;
                    eval(&probe)
                },
                lo,
                hi,
                FIT_LINE_EVALS,
            );
            if val > best {
                best = val;
                x[k] = arg;
            }
        }
    }
    best.is_finite().then_some((x, best))
}

/// Maximizes the log marginal likelihood from `n_restarts` seeded starts in the
/// log-space box. Fewer than two observations yield default hyperparameters.
pub fn fit<T: Scalar>(dataset: Dataset<T>, n_restarts: usize, seed: u64) -> Result<GpModel<T>, GpError> {
    fit_warm(dataset, n_restarts, seed, None)
}

/// As [`fit`], with the previous optimum (clamped to the box) as an extra start
/// placed after the seeded ones.
pub fn fit_warm<T: Scalar>(
    dataset: Dataset<T>,
    n_restarts: usize,
    seed: u64,
    warm_start: Option<&GpHyperparams<T>>,
) -> Result<GpModel<T>, GpError> {
    let dims = dataset.dims();
    if dataset.len() < 2 {
        return GpModel::condition(GpHyperparams::default_for(dims), dataset);
    }
    let bounds = log_box::<T>(dims);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts: Vec<Vec<T>> = (0..n_restarts)
        .map(|_| {
            bounds
                .iter()
                .map(|&(lo, hi)| lo + (hi - lo) * T::lit(rng.gen::<f64>()))
                .collect()
        })
        .collect();
    if let Some(w) = warm_start.filter(|w| w.lengthscales.len() == dims) {
        let v = w.to_log().iter().zip(&bounds).map(|(&x, &(lo, hi))| x.max(lo).min(hi)).collect();
        starts.push(v);
    }
    let pairs = PairDistances::new(&dataset);
    let mut best: Option<(Vec<T>, T)> = None;
    for start in starts {
        if let Some((x, val)) = local_search(&pairs, dataset.targets(), &bounds, start) {
            if best.as_ref().map_or(true, |(_, b)| val > *b) {
                best = Some((x, val));
            }
        }
    }
    let (x, _) = best.ok_or_else(|| GpError::Numerical("every restart failed to factorize".into()))?;
    GpModel::condition(GpHyperparams::from_log(&x), dataset)
}
