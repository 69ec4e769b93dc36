//! Gaussian-process regression over pouring transitions.
//!
//! Features are `(level, alpha, duration)` and the target is the next level.
//! Each feature dimension is standardized with the training-set mean and
//! population standard deviation before the kernel sees it; targets are used
//! raw. The predictive variance of the latent function serves as the model
//! deviation estimate.

mod hyper;
mod io;
mod kernel;
mod linalg;

use serde::{Deserialize, Serialize};

use crate::pouring::{PourAction, PourState};
use crate::{Error, Result};

pub use hyper::{fit_hyperparams, log_marginal_likelihood, Bounds, HyperFit, SearchSpace};
pub use io::{read_dataset_csv, read_model_json, write_dataset_csv, write_model_json, ModelFile};
pub use kernel::{kernel_eval, KernelParams};

/// Jitter schedule tried (in order) when the gram matrix is not numerically PD.
const JITTERS: [f64; 8] = [0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4];

/// Variances more negative than this (relative to the prior) are an error.
const NEG_VAR_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Feature {
    /// Percent of container capacity.
    pub level: f64,
    /// Tilt, radians.
    pub alpha: f64,
    /// Seconds.
    pub duration: f64,
}

impl Feature {
    pub fn new(level: f64, alpha: f64, duration: f64) -> Result<Self> {
        let f = Feature { level, alpha, duration };
        f.validate()?;
        Ok(f)
    }

    pub fn from_transition(state: &PourState, action: &PourAction) -> Self {
        Feature { level: state.level(), alpha: action.alpha, duration: action.duration }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.to_array().iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite feature {self:?}")));
        }
        if !(0.0..=100.0).contains(&self.level) {
            return Err(Error::InvalidArgument(format!("feature level {} outside [0, 100]", self.level)));
        }
        if self.alpha < 0.0 || self.duration < 0.0 {
            return Err(Error::InvalidArgument(format!("negative alpha/duration in {self:?}")));
        }
        Ok(())
    }

    #[inline]
    pub fn to_array(&self) -> [f64; 3] {
        [self.level, self.alpha, self.duration]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub feature: Feature,
    pub next_level: f64,
}

/// Observed transitions. Never empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Sample>", into = "Vec<Sample>")]
pub struct Dataset {
    samples: Vec<Sample>,
}

impl Dataset {
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument("dataset must not be empty".into()));
        }
        for (i, s) in samples.iter().enumerate() {
            s.feature.validate()?;
            if !s.next_level.is_finite() || !(0.0..=100.0).contains(&s.next_level) {
                return Err(Error::InvalidArgument(format!("sample {i}: target {} outside [0, 100]", s.next_level)));
            }
        }
        Ok(Dataset { samples })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    fn targets(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.next_level).collect()
    }

    /// True if two samples share a feature vector but disagree on the target.
    fn has_conflicting_duplicates(&self) -> bool {
        self.samples
            .iter()
            .enumerate()
            .any(|(i, a)| self.samples[i + 1..].iter().any(|b| a.feature == b.feature && a.next_level != b.next_level))
    }
}

impl TryFrom<Vec<Sample>> for Dataset {
    type Error = Error;

    fn try_from(samples: Vec<Sample>) -> Result<Self> {
        Dataset::new(samples)
    }
}

impl From<Dataset> for Vec<Sample> {
    fn from(d: Dataset) -> Self {
        d.samples
    }
}

/// Per-dimension affine normalization `(x - mean) / scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureScaler {
    pub mean: [f64; 3],
    pub scale: [f64; 3],
}

impl FeatureScaler {
    pub fn identity() -> Self {
        FeatureScaler { mean: [0.0; 3], scale: [1.0; 3] }
    }

    /// Training-set mean and population standard deviation. Constant
    /// dimensions get scale 1.
    pub fn fit(data: &Dataset) -> Self {
        let n = data.len() as f64;
        let mut mean = [0.0; 3];
        for s in data.samples() {
            for (m, v) in mean.iter_mut().zip(s.feature.to_array()) {
                *m += v / n;
            }
        }
        let mut var = [0.0; 3];
        for s in data.samples() {
            for ((acc, v), m) in var.iter_mut().zip(s.feature.to_array()).zip(mean) {
                *acc += (v - m) * (v - m) / n;
            }
        }
        let scale = var.map(|v| {
            let sd = v.sqrt();
            if sd > 1e-12 {
                sd
            } else {
                1.0
            }
        });
        FeatureScaler { mean, scale }
    }

    #[inline]
    pub fn apply(&self, f: &[f64; 3]) -> [f64; 3] {
        [
            (f[0] - self.mean[0]) / self.scale[0],
            (f[1] - self.mean[1]) / self.scale[1],
            (f[2] - self.mean[2]) / self.scale[2],
        ]
    }

    fn validate(&self) -> Result<()> {
        let ok = self.mean.iter().all(|v| v.is_finite()) && self.scale.iter().all(|v| v.is_finite() && *v > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid feature scaler {self:?}")))
        }
    }
}

/// Whether the MDE is reported as predictive variance or standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MdeKind {
    #[default]
    Variance,
    Std,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    /// Mean clamped to `[0, 100]`.
    pub mean: f64,
    /// Unclamped posterior mean.
    pub raw_mean: f64,
    /// Latent predictive variance, `>= 0`.
    pub variance: f64,
}

impl Prediction {
    pub fn std(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// A fitted, immutable Gaussian process.
#[derive(Debug, Clone)]
pub struct GpModel {
    dataset: Dataset,
    params: KernelParams,
    scaler: FeatureScaler,
    train: Vec<[f64; 3]>,
    chol: Vec<f64>,
    weights: Vec<f64>,
    jitter: f64,
}

/// Fits a GP with the scaler derived from `data`.
pub fn gp_fit(data: &Dataset, params: &KernelParams) -> Result<GpModel> {
    GpModel::fit(data, params)
}

impl GpModel {
    pub fn fit(data: &Dataset, params: &KernelParams) -> Result<Self> {
        Self::with_scaler(data, params, FeatureScaler::fit(data))
    }

    /// Fits with an explicit scaler, as when loading a model file.
    pub fn with_scaler(data: &Dataset, params: &KernelParams, scaler: FeatureScaler) -> Result<Self> {
        params.validate()?;
        scaler.validate()?;
        if params.noise_var == 0.0 && data.has_conflicting_duplicates() {
            return Err(Error::InvalidArgument(
                "identical features with different targets require noise_var > 0".into(),
            ));
        }
        let train: Vec<[f64; 3]> = data.samples().iter().map(|s| scaler.apply(&s.feature.to_array())).collect();
        let n = train.len();
        let gram = gram_matrix(params, &train);

        let mut factor = None;
        for &jitter in JITTERS.iter() {
            let mut a = gram.clone();
            for i in 0..n {
                a[i * n + i] += params.noise_var + jitter;
            }
            if let Some(l) = linalg::cholesky(a, n) {
                factor = Some((l, jitter));
                break;
            }
        }
        let Some((chol, jitter)) = factor else {
            let diag: Vec<f64> = (0..n).map(|i| gram[i * n + i] + params.noise_var).collect();
            let min_diag = diag.iter().cloned().fold(f64::INFINITY, f64::min);
            let max_diag = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            return Err(Error::Numerical {
                size: n,
                max_jitter: JITTERS[JITTERS.len() - 1],
                min_diag,
                max_diag,
                diag_ratio: max_diag / min_diag,
            });
        };

        let mut weights = data.targets();
        linalg::forward_solve(&chol, n, &mut weights);
        linalg::backward_solve_transposed(&chol, n, &mut weights);

        Ok(GpModel { dataset: data.clone(), params: *params, scaler, train, chol, weights, jitter })
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    pub fn scaler(&self) -> &FeatureScaler {
        &self.scaler
    }

    /// Jitter that was added to the diagonal on top of `noise_var`.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Row-major lower Cholesky factor of `K + (noise_var + jitter) I`.
    pub fn cholesky_factor(&self) -> &[f64] {
        &self.chol
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `log p(y | z, params)`.
    pub fn log_marginal_likelihood(&self) -> f64 {
        let n = self.train.len();
        let fit: f64 = self.dataset.samples().iter().zip(&self.weights).map(|(s, w)| s.next_level * w).sum();
        let log_det: f64 = (0..n).map(|i| self.chol[i * n + i].ln()).sum();
        -0.5 * fit - log_det - 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln()
    }

    fn check_query(f: &[f64; 3]) -> Result<()> {
        if f.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("non-finite query {f:?}")))
        }
    }

    /// Posterior mean only; `O(H)`.
    pub fn predict_mean(&self, z: &Feature) -> Result<f64> {
        let raw = z.to_array();
        Self::check_query(&raw)?;
        let q = self.scaler.apply(&raw);
        Ok(self.train.iter().zip(&self.weights).map(|(t, w)| self.params.eval(&q, t) * w).sum())
    }

    pub fn predict(&self, z: &Feature) -> Result<Prediction> {
        let raw = z.to_array();
        Self::check_query(&raw)?;
        let q = self.scaler.apply(&raw);
        let n = self.train.len();
        let mut kstar: Vec<f64> = self.train.iter().map(|t| self.params.eval(&q, t)).collect();
        let raw_mean: f64 = kstar.iter().zip(&self.weights).map(|(k, w)| k * w).sum();
        linalg::forward_solve(&self.chol, n, &mut kstar);
        let prior = self.params.eval(&q, &q);
        let explained: f64 = kstar.iter().map(|v| v * v).sum();
        let mut variance = prior - explained;
        if variance < 0.0 {
            if variance < -NEG_VAR_TOL * prior.max(1.0) {
                return Err(Error::NegativeVariance(variance));
            }
            variance = 0.0;
        }
        Ok(Prediction { mean: raw_mean.clamp(0.0, 100.0), raw_mean, variance })
    }

    /// Model deviation estimate of applying `action` in `state`.
    pub fn mde(&self, state: &PourState, action: &PourAction, kind: MdeKind) -> Result<f64> {
        let p = self.predict(&Feature::from_transition(state, action))?;
        Ok(match kind {
            MdeKind::Variance => p.variance,
            MdeKind::Std => p.std(),
        })
    }

    /// Mean squared error of the clamped mean on `data`.
    pub fn mse(&self, data: &Dataset) -> Result<f64> {
        let mut acc = 0.0;
        for s in data.samples() {
            let p = self.predict_mean(&s.feature)?.clamp(0.0, 100.0);
            acc += (p - s.next_level).powi(2);
        }
        Ok(acc / data.len() as f64)
    }
}

fn gram_matrix(params: &KernelParams, train: &[[f64; 3]]) -> Vec<f64> {
    let n = train.len();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let v = params.eval(&train[i], &train[j]);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    k
}
