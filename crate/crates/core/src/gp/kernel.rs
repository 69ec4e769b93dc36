//! Dot-product + rational-quadratic covariance.

use serde::{Deserialize, Serialize};

use super::Feature;
use crate::{Error, Result};

/// Hyperparameters of `k(a, b) = (σ₀² + a·b) + (1 + ‖a−b‖² / (2 α ℓ²))^(−α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KernelParams {
    /// Bias of the dot-product term.
    pub dot_sigma0_sq: f64,
    /// Length-scale ℓ of the rational-quadratic term.
    pub rq_scale: f64,
    /// Scale-mixture parameter α of the rational-quadratic term.
    pub rq_alpha: f64,
    /// Observation-noise variance added to the gram diagonal.
    pub noise_var: f64,
}

impl Default for KernelParams {
    fn default() -> Self {
        KernelParams { dot_sigma0_sq: 1.0, rq_scale: 1.0, rq_alpha: 1.0, noise_var: 1.0 }
    }
}

impl KernelParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.dot_sigma0_sq, self.rq_scale, self.rq_alpha, self.noise_var].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidArgument(format!("non-finite kernel params {self:?}")));
        }
        if self.dot_sigma0_sq < 0.0 || self.noise_var < 0.0 {
            return Err(Error::InvalidArgument(format!("dot_sigma0_sq and noise_var must be >= 0, got {self:?}")));
        }
        if self.rq_scale <= 0.0 || self.rq_alpha <= 0.0 {
            return Err(Error::InvalidArgument(format!("rq_scale and rq_alpha must be > 0, got {self:?}")));
        }
        Ok(())
    }

    #[inline]
    pub fn dot_term(&self, a: &[f64; 3], b: &[f64; 3]) -> f64 {
        self.dot_sigma0_sq + a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }

    #[inline]
    pub fn rq_term(&self, a: &[f64; 3], b: &[f64; 3]) -> f64 {
        let d0 = a[0] - b[0];
        let d1 = a[1] - b[1];
        let d2 = a[2] - b[2];
        let sq = d0 * d0 + d1 * d1 + d2 * d2;
        let base = 1.0 + sq / (2.0 * self.rq_alpha * self.rq_scale * self.rq_scale);
        if self.rq_alpha == 1.0 {
            1.0 / base
        } else {
            base.powf(-self.rq_alpha)
        }
    }

    /// Kernel value on already-normalized coordinates.
    #[inline]
    pub fn eval(&self, a: &[f64; 3], b: &[f64; 3]) -> f64 {
        self.dot_term(a, b) + self.rq_term(a, b)
    }
}

/// Evaluates the kernel directly on two feature vectors (no normalization).
pub fn kernel_eval(params: &KernelParams, z1: &Feature, z2: &Feature) -> Result<f64> {
    let a = z1.to_array();
    let b = z2.to_array();
    if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite kernel input".into()));
    }
    Ok(params.eval(&a, &b))
}
