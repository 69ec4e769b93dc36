//! Kernel hyperparameter selection by log marginal likelihood.
//!
//! A deterministic log-spaced grid seeds a coordinate descent in log space.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{Dataset, GpModel, KernelParams};
use crate::{Error, Result};

const STARTS: usize = 3;
const MAX_EVALS_PER_START: usize = 400;
const MIN_STEP: f64 = 1.0001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl Bounds {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Bounds { lo, hi }
    }

    pub const fn fixed(v: f64) -> Self {
        Bounds { lo: v, hi: v }
    }

    fn grid(&self) -> Vec<f64> {
        if self.lo == self.hi {
            vec![self.lo]
        } else {
            vec![self.lo, (self.lo * self.hi).sqrt(), self.hi]
        }
    }

    fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.lo, self.hi)
    }
}

/// Box constraints for each hyperparameter. All bounds must be positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchSpace {
    pub dot_sigma0_sq: Bounds,
    pub rq_scale: Bounds,
    pub rq_alpha: Bounds,
    pub noise_var: Bounds,
}

impl Default for SearchSpace {
    fn default() -> Self {
        SearchSpace {
            dot_sigma0_sq: Bounds::new(1e-2, 1e2),
            rq_scale: Bounds::new(0.1, 10.0),
            rq_alpha: Bounds::new(0.1, 10.0),
            noise_var: Bounds::new(1e-2, 1e2),
        }
    }
}

impl SearchSpace {
    fn dims(&self) -> [Bounds; 4] {
        [self.dot_sigma0_sq, self.rq_scale, self.rq_alpha, self.noise_var]
    }

    fn validate(&self) -> Result<()> {
        for b in self.dims() {
            if !(b.lo.is_finite() && b.hi.is_finite() && b.lo > 0.0 && b.lo <= b.hi) {
                return Err(Error::InvalidArgument(format!("search bounds must satisfy 0 < lo <= hi, got {b:?}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperFit {
    pub params: KernelParams,
    /// NaN when `fallback` is set.
    pub log_likelihood: f64,
    /// Every candidate failed numerically; `params` are the defaults.
    pub fallback: bool,
}

fn to_params(x: [f64; 4]) -> KernelParams {
    KernelParams { dot_sigma0_sq: x[0], rq_scale: x[1], rq_alpha: x[2], noise_var: x[3] }
}

/// `log p(y | z, params)`, or `None` if the fit fails.
pub fn log_marginal_likelihood(data: &Dataset, params: &KernelParams) -> Option<f64> {
    GpModel::fit(data, params).ok().map(|m| m.log_marginal_likelihood()).filter(|v| v.is_finite())
}

#[derive(Clone, Copy)]
struct Candidate {
    x: [f64; 4],
    lml: f64,
}

/// Higher likelihood first, then smaller `rq_scale`, then smaller `noise_var`.
fn rank(a: &Candidate, b: &Candidate) -> Ordering {
    b.lml.total_cmp(&a.lml).then(a.x[1].total_cmp(&b.x[1])).then(a.x[3].total_cmp(&b.x[3]))
}

fn descend(data: &Dataset, dims: &[Bounds; 4], start: Candidate) -> Candidate {
    let mut cur = start;
    let mut steps = dims.map(|b| if b.lo < b.hi { (b.hi / b.lo).powf(0.25) } else { 1.0 });
    let mut evals = 0;
    while steps.iter().any(|&s| s > MIN_STEP) && evals < MAX_EVALS_PER_START {
        let mut improved = false;
        for d in 0..4 {
            if steps[d] <= MIN_STEP {
                continue;
            }
            for factor in [steps[d], 1.0 / steps[d]] {
                let mut x = cur.x;
                x[d] = dims[d].clamp(x[d] * factor);
                if x[d] == cur.x[d] {
                    continue;
                }
                evals += 1;
                if let Some(lml) = log_marginal_likelihood(data, &to_params(x)) {
                    if lml > cur.lml + 1e-12 * cur.lml.abs().max(1.0) {
                        cur = Candidate { x, lml };
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            steps = steps.map(f64::sqrt);
        }
    }
    cur
}

/// Maximizes the log marginal likelihood over `space`.
pub fn fit_hyperparams(data: &Dataset, space: &SearchSpace) -> Result<HyperFit> {
    if data.len() < 2 {
        return Err(Error::InvalidArgument("hyperparameter fitting needs at least 2 points".into()));
    }
    space.validate()?;
    let dims = space.dims();

    let mut grid = Vec::new();
    for &a in &dims[0].grid() {
        for &b in &dims[1].grid() {
            for &c in &dims[2].grid() {
                for &d in &dims[3].grid() {
                    let x = [a, b, c, d];
                    if let Some(lml) = log_marginal_likelihood(data, &to_params(x)) {
                        grid.push(Candidate { x, lml });
                    }
                }
            }
        }
    }
    if grid.is_empty() {
        return Ok(HyperFit { params: KernelParams::default(), log_likelihood: f64::NAN, fallback: true });
    }
    grid.sort_by(rank);

    let mut found: Vec<Candidate> = grid[..STARTS.min(grid.len())].iter().map(|&s| descend(data, &dims, s)).collect();
    found.extend(grid.first().copied());
    found.sort_by(rank);
    let best = found[0];
    Ok(HyperFit { params: to_params(best.x), log_likelihood: best.lml, fallback: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::{Feature, Sample};

    fn linear_dataset() -> Dataset {
        let mut s = Vec::new();
        for i in 0..8 {
            let level = 5.0 + 9.0 * i as f64;
            let alpha = 0.25 + 0.25 * (i % 4) as f64;
            let duration = 0.1 * (1 + (i * 3) % 10) as f64;
            s.push(Sample {
                feature: Feature { level, alpha, duration },
                next_level: (0.5 * level + 4.0 * alpha + 10.0 * duration).min(100.0),
            });
        }
        Dataset::new(s).unwrap()
    }

    #[test]
    fn single_candidate_space_returns_it() {
        let space = SearchSpace {
            dot_sigma0_sq: Bounds::fixed(0.7),
            rq_scale: Bounds::fixed(1.3),
            rq_alpha: Bounds::fixed(2.0),
            noise_var: Bounds::fixed(0.4),
        };
        let fit = fit_hyperparams(&linear_dataset(), &space).unwrap();
        assert!(!fit.fallback);
        assert_eq!(fit.params, KernelParams { dot_sigma0_sq: 0.7, rq_scale: 1.3, rq_alpha: 2.0, noise_var: 0.4 });
    }

    #[test]
    fn improves_on_every_grid_point() {
        let data = linear_dataset();
        let space = SearchSpace::default();
        let fit = fit_hyperparams(&data, &space).unwrap();
        for &a in &space.dot_sigma0_sq.grid() {
            for &d in &space.noise_var.grid() {
                let p = KernelParams { dot_sigma0_sq: a, rq_scale: 1.0, rq_alpha: 1.0, noise_var: d };
                if let Some(l) = log_marginal_likelihood(&data, &p) {
                    assert!(fit.log_likelihood >= l);
                }
            }
        }
    }

    #[test]
    fn rejects_tiny_dataset_and_bad_bounds() {
        let one = Dataset::new(vec![linear_dataset().samples()[0]]).unwrap();
        assert!(fit_hyperparams(&one, &SearchSpace::default()).is_err());
        let bad = SearchSpace { noise_var: Bounds::new(0.0, 1.0), ..SearchSpace::default() };
        assert!(fit_hyperparams(&linear_dataset(), &bad).is_err());
    }

    #[test]
    fn deterministic() {
        let a = fit_hyperparams(&linear_dataset(), &SearchSpace::default()).unwrap();
        let b = fit_hyperparams(&linear_dataset(), &SearchSpace::default()).unwrap();
        assert_eq!(a.params, b.params);
        assert_eq!(a.log_likelihood.to_bits(), b.log_likelihood.to_bits());
    }
}
