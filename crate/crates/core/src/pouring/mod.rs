//! Liquid pouring: the level in the output container is the state, a tilt
//! angle held for a duration is the action.
//!
//! The physical robot is replaced by [`GroundTruth`], a deterministic flow law
//! observed through Gaussian measurement noise.

mod dataset;
mod domain;
mod episode;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use dataset::{gen_dataset, subsample};
pub use domain::{
    is_terminal, reward, rho, terminal_reward, terminal_rule, GpDynamics, PerfectModel, PouringDomain, RewardRule,
    TransitionModel,
};
pub use episode::{run_episode, write_trace_jsonl, EpisodeConfig, EpisodeFailure, EpisodeTrace, Outcome, TraceStep};

pub const ALPHA_STEP: f64 = 0.25;
pub const DURATION_STEP: f64 = 0.1;
pub const FLOW_EXPONENT: f64 = 1.5;

/// Liquid level, percent of capacity in `[0, 100]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PourState(f64);

impl PourState {
    pub fn new(level: f64) -> Result<Self> {
        if level.is_finite() && (0.0..=100.0).contains(&level) {
            Ok(PourState(level))
        } else {
            Err(Error::InvalidArgument(format!("level {level} outside [0, 100]")))
        }
    }

    /// Clamps into `[0, 100]`; NaN maps to 0.
    pub fn clamped(level: f64) -> Self {
        if level.is_nan() {
            PourState(0.0)
        } else {
            PourState(level.clamp(0.0, 100.0))
        }
    }

    pub fn level(&self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PourAction {
    /// Tilt, radians.
    pub alpha: f64,
    /// Seconds.
    #[serde(rename = "d")]
    pub duration: f64,
}

/// Discrete action set: `alpha` in steps of 0.25 rad, `duration` in steps of 0.1 s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ActionGrid {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub duration_min: f64,
    pub duration_max: f64,
}

impl Default for ActionGrid {
    fn default() -> Self {
        ActionGrid { alpha_min: 0.25, alpha_max: 2.0, duration_min: 0.1, duration_max: 1.0 }
    }
}

impl ActionGrid {
    pub fn validate(&self) -> Result<()> {
        let vals = [self.alpha_min, self.alpha_max, self.duration_min, self.duration_max];
        if !vals.iter().all(|v| v.is_finite() && *v >= 0.0)
            || self.alpha_min > self.alpha_max
            || self.duration_min > self.duration_max
        {
            return Err(Error::InvalidArgument(format!("invalid action grid {self:?}")));
        }
        Ok(())
    }

    pub fn alphas(&self) -> Vec<f64> {
        let n = ((self.alpha_max - self.alpha_min) / ALPHA_STEP + 1e-9).floor() as usize;
        (0..=n).map(|i| self.alpha_min + ALPHA_STEP * i as f64).collect()
    }

    pub fn durations(&self) -> Vec<f64> {
        let lo = (self.duration_min / DURATION_STEP - 1e-9).ceil() as i64;
        let hi = (self.duration_max / DURATION_STEP + 1e-9).floor() as i64;
        (lo.max(0)..=hi).map(|j| j as f64 / 10.0).collect()
    }

    /// Cartesian grid, alpha-major.
    pub fn actions(&self) -> Vec<PourAction> {
        let durations = self.durations();
        self.alphas()
            .into_iter()
            .flat_map(|alpha| durations.iter().map(move |&duration| PourAction { alpha, duration }))
            .collect()
    }
}

/// Goal set `[x_ref − tol, x_ref + tol]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoalSpec {
    pub x_ref: f64,
    pub tol: f64,
}

impl GoalSpec {
    pub fn new(x_ref: f64, tol: f64) -> Result<Self> {
        let g = GoalSpec { x_ref, tol };
        if !(x_ref.is_finite() && tol.is_finite() && tol >= 0.0) || x_ref - tol <= 0.0 || x_ref + tol > 100.0 {
            return Err(Error::InvalidArgument(format!(
                "goal x_ref={x_ref} tol={tol} must satisfy x_ref - tol > 0 and x_ref + tol <= 100"
            )));
        }
        Ok(g)
    }

    pub fn lower(&self) -> f64 {
        self.x_ref - self.tol
    }

    pub fn upper(&self) -> f64 {
        self.x_ref + self.tol
    }

    pub fn contains(&self, level: f64) -> bool {
        level >= self.lower() && level <= self.upper()
    }
}

/// Simulated physical system: `Δ = κ · d · max(0, α − α₀)^1.5`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GroundTruth {
    /// Flow gain, %/(s·rad^1.5).
    pub kappa: f64,
    /// Tilt below which nothing pours, rad.
    pub alpha0: f64,
    /// Measurement noise standard deviation, percent.
    pub obs_noise_sd: f64,
}

impl Default for GroundTruth {
    fn default() -> Self {
        GroundTruth { kappa: 25.0, alpha0: 0.5, obs_noise_sd: 1.0 }
    }
}

impl GroundTruth {
    pub fn validate(&self) -> Result<()> {
        if self.kappa > 0.0
            && self.alpha0 >= 0.0
            && self.obs_noise_sd >= 0.0
            && [self.kappa, self.alpha0, self.obs_noise_sd].iter().all(|v| v.is_finite())
        {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid ground truth {self:?}")))
        }
    }

    pub fn increment(&self, action: &PourAction) -> f64 {
        self.kappa * action.duration * (action.alpha - self.alpha0).max(0.0).powf(FLOW_EXPONENT)
    }

    /// Noise-free next level, saturating at 100.
    pub fn true_step(&self, state: &PourState, action: &PourAction) -> PourState {
        PourState::clamped((state.level() + self.increment(action)).min(100.0))
    }

    /// Noisy measurement of a level, clamped to `[0, 100]`.
    pub fn observe(&self, true_level: f64, rng: &mut impl Rng) -> f64 {
        if self.obs_noise_sd == 0.0 {
            return true_level.clamp(0.0, 100.0);
        }
        let noise = Normal::new(0.0, self.obs_noise_sd).expect("validated noise sd");
        (true_level + noise.sample(rng)).clamp(0.0, 100.0)
    }
}
