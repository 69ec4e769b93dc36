//! Uncertainty-aware Monte Carlo Tree Search.
//!
//! The planner biases selection and expansion toward transitions whose model
//! deviation estimate (MDE) is small. Here the MDE is the predictive variance
//! of a Gaussian process fitted to a handful of observed transitions.
//!
//! Layout:
//!
//! - [`gp`]: Gaussian-process regression with a dot-product + rational-quadratic kernel.
//! - [`mcts`]: generic tree search with standard, uncertainty-aware and inflated variants.
//! - [`pouring`]: the liquid-pouring planning domain, simulated ground truth and episodes.
//! - [`bench`]: the experiment harness (success rates, action counts, variance scatter).
//! - [`cli`]: the `uamcts` command-line driver.

pub mod bench;
pub mod cli;
pub mod error;
pub mod gp;
pub mod mcts;
pub mod pouring;
pub mod rng;

pub use error::{Error, Result};
