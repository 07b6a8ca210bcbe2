//! Physics-informed shallow networks for four benchmark differential
//! equations, trained under five training-point distributions.
//!
//! * [`diffengine`]: second-order jets and exact loss gradients
//! * [`network`]: `tanh` networks with one or two hidden layers
//! * [`sampler`]: equidistant, random, random-sorted, Chebyshev and sine-based points
//! * [`problems`]: decay, oscillator, Laplace and Poisson benchmarks
//! * [`optimizer`]: full-batch Adam
//! * [`metrics`]: MAE, averaged MAE and population SD
//! * [`runner`]: configuration-driven sweeps, CSV and SVG output

pub mod diffengine;
pub mod error;
pub mod metrics;
pub mod network;
pub mod optimizer;
pub mod problems;
mod quadrature;
pub mod rng;
pub mod runner;
pub mod sampler;

pub use error::{Error, Result};
