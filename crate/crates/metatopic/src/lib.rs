//! Topic models with document metadata.
//!
//! A document is a bag of word counts, optionally carrying a one-hot label
//! and a vector of observed covariates. Each document draws a latent vector
//! from a logistic-normal prior, softmaxes it onto the simplex, and emits
//! words from a log-linear decoder built out of a background log-frequency
//! vector, per-topic deviations, per-covariate deviations, and optional
//! topic-covariate interaction deviations. Labels are generated from the
//! latent representation through a small feed-forward head. Inference uses
//! a reparameterized Gaussian encoder trained by stochastic gradient ascent
//! on a Monte Carlo bound, with all gradients derived by hand.
//!
//! Modules follow the pipeline: [`corpus`] prepares data, [`numkit`] holds
//! the numeric kernels, [`model`] defines the network and its bound,
//! [`train`] fits parameters, [`infer`] scores held-out documents, and
//! [`eval`] computes topic-quality metrics. [`cli`] wires everything into
//! the `metatopic` binary.

pub mod cli;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod infer;
pub mod model;
pub mod numkit;
pub mod train;

pub use error::{Error, Result};
