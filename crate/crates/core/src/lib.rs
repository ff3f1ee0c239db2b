//! Inference over inputs with missing features.
//!
//! The main model is an ensemble of feature-subset members: one member per
//! combination of `n_avail` features, weighted by validation performance.
//! At prediction time only the members whose features are all present take
//! part, so nothing is ever imputed. Classification members are Fuzzy ARTMAP
//! networks, regression members are two-layer perceptrons.
//!
//! An autoencoder plus genetic-algorithm imputer is provided as a baseline,
//! and [`harness`] replays instances one at a time to compare the two.

pub mod combinatorics;
pub mod data;
pub mod ensemble;
pub mod error;
pub mod fuzzy_artmap;
pub mod ga;
pub mod harness;
pub mod imputer;
pub mod mlp;
pub mod persist;

pub use data::{Dataset, FeatureScaler, FeatureSubset, Instance, Target, Task};
pub use error::{Error, Result};
