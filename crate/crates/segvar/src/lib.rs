//! Antithetic and countermonotonic random vectors by sampling on line
//! segments.
//!
//! The support of a sampler is a collection of segments in the unit
//! hypercube, encoded as a graph plus a coordinate matrix. Picking an edge
//! uniformly and then a uniform point on it yields a vector whose marginals
//! are standard uniform exactly when the coordinates solve a convex
//! `-log`-gap minimization; adding the constant-sum hyperplane constraint
//! gives strictly countermonotonic vectors. On top of that machinery the
//! crate provides the classical antithetic constructions, exact multivariate
//! concordance measures to rank them, and reproducible variance-reduction
//! experiments (Monte Carlo integration, CLT checks, coupled MCMC).
//!
//! Start from [`catalog::Construction`] for ready-made samplers, or
//! [`segments::build_segment_set`] plus [`optimizer::solve_strict_ctm`] to
//! design your own support. The `examples/` directory has one runnable
//! example per capability.

pub mod catalog;
pub mod concordance;
pub mod error;
pub mod optimizer;
pub mod sampling;
pub mod segments;
pub mod stats;
pub mod transforms;

pub mod bench;

pub use error::{Error, Result};
pub mod cli;
