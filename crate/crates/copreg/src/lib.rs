//! Copula-based regression toolkit.
//!
//! The crate implements the semiparametric regression estimator built from
//! a parametric copula and rank-based marginals, together with the pieces
//! needed to study it: a library of bivariate copula families with
//! rotations, pseudo-maximum likelihood and L2 fitting with AIC selection,
//! three-variable pair-copula constructions, population regression curves
//! with monotonicity diagnostics, and a reproducible Monte Carlo
//! experiment harness with a CSV-emitting command line interface.

pub mod cli;
pub mod copula;
pub mod csvio;
pub mod error;
pub mod experiments;
pub mod fitting;
pub mod kde;
pub mod margins;
pub mod optim;
pub mod quadrature;
pub mod regression;
pub mod rng;
pub mod special;
pub mod vine;

pub use copula::{CopulaSpec, FamilyId, ParamSpace, Rotation};
pub use error::{Error, Result};
pub use margins::{ecdf_eval, ecdf_transform, empirical_quantile, Dataset, PseudoSample};
