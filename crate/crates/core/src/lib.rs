//! Nonparametric estimation for length-biased, right-censored (LBRC) survival
//! data.
//!
//! The crate is `no_std` (it needs `alloc`) and carries no IO. It provides:
//!
//! - [`step`]: right-continuous step functions, the representation used for
//!   every empirical process and fitted curve;
//! - [`data`]: observation and dataset containers plus evaluation grids;
//! - [`empirical`]: the raw counting processes built from a dataset;
//! - [`estimators`]: the pooled product-limit estimator of the truncation
//!   survival, the combined risk estimate, cumulative hazards and the
//!   product-limit distribution estimators (including the classical
//!   truncation product-limit estimator and its Kaplan-Meier and Lynden-Bell
//!   special cases);
//! - [`influence`]: per-subject influence functions, representation residuals,
//!   plug-in variances and the iterated-logarithm scale quantities;
//! - [`truth`] and [`simulation`]: parametric population models with known
//!   truth, a seeded LBRC sampler, and Monte-Carlo rate experiments.
//!
//! ```
//! use lbrc_core::data::{Dataset, LbrcObservation};
//! use lbrc_core::estimators::EstimatorBundle;
//!
//! let data = Dataset::new(vec![LbrcObservation::new(1.0, 2.0, true).unwrap()]).unwrap();
//! let fit = EstimatorBundle::fit(&data);
//! assert_eq!(fit.f_bar.eval_at(3.0), 0.5);
//! ```

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod data;
pub mod empirical;
pub mod error;
pub mod estimators;
pub mod influence;
pub mod quadrature;
pub mod simulation;
pub mod step;
pub mod truth;

pub use error::{Error, Result};
