//! One-vs-all multiclass plug-in classification with local polynomial
//! regression, together with the synthetic distributions, samplers and
//! Monte Carlo estimators used to measure excess-risk convergence rates
//! under iid, exponentially strongly mixing and drifting-concept training
//! data.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the
//! experiment runner and the command line live in `ovaplug-lab`.
//!
//! A typical round trip:
//!
//! ```
//! use ovaplug::datagen::{make_crossing_distribution, sample_iid};
//! use ovaplug::kernels::gaussian_kernel;
//! use ovaplug::ova::{theory_bandwidth, PlugInModel, DEFAULT_GUARD};
//!
//! let dist = make_crossing_distribution(1, 1.0, 2.0).unwrap();
//! let train = sample_iid(&dist, 512, 7);
//! let h = theory_bandwidth(train.len(), dist.beta(), 1, None).unwrap();
//! let model = PlugInModel::fit(train, dist.beta(), h, gaussian_kernel(1), DEFAULT_GUARD).unwrap();
//! assert_eq!(model.predict(&[0.9]).unwrap(), 1);
//! assert_eq!(model.predict(&[0.1]).unwrap(), 2);
//! ```

#![no_std]

extern crate alloc;

pub mod datagen;
mod error;
pub mod kernels;
pub mod linalg;
pub mod lpreg;
pub mod multipoly;
pub mod ova;
pub mod rate;
pub mod risk;
pub mod rng;

pub use error::{Error, Result};
