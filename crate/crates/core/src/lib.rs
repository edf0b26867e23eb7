//! Density-matrix simulation of transition-selective pulse gates on small
//! coupled spin-½ systems: operator algebra, product operators, ideal and
//! soft-pulse sequence execution, and synthesized NMR spectra.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`, which all quoted tolerances assume.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod config;
pub mod eigen;
pub mod error;
pub mod gates;
pub mod operator;
pub mod plan;
pub mod product;
pub mod scalar;
pub mod script;
pub mod sequence;
pub mod spectrometer;
pub mod spin;

pub use error::{Error, Result};
pub use gates::{EquivalenceReport, GateSpec, Sense};
pub use operator::Operator;
pub use product::{Decomposition, ProductTerm};
pub use scalar::Real;
pub use spin::{Axis, SpinSystem};

pub type Operator64 = Operator<f64>;
pub type Operator32 = Operator<f32>;
pub type SpinSystem64 = SpinSystem<f64>;
pub type Decomposition64 = Decomposition<f64>;
pub type ProductTerm64 = ProductTerm<f64>;
pub type GateSpec64 = GateSpec<f64>;
pub type EquivalenceReport64 = EquivalenceReport<f64>;
