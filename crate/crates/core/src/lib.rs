//! Numerical toolkit for starlike-type biholomorphic mappings of the unit
//! ball: class-membership sampling, growth/distortion bound evaluators,
//! extension operators, Loewner-chain machinery, and a deterministic
//! verification suite.
//!
//! The numeric core is generic over the real scalar via [`real::Real`]
//! (`f32` or `f64`); the sampling harness, operators, and suite run at `f64`
//! through the aliases below.

#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod bounds;
pub mod classes;
pub mod error;
pub mod extend;
pub mod func1d;
pub mod holomap;
pub mod kernel;
pub mod linalg;
pub mod loewner;
pub mod map;
pub mod power;
pub mod quad;
pub mod real;
pub mod report;
pub mod suite;
pub mod verify;

pub use error::{Error, Result};

/// Complex scalar over `f64`.
pub type C64 = num_complex::Complex<f64>;
/// Complex scalar over `f32`.
pub type C32 = num_complex::Complex<f32>;

pub type CVec64 = linalg::CVec<f64>;
pub type CMatrix64 = linalg::CMatrix<f64>;
pub type HoloMap64 = holomap::HoloMap<f64>;
pub type Func1D64 = func1d::Func1D<f64>;
pub type Kernel64 = kernel::Kernel<f64>;
pub type ClassParams64 = classes::ClassParams<f64>;
