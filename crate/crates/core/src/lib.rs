#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod curve_metrics;
pub mod error;
pub mod fubini_study;
pub mod integrator;
pub mod polynomial;
pub mod radial_profile;
pub mod rng;
pub mod sampling;
pub mod shape_spectrum;
pub mod topology;

pub use error::{Error, Result};
