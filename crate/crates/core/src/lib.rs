//! Monge-Ampère geometry of incompressible flows.
//!
//! Coefficient expressions ([`fieldexpr`]) feed an exterior-calculus
//! engine ([`exterior`]); on top of it sit the 4D and 6D structure
//! modules, symmetry reduction, the fluid layer and curvature.

pub mod catalog;
pub mod curvature;
pub mod error;
pub mod exterior;
pub mod fieldexpr;
pub mod fluids;
pub mod ma4;
pub mod ma6;
pub mod reduction;
pub mod report;
pub mod sample;
pub mod selftest;

pub use error::{Error, Result};
