//! Numerical verification toolkit for lightlike submanifolds of golden
//! semi-Riemannian manifolds.

pub mod bundles;
pub mod catalog;
pub mod config;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod gw;
pub mod golden;
pub mod linalg;
pub mod report;
pub mod run;
pub mod search;
pub mod verify;

pub use error::{GlsmError, Result};
