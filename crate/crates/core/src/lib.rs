//! Exact symbolic model of standard transitive Courant algebroids over
//! polynomial charts with a coordinate foliation.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod foliated;
pub mod gallery;
pub mod io;
pub mod linalg;
pub mod qforms;
pub mod qlie;
pub mod report;
pub mod ring;
pub mod sampler;
pub mod standard;
pub mod transform;

pub use error::{Error, Result};
