//! Compound matrices, matrix measures and k-contraction certification for
//! finite-dimensional dynamical systems.

pub mod certification;
pub mod cli;
pub mod combinatorics;
pub mod compound;
pub mod domain;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod matrix;
pub mod measures;
pub mod models;
pub mod spectra;

pub use domain::BoxDomain;
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use measures::Norm;
