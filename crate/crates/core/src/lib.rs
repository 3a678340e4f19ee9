//! Exact operator calculus for Hecke operators on Fock spaces.

pub mod degeneration;
pub mod error;
pub mod fock;
pub mod ham;
pub mod hecke;
pub mod lefschetz;
pub mod linalg;
pub mod op;
pub mod par;
pub mod rational;
pub mod series;
pub mod relations;
pub mod report;
pub mod ring;
pub mod tpoly;
pub mod walgebra;

pub use error::{Error, Result};
pub use rational::Q;
