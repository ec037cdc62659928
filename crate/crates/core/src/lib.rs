//! Finite unitary five-diagonal truncations of CMV matrices, their spectra,
//! support estimation for measures on the unit circle, closed-form arc bounds
//! and Carathéodory-function approximants.

pub mod caratheodory;
pub mod cmv;
pub mod eig;
pub mod error;
pub mod geometry;
pub mod numfmt;
pub mod opuc;
pub mod parse;
pub mod rng;
pub mod schur;
pub mod support;

pub use error::{CmvError, Result};
pub use geometry::{Arc, ArcKind, ArcSet, FiniteSpectrum, UnitPoint};
pub use num_complex::Complex64;
pub use opuc::{USequenceSpec, UMode};
pub use schur::{expand, ParamPrefix, SchurSpec};
