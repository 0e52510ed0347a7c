//! Symbolic verification engine for generalized contact structures on parallelizable models.

#![allow(clippy::needless_range_loop)]

pub mod catalogue;
pub mod courant;
pub mod dsl;
pub mod frame;
pub mod gac;
pub mod involutivity;
pub mod linalg;
pub mod quotient;
pub mod report;
pub mod sample;
pub mod scalar;
