//! Twisted paraproducts and twisted bilinear multipliers on periodic grids.
//!
//! The twist: the first factor is filtered in x only, the second in y only,
//! and the symbol of the bilinear multiplier reads (xi_1, eta_2). Everything
//! here lives on an N x N grid over [0, L)^2 with exact FFT round trips.
//!
//! - [`grid`]: geometry, transforms, Sobolev norms, field generators
//! - [`cutoffs`]: the smooth plateau/annulus pair and modulated profiles
//! - [`operators`]: paraproducts, twisted multipliers, spatial variants
//! - [`decompose`]: symbol-to-paraproduct decomposition and its synthesis
//! - [`harness`]: experiment configs, symbol expressions, reports

pub mod cutoffs;
pub mod decompose;
pub mod error;
pub mod grid;
pub mod harness;
pub mod operators;
