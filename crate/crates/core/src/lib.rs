//! C⁰ discontinuous Galerkin discretizations of the Kirchhoff plate
//! frictional contact problem.
//!
//! The crate builds uniform meshes of `[-1, 1]²`, assembles the five C⁰ DG
//! bilinear forms (C⁰ IP, NIPG, Wells–Dung, Bassi–Rebay type and LCDG) in both
//! their primal and lifted (compact) formulations, discretizes the frictional
//! term on the contact edge with Simpson's rule, and solves the resulting
//! ℓ₁-regularized quadratic program with a primal-dual fixed-point iteration.

// Index loops mirror the formulas; NaN-rejecting `!(x > 0.0)` checks are deliberate.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod config;
pub mod contact;
pub mod discretization;
pub mod error;
pub mod fe_space;
pub mod forms;
pub mod lifting;
pub mod mesh;
pub mod solver;
pub mod sparse;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
