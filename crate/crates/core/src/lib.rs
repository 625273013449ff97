//! Dimension theory of self-affine sponges.
//!
//! The crate models the diagonal iterated function systems whose attractors
//! are self-affine sponges in `[0,1]^d`, evaluates the dimension of their
//! Bernoulli measures, maximizes it over the simplex, solves the two-parameter
//! family of Bernoulli measures used near Sierpinski sponges, and runs
//! perturbation experiments on the continuity of the dimension.

pub mod cli;
pub mod continuity;
pub mod error;
pub mod io;
pub mod measures;
pub mod model;
pub mod roots;
pub mod symbolic;
pub mod variational;

pub use error::{Result, SpongeError};
