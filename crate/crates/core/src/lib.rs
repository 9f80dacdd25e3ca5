//! Model-free μ-synthesis by direct policy search.
//!
//! Robust synthesis with D-scalings is recast as one nonsmooth optimization
//! over an augmented structured controller `K_c` (controller plus D-scale).
//! Two derivative-free optimizers search that space: [`nds`] (non-derivative
//! sampling with Gupal estimates) and [`zosm`] (zeroth-order descent on the
//! uniformly smoothed cost). The closed-loop H∞ cost comes either from the
//! model-based oracle in [`hinf`] or from black-box simulation experiments in
//! [`harness`].

pub mod baseline;
pub mod cli;
pub mod error;
pub mod harness;
pub mod hinf;
pub mod linalg;
pub mod lti;
pub mod musyn;
pub mod nds;
pub mod objective;
pub mod zosm;

pub use error::{Error, Result};
pub use objective::{Objective, SENTINEL};
