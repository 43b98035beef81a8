//! Multipartite entanglement measures for few-qubit pure states.
//!
//! Residual correlations, average multipartite correlation, Wootters
//! concurrence, pure and convex-roof three-tangles, and the four-qubit
//! cluster-class families with their closed forms. Local two-outcome POVMs
//! are simulated to test entanglement monotonicity numerically.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod cluster;
pub mod error;
pub mod linalg;
pub mod locc;
pub mod measures;
pub mod qstate;
pub mod random;
pub mod roof;

pub use error::{Error, Result};
pub use linalg::{CMatrix, Mat2, C64};
pub use qstate::{make_pure, DensityMatrix, PureState, Qubit, Spectrum};
