//! Computational toolkit for quaternionic contact (qc) geometry viewed as a
//! parabolic geometry of type `sp(n+1,1)`.
//!
//! * [`quaternion`]: exact/float quaternion arithmetic.
//! * [`graded`]: the |2|-graded Lie algebra `sp(n+1,1)` in its quaternionic
//!   matrix model, its bracket, trace form and grading.
//! * [`cohomology`]: cochains `C^q(g_-, g)`, the Lie algebra differential,
//!   the Kostant codifferential and Laplacian, harmonic spaces.
//! * [`frame`]: the adapted-frame dictionary between tensors on a qc
//!   manifold and the graded components of the algebra, and the algebraic
//!   bracket table.
//! * [`weyl`]: the qc Weyl connection, Rho-tensor and the homogeneity-two
//!   Weyl curvature, each computed along two independent routes.
//! * [`heisenberg`]: the quaternionic Heisenberg group, a Biquard
//!   connection solver for left-invariant data and the flat-model pipeline.

#![allow(clippy::needless_range_loop)]

pub mod cohomology;
pub mod error;
pub mod frame;
pub mod graded;
pub mod heisenberg;
pub mod io;
pub mod linalg;
pub mod quaternion;
pub mod report;
pub mod scalar;
pub mod weyl;

pub use error::{Error, Result};
pub use scalar::{Exact, Mode, Scalar};
