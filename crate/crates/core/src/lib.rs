//! Numerical toolkit for Lie group actions on complex domains.
//!
//! The crate covers the Mobius action of PSL(2,R) on triples of points of
//! the upper half-plane, the character `phi(g) = ((a+d) + i(c-b))^2 / 4`
//! and its branch-tracked logarithm, the universal and k-sheeted covers of
//! PSL(2,R) acting on graph domains, certification of the hypotheses needed
//! for realizing a group as an automorphism group (free, proper, totally real
//! orbits, strongly pseudoconvex tubes), and a Heisenberg quotient
//! `R x R x T` acting on `C x C x C*`.

// `!(x > tol)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod cover;
pub mod error;
pub mod group;
pub mod heisenberg;
pub mod orbit;
pub mod report;
pub mod sampling;
pub mod verify;

pub use error::{Error, Result};
pub use group::{ProjMat2, Triple, UniMat2, C};
pub use report::{ReportBundle, VerificationReport};
