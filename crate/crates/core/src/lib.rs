//! Multiplicity of the Ruelle zeta singularity at `s = 0` for compact
//! rank-one locally symmetric spaces.
//!
//! Three independent routes are implemented: the invariant secondary
//! characteristic form integral ([`forms`], [`multiplicity`]), Euler
//! characteristics of compact duals ([`euler`]), and Euler products over an
//! explicitly enumerated surface length spectrum ([`spectrum`], [`zeta`]).

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod linalg;
pub mod lie;
pub mod rational;
pub mod exec;
pub mod forms;
pub mod multiplicity;
pub mod euler;
pub mod spectrum;
pub mod quadrature;
pub mod zeta;
