#![allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail these checks

pub mod basis;
pub mod error;
pub mod fractional;
pub mod kernels;
pub mod piecewise;
pub mod problem;
pub mod quadrature;
pub mod separable;
pub mod solver;

#[cfg(test)]
#[path = "../tests/common/oracle.rs"]
pub(crate) mod oracle;
