#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod frobenius;
pub mod kernels;
pub mod leastprime;
pub mod numerics;
pub mod profiles;
pub mod repulsion;
pub mod selfcheck;
pub mod turan;
pub mod zerodensity;
