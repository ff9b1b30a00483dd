//! Code listings of the guide in `book/`, run as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/grids.md")]
pub mod grids {}
#[doc = include_str!("../../../book/src/nonlinear.md")]
pub mod nonlinear {}
#[doc = include_str!("../../../book/src/stepping.md")]
pub mod stepping {}
#[doc = include_str!("../../../book/src/heat.md")]
pub mod heat {}
#[doc = include_str!("../../../book/src/gevrey.md")]
pub mod gevrey {}
#[doc = include_str!("../../../book/src/decay.md")]
pub mod decay {}
#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}
