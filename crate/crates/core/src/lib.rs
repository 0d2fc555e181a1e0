//! Channel polarization toolkit.
//!
//! * [`bdmc`]: binary-input discrete memoryless channels, their symmetric
//!   capacity and Bhattacharyya parameter, and the polarizing transform.
//! * [`zprocess`]: the Bhattacharyya-type random processes (extremal, lower
//!   and doubling rules), exact laws and log-domain samplers.
//! * [`polarcode`]: erasure-channel polar code construction, the butterfly
//!   encoder, successive-cancellation decoding and block-error simulation.
//! * [`scaling`]: finite-n drivers for the rate-of-polarization statements.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bdmc;
pub mod error;
pub mod polarcode;
pub mod scaling;
pub mod stats;
pub mod zprocess;

pub use bdmc::{Channel, ChannelParams, ChannelSpec, TransformPair};
pub use error::{Error, Result};
pub use polarcode::{CodeSpec, DecodeFailure, ErasureSymbol};
pub use zprocess::{BranchWord, RuleKind, ZDistribution, ZState};
