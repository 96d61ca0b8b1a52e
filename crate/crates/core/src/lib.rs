//! Worst-case sum-SNR of a two-antenna analog combining network receiving
//! periodic V2V packet bursts.
//!
//! The receiver applies a linear phase ramp `alpha t` to one antenna so that
//! the combined SNR over a burst of `K` packets cannot collapse for any
//! initial phase. The crate evaluates how time variation of the relative
//! propagation phase, the path gain and the antenna responses erodes that
//! guarantee, and which slope in the optimal set is most robust to it.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod affine;
pub mod antenna;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod pathloss;
pub mod snr;
pub mod validate;

pub use error::{Error, Result};
pub use geometry::ScenarioParams;
pub use pathloss::PathlossModel;
