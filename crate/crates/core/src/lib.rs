//! Core algorithms for turning rotating-LiDAR point clouds into dense range
//! images.
//!
//! The crate covers the whole preprocessing side of range-view segmentation:
//!
//! * [`geometry`] — SO(3) exponential/logarithm maps, rigid poses, azimuths.
//! * [`ring_index`] — recover per-point laser ring indices from storage order.
//! * [`motion`] — constant-velocity model: velocity prediction from past
//!   poses, per-point timestamps, and skewing/deskewing of scans.
//! * [`projection`] — scan unfolding and spherical projection onto range
//!   images, with a per-point look-up table for lossless label round trips.
//! * [`interpolation`] — row-wise range-dependent K-nearest-neighbor hole
//!   filling and nearest-label-assignment post-processing.
//! * [`metrics`] — skew MSE, kept-point ratio, per-class IoU / mIoU, and the
//!   projection upper-bound procedure.
//! * [`simulator`] — a deterministic synthetic LiDAR used as the test oracle
//!   for everything above.
//!
//! The crate is `no_std` (with `alloc`); all IO and CLI plumbing lives in the
//! companion `rangekit` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod cloud;
pub mod geometry;
pub mod interpolation;
pub mod metrics;
pub mod motion;
pub mod projection;
pub mod ring_index;
pub mod simulator;

mod math;
mod rng;
