#![no_std]
//! Starlike-at-infinity domains described by their defining function.

extern crate alloc;

pub mod cantor;
pub mod catalog;
pub mod classifier;
pub mod completeness;
pub mod curve;
pub mod domain;
pub mod eta;
pub mod exp_approx;
pub mod expr;
pub mod ext;
pub mod features;
pub mod frequencies;
pub mod geometry;

pub use domain::{DefiningFunction, PiecewiseFunction};
pub use ext::{Certainty, Ext, Side, Tri};
