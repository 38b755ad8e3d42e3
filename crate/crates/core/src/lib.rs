//! Adaptive compressive tracking.
//!
//! A single-target, single-scale tracker built on Haar-like rectangle features. Feature
//! templates are grouped into bags of equal size; per bag, a greedy online vector
//! boosting step picks the templates whose positive and negative class centers are
//! furthest apart, and a block projection turns their rectangle sums into one compressed
//! feature per bag. A Gaussian naive Bayes classifier scores candidate boxes. Templates
//! are updated conservatively, and low-confidence frames fall back to constant-velocity
//! extrapolation without touching the model.
//!
//! The [`bench`] module carries a one-pass evaluation harness (precision and success
//! curves) and a synthetic sequence generator; [`baseline`] holds the original
//! compressive tracker for comparison.

pub mod baseline;
pub mod bench;
pub mod cli;
pub mod error;
pub mod features;
pub mod imaging;
pub mod kv;
pub mod model;
pub mod ovb;
pub mod tracker;

pub use error::{Error, Result};
pub use imaging::{GrayFrame, IntegralImage, Rect};
pub use tracker::{ActTracker, FrameOutcome, Location, Tracker, TrackerConfig};
