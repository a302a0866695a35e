//! Truncated cusped spaces for relatively hyperbolic groups, finite
//! approximations of their boundaries, and the piecewise-visual metric on
//! boundaries with cut points.

pub mod boundary;
pub mod cusped;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod group;
pub mod horoball;
pub mod hyperbolicity;
pub mod half;
pub mod par;
pub mod pvmetric;
pub mod verify;
pub mod presentation;
pub mod splitting;
pub mod word;

pub use error::{Error, Result};
pub use half::Half;
