//! Extreme points, Arveson boundaries and dilations of free spectrahedra and
//! matrix convex hulls.

pub mod error;
pub mod extreme;
pub mod feasibility;
pub mod gallery;
pub mod io;
pub mod linalg;
pub mod pencil;
pub mod structure;

pub use error::{Error, Result};
