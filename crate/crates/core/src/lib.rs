//! Algebraic curvature tensors, the Weyl projection, Jacobi and
//! skew-symmetric curvature operators, and sampling probes that decide
//! whether their Jordan normal forms are constant on pseudo-spheres and
//! Grassmannians of non-degenerate 2-planes.

pub mod curvature;
pub mod error;
pub mod exec;
pub mod explore;
pub mod family;
pub mod geometry;
pub mod jet;
pub mod jordan;
pub mod linalg;
pub mod poly;
pub mod probe;
pub mod random;
pub mod report;
pub mod tensor_io;
pub mod verify;

pub use error::{Error, Result};
