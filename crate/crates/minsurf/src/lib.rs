//! Minimal surfaces spanning skew quadrilaterals.
//!
//! The crate starts from the bilinear (hyperbolic paraboloid) surface through
//! four corners, drives the mean-curvature numerator to zero with a damped
//! Newton iteration whose derivatives come from Chebyshev fits, and measures
//! the result with three independent area estimators. The exact Schwarz
//! surface for the regular skew quadrilateral is generated separately from
//! its Weierstrass–Enneper integrals.

pub mod area;
pub mod chebyshev;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod par;
pub mod quadrature;
pub mod schwarz;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{Point3, QuadBoundary, QuadConfig};
pub use grid::HeightGrid;
pub use par::Execution;
