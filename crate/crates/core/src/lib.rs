//! Gaussian surface area measures of planar convex bodies and numerical
//! solvers for the L_p-Gaussian Minkowski problem.
//!
//! * [`geometry`]: polygons in support form, Wulff shapes, polarity, L_p
//!   combinations, discrete measures.
//! * [`gauss`]: Gaussian volume, (L_p-)Gaussian surface area, constants.
//! * [`discrete`]: the constrained variational solver for atomic measures.
//! * [`smooth`]: Newton/homotopy solver for the Monge-Ampère equation on `S^1`.
//! * [`verify`]: executable checks of the variational formula and the
//!   Gaussian inequalities.
//! * [`io`]: JSON file formats.

pub mod discrete;
pub mod error;
pub mod field;
pub mod fmt;
pub mod gauss;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod quadrature;
pub mod report;
pub mod smooth;
pub mod special;
pub mod vec2;
pub mod verify;

pub use error::{Error, Result};
pub use field::SupportField;
pub use gauss::{EdgeMeasure, GaussConstants};
pub use geometry::{Atom, DirectionGrid, DiscreteMeasure, SupportPolygon};
pub use report::{SolveReport, SolvedBody};
pub use vec2::Vec2;
