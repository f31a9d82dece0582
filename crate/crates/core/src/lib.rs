//! Hard-core systems of line segments grown by the lilypond protocol.
//!
//! Every germ of a marked point set grows a segment symmetrically along its
//! direction at unit rate. In Model 1 a segment stops when one of its own
//! tips reaches another segment; in Model 2 it also stops when another
//! segment's tip reaches it. The crate builds both systems on finite sets
//! ([`solver`]), analyses their contact structure ([`structure`]) and
//! estimates typical-segment statistics by Monte Carlo ([`stats`]).
//!
//! The geometric core is generic over [`Scalar`] (`f32` or `f64`); the
//! statistics, file formats and rendering work in `f64`.

// `!(a >= b)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod fixtures;
pub mod geometry;
mod grid;
pub mod io;
pub mod pointprocess;
pub mod render;
pub mod scalar;
pub mod solver;
pub mod stats;
pub mod structure;

pub use geometry::{GeometryError, MarkedPoint, PairGeometry, PairKind, Point2, Segment};
pub use pointprocess::{MarkedPointSet, Provenance, Window};
pub use scalar::{Scalar, Tolerances};
pub use solver::{Method, Model, RadiiAssignment, Solution, SolverError};

pub type MarkedPointF64 = MarkedPoint<f64>;
pub type MarkedPointF32 = MarkedPoint<f32>;
pub type PointSetF64 = MarkedPointSet<f64>;
pub type PointSetF32 = MarkedPointSet<f32>;
pub type SolutionF64 = Solution<f64>;
pub type SolutionF32 = Solution<f32>;
pub type RadiiF64 = RadiiAssignment<f64>;
pub type RadiiF32 = RadiiAssignment<f32>;
