//! Numerical verification toolkit for the geometry of unit vector fields.
//!
//! The crate evaluates the shape-operator calculus of a unit field (rough
//! Hessian, harmonicity tensor, totally-geodesic and minimality residuals),
//! the Sasaki geometry of the field's image in the unit tangent bundle, and
//! a set of built-in manifolds and fields the identities are checked on.
//! All differential geometry is computed pointwise from chart metrics by
//! forward-mode jets, with finite differences as an independent cross-check.

pub mod analysis;
pub mod builtin;
pub mod error;
pub mod geometry;
pub mod jet;
pub mod kernel;
pub mod linalg;
pub mod ode;
pub mod report;
pub mod sasaki;
pub mod smooth;
pub mod suite;

pub use error::{GeomError, Result};
