//! Plane-filling trails.
//!
//! Turns definitions of plane-filling curves into three-dimensional terrain
//! models, where the curve point `f(t) = (x, y)` becomes `(x, y, t)` with
//! the space underneath filled, and into progression images coloured by
//! visiting order.
//!
//! The stages are usable on their own: [`curvedef`] parses and checks
//! definitions, [`traversal`] evaluates and samples curves, [`hexraster`]
//! bins samples into hexagonal cell columns, [`meshgen`] builds and writes
//! meshes, [`imaging`] draws progression images and [`render`] chains
//! everything together.

pub mod cli;
pub mod colour;
pub mod curvedef;
pub mod geom;
pub mod hexraster;
pub mod imaging;
pub mod meshgen;
pub mod render;
pub mod traversal;

pub use curvedef::{builtin, parse_definition, CurveDefinition};
pub use geom::{Similarity, Vec2};
pub use traversal::{SamplePoint, Traversal};
