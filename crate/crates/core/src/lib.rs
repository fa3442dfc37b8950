//! Flip graphs of triangulated surfaces: construction, exploration and
//! rigidity checks for simplicial maps between them.

pub mod arc_coords;
pub mod error;
pub mod explorer;
pub mod export;
pub mod morphisms;
pub mod polygon;
pub mod surface;
pub mod triangulation;

pub use arc_coords::{ArcCoord, TriKey, Tracked};
pub use error::{Error, Result};
pub use explorer::{ball, enumerate_full, explore, ExploreOptions, FlipGraphView};
pub use polygon::{PolyArc, PolyModel};
pub use surface::{ExceptionalityPredicate, SurfaceSpec};
pub use triangulation::{ArcId, Triangulation, WedgeKind};
