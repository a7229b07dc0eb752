//! Exact digital homotopy and topological complexity for finite digital
//! images.

mod bits;
pub mod error;
pub mod higher;
pub mod lattice;
pub mod loops;
pub mod morph;
pub mod planner;
pub mod space;

pub use error::{Error, Result};
pub use lattice::{adjacent, is_connected, product_adjacent, AdjacencyKind, DigitalImage, Point};
pub use space::{CycleGraph, ExplicitGraph, FiniteGraph};
pub use morph::{Budget, DigitalMap, EquivalenceCertificate, Homotopy, SearchLog, TriState};
pub use planner::{DigitalPath, MotionPlanner, TcResult};
pub use higher::{AnchoredPath, HigherPlanner};
