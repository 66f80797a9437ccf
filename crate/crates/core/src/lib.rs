//! Invariants of long virtual knots read off the intersection pairing of
//! cycles on the Carter surface.

pub mod families;
pub mod gauss;
pub mod laurent;
pub mod moves;
pub mod invariants;
pub mod surface;
pub mod verify;

pub use gauss::{k_family, kprime_family, Chord, ClosedDiagram, CrossingType, Endpoint, GaussError, LongDiagram, Passage, Sign};
pub use laurent::{LaurentError, LaurentPoly};
pub use surface::{CycleWalk, HomologyBasis, PairingTables, RibbonGraph, SurfaceError};
