//! Finite-horizon Busemann cocycles and the shape function.
//!
//! Fields are built either from tilted point-to-line free energies or from
//! point-to-point free energies toward a far target. Both satisfy recovery
//! and plaquette closure up to round-off; Cesàro averages need not satisfy
//! recovery site by site.

mod cesaro;
mod field;
mod monotone;
mod scan;
mod shape;
mod shape_check;

pub use cesaro::{cesaro_busemann, CesaroReport};
pub use field::{busemann_from_p2l, busemann_from_p2p, BusemannField, Provenance};
pub use monotone::{check_monotonicity, tilts_ordered, MonotonicityReport, MONOTONE_TOL};
pub use scan::{direction_scan, horizon_doubling, ScanProfile};
pub use shape::{
    direction_target, dual_tilt, estimate_near_axis, estimate_point_to_line, estimate_shape, DualTilt, ShapeEstimate,
    ShapePoint,
};
pub use shape_check::cocycle_shape_check;
