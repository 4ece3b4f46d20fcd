//! Smooth multiply connected domains, their boundary parameterizations, and
//! the collar curves used by excursion restarts.

mod curve;
mod domain;
mod parse;

pub use curve::{
    curve_distance, first_self_intersection, parameter_gap, wrap_angle, CurveGeometry, CurveKind, SmoothClosedCurve,
    DEFAULT_NODES, SIMPLICITY_SEGMENTS,
};
pub use domain::{CollarCurve, Domain, DomainIssue, COLLAR_MIN_GAP, COLLAR_MODES, MIN_CLEARANCE};
pub use parse::{parse_domain, write_domain, DomainFileError, DomainSpec};

/// Points of the plane.
pub type PlanePoint = num_complex::Complex64;
