//! Canonical conformal maps built from ER fields (chordal, bilateral and
//! radial slit maps), harmonic conjugates, level-curve tracing, grid
//! diagnostics, and SVG/CSV output.

mod conjugate;
mod diagnostics;
mod level;
mod maps;
mod output;

pub use conjugate::{conjugate_increment, harmonic_conjugate, loop_path, PATH_CLEARANCE};
pub use diagnostics::{field_diagnostics, FieldDiagnostics, GridSpec, GRADIENT_FLAG};
pub use level::{trace_level_curve, trace_level_curve_from, LevelCurve, GRADIENT_FLOOR, PLATEAU_LEVEL_TOLERANCE};
pub use maps::{
    bilateral_map, chordal_map, radial_map, AnalyticMapField, ChordalSlit, ChordalSlitDomain, CircularArc, CircularSlitDisk,
    CircularSlitRing, MapKind, ANCHOR_OFFSET, PLATEAU_COINCIDENCE, POLE_EXCLUSION,
};
pub use output::{chordal_svg, disk_svg, domain_svg, field_csv, map_csv, ring_svg, SvgCanvas};
