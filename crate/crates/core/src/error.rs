use crate::geometry::DomainIssue;

/// Every failure the library can report.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("invalid curve parameters: {0}")]
    InvalidCurve(String),
    #[error("NonSimpleCurve: sampled segments {first} and {second} intersect")]
    NonSimpleCurve { first: usize, second: usize },
    #[error("DegenerateCurve: minimum speed {min_speed:.3e} below {threshold:.3e}")]
    DegenerateCurve { min_speed: f64, threshold: f64 },
    #[error("curve is oriented clockwise (signed area {signed_area:.3e})")]
    ClockwiseCurve { signed_area: f64 },
    #[error("invalid domain: {}", format_issues(.0))]
    InvalidDomain(Vec<DomainIssue>),
    #[error("ClearanceTooSmall: collar of hole {hole}: {reason}")]
    ClearanceTooSmall { hole: usize, reason: String },
    #[error("SolverSingular: boundary integral system is numerically rank-deficient (condition estimate {condition:.3e})")]
    SolverSingular { condition: f64 },
    #[error("IllConditioned: condition number {condition:.3e} exceeds {limit:.1e}")]
    IllConditioned { condition: f64, limit: f64 },
    #[error("PoleTooCloseToBoundary: distance {distance:.3e} below {limit:.3e}")]
    PoleTooCloseToBoundary { distance: f64, limit: f64 },
    #[error("PointsTooClose: boundary points separated by arclength {separation:.3e} (< {limit:.1e})")]
    PointsTooClose { separation: f64, limit: f64 },
    #[error("ArcsNotDisjoint: arcs overlap on component {component}")]
    ArcsNotDisjoint { component: usize },
    #[error("CurveTouchesBoundary: curve passes within {distance:.3e} of the boundary")]
    CurveTouchesBoundary { distance: f64 },
    #[error("PathTooCloseToBoundary: path passes within {distance:.3e} of the boundary (limit {limit:.3e})")]
    PathTooCloseToBoundary { distance: f64, limit: f64 },
    #[error("PlateauDegeneracy: holes {first} and {second} share height {height:.9} and overlapping ranges")]
    PlateauDegeneracy { first: usize, second: usize, height: f64 },
    #[error("PlateauLevel: level {level} is within {tolerance:.1e} of the hole value {plateau} (hole {hole})")]
    PlateauLevel { level: f64, plateau: f64, hole: usize, tolerance: f64 },
    #[error("GradientVanished: |grad| = {magnitude:.3e} at ({x}, {y})")]
    GradientVanished { magnitude: f64, x: f64, y: f64 },
    #[error("level curve did not close after {steps} steps")]
    LevelCurveNotClosed { steps: usize },
    #[error("no point of level {level} found in the domain")]
    LevelNotFound { level: f64 },
    #[error("MaxStepsExceeded: walk did not reach the boundary in {steps} steps")]
    MaxStepsExceeded { steps: usize },
    #[error("point ({x}, {y}) is not in the domain")]
    OutsideDomain { x: f64, y: f64 },
    #[error("evaluation refused within {limit:.1e} of the boundary pole")]
    NearPole { limit: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn format_issues(issues: &[DomainIssue]) -> String {
    issues.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
