use std::fmt;

use num_complex::Complex64;

use super::curve::{curve_distance, CurveGeometry, CurveKind, SmoothClosedCurve};
use crate::error::{Error, Result};
use crate::spectral::{self, TrigSeries};

/// Fourier modes kept when re-smoothing an offset curve into a collar.
pub const COLLAR_MODES: usize = 64;
/// Minimum gap between a collar and any boundary component, as a fraction of
/// the outer diameter.
pub const COLLAR_MIN_GAP: f64 = 1e-3;
/// Minimum clearance between boundary components, as a fraction of the outer diameter.
pub const MIN_CLEARANCE: f64 = 1e-6;

/// One violated domain invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainIssue {
    /// Hole `hole` (1-based) is not strictly inside the outer curve.
    HoleOutsideOuter { hole: usize },
    /// Holes `first` and `second` (1-based) overlap or touch.
    HolesIntersect { first: usize, second: usize },
    /// Two components are closer than the clearance threshold.
    InsufficientClearance { first: usize, second: usize, distance: f64 },
}

impl fmt::Display for DomainIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainIssue::HoleOutsideOuter { hole } => write!(f, "HoleOutsideOuter(hole {hole})"),
            DomainIssue::HolesIntersect { first, second } => write!(f, "HolesIntersect(holes {first} and {second})"),
            DomainIssue::InsufficientClearance { first, second, distance } => {
                write!(f, "InsufficientClearance(components {first} and {second}, distance {distance:.3e})")
            }
        }
    }
}

impl DomainIssue {
    /// Component indices (0 = outer) the issue refers to.
    pub fn components(&self) -> Vec<usize> {
        match *self {
            DomainIssue::HoleOutsideOuter { hole } => vec![0, hole],
            DomainIssue::HolesIntersect { first, second }
            | DomainIssue::InsufficientClearance { first, second, .. } => vec![first, second],
        }
    }
}

/// Bounded domain: inside `outer`, outside every hole. Component 0 is the
/// outer curve, components `1..=n` are the holes.
#[derive(Debug, Clone)]
pub struct Domain {
    outer: SmoothClosedCurve,
    holes: Vec<SmoothClosedCurve>,
    hole_points: Vec<Complex64>,
}

impl Domain {
    pub fn new(outer: SmoothClosedCurve, holes: Vec<SmoothClosedCurve>) -> Result<Self> {
        let d = Self::new_unchecked(outer, holes);
        let issues = d.validate();
        if issues.is_empty() {
            Ok(d)
        } else {
            Err(Error::InvalidDomain(issues))
        }
    }

    /// Builds the domain without checking the component layout.
    pub fn new_unchecked(outer: SmoothClosedCurve, holes: Vec<SmoothClosedCurve>) -> Self {
        let hole_points = holes.iter().map(|h| h.interior_point()).collect();
        Self { outer, holes, hole_points }
    }

    pub fn disk(cx: f64, cy: f64, r: f64) -> Result<Self> {
        Self::new(SmoothClosedCurve::circle(cx, cy, r)?, vec![])
    }

    /// Concentric annulus `r < |z| < outer`.
    pub fn annulus(r: f64, outer: f64) -> Result<Self> {
        Self::new(SmoothClosedCurve::circle(0.0, 0.0, outer)?, vec![SmoothClosedCurve::circle(0.0, 0.0, r)?])
    }

    /// Report of every violated invariant; empty iff the domain is valid.
    pub fn validate(&self) -> Vec<DomainIssue> {
        let mut issues = Vec::new();
        let limit = MIN_CLEARANCE * self.outer.diameter();
        for (i, h) in self.holes.iter().enumerate() {
            let inside = h.polyline().iter().step_by(8).all(|&p| self.outer.encloses(p));
            if !inside || !self.outer.encloses(self.hole_points[i]) {
                issues.push(DomainIssue::HoleOutsideOuter { hole: i + 1 });
                continue;
            }
            let (_, _, d) = curve_distance(h, &self.outer);
            if d < limit {
                issues.push(DomainIssue::InsufficientClearance { first: 0, second: i + 1, distance: d });
            }
        }
        for i in 0..self.holes.len() {
            for j in i + 1..self.holes.len() {
                let (a, b) = (&self.holes[i], &self.holes[j]);
                let overlap = a.polyline().iter().step_by(8).any(|&p| b.encloses(p))
                    || b.polyline().iter().step_by(8).any(|&p| a.encloses(p))
                    || a.encloses(self.hole_points[j])
                    || b.encloses(self.hole_points[i]);
                if overlap {
                    issues.push(DomainIssue::HolesIntersect { first: i + 1, second: j + 1 });
                    continue;
                }
                let (_, _, d) = curve_distance(a, b);
                if d < limit {
                    issues.push(DomainIssue::InsufficientClearance { first: i + 1, second: j + 1, distance: d });
                }
            }
        }
        issues
    }

    pub fn hole_count(&self) -> usize {
        self.holes.len()
    }

    pub fn component_count(&self) -> usize {
        self.holes.len() + 1
    }

    pub fn outer(&self) -> &SmoothClosedCurve {
        &self.outer
    }

    pub fn holes(&self) -> &[SmoothClosedCurve] {
        &self.holes
    }

    /// Component `c`: 0 is the outer curve, `i ≥ 1` is hole `i`.
    pub fn component(&self, c: usize) -> &SmoothClosedCurve {
        if c == 0 {
            &self.outer
        } else {
            &self.holes[c - 1]
        }
    }

    /// A point strictly inside hole `i` (1-based).
    pub fn hole_point(&self, i: usize) -> Complex64 {
        self.hole_points[i - 1]
    }

    pub fn diameter(&self) -> f64 {
        self.outer.diameter()
    }

    /// Curve geometry with the normal pointing into the domain.
    pub fn boundary_geometry(&self, c: usize, t: f64) -> CurveGeometry {
        let mut g = self.component(c).geometry(t);
        if c > 0 {
            g.normal = -g.normal;
        }
        g
    }

    pub fn boundary_point(&self, c: usize, t: f64) -> Complex64 {
        self.component(c).point(t)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.outer.encloses(z) && self.holes.iter().all(|h| !h.encloses(z))
    }

    /// Nearest boundary component, its parameter, and the distance.
    pub fn nearest_boundary(&self, z: Complex64) -> (usize, f64, f64) {
        let (t, d) = self.outer.nearest(z);
        let mut best = (0, t, d);
        for (i, h) in self.holes.iter().enumerate() {
            let (t, d) = h.nearest(z);
            if d < best.2 {
                best = (i + 1, t, d);
            }
        }
        best
    }

    pub fn distance_to_boundary(&self, z: Complex64) -> f64 {
        self.nearest_boundary(z).2
    }

    /// Smallest distance from hole `i` to every other boundary component.
    pub fn hole_clearance(&self, i: usize) -> f64 {
        let hole = self.component(i);
        (0..self.component_count())
            .filter(|&c| c != i)
            .map(|c| curve_distance(hole, self.component(c)).2)
            .fold(f64::INFINITY, f64::min)
    }

    /// Collar around hole `i`: the outward offset of the hole curve by
    /// `factor × clearance`, projected onto [`COLLAR_MODES`] Fourier modes.
    pub fn collar_curve(&self, i: usize, factor: f64) -> Result<CollarCurve> {
        if i == 0 || i > self.hole_count() {
            return Err(Error::InvalidArgument(format!("hole index {i} out of range 1..={}", self.hole_count())));
        }
        if !(factor > 0.0 && factor < 1.0) {
            return Err(Error::InvalidArgument(format!("collar factor must lie in (0,1), got {factor}")));
        }
        let hole = self.component(i);
        let offset = factor * self.hole_clearance(i);
        let samples = 4 * COLLAR_MODES;
        let pts: Vec<Complex64> = spectral::nodes(samples)
            .map(|t| {
                let g = self.boundary_geometry(i, t);
                g.point + offset * g.normal
            })
            .collect();
        let series = TrigSeries::from_samples(&pts);
        let coeffs: Vec<Complex64> = (-(COLLAR_MODES as i64)..=COLLAR_MODES as i64).map(|k| series.coefficient(k)).collect();
        let node_count = hole.node_count().max(super::curve::DEFAULT_NODES);
        let curve = SmoothClosedCurve::new(CurveKind::Fourier { center: Complex64::new(0.0, 0.0), coeffs }, node_count)
            .map_err(|e| Error::ClearanceTooSmall { hole: i, reason: format!("offset curve invalid: {e}") })?;
        let collar = CollarCurve { hole_index: i, factor, offset, curve };
        self.check_collar(&collar)?;
        Ok(collar)
    }

    fn check_collar(&self, collar: &CollarCurve) -> Result<()> {
        let i = collar.hole_index;
        let err = |reason: String| Err(Error::ClearanceTooSmall { hole: i, reason });
        for j in 1..=self.hole_count() {
            let w = collar.curve.winding_number(self.hole_point(j)).round() as i64;
            let expected = if j == i { 1 } else { 0 };
            if w != expected {
                return err(format!("collar winds {w} times around hole {j}"));
            }
        }
        if !collar.curve.polyline().iter().step_by(4).all(|&p| self.contains(p)) {
            return err("collar leaves the domain".into());
        }
        let gap_limit = COLLAR_MIN_GAP * self.diameter();
        for c in 0..self.component_count() {
            let (_, _, d) = curve_distance(&collar.curve, self.component(c));
            if d < gap_limit {
                return err(format!("collar gap {d:.3e} to component {c} below {gap_limit:.3e}"));
            }
        }
        Ok(())
    }

    /// Image under `z ↦ scale·e^{i rotation}·z + shift`, with the parameter
    /// offset of every component (see [`CurveKind::similarity`]).
    pub fn similarity(&self, scale: f64, rotation: f64, shift: Complex64) -> Result<(Domain, Vec<f64>)> {
        let mut offsets = Vec::new();
        let mut map = |c: &SmoothClosedCurve| -> Result<SmoothClosedCurve> {
            let (kind, off) = c.kind().similarity(scale, rotation, shift);
            offsets.push(off);
            SmoothClosedCurve::new(kind, c.node_count())
        };
        let outer = map(&self.outer)?;
        let holes = self.holes.iter().map(&mut map).collect::<Result<Vec<_>>>()?;
        Ok((Domain::new(outer, holes)?, offsets))
    }

    /// Same geometry with every curve resampled at `nodes` collocation points.
    pub fn with_node_count(&self, nodes: usize) -> Result<Domain> {
        let outer = self.outer.with_node_count(nodes)?;
        let holes = self.holes.iter().map(|h| h.with_node_count(nodes)).collect::<Result<Vec<_>>>()?;
        Ok(Domain { outer, holes, hole_points: self.hole_points.clone() })
    }

    /// The hole-free domain bounded by the outer curve.
    pub fn filled(&self) -> Domain {
        Domain { outer: self.outer.clone(), holes: vec![], hole_points: vec![] }
    }
}

/// Smooth Jordan curve in the domain winding once around a single hole.
#[derive(Debug, Clone)]
pub struct CollarCurve {
    pub hole_index: usize,
    pub factor: f64,
    /// Offset distance used before re-smoothing.
    pub offset: f64,
    pub curve: SmoothClosedCurve,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn annulus_is_valid() {
        let d = Domain::annulus(0.25, 1.0).unwrap();
        assert!(d.validate().is_empty());
        assert!((d.outer().winding_number(d.hole_point(1)) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn overlapping_holes_are_reported() {
        let d = Domain::new_unchecked(
            SmoothClosedCurve::circle(0.0, 0.0, 1.0).unwrap(),
            vec![SmoothClosedCurve::circle(-0.1, 0.0, 0.2).unwrap(), SmoothClosedCurve::circle(0.15, 0.0, 0.2).unwrap()],
        );
        assert_eq!(d.validate(), vec![DomainIssue::HolesIntersect { first: 1, second: 2 }]);
        assert!(matches!(Domain::new(d.outer().clone(), d.holes().to_vec()), Err(Error::InvalidDomain(_))));
    }

    #[test]
    fn hole_outside_outer_is_reported() {
        let d = Domain::new_unchecked(
            SmoothClosedCurve::circle(0.0, 0.0, 1.0).unwrap(),
            vec![SmoothClosedCurve::circle(2.0, 0.0, 0.2).unwrap()],
        );
        assert_eq!(d.validate(), vec![DomainIssue::HoleOutsideOuter { hole: 1 }]);
    }

    #[test]
    fn winding_of_holes_about_each_other() {
        let d = Domain::new(
            SmoothClosedCurve::circle(0.0, 0.0, 1.0).unwrap(),
            vec![SmoothClosedCurve::circle(-0.4, 0.0, 0.2).unwrap(), SmoothClosedCurve::ellipse(0.4, 0.1, 0.2, 0.1, 0.5).unwrap()],
        )
        .unwrap();
        for j in 1..=2 {
            let w0 = d.outer().winding_number(d.hole_point(j));
            assert!((w0 - 1.0).abs() < 1e-6);
            for k in 1..=2 {
                if k != j {
                    let w = d.component(k).winding_number(d.hole_point(j));
                    assert!(w.abs() < 1e-6, "hole {k} winds {w} about hole {j}");
                }
            }
        }
    }

    #[test]
    fn concentric_collar_radius() {
        let d = Domain::annulus(0.25, 1.0).unwrap();
        let collar = d.collar_curve(1, 0.5).unwrap();
        for t in spectral::nodes(64) {
            assert!((collar.curve.point(t).norm() - 0.625).abs() < 1e-12);
        }
    }

    #[test]
    fn collars_of_separated_holes() {
        let d = Domain::new(
            SmoothClosedCurve::circle(0.0, 0.0, 1.0).unwrap(),
            vec![SmoothClosedCurve::circle(-0.45, 0.0, 0.2).unwrap(), SmoothClosedCurve::circle(0.45, 0.0, 0.2).unwrap()],
        )
        .unwrap();
        let a = d.collar_curve(1, 0.5).unwrap();
        let b = d.collar_curve(2, 0.5).unwrap();
        assert!((a.curve.winding_number(d.hole_point(1)) - 1.0).abs() < 1e-6);
        assert!(a.curve.winding_number(d.hole_point(2)).abs() < 1e-6);
        assert!((b.curve.winding_number(d.hole_point(2)) - 1.0).abs() < 1e-6);
        assert!(curve_distance(&a.curve, &b.curve).2 > 0.05);
    }

    #[test]
    fn nearly_touching_holes_reject_wide_collars() {
        let d = Domain::new(
            SmoothClosedCurve::circle(0.0, 0.0, 1.0).unwrap(),
            vec![SmoothClosedCurve::circle(-0.2005, 0.0, 0.2).unwrap(), SmoothClosedCurve::circle(0.2005, 0.0, 0.2).unwrap()],
        )
        .unwrap();
        assert!(matches!(d.collar_curve(1, 0.99), Err(Error::ClearanceTooSmall { hole: 1, .. })));
    }

    #[test]
    fn collar_refinement_stability() {
        let holes = |n| vec![SmoothClosedCurve::new(CurveKind::ellipse(0.1, 0.05, 0.3, 0.15, 0.4), n).unwrap()];
        let outer = SmoothClosedCurve::circle(0.0, 0.0, 1.0).unwrap();
        let coarse = Domain::new(outer.clone(), holes(128)).unwrap().collar_curve(1, 0.5).unwrap();
        let fine = Domain::new(outer, holes(512)).unwrap().collar_curve(1, 0.5).unwrap();
        let hausdorff = coarse
            .curve
            .polyline()
            .iter()
            .map(|&p| fine.curve.nearest(p).1)
            .fold(0.0, f64::max);
        assert!(hausdorff < 1e-8, "Hausdorff distance {hausdorff}");
    }

    #[test]
    fn similarity_maps_circles_with_parameter_shift() {
        let d = Domain::annulus(0.25, 1.0).unwrap();
        let (img, offsets) = d.similarity(3.0, 0.7, c(0.5, -0.2)).unwrap();
        let z = d.boundary_point(0, 1.1);
        let expected = Complex64::from_polar(3.0, 0.7) * z + c(0.5, -0.2);
        assert!((img.boundary_point(0, 1.1 + offsets[0]) - expected).norm() < 1e-13);
    }
}
