use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral;

/// Default collocation resolution per boundary curve.
pub const DEFAULT_NODES: usize = 256;
/// Segments used by the sampled self-intersection test (a heuristic).
pub const SIMPLICITY_SEGMENTS: usize = 2048;
const COARSE_SAMPLES: usize = 128;

/// Parametric description of a smooth closed curve, `t ∈ [0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveKind {
    Circle { center: Complex64, radius: f64 },
    Ellipse { center: Complex64, a: f64, b: f64, rotation: f64 },
    /// `center + Σ_{k=-K}^{K} coeffs[k+K] e^{ikt}`.
    Fourier { center: Complex64, coeffs: Vec<Complex64> },
}

impl CurveKind {
    pub fn circle(cx: f64, cy: f64, radius: f64) -> Self {
        CurveKind::Circle { center: Complex64::new(cx, cy), radius }
    }

    pub fn ellipse(cx: f64, cy: f64, a: f64, b: f64, rotation: f64) -> Self {
        CurveKind::Ellipse { center: Complex64::new(cx, cy), a, b, rotation }
    }

    pub fn fourier(cx: f64, cy: f64, coeffs: Vec<Complex64>) -> Self {
        CurveKind::Fourier { center: Complex64::new(cx, cy), coeffs }
    }

    pub fn center(&self) -> Complex64 {
        match self {
            CurveKind::Circle { center, .. }
            | CurveKind::Ellipse { center, .. }
            | CurveKind::Fourier { center, .. } => *center,
        }
    }

    /// `order`-th derivative of the parameterization at `t` (order 0 is the point).
    pub fn derivative(&self, t: f64, order: u32) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        match self {
            CurveKind::Circle { center, radius } => {
                let v = *radius * Complex64::from_polar(1.0, t) * i.powu(order);
                if order == 0 {
                    center + v
                } else {
                    v
                }
            }
            CurveKind::Ellipse { center, a, b, rotation } => {
                let (s, c) = t.sin_cos();
                let local = match order % 4 {
                    0 => Complex64::new(a * c, b * s),
                    1 => Complex64::new(-a * s, b * c),
                    2 => Complex64::new(-a * c, -b * s),
                    _ => Complex64::new(a * s, -b * c),
                };
                let v = Complex64::from_polar(1.0, *rotation) * local;
                if order == 0 {
                    center + v
                } else {
                    v
                }
            }
            CurveKind::Fourier { center, coeffs } => {
                let half = (coeffs.len() / 2) as i64;
                let mut acc = Complex64::new(0.0, 0.0);
                for (m, c) in coeffs.iter().enumerate() {
                    let k = m as i64 - half;
                    if order > 0 && k == 0 {
                        continue;
                    }
                    let factor = (i * k as f64).powu(order);
                    acc += c * factor * Complex64::from_polar(1.0, k as f64 * t);
                }
                if order == 0 {
                    center + acc
                } else {
                    acc
                }
            }
        }
    }

    fn check_parameters(&self) -> Result<()> {
        let finite = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
        match self {
            CurveKind::Circle { center, radius } => {
                if !finite(center) || !radius.is_finite() || *radius <= 0.0 {
                    return Err(Error::InvalidCurve(format!("circle radius must be positive and finite, got {radius}")));
                }
            }
            CurveKind::Ellipse { center, a, b, rotation } => {
                if !finite(center) || !a.is_finite() || !b.is_finite() || !rotation.is_finite() || *a <= 0.0 || *b <= 0.0 {
                    return Err(Error::InvalidCurve(format!("ellipse semi-axes must be positive and finite, got {a}, {b}")));
                }
            }
            CurveKind::Fourier { center, coeffs } => {
                if coeffs.len() % 2 == 0 || coeffs.is_empty() {
                    return Err(Error::InvalidCurve("Fourier coefficient list must have length 2K+1".into()));
                }
                if !finite(center) || !coeffs.iter().all(finite) {
                    return Err(Error::InvalidCurve("Fourier coefficients must be finite".into()));
                }
            }
        }
        Ok(())
    }

    /// Image under `z ↦ scale·e^{i rotation}·z + shift`, plus the parameter
    /// offset `δ` such that the image of `γ(t)` is `γ'(t + δ)`.
    pub fn similarity(&self, scale: f64, rotation: f64, shift: Complex64) -> (CurveKind, f64) {
        let rot = Complex64::from_polar(scale, rotation);
        match self {
            CurveKind::Circle { center, radius } => (
                CurveKind::Circle { center: rot * center + shift, radius: radius * scale },
                rotation.rem_euclid(TAU),
            ),
            CurveKind::Ellipse { center, a, b, rotation: r } => (
                CurveKind::Ellipse { center: rot * center + shift, a: a * scale, b: b * scale, rotation: r + rotation },
                0.0,
            ),
            CurveKind::Fourier { center, coeffs } => (
                CurveKind::Fourier { center: rot * center + shift, coeffs: coeffs.iter().map(|c| rot * c).collect() },
                0.0,
            ),
        }
    }
}

/// Point, unit tangent, unit normal and speed at a parameter value.
///
/// The normal returned by [`SmoothClosedCurve::geometry`] points into the
/// region the curve encloses; [`crate::geometry::Domain::boundary_geometry`]
/// flips it on hole curves so that it always points into the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveGeometry {
    pub point: Complex64,
    pub tangent: Complex64,
    pub normal: Complex64,
    pub speed: f64,
}

/// A validated smooth, simple, counterclockwise closed curve.
#[derive(Debug, Clone)]
pub struct SmoothClosedCurve {
    kind: CurveKind,
    node_count: usize,
    diameter: f64,
    coarse: Vec<Complex64>,
    dense: Vec<Complex64>,
}

impl SmoothClosedCurve {
    pub fn new(kind: CurveKind, node_count: usize) -> Result<Self> {
        kind.check_parameters()?;
        if node_count < 8 {
            return Err(Error::InvalidCurve(format!("node count must be at least 8, got {node_count}")));
        }
        let dense: Vec<Complex64> = spectral::nodes(SIMPLICITY_SEGMENTS).map(|t| kind.derivative(t, 0)).collect();
        let coarse: Vec<Complex64> = spectral::nodes(COARSE_SAMPLES).map(|t| kind.derivative(t, 0)).collect();
        let mut diameter: f64 = 0.0;
        for (i, a) in coarse.iter().enumerate() {
            for b in &coarse[i + 1..] {
                diameter = diameter.max((a - b).norm());
            }
        }
        let curve = Self { kind, node_count, diameter, coarse, dense };
        curve.check_shape()?;
        Ok(curve)
    }

    pub fn circle(cx: f64, cy: f64, radius: f64) -> Result<Self> {
        Self::new(CurveKind::circle(cx, cy, radius), DEFAULT_NODES)
    }

    pub fn ellipse(cx: f64, cy: f64, a: f64, b: f64, rotation: f64) -> Result<Self> {
        Self::new(CurveKind::ellipse(cx, cy, a, b, rotation), DEFAULT_NODES)
    }

    fn check_shape(&self) -> Result<()> {
        let min_speed = spectral::nodes(SIMPLICITY_SEGMENTS)
            .map(|t| self.kind.derivative(t, 1).norm())
            .fold(f64::INFINITY, f64::min);
        let threshold = 1e-9 * self.diameter;
        if !(min_speed > threshold) {
            return Err(Error::DegenerateCurve { min_speed, threshold });
        }
        let area = self.signed_area();
        if area <= 0.0 {
            return Err(Error::ClockwiseCurve { signed_area: area });
        }
        if let Some((first, second)) = first_self_intersection(&self.dense) {
            return Err(Error::NonSimpleCurve { first, second });
        }
        Ok(())
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn with_node_count(&self, node_count: usize) -> Result<Self> {
        if node_count < 8 {
            return Err(Error::InvalidCurve(format!("node count must be at least 8, got {node_count}")));
        }
        let mut c = self.clone();
        c.node_count = node_count;
        Ok(c)
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn point(&self, t: f64) -> Complex64 {
        self.kind.derivative(t, 0)
    }

    pub fn derivative(&self, t: f64, order: u32) -> Complex64 {
        self.kind.derivative(t, order)
    }

    pub fn geometry(&self, t: f64) -> CurveGeometry {
        let d = self.kind.derivative(t, 1);
        let speed = d.norm();
        let tangent = d / speed;
        CurveGeometry { point: self.point(t), tangent, normal: Complex64::new(0.0, 1.0) * tangent, speed }
    }

    /// Polyline with [`SIMPLICITY_SEGMENTS`] vertices.
    pub fn polyline(&self) -> &[Complex64] {
        &self.dense
    }

    /// `½ ∮ (x dy − y dx)`, spectrally accurate.
    pub fn signed_area(&self) -> f64 {
        let n = self.node_count.max(DEFAULT_NODES);
        spectral::nodes(n).map(|t| (self.kind.derivative(t, 0).conj() * self.kind.derivative(t, 1)).im).sum::<f64>() * PI / n as f64
    }

    /// Arclength of the curve, spectrally accurate.
    pub fn length(&self) -> f64 {
        let n = self.node_count.max(DEFAULT_NODES);
        spectral::nodes(n).map(|t| self.kind.derivative(t, 1).norm()).sum::<f64>() * TAU / n as f64
    }

    /// Winding number of the curve around `z`, from the polyline argument sum
    /// (unrounded; integers up to discretization error).
    pub fn winding_number(&self, z: Complex64) -> f64 {
        let p = &self.dense;
        let n = p.len();
        let mut total = 0.0;
        for k in 0..n {
            let a = p[k] - z;
            let b = p[(k + 1) % n] - z;
            total += (b / a).arg();
        }
        total / TAU
    }

    /// Parameter of the nearest curve point to `z` and the distance.
    pub fn nearest(&self, z: Complex64) -> (f64, f64) {
        match &self.kind {
            CurveKind::Circle { center, radius } => {
                let d = z - center;
                let t = if d.norm() == 0.0 { 0.0 } else { d.arg().rem_euclid(TAU) };
                (t, (d.norm() - radius).abs())
            }
            _ => {
                let n = self.coarse.len();
                let mut best = (0usize, f64::INFINITY);
                for (j, p) in self.coarse.iter().enumerate() {
                    let d = (p - z).norm_sqr();
                    if d < best.1 {
                        best = (j, d);
                    }
                }
                let h = TAU / n as f64;
                let mut t = best.0 as f64 * h;
                let (lo, hi) = (t - h, t + h);
                for _ in 0..30 {
                    let g0 = self.kind.derivative(t, 0) - z;
                    let g1 = self.kind.derivative(t, 1);
                    let g2 = self.kind.derivative(t, 2);
                    let f = (g0.conj() * g1).re;
                    let df = g1.norm_sqr() + (g0.conj() * g2).re;
                    let step = if df > 0.0 { f / df } else { f.signum() * h * 0.1 };
                    let next = (t - step).clamp(lo, hi);
                    let done = (next - t).abs() < 1e-15;
                    t = next;
                    if done {
                        break;
                    }
                }
                let d = (self.kind.derivative(t, 0) - z).norm();
                (t.rem_euclid(TAU), d.min(best.1.sqrt()))
            }
        }
    }

    /// True when `z` lies in the bounded region enclosed by the curve.
    pub fn encloses(&self, z: Complex64) -> bool {
        match &self.kind {
            CurveKind::Circle { center, radius } => (z - center).norm() < *radius,
            _ => {
                let (t, d) = self.nearest(z);
                if d > 0.05 * self.diameter {
                    return self.winding_number(z).round() as i64 != 0;
                }
                let g = self.geometry(t);
                ((z - g.point) * g.normal.conj()).re > 0.0
            }
        }
    }

    /// A point in the enclosed region, far from the curve.
    pub fn interior_point(&self) -> Complex64 {
        match &self.kind {
            CurveKind::Circle { center, .. } | CurveKind::Ellipse { center, .. } => *center,
            CurveKind::Fourier { .. } => {
                let (mut lo, mut hi) = (self.dense[0], self.dense[0]);
                for p in &self.dense {
                    lo = Complex64::new(lo.re.min(p.re), lo.im.min(p.im));
                    hi = Complex64::new(hi.re.max(p.re), hi.im.max(p.im));
                }
                let mut best = (Complex64::new(0.0, 0.0), -1.0);
                let m = 48;
                for i in 0..m {
                    for j in 0..m {
                        let z = Complex64::new(
                            lo.re + (hi.re - lo.re) * (i as f64 + 0.5) / m as f64,
                            lo.im + (hi.im - lo.im) * (j as f64 + 0.5) / m as f64,
                        );
                        if self.winding_number(z).round() as i64 == 1 {
                            let d = self.nearest(z).1;
                            if d > best.1 {
                                best = (z, d);
                            }
                        }
                    }
                }
                best.0
            }
        }
    }
}

/// Sampled lower bound search between two curves: parameters and distance of
/// the closest pair, refined by alternating projections.
pub fn curve_distance(a: &SmoothClosedCurve, b: &SmoothClosedCurve) -> (f64, f64, f64) {
    let na = 512;
    let pa: Vec<(f64, Complex64)> = spectral::nodes(na).map(|t| (t, a.point(t))).collect();
    let mut best = (0.0, 0.0, f64::INFINITY);
    for &(s, p) in &pa {
        let (t, d) = b.nearest(p);
        if d < best.2 {
            best = (s, t, d);
        }
    }
    let (mut s, mut t) = (best.0, best.1);
    for _ in 0..200 {
        let (s2, _) = a.nearest(b.point(t));
        let (t2, _) = b.nearest(a.point(s2));
        let moved = (s2 - s).abs() + (t2 - t).abs();
        s = s2;
        t = t2;
        if moved < 1e-14 {
            break;
        }
    }
    let d = (a.point(s) - b.point(t)).norm();
    if d < best.2 {
        (s, t, d)
    } else {
        best
    }
}

fn segments_intersect(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> bool {
    fn orient(a: Complex64, b: Complex64, c: Complex64) -> f64 {
        (b - a).re * (c - a).im - (b - a).im * (c - a).re
    }
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    (d1 * d2 < 0.0) && (d3 * d4 < 0.0)
}

/// First pair of non-adjacent intersecting segments of a closed polyline.
pub fn first_self_intersection(p: &[Complex64]) -> Option<(usize, usize)> {
    let n = p.len();
    let boxes: Vec<(f64, f64, f64, f64)> = (0..n)
        .map(|k| {
            let (a, b) = (p[k], p[(k + 1) % n]);
            (a.re.min(b.re), a.re.max(b.re), a.im.min(b.im), a.im.max(b.im))
        })
        .collect();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (bi, bj) = (boxes[i], boxes[j]);
            if bi.1 < bj.0 || bj.1 < bi.0 || bi.3 < bj.2 || bj.3 < bi.2 {
                continue;
            }
            if segments_intersect(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n]) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Angle in `[0, 2π)`.
pub fn wrap_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU { 0.0 } else { r }
}

/// Signed parameter difference `b - a` reduced to `(-π, π]`.
pub fn parameter_gap(a: f64, b: f64) -> f64 {
    let d = (b - a).rem_euclid(TAU);
    if d > PI { d - TAU } else { d }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn circle_parameterization() {
        let k = SmoothClosedCurve::circle(0.0, 0.0, 1.0).unwrap();
        assert!((k.point(0.0) - c(1.0, 0.0)).norm() < 1e-15);
        let g = k.geometry(0.0);
        // normal into the enclosed disk points toward the origin
        assert!((g.normal - c(-1.0, 0.0)).norm() < 1e-15);
        let g = k.geometry(std::f64::consts::FRAC_PI_2);
        assert!((g.point - c(0.0, 1.0)).norm() < 1e-15);
        assert!((g.speed - 1.0).abs() < 1e-15);
        let k2 = SmoothClosedCurve::circle(0.0, 0.0, 2.0).unwrap();
        for &t in &[0.0, 1.0, 4.0] {
            assert!((k2.geometry(t).speed - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn degenerate_ellipse_and_single_mode_fourier_are_the_unit_circle() {
        let circle = SmoothClosedCurve::circle(0.0, 0.0, 1.0).unwrap();
        let ellipse = SmoothClosedCurve::ellipse(0.0, 0.0, 1.0, 1.0, 0.0).unwrap();
        let fourier = SmoothClosedCurve::new(
            CurveKind::fourier(0.0, 0.0, vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]),
            DEFAULT_NODES,
        )
        .unwrap();
        for t in spectral::nodes(37) {
            assert!((circle.point(t) - ellipse.point(t)).norm() < 1e-15);
            assert!((circle.point(t) - fourier.point(t)).norm() < 1e-15);
            assert!((circle.derivative(t, 3) - fourier.derivative(t, 3)).norm() < 1e-14);
        }
    }

    #[test]
    fn ellipse_speed_at_major_axis_end() {
        let e = SmoothClosedCurve::ellipse(0.0, 0.0, 2.0, 1.0, 0.0).unwrap();
        let g = e.geometry(0.0);
        assert!((g.point - c(2.0, 0.0)).norm() < 1e-15);
        assert!((g.speed - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tangent_is_orthogonal_to_normal() {
        let e = SmoothClosedCurve::ellipse(0.3, -0.2, 1.5, 0.4, 0.7).unwrap();
        for t in spectral::nodes(500) {
            let g = e.geometry(t);
            assert!((g.tangent * g.normal.conj()).re.abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_curves() {
        assert!(matches!(SmoothClosedCurve::circle(0.0, 0.0, -1.0), Err(Error::InvalidCurve(_))));
        // constant curve: zero speed everywhere
        let constant = CurveKind::fourier(0.0, 0.0, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(SmoothClosedCurve::new(constant, 64), Err(Error::DegenerateCurve { .. })));
        let cw = CurveKind::fourier(0.0, 0.0, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(SmoothClosedCurve::new(cw, 64), Err(Error::ClockwiseCurve { .. })));
        // e^{it} + e^{2it} has an inner loop
        let limacon = CurveKind::fourier(0.0, 0.0, vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(SmoothClosedCurve::new(limacon, 64), Err(Error::NonSimpleCurve { .. })));
    }

    #[test]
    fn nearest_point_on_ellipse() {
        let e = SmoothClosedCurve::ellipse(0.0, 0.0, 2.0, 1.0, 0.3).unwrap();
        let rot = Complex64::from_polar(1.0, 0.3);
        let (t, d) = e.nearest(rot * c(0.0, 0.5));
        assert!((d - 0.5).abs() < 1e-12);
        assert!((t - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
        assert!(e.encloses(c(0.1, 0.1)));
        assert!(!e.encloses(c(2.5, 0.0)));
    }

    #[test]
    fn winding_numbers_are_near_integers() {
        let e = SmoothClosedCurve::ellipse(0.0, 0.0, 2.0, 1.0, 0.3).unwrap();
        assert!((e.winding_number(c(0.5, 0.2)) - 1.0).abs() < 1e-6);
        assert!(e.winding_number(c(3.0, 0.0)).abs() < 1e-6);
    }

    #[test]
    fn distance_between_circles() {
        let a = SmoothClosedCurve::circle(0.0, 0.0, 1.0).unwrap();
        let b = SmoothClosedCurve::circle(0.3, 0.0, 0.25).unwrap();
        let (_, _, d) = curve_distance(&a, &b);
        assert!((d - 0.45).abs() < 1e-12);
    }
}
