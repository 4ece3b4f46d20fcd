use std::f64::consts::TAU;
use std::fmt::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use super::diagnostics::GridSpec;
use super::level::LevelCurve;
use super::maps::{AnalyticMapField, ChordalSlitDomain, CircularArc, CircularSlitDisk, CircularSlitRing};
use crate::bm_kernels::HarmonicEvaluator;
use crate::geometry::Domain;

const SVG_SIZE: f64 = 512.0;

/// Minimal SVG writer with a fixed viewBox mapped from a plane rectangle.
pub struct SvgCanvas {
    lower: Complex64,
    upper: Complex64,
    body: String,
}

impl SvgCanvas {
    /// Canvas for the rectangle `[lower, upper]`, padded by 5%.
    pub fn new(lower: Complex64, upper: Complex64) -> Self {
        let pad = 0.05 * (upper - lower);
        Self { lower: lower - pad, upper: upper + pad, body: String::new() }
    }

    fn map(&self, z: Complex64) -> (f64, f64) {
        let w = self.upper.re - self.lower.re;
        let h = self.upper.im - self.lower.im;
        let s = SVG_SIZE / w.max(h);
        ((z.re - self.lower.re) * s, (self.upper.im - z.im) * s)
    }

    pub fn polyline(&mut self, points: &[Complex64], closed: bool, stroke: &str, width: f64) {
        if points.is_empty() {
            return;
        }
        let tag = if closed { "polygon" } else { "polyline" };
        let mut pts = String::new();
        for &z in points {
            let (x, y) = self.map(z);
            let _ = write!(pts, "{x:.3},{y:.3} ");
        }
        let _ = writeln!(
            self.body,
            r#"<{tag} points="{}" fill="none" stroke="{stroke}" stroke-width="{width}"/>"#,
            pts.trim_end()
        );
    }

    pub fn circle(&mut self, center: Complex64, radius: f64, stroke: &str) {
        let n = 256;
        let pts: Vec<Complex64> = (0..n).map(|k| center + Complex64::from_polar(radius, TAU * k as f64 / n as f64)).collect();
        self.polyline(&pts, true, stroke, 1.0);
    }

    pub fn dot(&mut self, z: Complex64, fill: &str) {
        let (x, y) = self.map(z);
        let _ = writeln!(self.body, r#"<circle cx="{x:.3}" cy="{y:.3}" r="2.5" fill="{fill}"/>"#);
    }

    pub fn finish(self) -> String {
        let w = self.upper.re - self.lower.re;
        let h = self.upper.im - self.lower.im;
        let s = SVG_SIZE / w.max(h);
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {:.3} {:.3}\">\n{}</svg>\n",
            w * s,
            h * s,
            self.body
        )
    }
}

fn bounds(points: impl IntoIterator<Item = Complex64>) -> (Complex64, Complex64) {
    let mut lo = Complex64::new(f64::INFINITY, f64::INFINITY);
    let mut hi = -lo;
    for z in points {
        lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
        hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
    }
    (lo, hi)
}

/// The domain's boundary curves with level curves overlaid.
pub fn domain_svg(domain: &Domain, curves: &[LevelCurve]) -> String {
    let (lo, hi) = bounds(domain.outer().polyline().iter().copied());
    let mut canvas = SvgCanvas::new(lo, hi);
    for c in 0..domain.component_count() {
        canvas.polyline(domain.component(c).polyline(), true, "black", 1.5);
    }
    for curve in curves {
        canvas.polyline(&curve.points, true, "steelblue", 1.0);
    }
    canvas.finish()
}

/// Upper half-plane window with the horizontal slits.
pub fn chordal_svg(slits: &ChordalSlitDomain) -> String {
    let (mut lo, mut hi) = bounds(slits.slits.iter().flat_map(|s| [Complex64::new(s.x_min, s.height), Complex64::new(s.x_max, s.height)]));
    if slits.slits.is_empty() {
        lo = Complex64::new(-1.0, 0.0);
        hi = Complex64::new(1.0, 1.0);
    }
    let span = (hi.re - lo.re).max(hi.im).max(1e-3);
    let lo = Complex64::new(lo.re - 0.5 * span, 0.0);
    let hi = Complex64::new(hi.re + 0.5 * span, hi.im + 0.5 * span);
    let mut canvas = SvgCanvas::new(lo, hi);
    canvas.polyline(&[Complex64::new(lo.re, 0.0), Complex64::new(hi.re, 0.0)], false, "black", 1.5);
    for s in &slits.slits {
        canvas.polyline(&[Complex64::new(s.x_min, s.height), Complex64::new(s.x_max, s.height)], false, "firebrick", 2.0);
    }
    canvas.finish()
}

fn arc_points(arc: &CircularArc) -> Vec<Complex64> {
    let n = 128;
    (0..=n).map(|k| Complex64::from_polar(arc.radius, arc.theta0 + (arc.theta1 - arc.theta0) * k as f64 / n as f64)).collect()
}

fn circular_svg(inner: Option<f64>, arcs: &[CircularArc], center: bool) -> String {
    let mut canvas = SvgCanvas::new(Complex64::new(-1.0, -1.0), Complex64::new(1.0, 1.0));
    canvas.circle(Complex64::new(0.0, 0.0), 1.0, "black");
    if let Some(r) = inner {
        canvas.circle(Complex64::new(0.0, 0.0), r, "black");
    }
    if center {
        canvas.dot(Complex64::new(0.0, 0.0), "black");
    }
    for a in arcs {
        canvas.polyline(&arc_points(a), false, "firebrick", 2.0);
    }
    canvas.finish()
}

pub fn ring_svg(ring: &CircularSlitRing) -> String {
    circular_svg(Some(ring.inner_radius), &ring.arcs, false)
}

pub fn disk_svg(disk: &CircularSlitDisk) -> String {
    circular_svg(None, &disk.arcs, true)
}

fn grid_rows<T: Send>(spec: &GridSpec, f: impl Fn(Complex64) -> Option<T> + Sync) -> Vec<(Complex64, T)> {
    (0..spec.nx * spec.ny)
        .into_par_iter()
        .filter_map(|k| {
            let z = spec.node(k % spec.nx, k / spec.nx);
            f(z).map(|v| (z, v))
        })
        .collect()
}

/// `x,y,value` rows for the grid nodes inside the field's domain.
pub fn field_csv<F: HarmonicEvaluator + ?Sized>(field: &F, spec: &GridSpec) -> String {
    let domain = field.domain();
    let rows = grid_rows(spec, |z| {
        if domain.is_some_and(|d| !d.contains(z)) {
            return None;
        }
        Some(field.value(z)).filter(|v| v.is_finite())
    });
    let mut out = String::from("x,y,value\n");
    for (z, v) in rows {
        let _ = writeln!(out, "{:.10},{:.10},{:.12e}", z.re, z.im, v);
    }
    out
}

/// `x,y,u,v` rows of `f = u + i v` for the grid nodes where the map evaluates.
pub fn map_csv(map: &AnalyticMapField, spec: &GridSpec) -> String {
    let domain = map.domain();
    let rows = grid_rows(spec, |z| if domain.contains(z) { map.eval(z).ok().filter(|f| f.is_finite()) } else { None });
    let mut out = String::from("x,y,u,v\n");
    for (z, f) in rows {
        let _ = writeln!(out, "{:.10},{:.10},{:.12e},{:.12e}", z.re, z.im, f.re, f.im);
    }
    out
}
