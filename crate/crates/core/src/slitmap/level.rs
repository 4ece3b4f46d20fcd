use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::bm_kernels::HarmonicEvaluator;
use crate::error::{Error, Result};
use crate::geometry::first_self_intersection;

/// Levels closer than this to a hole plateau are rejected.
pub const PLATEAU_LEVEL_TOLERANCE: f64 = 1e-6;
/// Gradient magnitudes below this along a trace are reported as anomalies.
pub const GRADIENT_FLOOR: f64 = 1e-8;
const SEED_GRID: usize = 96;
const MAX_STEPS: usize = 200_000;
const MAX_STEP: f64 = 0.01;
const MIN_STEP: f64 = 1e-9;
const NEWTON_ITERATIONS: usize = 30;
const MAX_TURN: f64 = 0.3;

/// A closed level curve `{field = r}` as an ordered point sequence (the first
/// point is not repeated at the end). Curves through a boundary singularity
/// `w` of the field contain `w` itself as one vertex.
#[derive(Debug, Clone)]
pub struct LevelCurve {
    pub level: f64,
    pub points: Vec<Complex64>,
    /// Distance between the start point and the point where the trace returned.
    pub closure_gap: f64,
    pub simple: bool,
}

impl LevelCurve {
    /// Winding number of the closed polyline around `z`.
    pub fn winding_number(&self, z: Complex64) -> f64 {
        let n = self.points.len();
        (0..n).map(|k| ((self.points[(k + 1) % n] - z) / (self.points[k] - z)).arg()).sum::<f64>() / TAU
    }

    pub fn encloses(&self, z: Complex64) -> bool {
        self.winding_number(z).abs() > 0.5
    }

    pub fn length(&self) -> f64 {
        let n = self.points.len();
        (0..n).map(|k| (self.points[(k + 1) % n] - self.points[k]).norm()).sum()
    }

    /// Largest distance between consecutive points.
    pub fn max_spacing(&self) -> f64 {
        let n = self.points.len();
        (0..n).map(|k| (self.points[(k + 1) % n] - self.points[k]).norm()).fold(0.0, f64::max)
    }
}

/// The traced function `F = (v − r)·Π|z − w_k|²`, where `w_k` are the field's
/// singular points on the boundary. Multiplying out the boundary poles keeps
/// `F` smooth up to `w_k`, so curves passing through them stay traceable.
struct Traced<'a, F: ?Sized> {
    field: &'a F,
    level: f64,
    poles: Vec<Complex64>,
}

struct Sample {
    f: f64,
    grad: Complex64,
    raw_grad: Complex64,
    residual: f64,
}

impl<F: HarmonicEvaluator + ?Sized> Traced<'_, F> {
    fn sample(&self, z: Complex64) -> Option<Sample> {
        let (v, g) = self.field.value_gradient(z);
        if !v.is_finite() || !g.re.is_finite() || !g.im.is_finite() {
            return None;
        }
        let mut p = 1.0;
        let mut dp = Complex64::new(0.0, 0.0);
        for &w in &self.poles {
            let d = z - w;
            dp = dp * d.norm_sqr() + 2.0 * d * p;
            p *= d.norm_sqr();
        }
        let res = v - self.level;
        Some(Sample { f: res * p, grad: g * p + res * dp, raw_grad: g, residual: res })
    }

    /// Newton iteration along the gradient onto `F = 0`.
    fn correct(&self, mut z: Complex64, scale: f64) -> Option<(Complex64, Sample)> {
        for _ in 0..NEWTON_ITERATIONS {
            let s = self.sample(z)?;
            let g2 = s.grad.norm_sqr();
            if g2 == 0.0 {
                return None;
            }
            let dz = s.f * s.grad / g2;
            z -= dz;
            if dz.norm() < 1e-13 * scale || s.residual.abs() < 1e-12 {
                let s = self.sample(z)?;
                return Some((z, s));
            }
        }
        None
    }
}

fn tangent(grad: Complex64, previous: Complex64) -> Complex64 {
    let t = -Complex64::i() * grad / grad.norm();
    if (t * previous.conj()).re < 0.0 {
        -t
    } else {
        t
    }
}

fn check_plateaus<F: HarmonicEvaluator + ?Sized>(field: &F, r: f64) -> Result<()> {
    for (hole, c) in field.plateaus() {
        if (r - c).abs() <= PLATEAU_LEVEL_TOLERANCE {
            return Err(Error::PlateauLevel { level: r, plateau: c, hole, tolerance: PLATEAU_LEVEL_TOLERANCE });
        }
    }
    Ok(())
}

fn scale_of<F: HarmonicEvaluator + ?Sized>(field: &F) -> f64 {
    field.domain().map_or(1.0, |d| d.diameter())
}

fn boundary_poles<F: HarmonicEvaluator + ?Sized>(field: &F) -> Vec<(Complex64, usize, f64)> {
    let Some(d) = field.domain() else { return Vec::new() };
    field
        .singular_points()
        .into_iter()
        .filter_map(|p| {
            let (c, t, dist) = d.nearest_boundary(p);
            (dist < 1e-8 * d.diameter()).then_some((p, c, t))
        })
        .collect()
}

/// Traces the level curve `{field = r}` starting from a grid sign change.
pub fn trace_level_curve<F: HarmonicEvaluator + ?Sized>(field: &F, r: f64) -> Result<LevelCurve> {
    check_plateaus(field, r)?;
    let d = field
        .domain()
        .ok_or_else(|| Error::InvalidArgument("seeding a level curve needs a field tied to a domain".into()))?;
    let scale = d.diameter();
    let poly = d.outer().polyline();
    let (mut lo, mut hi) = (poly[0], poly[0]);
    for z in poly {
        lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
        hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
    }
    let singular = field.singular_points();
    let usable = |z: Complex64| {
        d.contains(z)
            && d.distance_to_boundary(z) > 1e-3 * scale
            && singular.iter().all(|p| (z - p).norm() > 1e-2 * scale)
    };
    let m = SEED_GRID;
    let at = |i: usize, j: usize| {
        Complex64::new(lo.re + (hi.re - lo.re) * (i as f64 + 0.5) / m as f64, lo.im + (hi.im - lo.im) * (j as f64 + 0.5) / m as f64)
    };
    let vals: Vec<Option<f64>> =
        (0..m * m).map(|k| { let z = at(k % m, k / m); usable(z).then(|| field.value(z) - r) }).collect();
    for j in 0..m {
        for i in 0..m - 1 {
            let (Some(a), Some(b)) = (vals[j * m + i], vals[j * m + i + 1]) else { continue };
            if a.signum() == b.signum() {
                continue;
            }
            let (mut za, mut zb, mut fa) = (at(i, j), at(i + 1, j), a);
            for _ in 0..60 {
                let zm = 0.5 * (za + zb);
                let fm = field.value(zm) - r;
                if fm.signum() == fa.signum() {
                    za = zm;
                    fa = fm;
                } else {
                    zb = zm;
                }
            }
            return trace_level_curve_from(field, r, 0.5 * (za + zb));
        }
    }
    Err(Error::LevelNotFound { level: r })
}

/// Traces the level curve `{field = r}` through the point nearest `seed`.
///
/// Predictor–corrector continuation: an Euler step along the tangent, Newton
/// correction along the gradient, and a step bounded by `0.1/κ` (κ estimated
/// from the turning of the tangent) and `0.01·diameter`, halved on failure.
pub fn trace_level_curve_from<F: HarmonicEvaluator + ?Sized>(field: &F, r: f64, seed: Complex64) -> Result<LevelCurve> {
    check_plateaus(field, r)?;
    let scale = scale_of(field);
    let poles = boundary_poles(field);
    let traced = Traced { field, level: r, poles: poles.iter().map(|p| p.0).collect() };
    let (start, s0) = traced.correct(seed, scale).ok_or(Error::LevelNotFound { level: r })?;
    let check_gradient = |z: Complex64, s: &Sample| -> Result<()> {
        let mag = s.raw_grad.norm().min(s.grad.norm());
        if mag < GRADIENT_FLOOR {
            return Err(Error::GradientVanished { magnitude: mag, x: z.re, y: z.im });
        }
        Ok(())
    };
    check_gradient(start, &s0)?;

    let h_max = MAX_STEP * scale;
    let t0 = tangent(s0.grad, -Complex64::i() * s0.grad);
    let mut points = vec![start];
    let (mut z, mut t, mut h) = (start, t0, 0.1 * h_max);
    let mut travelled = 0.0;
    for _ in 0..MAX_STEPS {
        if travelled > 2.0 * h && (start - z).norm() <= h && (t * t0.conj()).re > 0.0 {
            let gap = arrive(&traced, z, t, start, scale);
            let simple = first_self_intersection(&points).is_none();
            return Ok(LevelCurve { level: r, points, closure_gap: gap, simple });
        }
        if let Some(&(w, c, tw)) = poles.iter().find(|p| (z - p.0).norm() < 2.0 * h && ((p.0 - z) * t.conj()).re > 0.0) {
            let (next, s, tn) = bridge(&traced, field, z, w, c, tw, scale).ok_or(Error::LevelCurveNotClosed { steps: points.len() })?;
            check_gradient(next, &s)?;
            travelled += (w - z).norm() + (next - w).norm();
            points.push(w);
            points.push(next);
            z = next;
            t = tn;
            continue;
        }
        let mut accepted = None;
        while h >= MIN_STEP * scale {
            if let Some((p, s)) = traced.correct(z + h * t, scale) {
                let tn = tangent(s.grad, t);
                let turn = (tn / t).arg().abs();
                if (p - z - h * t).norm() < 0.5 * h && turn < MAX_TURN {
                    accepted = Some((p, s, tn, turn));
                    break;
                }
            }
            h *= 0.5;
        }
        let Some((p, s, tn, turn)) = accepted else {
            return Err(Error::LevelCurveNotClosed { steps: points.len() });
        };
        check_gradient(p, &s)?;
        travelled += (p - z).norm();
        let kappa = turn / (p - z).norm().max(f64::MIN_POSITIVE);
        points.push(p);
        z = p;
        t = tn;
        h = (1.5 * h).min(h_max).min(if kappa > 0.0 { 0.1 / kappa } else { h_max });
    }
    Err(Error::LevelCurveNotClosed { steps: MAX_STEPS })
}

/// Moves along the curve from `z` to the foot of the perpendicular from
/// `target` and returns its distance to `target`.
fn arrive<F: HarmonicEvaluator + ?Sized>(traced: &Traced<F>, mut z: Complex64, mut t: Complex64, target: Complex64, scale: f64) -> f64 {
    for _ in 0..20 {
        let step = ((target - z) * t.conj()).re;
        let Some((p, s)) = traced.correct(z + step * t, scale) else { break };
        t = tangent(s.grad, t);
        z = p;
        if step.abs() < 1e-13 * scale {
            break;
        }
    }
    (z - target).norm()
}

/// Crosses the boundary singularity `w` at which the curve touches the
/// boundary tangentially: the exit point mirrors the entry point across the
/// normal at `w` and is then corrected onto the curve.
fn bridge<F: HarmonicEvaluator + ?Sized>(
    traced: &Traced<F>,
    field: &F,
    z: Complex64,
    w: Complex64,
    c: usize,
    tw: f64,
    scale: f64,
) -> Option<(Complex64, Sample, Complex64)> {
    let d = field.domain()?;
    let curve = d.component(c);
    let tau = curve.geometry(tw).tangent;
    let along = if ((w - z) * tau.conj()).re >= 0.0 { 1.0 } else { -1.0 };
    let depth = d.distance_to_boundary(z);
    let reach = (w - z).norm();
    let tb = tw + along * reach / curve.derivative(tw, 1).norm();
    let g = d.boundary_geometry(c, tb);
    let guess = g.point + depth * g.normal;
    let (p, s) = traced.correct(guess, scale)?;
    let tn = tangent(s.grad, along * tau);
    Some((p, s, tn))
}
