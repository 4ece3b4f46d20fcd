use num_complex::Complex64;

use crate::bm_kernels::HarmonicEvaluator;
use crate::error::{Error, Result};
use crate::geometry::SmoothClosedCurve;
use crate::spectral::gauss_legendre;

/// Paths must keep this fraction of the diameter from the boundary and from singular points.
pub const PATH_CLEARANCE: f64 = 1e-3;
const ORDER: usize = 16;
const MAX_DEPTH: u32 = 24;
const TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy)]
enum Part {
    Real,
    Imaginary,
}

/// `u(z) − u(z0)` for the harmonic `u` with `u + i v` analytic, given `v`:
/// Gauss–Legendre quadrature of `f′ = v_y + i v_x` along the polyline `path`
/// from `path[0] = z0` to its last vertex `z`.
pub fn harmonic_conjugate<F: HarmonicEvaluator + ?Sized>(field: &F, path: &[Complex64]) -> Result<f64> {
    path_integral(field, path, Part::Real, |g| Complex64::i() * g.conj())
}

/// `v(z) − v(z0)` for the conjugate `v` of `u` (so `u + i v` is analytic),
/// by quadrature of `f′ = u_x − i u_y` along `path`.
pub fn conjugate_increment<F: HarmonicEvaluator + ?Sized>(field: &F, path: &[Complex64]) -> Result<f64> {
    path_integral(field, path, Part::Imaginary, |g| g.conj())
}

/// Closed polyline through `n` equispaced parameter points of `curve`.
pub fn loop_path(curve: &SmoothClosedCurve, n: usize) -> Vec<Complex64> {
    let mut p: Vec<Complex64> = crate::spectral::nodes(n).map(|t| curve.point(t)).collect();
    p.push(p[0]);
    p
}

fn path_integral<F: HarmonicEvaluator + ?Sized>(
    field: &F,
    path: &[Complex64],
    part: Part,
    derivative: impl Fn(Complex64) -> Complex64,
) -> Result<f64> {
    if path.len() < 2 {
        return Err(Error::InvalidArgument("a path needs at least two vertices".into()));
    }
    let (x, w) = gauss_legendre(ORDER);
    let scale = field.domain().map_or(1.0, |d| d.diameter());
    let limit = PATH_CLEARANCE * scale;
    let singular = field.singular_points();
    let check = |z: Complex64| -> Result<()> {
        let mut dist = singular.iter().map(|p| (z - p).norm()).fold(f64::INFINITY, f64::min);
        if let Some(d) = field.domain() {
            dist = dist.min(if d.contains(z) { d.distance_to_boundary(z) } else { 0.0 });
        }
        if dist < limit {
            return Err(Error::PathTooCloseToBoundary { distance: dist, limit });
        }
        Ok(())
    };
    let rule = |a: Complex64, b: Complex64| -> Complex64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        x.iter().zip(&w).map(|(x, w)| *w * derivative(field.gradient(mid + half * x))).sum::<Complex64>() * half
    };
    fn adapt(rule: &dyn Fn(Complex64, Complex64) -> Complex64, a: Complex64, b: Complex64, whole: Complex64, depth: u32) -> Complex64 {
        let m = 0.5 * (a + b);
        let (l, r) = (rule(a, m), rule(m, b));
        if depth >= MAX_DEPTH || (l + r - whole).norm() < TOLERANCE * (1.0 + whole.norm()) {
            return l + r;
        }
        adapt(rule, a, m, l, depth + 1) + adapt(rule, m, b, r, depth + 1)
    }
    let mut total = Complex64::new(0.0, 0.0);
    for seg in path.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let pieces = 8;
        for k in 0..=pieces {
            check(a + (b - a) * (k as f64 / pieces as f64))?;
        }
        total += adapt(&rule, a, b, rule(a, b), 0);
    }
    Ok(match part {
        Part::Real => total.re,
        Part::Imaginary => total.im,
    })
}
