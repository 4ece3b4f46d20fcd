use num_complex::Complex64;

use super::kernels::BoundaryArc;
use super::solver::HarmonicSolution;
use crate::error::{Error, Result};
use crate::geometry::{Domain, SmoothClosedCurve};
use crate::spectral;

/// Anything that can report a harmonic value and gradient (`u_x + i u_y`).
pub trait HarmonicEvaluator: Sync {
    fn value(&self, z: Complex64) -> f64;
    fn gradient(&self, z: Complex64) -> Complex64;

    fn value_gradient(&self, z: Complex64) -> (f64, Complex64) {
        (self.value(z), self.gradient(z))
    }

    /// Domain of harmonicity, when the field is tied to one.
    fn domain(&self) -> Option<&Domain> {
        None
    }

    /// Isolated singular points (poles, log sources) in or on the domain.
    fn singular_points(&self) -> Vec<Complex64> {
        Vec::new()
    }

    /// Constant values on hole boundaries, `(hole, value)`.
    fn plateaus(&self) -> Vec<(usize, f64)> {
        Vec::new()
    }
}

/// Closed-form field given by value and gradient closures.
pub struct FnField<V, G> {
    value: V,
    gradient: G,
}

impl<V, G> FnField<V, G>
where
    V: Fn(Complex64) -> f64 + Sync,
    G: Fn(Complex64) -> Complex64 + Sync,
{
    pub fn new(value: V, gradient: G) -> Self {
        Self { value, gradient }
    }
}

impl<V, G> HarmonicEvaluator for FnField<V, G>
where
    V: Fn(Complex64) -> f64 + Sync,
    G: Fn(Complex64) -> Complex64 + Sync,
{
    fn value(&self, z: Complex64) -> f64 {
        (self.value)(z)
    }
    fn gradient(&self, z: Complex64) -> Complex64 {
        (self.gradient)(z)
    }
}

impl HarmonicEvaluator for HarmonicSolution {
    fn value(&self, z: Complex64) -> f64 {
        HarmonicSolution::value(self, z)
    }
    fn gradient(&self, z: Complex64) -> Complex64 {
        HarmonicSolution::gradient(self, z)
    }
    fn value_gradient(&self, z: Complex64) -> (f64, Complex64) {
        HarmonicSolution::value_gradient(self, z)
    }
    fn domain(&self) -> Option<&Domain> {
        Some(HarmonicSolution::domain(self))
    }
}

/// Explicit singular term added to a regular harmonic part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Singularity {
    /// `coeff · log|z − center|`
    Log { center: Complex64, coeff: f64 },
    /// `Re[moment / (z − pole)]`
    Dipole { pole: Complex64, moment: Complex64 },
}

impl Singularity {
    pub fn point(&self) -> Complex64 {
        match *self {
            Singularity::Log { center, .. } => center,
            Singularity::Dipole { pole, .. } => pole,
        }
    }

    pub fn value(&self, z: Complex64) -> f64 {
        match *self {
            Singularity::Log { center, coeff } => coeff * (z - center).norm().ln(),
            Singularity::Dipole { pole, moment } => (moment / (z - pole)).re,
        }
    }

    pub fn gradient(&self, z: Complex64) -> Complex64 {
        match *self {
            Singularity::Log { center, coeff } => {
                let d = z - center;
                coeff * d / d.norm_sqr()
            }
            Singularity::Dipole { pole, moment } => {
                let d = z - pole;
                (-moment / (d * d)).conj()
            }
        }
    }

    /// Complex potential with real part [`Singularity::value`]; principal log.
    pub fn potential(&self, z: Complex64) -> Complex64 {
        match *self {
            Singularity::Log { center, coeff } => coeff * (z - center).ln(),
            Singularity::Dipole { pole, moment } => moment / (z - pole),
        }
    }
}

/// A harmonic field: solved regular part plus explicit singular terms.
#[derive(Debug, Clone)]
pub struct Field {
    pub regular: HarmonicSolution,
    pub singular: Vec<Singularity>,
}

impl Field {
    pub fn new(regular: HarmonicSolution, singular: Vec<Singularity>) -> Self {
        Self { regular, singular }
    }

    pub fn regular(regular: HarmonicSolution) -> Self {
        Self { regular, singular: Vec::new() }
    }

    pub fn domain(&self) -> &Domain {
        self.regular.domain()
    }

    pub fn value(&self, z: Complex64) -> f64 {
        self.regular.value(z) + self.singular.iter().map(|s| s.value(z)).sum::<f64>()
    }

    pub fn gradient(&self, z: Complex64) -> Complex64 {
        self.regular.gradient(z) + self.singular.iter().map(|s| s.gradient(z)).sum::<Complex64>()
    }

    pub fn value_gradient(&self, z: Complex64) -> (f64, Complex64) {
        let (mut v, mut g) = self.regular.value_gradient(z);
        for s in &self.singular {
            v += s.value(z);
            g += s.gradient(z);
        }
        (v, g)
    }

    /// Boundary trace at `γ_c(t)`; singular terms are evaluated pointwise.
    pub fn boundary_value(&self, c: usize, t: f64) -> f64 {
        let z = self.domain().component(c).point(t);
        self.regular.boundary_value(c, t) + self.singular.iter().map(|s| s.value(z)).sum::<f64>()
    }

    pub fn boundary_gradient(&self, c: usize, t: f64) -> Complex64 {
        let z = self.domain().component(c).point(t);
        self.regular.boundary_gradient(c, t) + self.singular.iter().map(|s| s.gradient(z)).sum::<Complex64>()
    }

    /// Inward normal derivative at every node of component `c`.
    pub fn inward_normal_derivatives(&self, c: usize) -> Vec<f64> {
        let nodes = self.regular.discretization().component(c);
        self.regular
            .boundary_gradients(c)
            .iter()
            .zip(nodes.z.iter().zip(&nodes.normal))
            .map(|(g, (&z, n))| {
                let g = g + self.singular.iter().map(|s| s.gradient(z)).sum::<Complex64>();
                (g * n.conj()).re
            })
            .collect()
    }

    /// `∫_arc ∂u/∂n ds` with `n` pointing into the domain. Along the boundary
    /// `∂u/∂n ds = −σ d(Im Ψ)` for the complex potential `Ψ` (σ = +1 on the
    /// outer curve, −1 on holes), so the integral is a difference of endpoint
    /// values plus continuous argument increments of the logarithmic terms.
    /// Singular points must not lie on the arc.
    pub fn arc_normal_flux(&self, arc: BoundaryArc) -> f64 {
        let c = arc.component;
        let curve = self.domain().component(c);
        let sigma = if c == 0 { 1.0 } else { -1.0 };
        let mut increment = 0.0;
        if !arc.is_whole() {
            let (p0, _) = self.regular.boundary_phi_at(c, arc.t0);
            let (p1, _) = self.regular.boundary_phi_at(c, arc.t1);
            increment += p1.im - p0.im;
            let (z0, z1) = (curve.point(arc.t0), curve.point(arc.t1));
            for s in &self.singular {
                if let Singularity::Dipole { .. } = s {
                    increment += s.potential(z1).im - s.potential(z0).im;
                }
            }
        }
        for (center, coeff) in self.log_terms() {
            increment += coeff * argument_increment(curve, center, arc);
        }
        -sigma * increment
    }

    /// Single-valued part of the complex potential: Φ plus dipole terms.
    pub fn single_valued_potential(&self, z: Complex64) -> Option<Complex64> {
        let mut p = self.regular.single_valued_potential(z)?;
        for s in &self.singular {
            if let Singularity::Dipole { .. } = s {
                p += s.potential(z);
            }
        }
        Some(p)
    }

    /// All logarithmic terms `(center, coeff)`: the regular part's hole sources
    /// followed by explicit log singularities.
    pub fn log_terms(&self) -> Vec<(Complex64, f64)> {
        let d = self.domain();
        let mut terms: Vec<(Complex64, f64)> =
            self.regular.log_coefficients().iter().enumerate().map(|(k, &a)| (d.hole_point(k + 1), a)).collect();
        for s in &self.singular {
            if let Singularity::Log { center, coeff } = *s {
                terms.push((center, coeff));
            }
        }
        terms
    }

    /// Complex potential with real part [`Field::value`] (principal logarithms).
    pub fn potential(&self, z: Complex64) -> Option<Complex64> {
        let p = self.single_valued_potential(z)?;
        Some(p + self.log_terms().iter().map(|(c, a)| a * (z - c).ln()).sum::<Complex64>())
    }

    /// `Σ αₖ fₖ` for fields sharing one discretization.
    pub fn combine(terms: &[(f64, &Field)]) -> Field {
        let regs: Vec<(f64, &HarmonicSolution)> = terms.iter().map(|(a, f)| (*a, &f.regular)).collect();
        let regular = HarmonicSolution::combine(&regs);
        let mut singular = Vec::new();
        for (a, f) in terms {
            for s in &f.singular {
                singular.push(match *s {
                    Singularity::Log { center, coeff } => Singularity::Log { center, coeff: a * coeff },
                    Singularity::Dipole { pole, moment } => Singularity::Dipole { pole, moment: a * moment },
                });
            }
        }
        Field { regular, singular }
    }
}

impl HarmonicEvaluator for Field {
    fn value(&self, z: Complex64) -> f64 {
        Field::value(self, z)
    }
    fn gradient(&self, z: Complex64) -> Complex64 {
        Field::gradient(self, z)
    }
    fn value_gradient(&self, z: Complex64) -> (f64, Complex64) {
        Field::value_gradient(self, z)
    }
    fn domain(&self) -> Option<&Domain> {
        Some(Field::domain(self))
    }
    fn singular_points(&self) -> Vec<Complex64> {
        self.singular.iter().map(|s| s.point()).collect()
    }
}

/// Continuous increment of `arg(γ(t) − center)` over the arc.
pub fn argument_increment(curve: &SmoothClosedCurve, center: Complex64, arc: BoundaryArc) -> f64 {
    if arc.is_whole() {
        return std::f64::consts::TAU * curve.winding_number(center).round();
    }
    fn step(curve: &SmoothClosedCurve, center: Complex64, a: f64, b: f64, za: Complex64, zb: Complex64, depth: u32) -> f64 {
        let d = ((zb - center) / (za - center)).arg();
        if d.abs() < 0.25 || depth > 40 {
            return d;
        }
        let m = 0.5 * (a + b);
        let zm = curve.point(m);
        step(curve, center, a, m, za, zm, depth + 1) + step(curve, center, m, b, zm, zb, depth + 1)
    }
    let pieces = 64;
    let h = arc.parameter_length() / pieces as f64;
    let mut total = 0.0;
    let mut za = curve.point(arc.t0);
    for k in 0..pieces {
        let a = arc.t0 + k as f64 * h;
        let zb = curve.point(a + h);
        total += step(curve, center, a, a + h, za, zb, 0);
        za = zb;
    }
    total
}

/// Minimum allowed distance from a flux curve to the boundary, as a fraction of the diameter.
pub const FLUX_CLEARANCE: f64 = 1e-6;

/// `∮ ∂u/∂n ds` over a closed curve, with `n` pointing away from the region
/// the curve encloses. Trapezoid rule on the curve's collocation nodes.
pub fn flux<F: HarmonicEvaluator + ?Sized>(field: &F, curve: &SmoothClosedCurve) -> Result<f64> {
    flux_with_nodes(field, curve, curve.node_count())
}

pub fn flux_with_nodes<F: HarmonicEvaluator + ?Sized>(field: &F, curve: &SmoothClosedCurve, n: usize) -> Result<f64> {
    let domain = field.domain();
    let points: Vec<f64> = spectral::nodes(n).collect();
    let mut sum = 0.0;
    for &t in &points {
        let g = curve.geometry(t);
        if let Some(d) = domain {
            let dist = if d.contains(g.point) { d.distance_to_boundary(g.point) } else { 0.0 };
            if dist < FLUX_CLEARANCE * d.diameter() {
                return Err(Error::CurveTouchesBoundary { distance: dist });
            }
        }
        let grad = field.gradient(g.point);
        sum += (grad * (-g.normal).conj()).re * g.speed;
    }
    Ok(sum * std::f64::consts::TAU / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flux_of_closed_form_fields() {
        let circle = SmoothClosedCurve::circle(0.1, -0.2, 0.5).unwrap();
        let linear = FnField::new(|z: Complex64| z.re, |_| Complex64::new(1.0, 0.0));
        assert!(flux(&linear, &circle).unwrap().abs() < 1e-10);
        let source = FnField::new(|z: Complex64| -z.norm().ln(), |z: Complex64| -z / z.norm_sqr());
        let around = SmoothClosedCurve::circle(0.0, 0.0, 0.5).unwrap();
        assert!((flux(&source, &around).unwrap() + std::f64::consts::TAU).abs() < 1e-8);
    }

    #[test]
    fn dipole_gradient_matches_finite_difference() {
        let s = Singularity::Dipole { pole: Complex64::new(1.0, 0.0), moment: Complex64::new(-0.3, 0.2) };
        let z = Complex64::new(0.2, 0.4);
        let h = 1e-6;
        let gx = (s.value(z + h) - s.value(z - h)) / (2.0 * h);
        let gy = (s.value(z + Complex64::new(0.0, h)) - s.value(z - Complex64::new(0.0, h))) / (2.0 * h);
        assert!((s.gradient(z) - Complex64::new(gx, gy)).norm() < 1e-7);
    }
}
