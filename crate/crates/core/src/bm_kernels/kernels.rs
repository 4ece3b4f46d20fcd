use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use num_complex::Complex64;

use super::field::{Field, Singularity};
use super::solver::{DirichletSolver, HarmonicSolution};
use crate::error::{Error, Result};
use crate::geometry::{parameter_gap, wrap_angle, Domain};
use crate::spectral::gauss_legendre;

/// Poles closer than this fraction of the diameter to the boundary are refused.
pub const POLE_CLEARANCE: f64 = 1e-4;
/// Minimum arclength between two points of the boundary Poisson kernel.
pub const DIAGONAL_LIMIT: f64 = 1e-3;
/// Gauss–Legendre order for arc-to-arc excursion integrals.
const ARC_QUADRATURE: usize = 48;
/// Poles closer than this many node spacings to the boundary get an image source.
const IMAGE_RANGE: f64 = 8.0;
/// Below this parameter gap the dipole trace uses its Taylor series.
const TRACE_SERIES_GAP: f64 = 1e-5;

/// `(component, parameter)` on the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub component: usize,
    pub t: f64,
}

impl BoundaryPoint {
    pub fn new(component: usize, t: f64) -> Self {
        Self { component, t: wrap_angle(t) }
    }

    pub fn outer(t: f64) -> Self {
        Self::new(0, t)
    }
}

/// Parameter interval `[t0, t1]` on one component, `t0 < t1 ≤ t0 + 2π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryArc {
    pub component: usize,
    pub t0: f64,
    pub t1: f64,
}

impl BoundaryArc {
    /// Counterclockwise arc from `t0` to `t1` (taken mod 2π; equal ends give an empty arc).
    pub fn new(component: usize, t0: f64, t1: f64) -> Self {
        let a = wrap_angle(t0);
        let len = (t1 - t0).rem_euclid(TAU);
        Self { component, t0: a, t1: a + len }
    }

    pub fn whole(component: usize) -> Self {
        Self { component, t0: 0.0, t1: TAU }
    }

    pub fn is_whole(&self) -> bool {
        self.t1 - self.t0 >= TAU - 1e-15
    }

    pub fn parameter_length(&self) -> f64 {
        self.t1 - self.t0
    }

    /// Whether the closed arcs share a point.
    pub fn overlaps(&self, other: &BoundaryArc) -> bool {
        if self.component != other.component {
            return false;
        }
        if self.is_whole() || other.is_whole() {
            return true;
        }
        let starts_inside = |a: &BoundaryArc, t: f64| (t - a.t0).rem_euclid(TAU) <= a.t1 - a.t0;
        starts_inside(self, other.t0) || starts_inside(other, self.t0)
    }
}

/// The Green's function with pole `z`: `G(w) = −(1/π) log|w − z| + corrector(w)`.
#[derive(Debug, Clone)]
pub struct GreenField {
    pub pole: Complex64,
    pub field: Field,
}

impl GreenField {
    pub fn value(&self, w: Complex64) -> f64 {
        self.field.value(w)
    }

    pub fn gradient(&self, w: Complex64) -> Complex64 {
        self.field.gradient(w)
    }

    /// Poisson kernel `H(z, ·) = ½ ∂G/∂n` at every node of component `c` (per unit arclength).
    pub fn poisson_density(&self, c: usize) -> Vec<f64> {
        self.field.inward_normal_derivatives(c).iter().map(|d| 0.5 * d).collect()
    }
}

/// Brownian-motion kernels of one domain, sharing a single factored solver.
#[derive(Debug, Clone)]
pub struct Potential {
    solver: DirichletSolver,
    measures: OnceLock<Vec<HarmonicSolution>>,
}

impl Potential {
    pub fn new(domain: &Domain) -> Result<Self> {
        Ok(Self::with_solver(DirichletSolver::new(domain)?))
    }

    pub fn with_solver(solver: DirichletSolver) -> Self {
        Self { solver, measures: OnceLock::new() }
    }

    pub fn solver(&self) -> &DirichletSolver {
        &self.solver
    }

    pub fn domain(&self) -> &Domain {
        self.solver.domain()
    }

    pub fn solve_dirichlet(&self, data: impl Fn(usize, f64, Complex64) -> f64) -> HarmonicSolution {
        self.solver.solve_fn(data)
    }

    /// Harmonic measure of each whole component; index 0 is the outer curve.
    pub fn component_measures(&self) -> &[HarmonicSolution] {
        self.measures.get_or_init(|| {
            let n = self.domain().component_count();
            let data: Vec<Vec<f64>> = (0..n).map(|c| self.solver.sample(|k, _, _| if k == c { 1.0 } else { 0.0 })).collect();
            self.solver.solve_many(&data)
        })
    }

    /// `ω_i`: 1 on hole `i`, 0 on every other component.
    pub fn h_basis(&self, i: usize) -> Result<HarmonicSolution> {
        if i == 0 || i > self.domain().hole_count() {
            return Err(Error::InvalidArgument(format!("hole index {i} out of range 1..={}", self.domain().hole_count())));
        }
        Ok(self.component_measures()[i].clone())
    }

    pub fn check_pole(&self, z: Complex64) -> Result<()> {
        let d = self.domain();
        if !d.contains(z) {
            return Err(Error::OutsideDomain { x: z.re, y: z.im });
        }
        let dist = d.distance_to_boundary(z);
        let limit = POLE_CLEARANCE * d.diameter();
        if dist < limit {
            return Err(Error::PoleTooCloseToBoundary { distance: dist, limit });
        }
        Ok(())
    }

    /// Green's function with pole `z`. For poles within a few node spacings of
    /// the boundary, an image source (inversion in the osculating circle at the
    /// nearest boundary point) absorbs the sharp part of the corrector's data.
    pub fn greens_function(&self, z: Complex64) -> Result<GreenField> {
        self.check_pole(z)?;
        let mut singular = vec![Singularity::Log { center: z, coeff: -1.0 / PI }];
        let image = self.image_point(z);
        if let Some(zs) = image {
            singular.push(Singularity::Log { center: zs, coeff: 1.0 / PI });
        }
        let corrector = self.solver.solve_fn(|_, _, w| {
            let mut v = (w - z).norm().ln() / PI;
            if let Some(zs) = image {
                v -= (w - zs).norm().ln() / PI;
            }
            v
        });
        Ok(GreenField { pole: z, field: Field::new(corrector, singular) })
    }

    fn image_point(&self, z: Complex64) -> Option<Complex64> {
        let d = self.domain();
        let (c, t, dist) = d.nearest_boundary(z);
        let spacing = self.solver.discretization().component(c).spacing;
        if dist > IMAGE_RANGE * spacing {
            return None;
        }
        let g = d.boundary_geometry(c, t);
        let curve = d.component(c);
        let (d1, d2) = (curve.derivative(t, 1), curve.derivative(t, 2));
        let kappa_left = (d1.conj() * d2).im / d1.norm().powi(3);
        let kappa = if c == 0 { kappa_left } else { -kappa_left };
        let zs = if (kappa * dist).abs() < 1e-8 {
            g.point + g.tangent * g.tangent * (z - g.point).conj()
        } else {
            let center = g.point + g.normal / kappa;
            center + 1.0 / (kappa * kappa * (z - center).conj())
        };
        (!d.contains(zs)).then_some(zs)
    }

    /// `H_D(z, w)` per unit arclength, computed as `½ ∂G_z/∂n_w`.
    pub fn poisson_kernel(&self, z: Complex64, w: BoundaryPoint) -> Result<f64> {
        let g = self.greens_function(z)?;
        let geo = self.domain().boundary_geometry(w.component, w.t);
        Ok(0.5 * (g.field.boundary_gradient(w.component, w.t) * geo.normal.conj()).re)
    }

    /// `H_D(·, w)` as a field of its interior argument: a boundary dipole of
    /// moment `n_w/π` minus the harmonic function with the dipole's trace.
    pub fn poisson_kernel_field(&self, w: BoundaryPoint) -> Field {
        let (moment, trace) = dipole_trace(self.domain(), w);
        let regular = self.solver.solve_fn(|c, t, z| -trace(c, t, z));
        Field::new(regular, vec![Singularity::Dipole { pole: self.domain().boundary_point(w.component, w.t), moment }])
    }

    /// Several boundary-pole kernels from one block solve.
    pub fn poisson_kernel_fields(&self, ws: &[BoundaryPoint]) -> Vec<Field> {
        let data: Vec<Vec<f64>> = ws
            .iter()
            .map(|&w| {
                let (_, trace) = dipole_trace(self.domain(), w);
                self.solver.sample(|c, t, z| -trace(c, t, z))
            })
            .collect();
        let sols = self.solver.solve_many(&data);
        ws.iter()
            .zip(sols)
            .map(|(&w, regular)| {
                let (moment, _) = dipole_trace(self.domain(), w);
                Field::new(regular, vec![Singularity::Dipole { pole: self.domain().boundary_point(w.component, w.t), moment }])
            })
            .collect()
    }

    fn arclength_between(&self, a: BoundaryPoint, b: BoundaryPoint) -> f64 {
        let curve = self.domain().component(a.component);
        let gap = parameter_gap(a.t, b.t);
        let (x, wts) = gauss_legendre(16);
        x.iter().zip(&wts).map(|(x, w)| w * curve.derivative(a.t + 0.5 * gap * (x + 1.0), 1).norm()).sum::<f64>() * 0.5 * gap.abs()
    }

    /// `H_∂D(w, z) = ∂_{n_z} H_D(z, w)` for two boundary points.
    pub fn boundary_poisson_kernel(&self, w: BoundaryPoint, z: BoundaryPoint) -> Result<f64> {
        if w.component == z.component {
            let s = self.arclength_between(w, z);
            if s < DIAGONAL_LIMIT {
                return Err(Error::PointsTooClose { separation: s, limit: DIAGONAL_LIMIT });
            }
        }
        let h = self.poisson_kernel_field(w);
        let geo = self.domain().boundary_geometry(z.component, z.t);
        Ok((h.boundary_gradient(z.component, z.t) * geo.normal.conj()).re)
    }

    /// Harmonic measure of `arc` seen from `z`.
    pub fn harmonic_measure(&self, z: Complex64, arc: BoundaryArc) -> Result<f64> {
        let g = self.greens_function(z)?;
        Ok(0.5 * g.field.arc_normal_flux(arc))
    }

    /// Harmonic measure of every whole component from `z` (sums to 1).
    pub fn component_harmonic_measures(&self, z: Complex64) -> Result<Vec<f64>> {
        let g = self.greens_function(z)?;
        Ok((0..self.domain().component_count()).map(|c| 0.5 * g.field.arc_normal_flux(BoundaryArc::whole(c))).collect())
    }

    /// Excursion measure `ℰ_D(V, V′) = ∫_V ∫_{V′} H_∂D(w, z) ds_z ds_w`.
    pub fn excursion_measure(&self, v: BoundaryArc, v2: BoundaryArc) -> Result<f64> {
        if v.overlaps(&v2) {
            return Err(Error::ArcsNotDisjoint { component: v.component });
        }
        if v.is_whole() || v2.is_whole() {
            let (whole, arc) = if v.is_whole() { (v, v2) } else { (v2, v) };
            let omega = Field::regular(self.component_measures()[whole.component].clone());
            return Ok(omega.arc_normal_flux(arc));
        }
        let (x, wts) = gauss_legendre(ARC_QUADRATURE);
        let half = 0.5 * v.parameter_length();
        let ts: Vec<f64> = x.iter().map(|x| v.t0 + half * (x + 1.0)).collect();
        let ws: Vec<BoundaryPoint> = ts.iter().map(|&t| BoundaryPoint::new(v.component, t)).collect();
        let fields = self.poisson_kernel_fields(&ws);
        let curve = self.domain().component(v.component);
        let mut total = 0.0;
        for ((field, &t), wt) in fields.iter().zip(&ts).zip(&wts) {
            let inner = field.arc_normal_flux(v2);
            total += wt * half * curve.derivative(t, 1).norm() * inner;
        }
        Ok(total)
    }
}

/// Moment `n_w/π` of the boundary dipole at `w` and its boundary trace
/// `Re[n_w/(π(ζ − w))]`, continuous through `ζ = w`.
fn dipole_trace(domain: &Domain, w: BoundaryPoint) -> (Complex64, impl Fn(usize, f64, Complex64) -> f64) {
    let curve = domain.component(w.component).clone();
    let sigma = if w.component == 0 { 1.0 } else { -1.0 };
    let d1 = curve.derivative(w.t, 1);
    let d2 = curve.derivative(w.t, 2);
    let d3 = curve.derivative(w.t, 3);
    let speed = d1.norm();
    let normal = Complex64::new(0.0, sigma) * d1 / speed;
    let moment = normal / PI;
    let zw = curve.point(w.t);
    let a = d2 / (2.0 * d1);
    let b = d3 / (6.0 * d1);
    let (wc, wt) = (w.component, w.t);
    let trace = move |c: usize, t: f64, z: Complex64| {
        if c == wc {
            let h = parameter_gap(wt, t);
            if h.abs() < TRACE_SERIES_GAP {
                return (Complex64::new(0.0, sigma / (PI * speed)) * (-a + (a * a - b) * h)).re;
            }
        }
        (moment / (z - zw)).re
    };
    (moment, trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn disk_green_and_poisson() {
        let p = Potential::new(&Domain::disk(0.0, 0.0, 1.0).unwrap()).unwrap();
        let g = p.greens_function(c(0.0, 0.0)).unwrap();
        assert!((g.value(c(0.5, 0.0)) - 2f64.ln() / PI).abs() < 1e-12);
        let h = p.poisson_kernel(c(0.5, 0.0), BoundaryPoint::outer(0.0)).unwrap();
        assert!((h - 0.75 / (TAU * 0.25)).abs() < 1e-10);
        let field = p.poisson_kernel_field(BoundaryPoint::outer(0.0));
        for z in [c(0.5, 0.0), c(-0.3, 0.6), c(0.95, 0.2)] {
            let exact = (1.0 - z.norm_sqr()) / (TAU * (z - 1.0).norm_sqr());
            assert!((field.value(z) - exact).abs() < 1e-10 * exact.max(1.0), "{z}");
        }
    }

    #[test]
    fn dipole_trace_series_is_continuous() {
        let d = Domain::new(
            crate::geometry::SmoothClosedCurve::ellipse(0.0, 0.0, 1.3, 0.8, 0.2).unwrap(),
            vec![crate::geometry::SmoothClosedCurve::circle(0.2, 0.0, 0.2).unwrap()],
        )
        .unwrap();
        for comp in 0..2 {
            let w = BoundaryPoint::new(comp, 0.9);
            let (_, trace) = dipole_trace(&d, w);
            let curve = d.component(comp);
            let near = trace(comp, 0.9 + 1.1e-5, curve.point(0.9 + 1.1e-5));
            let series = trace(comp, 0.9 + 0.9e-5, curve.point(0.9 + 0.9e-5));
            assert!((near - series).abs() < 1e-6, "component {comp}: {near} vs {series}");
        }
    }

    #[test]
    fn arc_overlap_rules() {
        let a = BoundaryArc::new(0, 0.0, 1.0);
        assert!(a.overlaps(&BoundaryArc::new(0, 0.5, 2.0)));
        assert!(a.overlaps(&BoundaryArc::new(0, 6.0, 0.2)));
        assert!(!a.overlaps(&BoundaryArc::new(0, 1.5, 3.0)));
        assert!(!a.overlaps(&BoundaryArc::whole(1)));
        assert!(BoundaryArc::whole(0).overlaps(&a));
    }
}
