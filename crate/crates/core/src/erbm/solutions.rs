use num_complex::Complex64;

use crate::bm_kernels::{Field, HarmonicEvaluator, Singularity};
use crate::geometry::Domain;

/// Smoothing half-width, in outer-curve node spacings, of the indicator data
/// used by [`super::ErSystem::er_harmonic_measure_smoothed`].
pub const MOLLIFIER_NODES: usize = 2;

/// An ER-harmonic function: harmonic part plus `Σ c_i ω_i`, constant `c_i`
/// on hole `i` with zero flux around every hole.
#[derive(Debug, Clone)]
pub struct ERHarmonicSolution {
    field: Field,
    constants: Vec<f64>,
    condition: f64,
}

impl ERHarmonicSolution {
    pub(crate) fn new(field: Field, constants: Vec<f64>, condition: f64) -> Self {
        Self { field, constants, condition }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn domain(&self) -> &Domain {
        self.field.domain()
    }

    pub fn value(&self, z: Complex64) -> f64 {
        self.field.value(z)
    }

    pub fn gradient(&self, z: Complex64) -> Complex64 {
        self.field.gradient(z)
    }

    pub fn value_gradient(&self, z: Complex64) -> (f64, Complex64) {
        self.field.value_gradient(z)
    }

    /// Value on hole `i` (1-based).
    pub fn component_value(&self, i: usize) -> f64 {
        self.constants[i - 1]
    }

    pub fn constants(&self) -> &[f64] {
        &self.constants
    }

    /// Condition number of the period solve that produced the constants.
    pub fn condition(&self) -> f64 {
        self.condition
    }
}

impl HarmonicEvaluator for ERHarmonicSolution {
    fn value(&self, z: Complex64) -> f64 {
        self.field.value(z)
    }
    fn gradient(&self, z: Complex64) -> Complex64 {
        self.field.gradient(z)
    }
    fn value_gradient(&self, z: Complex64) -> (f64, Complex64) {
        self.field.value_gradient(z)
    }
    fn domain(&self) -> Option<&Domain> {
        Some(self.field.domain())
    }
    fn singular_points(&self) -> Vec<Complex64> {
        self.field.singular.iter().map(|s| s.point()).collect()
    }
    fn plateaus(&self) -> Vec<(usize, f64)> {
        self.constants.iter().enumerate().map(|(i, &c)| (i + 1, c)).collect()
    }
}

/// Source of an ER Green's function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GreenSource {
    Point(Complex64),
    Hole(usize),
}

/// `G^ER_D(source, ·)`: zero on the outer curve, constant on every hole, with
/// flux −2 around the source and 0 around every other hole.
#[derive(Debug, Clone)]
pub struct ERGreenField {
    source: GreenSource,
    field: Field,
    constants: Vec<f64>,
    condition: f64,
}

impl ERGreenField {
    pub(crate) fn new(source: GreenSource, field: Field, constants: Vec<f64>, condition: f64) -> Self {
        Self { source, field, constants, condition }
    }

    pub fn source(&self) -> GreenSource {
        self.source
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn domain(&self) -> &Domain {
        self.field.domain()
    }

    pub fn value(&self, z: Complex64) -> f64 {
        self.field.value(z)
    }

    pub fn gradient(&self, z: Complex64) -> Complex64 {
        self.field.gradient(z)
    }

    pub fn value_gradient(&self, z: Complex64) -> (f64, Complex64) {
        self.field.value_gradient(z)
    }

    pub fn component_value(&self, i: usize) -> f64 {
        self.constants[i - 1]
    }

    pub fn constants(&self) -> &[f64] {
        &self.constants
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// `∫_D G^ER(z, w) dA(w)` for a point source: the expected time ERBM from
    /// `z` spends in `D` before leaving through the outer curve. Green's
    /// identity with `q = |w − o|²/4` (so `Δq = 1`) turns it into boundary
    /// integrals of `q ∂G/∂n` plus the hole constants times the hole areas.
    pub fn occupation_integral(&self) -> Option<f64> {
        let GreenSource::Point(z) = self.source else {
            return None;
        };
        let d = self.domain();
        let o = d.outer().kind().center();
        let q = |w: Complex64| 0.25 * (w - o).norm_sqr();
        let disc = self.field.regular.discretization();
        let mut total = -2.0 * q(z);
        for c in 0..d.component_count() {
            let nodes = disc.component(c);
            let dn = self.field.inward_normal_derivatives(c);
            total += nodes.z.iter().zip(nodes.arclength_weights()).zip(&dn).map(|((&w, ds), g)| q(w) * g * ds).sum::<f64>();
        }
        for (i, h) in d.holes().iter().enumerate() {
            total -= self.constants[i] * h.signed_area();
        }
        Some(total)
    }
}

impl HarmonicEvaluator for ERGreenField {
    fn value(&self, z: Complex64) -> f64 {
        self.field.value(z)
    }
    fn gradient(&self, z: Complex64) -> Complex64 {
        self.field.gradient(z)
    }
    fn value_gradient(&self, z: Complex64) -> (f64, Complex64) {
        self.field.value_gradient(z)
    }
    fn domain(&self) -> Option<&Domain> {
        Some(self.field.domain())
    }
    fn singular_points(&self) -> Vec<Complex64> {
        self.field
            .singular
            .iter()
            .filter(|s| matches!(s, Singularity::Log { center, .. } if self.field.domain().contains(*center)))
            .map(|s| s.point())
            .collect()
    }
    fn plateaus(&self) -> Vec<(usize, f64)> {
        self.constants.iter().enumerate().map(|(i, &c)| (i + 1, c)).collect()
    }
}

/// `E_z[τ]` for ERBM killed on the outer curve: `h(z) − |z − o|²/2` with `h`
/// harmonic; the hole values are the expected times from each hole.
#[derive(Debug, Clone)]
pub struct ExpectedExitTime {
    center: Complex64,
    harmonic: Field,
    constants: Vec<f64>,
}

impl ExpectedExitTime {
    pub(crate) fn new(center: Complex64, harmonic: Field, constants: Vec<f64>) -> Self {
        Self { center, harmonic, constants }
    }

    pub fn value(&self, z: Complex64) -> f64 {
        self.harmonic.value(z) - 0.5 * (z - self.center).norm_sqr()
    }

    pub fn component_value(&self, i: usize) -> f64 {
        self.constants[i - 1]
    }
}
