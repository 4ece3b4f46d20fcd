//! Potential theory of ordinary Brownian motion on a [`Domain`]: the
//! Dirichlet solver and the kernels built on it.
//!
//! Conventions: the Green's function carries the singularity `−(1/π) log|z−w|`
//! (occupation density of planar Brownian motion), the Poisson kernel is
//! `H_D(z,w) = ½ ∂G/∂n_w` with `n_w` pointing into `D`, and the boundary
//! Poisson kernel is the inward normal derivative of `H_D` in its first argument.

mod field;
mod kernels;
mod solver;

pub use field::{argument_increment, flux, flux_with_nodes, Field, FnField, HarmonicEvaluator, Singularity, FLUX_CLEARANCE};
pub use kernels::{BoundaryArc, BoundaryPoint, GreenField, Potential, DIAGONAL_LIMIT, POLE_CLEARANCE};
pub use solver::{ComponentNodes, DirichletSolver, Discretization, HarmonicSolution};

use num_complex::Complex64;

use crate::error::Result;
use crate::geometry::Domain;

pub fn solve_dirichlet(domain: &Domain, data: impl Fn(usize, f64, Complex64) -> f64) -> Result<HarmonicSolution> {
    Ok(DirichletSolver::new(domain)?.solve_fn(data))
}

pub fn greens_function(domain: &Domain, z: Complex64) -> Result<GreenField> {
    Potential::new(domain)?.greens_function(z)
}

pub fn poisson_kernel(domain: &Domain, z: Complex64, w: BoundaryPoint) -> Result<f64> {
    Potential::new(domain)?.poisson_kernel(z, w)
}

pub fn boundary_poisson_kernel(domain: &Domain, w: BoundaryPoint, z: BoundaryPoint) -> Result<f64> {
    Potential::new(domain)?.boundary_poisson_kernel(w, z)
}

pub fn harmonic_measure(domain: &Domain, z: Complex64, arc: BoundaryArc) -> Result<f64> {
    Potential::new(domain)?.harmonic_measure(z, arc)
}

pub fn excursion_measure(domain: &Domain, v: BoundaryArc, v2: BoundaryArc) -> Result<f64> {
    Potential::new(domain)?.excursion_measure(v, v2)
}

pub fn h_basis(domain: &Domain, i: usize) -> Result<HarmonicSolution> {
    Potential::new(domain)?.h_basis(i)
}
