//! Excursion-reflected Brownian motion on a domain with holes: the period
//! matrix of the hole basis, ER-harmonic solves, the ER Poisson kernel and
//! Green's functions, collar restart densities and the boundary chain.
//!
//! An ER-harmonic function is harmonic in `D`, constant on every hole and has
//! zero flux around every hole. Fluxes use the normal pointing away from the
//! hole they encircle.

mod chain;
mod period;
mod solutions;

pub use chain::{BoundaryChain, RestartDensity, CDF_TABLE_SIZE};
pub use period::{ErSystem, PeriodMatrix, PERIOD_CONDITION_LIMIT};
pub use solutions::{ERGreenField, ERHarmonicSolution, ExpectedExitTime, GreenSource, MOLLIFIER_NODES};

use num_complex::Complex64;

use crate::bm_kernels::{BoundaryArc, BoundaryPoint};
use crate::error::Result;
use crate::geometry::Domain;

/// Default collar offset as a fraction of the hole clearance.
pub const DEFAULT_COLLAR_FACTOR: f64 = 0.5;

/// Where an ERBM path starts: an interior point or a hole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Start {
    Point(Complex64),
    Hole(usize),
}

pub fn period_matrix(domain: &Domain, collar_factor: f64) -> Result<PeriodMatrix> {
    Ok(ErSystem::new(domain, collar_factor)?.period_matrix().clone())
}

pub fn solve_er_harmonic(domain: &Domain, data: impl Fn(f64, Complex64) -> f64) -> Result<ERHarmonicSolution> {
    ErSystem::new(domain, DEFAULT_COLLAR_FACTOR)?.solve_er_harmonic(data)
}

pub fn er_poisson_kernel(domain: &Domain, w: BoundaryPoint) -> Result<ERHarmonicSolution> {
    ErSystem::new(domain, DEFAULT_COLLAR_FACTOR)?.er_poisson_kernel(w)
}

pub fn er_green(domain: &Domain, z: Complex64) -> Result<ERGreenField> {
    ErSystem::new(domain, DEFAULT_COLLAR_FACTOR)?.er_green(z)
}

pub fn er_green_component(domain: &Domain, i: usize) -> Result<ERGreenField> {
    ErSystem::new(domain, DEFAULT_COLLAR_FACTOR)?.er_green_component(i)
}

pub fn restart_density(domain: &Domain, i: usize, collar_factor: f64) -> Result<RestartDensity> {
    RestartDensity::new(domain, i, collar_factor)
}

pub fn boundary_chain(domain: &Domain, collar_factor: f64) -> Result<BoundaryChain> {
    ErSystem::new(domain, collar_factor)?.boundary_chain()
}

pub fn er_harmonic_measure(domain: &Domain, start: Start, arc: BoundaryArc) -> Result<f64> {
    ErSystem::new(domain, DEFAULT_COLLAR_FACTOR)?.er_harmonic_measure(start, arc)
}
