//! Harmonic analysis of excursion-reflected Brownian motion (ERBM) on bounded
//! multiply connected planar domains.
//!
//! The crate is layered bottom-up:
//!
//! - [`geometry`]: smooth boundary curves, domains, collar curves, domain files.
//! - [`bm_kernels`]: a Nyström boundary-integral Dirichlet solver and the
//!   ordinary Brownian kernels built on it (Green's function, Poisson and
//!   boundary Poisson kernels, harmonic and excursion measure, fluxes).
//! - [`erbm`]: the period matrix, ER-harmonic solves, the ER Poisson kernel and
//!   Green's functions, collar restart densities and the boundary chain.
//! - [`slitmap`]: conformal maps onto chordal, bilateral and radial slit
//!   domains, harmonic conjugates, level-curve tracing and field diagnostics.
//! - [`sampler`]: walk-on-spheres ERBM paths and empirical estimators.
//! - [`cli`]: the command-line front end.

pub mod bm_kernels;
pub mod cli;
pub mod erbm;
mod error;
pub mod geometry;
pub mod report;
pub mod sampler;
pub mod slitmap;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
