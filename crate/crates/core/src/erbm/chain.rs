use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::bm_kernels::DirichletSolver;
use crate::error::{Error, Result};
use crate::geometry::{CollarCurve, Domain};
use crate::spectral::TrigSeries;

/// Intervals in the inverse-CDF table of a restart density.
pub const CDF_TABLE_SIZE: usize = 1024;

/// Where ERBM restarts after hitting hole `i`: the hitting density on the
/// collar `η_i` of Brownian motion from the hole, computed in the ring `U_i`
/// between the hole and its collar as `∂_n v / ℰ_U(A_i, η_i)` with
/// `v = hm_U(·, ∂A_i)` and `n` pointing into `U_i`.
#[derive(Debug, Clone)]
pub struct RestartDensity {
    collar: CollarCurve,
    t: Vec<f64>,
    points: Vec<Complex64>,
    density: Vec<f64>,
    masses: Vec<f64>,
    series: TrigSeries,
    total: f64,
    cdf: Vec<f64>,
    excursion: f64,
    crossing_time: f64,
}

impl RestartDensity {
    pub fn new(domain: &Domain, i: usize, collar_factor: f64) -> Result<Self> {
        Self::from_collar(domain, domain.collar_curve(i, collar_factor)?)
    }

    pub fn from_collar(domain: &Domain, collar: CollarCurve) -> Result<Self> {
        let i = collar.hole_index;
        let hole = domain.component(i).clone();
        let ring = Domain::new(collar.curve.clone(), vec![hole.clone()])
            .map_err(|e| Error::ClearanceTooSmall { hole: i, reason: format!("collar ring invalid: {e}") })?;
        let solver = DirichletSolver::new(&ring)?;
        let v = solver.component_measure(1);
        let disc = solver.discretization();
        let nodes = disc.component(0);
        let dn = v.inward_normal_derivatives(0);
        let weights: Vec<f64> = nodes.arclength_weights().collect();
        let excursion: f64 = dn.iter().zip(&weights).map(|(d, w)| d * w).sum();
        let density: Vec<f64> = dn.iter().map(|d| d / excursion).collect();
        let masses: Vec<f64> = density.iter().zip(&weights).map(|(p, w)| p * w).collect();

        // ∫_U v dA by Green's identity with q = |z − p|²/4, Δq = 1.
        let p = domain.hole_point(i);
        let q = |z: Complex64| 0.25 * (z - p).norm_sqr();
        let mut area_integral = -hole.signed_area();
        for c in 0..2 {
            let comp = disc.component(c);
            let dn = v.inward_normal_derivatives(c);
            area_integral += comp.z.iter().zip(comp.arclength_weights()).zip(&dn).map(|((&z, w), d)| q(z) * d * w).sum::<f64>();
        }
        let crossing_time = 2.0 * area_integral / excursion;

        let per_parameter: Vec<f64> = density.iter().zip(&nodes.speed).map(|(p, s)| p * s).collect();
        let series = TrigSeries::from_real_samples(&per_parameter);
        let total = series.integrate(0.0, TAU).re;
        let mut cdf = Vec::with_capacity(CDF_TABLE_SIZE + 1);
        let mut prev = 0.0f64;
        for k in 0..=CDF_TABLE_SIZE {
            let t = TAU * k as f64 / CDF_TABLE_SIZE as f64;
            let c = (series.integrate(0.0, t).re / total).clamp(0.0, 1.0).max(prev);
            cdf.push(c);
            prev = c;
        }
        cdf[CDF_TABLE_SIZE] = 1.0;
        Ok(Self {
            t: nodes.t.clone(),
            points: nodes.z.clone(),
            collar,
            density,
            masses,
            series,
            total,
            cdf,
            excursion,
            crossing_time,
        })
    }

    pub fn hole(&self) -> usize {
        self.collar.hole_index
    }

    pub fn collar(&self) -> &CollarCurve {
        &self.collar
    }

    /// Collar parameters of the quadrature nodes.
    pub fn nodes(&self) -> &[f64] {
        &self.t
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Density per unit arclength at the nodes.
    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// Density per unit arclength at collar parameter `t`.
    pub fn density_at(&self, t: f64) -> f64 {
        self.series.eval(t).re / self.collar.curve.derivative(t, 1).norm()
    }

    /// Quadrature mass of each node; sums to 1.
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// `∫_η ρ ds` of the interpolated density.
    pub fn total_mass(&self) -> f64 {
        self.total
    }

    /// `ℰ_U(A_i, η_i)`.
    pub fn excursion_measure(&self) -> f64 {
        self.excursion
    }

    /// Expected time Brownian motion started at the hole (as ERBM) spends in
    /// the ring before reaching the collar: `(2/ℰ_U) ∫_U v dA`.
    pub fn mean_crossing_time(&self) -> f64 {
        self.crossing_time
    }

    pub fn cdf_table(&self) -> &[f64] {
        &self.cdf
    }

    /// `∫_η ρ f ds`.
    pub fn integrate(&self, f: impl Fn(Complex64) -> f64) -> f64 {
        self.points.iter().zip(&self.masses).map(|(&z, m)| m * f(z)).sum()
    }

    /// Collar parameter with CDF value `u ∈ [0, 1)`, by linear interpolation in the table.
    pub fn sample_parameter(&self, u: f64) -> f64 {
        let k = self.cdf.partition_point(|&c| c <= u).clamp(1, CDF_TABLE_SIZE);
        let (c0, c1) = (self.cdf[k - 1], self.cdf[k]);
        let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        TAU * ((k - 1) as f64 + frac.clamp(0.0, 1.0)) / CDF_TABLE_SIZE as f64
    }

    pub fn sample(&self, u: f64) -> Complex64 {
        self.collar.curve.point(self.sample_parameter(u))
    }
}

/// Component-hit chain of ERBM. Rows are holes `1..=n`; column 0 is the
/// outer curve (absorbing) and column `k` is hole `k`.
///
/// `q` records every hit after one restart (including the return to the
/// same hole) and depends on the collar; `p̃` is the chain of successive
/// distinct components, `p̃[i][k] = q[i][k] / (1 − q[i][i])`.
#[derive(Debug, Clone)]
pub struct BoundaryChain {
    q: Vec<Vec<f64>>,
    p_tilde: Vec<Vec<f64>>,
    collar_factor: f64,
}

impl BoundaryChain {
    pub fn new(q: Vec<Vec<f64>>, collar_factor: f64) -> Self {
        let p_tilde = q
            .iter()
            .enumerate()
            .map(|(r, row)| {
                let stay = row[r + 1];
                row.iter().enumerate().map(|(k, &x)| if k == r + 1 { 0.0 } else { x / (1.0 - stay) }).collect()
            })
            .collect();
        Self { q, p_tilde, collar_factor }
    }

    pub fn hole_count(&self) -> usize {
        self.q.len()
    }

    pub fn collar_factor(&self) -> f64 {
        self.collar_factor
    }

    /// `q[i][k]`, hole `i ∈ 1..=n`, component `k ∈ 0..=n`.
    pub fn q(&self, i: usize, k: usize) -> f64 {
        self.q[i - 1][k]
    }

    pub fn p_tilde(&self, i: usize, k: usize) -> f64 {
        self.p_tilde[i - 1][k]
    }

    pub fn q_rows(&self) -> &[Vec<f64>] {
        &self.q
    }

    pub fn p_tilde_rows(&self) -> &[Vec<f64>] {
        &self.p_tilde
    }

    /// Largest `|Σ_k row[k] − 1|` over the rows of `q` and `p̃`.
    pub fn row_sum_deviation(&self) -> f64 {
        self.q
            .iter()
            .chain(&self.p_tilde)
            .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    fn hole_block(&self) -> DMatrix<f64> {
        let n = self.hole_count();
        DMatrix::from_fn(n, n, |i, k| self.p_tilde[i][k + 1])
    }

    /// Spectral radius of the hole-to-hole block of `p̃`.
    pub fn spectral_radius(&self) -> f64 {
        self.hole_block().complex_eigenvalues().iter().map(|l| l.norm()).fold(0.0, f64::max)
    }

    /// Probability of eventual absorption on the outer curve from each hole.
    pub fn absorption(&self) -> Vec<f64> {
        let n = self.hole_count();
        let a = DMatrix::identity(n, n) - self.hole_block();
        let b = DVector::from_fn(n, |i, _| self.p_tilde[i][0]);
        match a.lu().solve(&b) {
            Some(x) => x.iter().copied().collect(),
            None => vec![f64::NAN; n],
        }
    }
}
