//! Nyström discretization of the Dirichlet problem.
//!
//! A harmonic function is represented as
//!
//! ```text
//! u(z) = Re Φ(z) + Σ_k A_k log|z − p_k|,    Φ(z) = (1/2πi) ∮_Γ μ(ζ)/(ζ − z) dζ
//! ```
//!
//! with a real density μ on the positively oriented boundary Γ (outer curve
//! counterclockwise, holes clockwise) and `p_k` a fixed point inside hole `k`.
//! The extra unknowns `A_k` are balanced by requiring μ to have zero mean on
//! every hole, which removes the null space of the double layer on multiply
//! connected domains.
//!
//! Interior values use the barycentric form of Cauchy's formula applied to the
//! boundary values Φ₊, upsampling a component when the target is close to it.

use std::f64::consts::{PI, TAU};
use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::spectral::{self, TrigSeries};

/// Upsampling factors for near-boundary evaluation.
const FINE_FACTORS: [usize; 3] = [4, 16, 64];
/// A target closer than `NEAR_FACTOR` node spacings to a component triggers upsampling.
const NEAR_FACTOR: f64 = 4.0;
/// Below this fraction of the node spacing, values come from a Taylor expansion
/// about the nearest boundary point.
const TAYLOR_FRACTION: f64 = 1.0 / 16.0;
/// Outside points farther than this fraction of the diameter evaluate to NaN.
const EXTENSION_LIMIT: f64 = 0.05;
/// Rank-deficiency threshold on the condition estimate.
const SINGULAR_CONDITION: f64 = 1e12;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Quadrature nodes on one boundary component.
#[derive(Debug, Clone)]
pub struct ComponentNodes {
    pub t: Vec<f64>,
    pub z: Vec<Complex64>,
    /// γ'(t)
    pub d1: Vec<Complex64>,
    /// γ''(t)
    pub d2: Vec<Complex64>,
    /// Oriented quadrature weights `σ γ'(t) dt`.
    pub w: Vec<Complex64>,
    pub speed: Vec<f64>,
    /// Unit normal pointing into the domain.
    pub normal: Vec<Complex64>,
    /// +1 on the outer curve, −1 on holes.
    pub sigma: f64,
    pub dt: f64,
    /// Largest distance between consecutive nodes.
    pub spacing: f64,
}

impl ComponentNodes {
    fn new(domain: &Domain, c: usize, n: usize) -> Self {
        let curve = domain.component(c);
        let sigma = if c == 0 { 1.0 } else { -1.0 };
        let dt = TAU / n as f64;
        let t: Vec<f64> = spectral::nodes(n).collect();
        let z: Vec<Complex64> = t.iter().map(|&t| curve.point(t)).collect();
        let d1: Vec<Complex64> = t.iter().map(|&t| curve.derivative(t, 1)).collect();
        let d2 = t.iter().map(|&t| curve.derivative(t, 2)).collect();
        let w = d1.iter().map(|d| d * (sigma * dt)).collect();
        let speed: Vec<f64> = d1.iter().map(|d| d.norm()).collect();
        let normal = d1.iter().zip(&speed).map(|(d, s)| I * d * (sigma / s)).collect();
        let spacing = (0..n).map(|j| (z[(j + 1) % n] - z[j]).norm()).fold(0.0, f64::max);
        Self { t, z, d1, d2, w, speed, normal, sigma, dt, spacing }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Arclength weights `|γ'| dt`.
    pub fn arclength_weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.speed.iter().map(move |s| s * self.dt)
    }
}

/// Boundary nodes of a domain plus lazily built upsampled copies.
#[derive(Debug)]
pub struct Discretization {
    domain: Domain,
    comps: Vec<ComponentNodes>,
    offsets: Vec<usize>,
    size: usize,
    fine: Vec<[OnceLock<ComponentNodes>; 3]>,
}

/// Where an evaluation point sits relative to the boundary.
#[derive(Debug, Clone)]
pub(crate) enum Placement {
    /// Barycentric Cauchy sum with the given upsampling level per component
    /// (0 = base nodes, `l ≥ 1` = `FINE_FACTORS[l-1]`).
    Interior(Vec<u8>),
    /// Taylor expansion about `(component, t)`.
    Taylor(usize, f64),
    Outside,
}

impl Discretization {
    pub fn new(domain: &Domain) -> Self {
        let comps: Vec<ComponentNodes> =
            (0..domain.component_count()).map(|c| ComponentNodes::new(domain, c, domain.component(c).node_count())).collect();
        let mut offsets = Vec::with_capacity(comps.len() + 1);
        let mut acc = 0;
        for c in &comps {
            offsets.push(acc);
            acc += c.len();
        }
        offsets.push(acc);
        let fine = comps.iter().map(|_| Default::default()).collect();
        Self { domain: domain.clone(), comps, offsets, size: acc, fine }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn component(&self, c: usize) -> &ComponentNodes {
        &self.comps[c]
    }

    pub fn components(&self) -> &[ComponentNodes] {
        &self.comps
    }

    /// Index of the first node of component `c` in concatenated node vectors.
    pub fn offset(&self, c: usize) -> usize {
        self.offsets[c]
    }

    /// Total number of boundary nodes.
    pub fn node_total(&self) -> usize {
        self.size
    }

    pub fn hole_count(&self) -> usize {
        self.comps.len() - 1
    }

    fn fine_nodes(&self, c: usize, level: u8) -> &ComponentNodes {
        if level == 0 {
            return &self.comps[c];
        }
        let l = level as usize - 1;
        self.fine[c][l].get_or_init(|| ComponentNodes::new(&self.domain, c, self.comps[c].len() * FINE_FACTORS[l]))
    }

    pub(crate) fn place(&self, z: Complex64) -> Placement {
        let diam = self.domain.diameter();
        let mut levels = vec![0u8; self.comps.len()];
        let mut any_near = false;
        for (c, nodes) in self.comps.iter().enumerate() {
            let dmin = nodes.z.iter().map(|p| (p - z).norm_sqr()).fold(f64::INFINITY, f64::min).sqrt();
            if dmin >= NEAR_FACTOR * nodes.spacing {
                continue;
            }
            any_near = true;
            let (t, d) = self.domain.component(c).nearest(z);
            let g = self.domain.boundary_geometry(c, t);
            let inside = ((z - g.point) * g.normal.conj()).re > 0.0;
            if !inside {
                return if d < EXTENSION_LIMIT * diam { Placement::Taylor(c, t) } else { Placement::Outside };
            }
            if d < TAYLOR_FRACTION * nodes.spacing {
                return Placement::Taylor(c, t);
            }
            let level = if d >= NEAR_FACTOR * nodes.spacing {
                0
            } else {
                FINE_FACTORS
                    .iter()
                    .position(|&f| NEAR_FACTOR * nodes.spacing / f as f64 <= d)
                    .map_or(FINE_FACTORS.len() as u8, |p| p as u8 + 1)
            };
            levels[c] = level;
        }
        if !any_near {
            // Far from the boundary the discrete Cauchy integral of 1 is 2πi inside, ~0 outside.
            let den: Complex64 = self.comps.iter().flat_map(|n| n.z.iter().zip(&n.w).map(move |(p, w)| w / (p - z))).sum();
            if (den / (TAU * I) - 1.0).norm() > 0.5 {
                return Placement::Outside;
            }
        }
        Placement::Interior(levels)
    }
}

/// Factored Nyström system for one domain; solves any number of Dirichlet problems.
#[derive(Clone)]
pub struct DirichletSolver {
    inner: Arc<SolverInner>,
}

struct SolverInner {
    disc: Arc<Discretization>,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    condition: f64,
}

impl std::fmt::Debug for DirichletSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DirichletSolver").field("unknowns", &self.unknowns()).field("condition", &self.inner.condition).finish()
    }
}

impl DirichletSolver {
    pub fn new(domain: &Domain) -> Result<Self> {
        let disc = Arc::new(Discretization::new(domain));
        let m = disc.size + disc.hole_count();
        let matrix = assemble(&disc);
        let norm1 = (0..m).map(|j| matrix.column(j).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
        let lu = matrix.lu();
        if !lu.is_invertible() {
            return Err(Error::SolverSingular { condition: f64::INFINITY });
        }
        let condition = norm1 * inverse_norm_estimate(&lu, m);
        if !condition.is_finite() || condition > SINGULAR_CONDITION {
            return Err(Error::SolverSingular { condition });
        }
        Ok(Self { inner: Arc::new(SolverInner { disc, lu, condition }) })
    }

    pub fn domain(&self) -> &Domain {
        self.inner.disc.domain()
    }

    pub fn discretization(&self) -> &Arc<Discretization> {
        &self.inner.disc
    }

    /// 1-norm condition estimate of the Nyström matrix.
    pub fn condition(&self) -> f64 {
        self.inner.condition
    }

    pub fn unknowns(&self) -> usize {
        self.inner.disc.size + self.inner.disc.hole_count()
    }

    /// Solves with boundary data given at the concatenated nodes.
    pub fn solve(&self, data: &[f64]) -> HarmonicSolution {
        let disc = &self.inner.disc;
        assert_eq!(data.len(), disc.size, "one datum per boundary node");
        let mut rhs = DVector::zeros(self.unknowns());
        rhs.rows_mut(0, disc.size).copy_from_slice(data);
        let x = self.inner.lu.solve(&rhs).expect("factorization checked at construction");
        HarmonicSolution::from_density(disc.clone(), x.as_slice())
    }

    /// Solves with data `f(component, t, point)`.
    pub fn solve_fn(&self, f: impl Fn(usize, f64, Complex64) -> f64) -> HarmonicSolution {
        self.solve(&self.sample(f))
    }

    /// Solves several problems at once; `data` holds one column per problem.
    pub fn solve_many(&self, data: &[Vec<f64>]) -> Vec<HarmonicSolution> {
        let disc = &self.inner.disc;
        let mut rhs = DMatrix::zeros(self.unknowns(), data.len());
        for (k, d) in data.iter().enumerate() {
            assert_eq!(d.len(), disc.size, "one datum per boundary node");
            rhs.view_mut((0, k), (disc.size, 1)).copy_from_slice(d);
        }
        let x = self.inner.lu.solve(&rhs).expect("factorization checked at construction");
        (0..data.len()).into_par_iter().map(|k| HarmonicSolution::from_density(disc.clone(), x.column(k).as_slice())).collect()
    }

    /// Samples `f(component, t, point)` at the boundary nodes.
    pub fn sample(&self, f: impl Fn(usize, f64, Complex64) -> f64) -> Vec<f64> {
        let disc = &self.inner.disc;
        disc.comps.iter().enumerate().flat_map(|(c, n)| n.t.iter().zip(&n.z).map(move |(&t, &z)| (c, t, z))).map(|(c, t, z)| f(c, t, z)).collect()
    }

    /// Harmonic measure of whole component `c`: data 1 on `c`, 0 elsewhere.
    pub fn component_measure(&self, c: usize) -> HarmonicSolution {
        self.solve_fn(|k, _, _| if k == c { 1.0 } else { 0.0 })
    }
}

fn assemble(disc: &Discretization) -> DMatrix<f64> {
    let size = disc.size;
    let n_holes = disc.hole_count();
    let m = size + n_holes;
    let locate: Vec<(usize, usize)> = disc.comps.iter().enumerate().flat_map(|(c, n)| (0..n.len()).map(move |j| (c, j))).collect();
    let hole_points: Vec<Complex64> = (1..=n_holes).map(|k| disc.domain.hole_point(k)).collect();
    let rows: Vec<Vec<f64>> = (0..size)
        .into_par_iter()
        .map(|i| {
            let (ci, ji) = locate[i];
            let ni = &disc.comps[ci];
            let zi = ni.z[ji];
            let mut row = vec![0.0; m];
            let mut col = 0;
            for nodes in &disc.comps {
                for (zj, wj) in nodes.z.iter().zip(&nodes.w) {
                    if col != i {
                        row[col] = (wj / (zj - zi)).im / TAU;
                    }
                    col += 1;
                }
            }
            row[i] = 0.5 + ni.sigma * (ni.d2[ji] / ni.d1[ji]).im * ni.dt / (4.0 * PI);
            for (k, p) in hole_points.iter().enumerate() {
                row[size + k] = (zi - p).norm().ln();
            }
            row
        })
        .collect();
    let mut a = DMatrix::zeros(m, m);
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            a[(i, j)] = *v;
        }
    }
    for k in 1..=n_holes {
        let nodes = &disc.comps[k];
        let len: f64 = nodes.arclength_weights().sum();
        for (j, w) in nodes.arclength_weights().enumerate() {
            a[(size + k - 1, disc.offsets[k] + j)] = w / len;
        }
    }
    a
}

/// Lower bound on `‖A⁻¹‖₁` from a few probe solves.
fn inverse_norm_estimate(lu: &nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>, m: usize) -> f64 {
    let probes: [Box<dyn Fn(usize) -> f64>; 3] = [
        Box::new(|_| 1.0),
        Box::new(|i| if i % 2 == 0 { 1.0 } else { -1.0 }),
        Box::new(|i| ((i as f64 * 0.618_033_988_749_895).fract() - 0.5) * 2.0),
    ];
    probes
        .iter()
        .map(|p| {
            let b = DVector::from_fn(m, |i, _| p(i));
            match lu.solve(&b) {
                Some(x) => x.iter().map(|v| v.abs()).sum::<f64>() / b.iter().map(|v| v.abs()).sum::<f64>(),
                None => f64::INFINITY,
            }
        })
        .fold(0.0, f64::max)
}

/// A solved Dirichlet problem.
#[derive(Clone)]
pub struct HarmonicSolution {
    inner: Arc<SolutionData>,
}

struct SolutionData {
    disc: Arc<Discretization>,
    mu: Vec<f64>,
    logs: Vec<f64>,
    /// Φ₊ at the nodes.
    phi: Vec<Complex64>,
    /// Φ'₊ at the nodes.
    dphi: Vec<Complex64>,
    series: OnceLock<Vec<ComponentSeries>>,
    fine: Vec<[OnceLock<FineValues>; 3]>,
}

struct ComponentSeries {
    /// Φ₊ and its first three derivatives with respect to z, as functions of t.
    derivs: [TrigSeries; 4],
}

struct FineValues {
    phi: Vec<Complex64>,
    dphi: Vec<Complex64>,
}

impl std::fmt::Debug for HarmonicSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HarmonicSolution").field("nodes", &self.inner.mu.len()).field("log_coefficients", &self.inner.logs).finish()
    }
}

impl HarmonicSolution {
    fn from_density(disc: Arc<Discretization>, x: &[f64]) -> Self {
        let size = disc.size;
        let mu = x[..size].to_vec();
        let logs = x[size..].to_vec();
        let mut dmu = Vec::with_capacity(size);
        for (c, nodes) in disc.comps.iter().enumerate() {
            let o = disc.offsets[c];
            dmu.extend(spectral::differentiate_real(&mu[o..o + nodes.len()]));
        }
        let all: Vec<(Complex64, Complex64)> = disc.comps.iter().flat_map(|n| n.z.iter().copied().zip(n.w.iter().copied())).collect();
        let meta: Vec<(f64, f64)> = disc.comps.iter().flat_map(|n| std::iter::repeat_n((n.sigma, n.dt), n.len())).collect();
        let phi: Vec<Complex64> = (0..size)
            .into_par_iter()
            .map(|i| {
                let (zi, _) = all[i];
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, (zj, wj)) in all.iter().enumerate() {
                    if j != i {
                        acc += (mu[j] - mu[i]) * wj / (zj - zi);
                    }
                }
                let (sigma, dt) = meta[i];
                acc += sigma * dmu[i] * dt;
                mu[i] + acc / (TAU * I)
            })
            .collect();
        let mut dphi = Vec::with_capacity(size);
        for (c, nodes) in disc.comps.iter().enumerate() {
            let o = disc.offsets[c];
            let d = spectral::differentiate(&phi[o..o + nodes.len()]);
            dphi.extend(d.iter().zip(&nodes.d1).map(|(d, g)| d / g));
        }
        Self::from_parts(disc, mu, logs, phi, dphi)
    }

    fn from_parts(disc: Arc<Discretization>, mu: Vec<f64>, logs: Vec<f64>, phi: Vec<Complex64>, dphi: Vec<Complex64>) -> Self {
        let fine = disc.comps.iter().map(|_| Default::default()).collect();
        Self { inner: Arc::new(SolutionData { disc, mu, logs, phi, dphi, series: OnceLock::new(), fine }) }
    }

    /// `Σ αₖ uₖ` for solutions on the same discretization.
    pub fn combine(terms: &[(f64, &HarmonicSolution)]) -> Self {
        assert!(!terms.is_empty(), "empty combination");
        let disc = terms[0].1.inner.disc.clone();
        assert!(terms.iter().all(|(_, s)| Arc::ptr_eq(&s.inner.disc, &disc)), "solutions from different discretizations");
        let mut mu = vec![0.0; disc.size];
        let mut logs = vec![0.0; disc.hole_count()];
        let mut phi = vec![Complex64::new(0.0, 0.0); disc.size];
        let mut dphi = phi.clone();
        for (a, s) in terms {
            let d = &s.inner;
            for j in 0..disc.size {
                mu[j] += a * d.mu[j];
                phi[j] += a * d.phi[j];
                dphi[j] += a * d.dphi[j];
            }
            for (l, v) in logs.iter_mut().zip(&d.logs) {
                *l += a * v;
            }
        }
        Self::from_parts(disc, mu, logs, phi, dphi)
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self::combine(&[(a, self)])
    }

    pub fn discretization(&self) -> &Arc<Discretization> {
        &self.inner.disc
    }

    pub fn domain(&self) -> &Domain {
        self.inner.disc.domain()
    }

    /// Coefficients `A_k` of `log|z − p_k|`, one per hole.
    pub fn log_coefficients(&self) -> &[f64] {
        &self.inner.logs
    }

    pub fn density(&self) -> &[f64] {
        &self.inner.mu
    }

    fn series(&self) -> &[ComponentSeries] {
        self.inner.series.get_or_init(|| {
            let disc = &self.inner.disc;
            disc.comps
                .iter()
                .enumerate()
                .map(|(c, nodes)| {
                    let o = disc.offsets[c];
                    let phi = TrigSeries::from_samples(&self.inner.phi[o..o + nodes.len()]);
                    let d1 = TrigSeries::from_samples(&self.inner.dphi[o..o + nodes.len()]);
                    let d2s: Vec<Complex64> =
                        spectral::differentiate(&self.inner.dphi[o..o + nodes.len()]).iter().zip(&nodes.d1).map(|(d, g)| d / g).collect();
                    let d3s: Vec<Complex64> = spectral::differentiate(&d2s).iter().zip(&nodes.d1).map(|(d, g)| d / g).collect();
                    ComponentSeries { derivs: [phi, d1, TrigSeries::from_samples(&d2s), TrigSeries::from_samples(&d3s)] }
                })
                .collect()
        })
    }

    fn fine_values(&self, c: usize, level: u8) -> Option<&FineValues> {
        if level == 0 {
            return None;
        }
        let l = level as usize - 1;
        Some(self.inner.fine[c][l].get_or_init(|| {
            let m = self.inner.disc.comps[c].len() * FINE_FACTORS[l];
            let s = &self.series()[c];
            FineValues { phi: s.derivs[0].resample(m), dphi: s.derivs[1].resample(m) }
        }))
    }

    /// Φ(z) and Φ'(z), or `None` outside the domain.
    pub fn phi(&self, z: Complex64) -> Option<(Complex64, Complex64)> {
        self.phi_placed(z, &self.inner.disc.place(z))
    }

    pub(crate) fn phi_placed(&self, z: Complex64, placement: &Placement) -> Option<(Complex64, Complex64)> {
        let disc = &self.inner.disc;
        match placement {
            Placement::Outside => None,
            Placement::Taylor(c, t) => {
                let s = &self.series()[*c];
                let d = z - disc.domain.component(*c).point(*t);
                let v: Vec<Complex64> = s.derivs.iter().map(|s| s.eval(*t)).collect();
                let phi = v[0] + d * (v[1] + d * (v[2] / 2.0 + d * v[3] / 6.0));
                let dphi = v[1] + d * (v[2] + d * v[3] / 2.0);
                Some((phi, dphi))
            }
            Placement::Interior(levels) => {
                let mut num = Complex64::new(0.0, 0.0);
                let mut dnum = Complex64::new(0.0, 0.0);
                let mut den = Complex64::new(0.0, 0.0);
                for (c, &level) in levels.iter().enumerate() {
                    let nodes = disc.fine_nodes(c, level);
                    let (phi, dphi) = match self.fine_values(c, level) {
                        Some(f) => (&f.phi[..], &f.dphi[..]),
                        None => {
                            let o = disc.offsets[c];
                            (&self.inner.phi[o..o + nodes.len()], &self.inner.dphi[o..o + nodes.len()])
                        }
                    };
                    for j in 0..nodes.len() {
                        let diff = nodes.z[j] - z;
                        if diff.norm_sqr() == 0.0 {
                            return Some((phi[j], dphi[j]));
                        }
                        let k = nodes.w[j] / diff;
                        num += phi[j] * k;
                        dnum += dphi[j] * k;
                        den += k;
                    }
                }
                Some((num / den, dnum / den))
            }
        }
    }

    fn log_part(&self, z: Complex64) -> (f64, Complex64) {
        let disc = &self.inner.disc;
        let mut v = 0.0;
        let mut g = Complex64::new(0.0, 0.0);
        for (k, a) in self.inner.logs.iter().enumerate() {
            let d = z - disc.domain.hole_point(k + 1);
            v += a * d.norm().ln();
            g += a * d / d.norm_sqr();
        }
        (v, g)
    }

    /// `u(z)`; NaN outside the domain.
    pub fn value(&self, z: Complex64) -> f64 {
        match self.phi(z) {
            Some((p, _)) => p.re + self.log_part(z).0,
            None => f64::NAN,
        }
    }

    /// `∇u(z)` encoded as `u_x + i u_y`; NaN outside the domain.
    pub fn gradient(&self, z: Complex64) -> Complex64 {
        match self.phi(z) {
            Some((_, d)) => d.conj() + self.log_part(z).1,
            None => Complex64::new(f64::NAN, f64::NAN),
        }
    }

    /// Value and gradient in one pass.
    pub fn value_gradient(&self, z: Complex64) -> (f64, Complex64) {
        match self.phi(z) {
            Some((p, d)) => {
                let (lv, lg) = self.log_part(z);
                (p.re + lv, d.conj() + lg)
            }
            None => (f64::NAN, Complex64::new(f64::NAN, f64::NAN)),
        }
    }

    /// Complex potential `Φ(z) + Σ A_k log(z − p_k)` (principal logarithm), so
    /// that `u = Re`; its imaginary part jumps across branch cuts when `A_k ≠ 0`.
    pub fn potential(&self, z: Complex64) -> Option<Complex64> {
        let (p, _) = self.phi(z)?;
        Some(p + self.log_potential(z))
    }

    /// The single-valued part Φ(z).
    pub fn single_valued_potential(&self, z: Complex64) -> Option<Complex64> {
        self.phi(z).map(|(p, _)| p)
    }

    pub(crate) fn log_potential(&self, z: Complex64) -> Complex64 {
        let disc = &self.inner.disc;
        self.inner.logs.iter().enumerate().map(|(k, a)| a * (z - disc.domain.hole_point(k + 1)).ln()).sum()
    }

    /// Φ₊ at the nodes of component `c`.
    pub fn boundary_phi(&self, c: usize) -> &[Complex64] {
        let disc = &self.inner.disc;
        let o = disc.offsets[c];
        &self.inner.phi[o..o + disc.comps[c].len()]
    }

    /// Φ'₊ at the nodes of component `c`.
    pub fn boundary_dphi(&self, c: usize) -> &[Complex64] {
        let disc = &self.inner.disc;
        let o = disc.offsets[c];
        &self.inner.dphi[o..o + disc.comps[c].len()]
    }

    /// Φ₊ and Φ'₊ at an arbitrary parameter on component `c` (trigonometric interpolation).
    pub fn boundary_phi_at(&self, c: usize, t: f64) -> (Complex64, Complex64) {
        let s = &self.series()[c];
        (s.derivs[0].eval(t), s.derivs[1].eval(t))
    }

    /// Boundary trace `u(γ_c(t))`.
    pub fn boundary_value(&self, c: usize, t: f64) -> f64 {
        let z = self.inner.disc.domain.component(c).point(t);
        self.boundary_phi_at(c, t).0.re + self.log_part(z).0
    }

    /// One-sided boundary gradient at `γ_c(t)`.
    pub fn boundary_gradient(&self, c: usize, t: f64) -> Complex64 {
        let z = self.inner.disc.domain.component(c).point(t);
        self.boundary_phi_at(c, t).1.conj() + self.log_part(z).1
    }

    /// Boundary gradient at every node of component `c`.
    pub fn boundary_gradients(&self, c: usize) -> Vec<Complex64> {
        let nodes = &self.inner.disc.comps[c];
        self.boundary_dphi(c).iter().zip(&nodes.z).map(|(d, &z)| d.conj() + self.log_part(z).1).collect()
    }

    /// Boundary values at every node of component `c`.
    pub fn boundary_values(&self, c: usize) -> Vec<f64> {
        let nodes = &self.inner.disc.comps[c];
        self.boundary_phi(c).iter().zip(&nodes.z).map(|(p, &z)| p.re + self.log_part(z).0).collect()
    }

    /// Derivative along the normal pointing into the domain, at every node of `c`.
    pub fn inward_normal_derivatives(&self, c: usize) -> Vec<f64> {
        let nodes = &self.inner.disc.comps[c];
        self.boundary_gradients(c).iter().zip(&nodes.normal).map(|(g, n)| (g * n.conj()).re).collect()
    }
}
