use std::f64::consts::TAU;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, Dyn, LU};
use num_complex::Complex64;

use super::chain::{BoundaryChain, RestartDensity};
use super::solutions::{ERGreenField, ERHarmonicSolution, ExpectedExitTime, GreenSource, MOLLIFIER_NODES};
use super::Start;
use crate::bm_kernels::{flux, BoundaryArc, BoundaryPoint, Field, HarmonicSolution, Potential};
use crate::error::{Error, Result};
use crate::geometry::{CollarCurve, Domain};

/// Period matrices with a larger eigenvalue ratio are refused.
pub const PERIOD_CONDITION_LIMIT: f64 = 1e10;

/// `P[j][i] = flux(ω_i, η_j)`: the flux of the hole basis function `ω_i`
/// around hole `j`.
///
/// The table is taken from the logarithmic part of each `ω_i` (a harmonic
/// function's flux around hole `j` is `2π` times its log coefficient there),
/// which is exact and independent of the collar. The trapezoid fluxes over
/// the collars are kept alongside as an independent check.
#[derive(Debug, Clone)]
pub struct PeriodMatrix {
    table: DMatrix<f64>,
    collar_fluxes: DMatrix<f64>,
    collar_factor: f64,
    eigenvalues: Vec<f64>,
    condition: f64,
}

impl PeriodMatrix {
    fn new(table: DMatrix<f64>, collar_fluxes: DMatrix<f64>, collar_factor: f64) -> Self {
        let n = table.nrows();
        let (eigenvalues, condition) = if n == 0 {
            (Vec::new(), 1.0)
        } else {
            let sym = (&table + table.transpose()) * 0.5;
            let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
            ev.sort_by(|a, b| a.total_cmp(b));
            let big = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let small = ev.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
            (ev, big / small)
        };
        Self { table, collar_fluxes, collar_factor, eigenvalues, condition }
    }

    /// Number of holes.
    pub fn size(&self) -> usize {
        self.table.nrows()
    }

    /// `P[j][i]` for holes `j, i ∈ 1..=n`.
    pub fn entry(&self, j: usize, i: usize) -> f64 {
        self.table[(j - 1, i - 1)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.table
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.table.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    /// The same fluxes by trapezoid quadrature over the collar curves.
    pub fn collar_fluxes(&self) -> &DMatrix<f64> {
        &self.collar_fluxes
    }

    pub fn collar_factor(&self) -> f64 {
        self.collar_factor
    }

    /// Eigenvalues of the symmetric part, ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Ratio of the largest to the smallest eigenvalue magnitude.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// `‖P − Pᵀ‖ / ‖P‖` in the Frobenius norm.
    pub fn asymmetry(&self) -> f64 {
        if self.size() == 0 {
            return 0.0;
        }
        (&self.table - self.table.transpose()).norm() / self.table.norm()
    }

    /// Law of the next distinct component hit from each hole, in the layout
    /// of [`BoundaryChain::p_tilde_rows`]: by Green's identity the mass sent
    /// from hole `i` to component `k` is proportional to the flux of `ω_k`
    /// around hole `i`, whatever the collar.
    pub fn jump_probabilities(&self) -> Vec<Vec<f64>> {
        let n = self.size();
        (1..=n)
            .map(|i| {
                let total = -self.entry(i, i);
                let mut row = vec![0.0; n + 1];
                let mut to_holes = 0.0;
                for k in (1..=n).filter(|&k| k != i) {
                    row[k] = self.entry(i, k) / total;
                    to_holes += row[k];
                }
                row[0] = 1.0 - to_holes;
                row
            })
            .collect()
    }
}

/// ER potential theory of one domain: the Brownian kernels, the hole basis,
/// the period matrix and the collars of a fixed factor.
#[derive(Debug)]
pub struct ErSystem {
    potential: Potential,
    collars: Vec<CollarCurve>,
    period: PeriodMatrix,
    lu: Option<LU<f64, Dyn, Dyn>>,
    restarts: OnceLock<Result<Vec<RestartDensity>>>,
}

impl ErSystem {
    pub fn new(domain: &Domain, collar_factor: f64) -> Result<Self> {
        Self::with_potential(Potential::new(domain)?, collar_factor)
    }

    pub fn with_potential(potential: Potential, collar_factor: f64) -> Result<Self> {
        let domain = potential.domain();
        let n = domain.hole_count();
        let collars = (1..=n).map(|i| domain.collar_curve(i, collar_factor)).collect::<Result<Vec<_>>>()?;
        let omega = potential.component_measures();
        let table = DMatrix::from_fn(n, n, |j, i| TAU * omega[i + 1].log_coefficients()[j]);
        let mut quad = DMatrix::zeros(n, n);
        for (j, collar) in collars.iter().enumerate() {
            for i in 0..n {
                quad[(j, i)] = flux(&omega[i + 1], &collar.curve)?;
            }
        }
        let period = PeriodMatrix::new(table, quad, collar_factor);
        if period.condition() > PERIOD_CONDITION_LIMIT || !period.condition().is_finite() {
            return Err(Error::IllConditioned { condition: period.condition(), limit: PERIOD_CONDITION_LIMIT });
        }
        let lu = (n > 0).then(|| period.matrix().clone().lu());
        Ok(Self { potential, collars, period, lu, restarts: OnceLock::new() })
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn domain(&self) -> &Domain {
        self.potential.domain()
    }

    pub fn hole_count(&self) -> usize {
        self.domain().hole_count()
    }

    pub fn collar_factor(&self) -> f64 {
        self.period.collar_factor
    }

    pub fn collars(&self) -> &[CollarCurve] {
        &self.collars
    }

    pub fn period_matrix(&self) -> &PeriodMatrix {
        &self.period
    }

    /// Harmonic measure of component `c` (`ω_0` is the outer one).
    pub fn omega(&self, c: usize) -> &HarmonicSolution {
        &self.potential.component_measures()[c]
    }

    fn check_hole(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.hole_count() {
            return Err(Error::InvalidArgument(format!("hole index {i} out of range 1..={}", self.hole_count())));
        }
        Ok(())
    }

    /// Flux of `field` around every hole (normal pointing away from the hole).
    pub fn hole_fluxes(&self, field: &Field) -> Vec<f64> {
        (1..=self.hole_count()).map(|j| field.arc_normal_flux(BoundaryArc::whole(j))).collect()
    }

    /// Solves `P c = rhs`.
    pub fn solve_period(&self, rhs: &[f64]) -> Vec<f64> {
        match &self.lu {
            None => Vec::new(),
            Some(lu) => {
                let x = lu.solve(&DVector::from_column_slice(rhs)).expect("period matrix checked invertible");
                x.iter().copied().collect()
            }
        }
    }

    /// Adds `Σ c_i ω_i` to `field` so that its hole fluxes become `target`.
    fn complete(&self, field: Field, target: &[f64]) -> (Field, Vec<f64>) {
        let fluxes = self.hole_fluxes(&field);
        let rhs: Vec<f64> = target.iter().zip(&fluxes).map(|(t, f)| t - f).collect();
        let c = self.solve_period(&rhs);
        (self.add_basis(field, &c), c)
    }

    fn add_basis(&self, field: Field, c: &[f64]) -> Field {
        if c.is_empty() {
            return field;
        }
        let mut terms: Vec<(f64, &HarmonicSolution)> = vec![(1.0, &field.regular)];
        for (i, ci) in c.iter().enumerate() {
            terms.push((*ci, self.omega(i + 1)));
        }
        Field::new(HarmonicSolution::combine(&terms), field.singular.clone())
    }

    fn er_solution(&self, field: Field) -> ERHarmonicSolution {
        let (field, c) = self.complete(field, &vec![0.0; self.hole_count()]);
        ERHarmonicSolution::new(field, c, self.period.condition())
    }

    /// ER-harmonic function with boundary values `data(t, z)` on the outer curve.
    pub fn solve_er_harmonic(&self, data: impl Fn(f64, Complex64) -> f64) -> Result<ERHarmonicSolution> {
        let u0 = self.potential.solve_dirichlet(|c, t, z| if c == 0 { data(t, z) } else { 0.0 });
        Ok(self.er_solution(Field::regular(u0)))
    }

    /// `H^ER_D(·, w)` for `w` on the outer curve; hole values are `H^ER(A_i, w)`.
    pub fn er_poisson_kernel(&self, w: BoundaryPoint) -> Result<ERHarmonicSolution> {
        Ok(self.er_poisson_kernels(&[w])?.remove(0))
    }

    pub fn er_poisson_kernels(&self, ws: &[BoundaryPoint]) -> Result<Vec<ERHarmonicSolution>> {
        if let Some(w) = ws.iter().find(|w| w.component != 0) {
            return Err(Error::InvalidArgument(format!("ER Poisson kernel needs a point on the outer curve, got component {}", w.component)));
        }
        Ok(self.potential.poisson_kernel_fields(ws).into_iter().map(|f| self.er_solution(f)).collect())
    }

    /// `G^ER_D(z, ·)`: zero on the outer curve, constant with zero flux on every hole.
    pub fn er_green(&self, z: Complex64) -> Result<ERGreenField> {
        let g = self.potential.greens_function(z)?;
        let (field, c) = self.complete(g.field, &vec![0.0; self.hole_count()]);
        Ok(ERGreenField::new(GreenSource::Point(z), field, c, self.period.condition()))
    }

    /// `G^ER_D(A_i, ·) = Σ c_j ω_j` with flux −2 around hole `i` and 0 around the others.
    pub fn er_green_component(&self, i: usize) -> Result<ERGreenField> {
        self.check_hole(i)?;
        let mut rhs = vec![0.0; self.hole_count()];
        rhs[i - 1] = -2.0;
        let c = self.solve_period(&rhs);
        let zero = self.omega(0).scaled(0.0);
        let field = self.add_basis(Field::regular(zero), &c);
        Ok(ERGreenField::new(GreenSource::Hole(i), field, c, self.period.condition()))
    }

    /// `hm^ER(start, V)` for arcs of the outer curve.
    ///
    /// The ER-harmonic function with data `1_V` is `hm_D(·, V) + Σ c_j ω_j`,
    /// where the flux of `hm_D(·, V)` around hole `j` equals the flux of `ω_j`
    /// through `V` (Green's identity), so no boundary data needs smoothing.
    pub fn er_harmonic_measures(&self, start: Start, arcs: &[BoundaryArc]) -> Result<Vec<f64>> {
        if let Some(a) = arcs.iter().find(|a| a.component != 0) {
            return Err(Error::InvalidArgument(format!("ER harmonic measure needs arcs of the outer curve, got component {}", a.component)));
        }
        let n = self.hole_count();
        let omegas: Vec<Field> = (1..=n).map(|j| Field::regular(self.omega(j).clone())).collect();
        let green = match start {
            Start::Point(z) => Some(self.potential.greens_function(z)?),
            Start::Hole(i) => {
                self.check_hole(i)?;
                None
            }
        };
        Ok(arcs
            .iter()
            .map(|&arc| {
                let e: Vec<f64> = omegas.iter().map(|w| -w.arc_normal_flux(arc)).collect();
                let c = self.solve_period(&e);
                match (&green, start) {
                    (Some(g), Start::Point(z)) => {
                        let base = 0.5 * g.field.arc_normal_flux(arc);
                        base + c.iter().enumerate().map(|(j, cj)| cj * self.omega(j + 1).value(z)).sum::<f64>()
                    }
                    (_, Start::Hole(i)) => c[i - 1],
                    _ => unreachable!(),
                }
            })
            .collect())
    }

    pub fn er_harmonic_measure(&self, start: Start, arc: BoundaryArc) -> Result<f64> {
        Ok(self.er_harmonic_measures(start, std::slice::from_ref(&arc))?[0])
    }

    /// Cross-check of [`ErSystem::er_harmonic_measure`]: the ER-harmonic solve
    /// with the indicator of `arc` smoothed over [`MOLLIFIER_NODES`] node spacings.
    pub fn er_harmonic_measure_smoothed(&self, start: Start, arc: BoundaryArc) -> Result<f64> {
        let width = MOLLIFIER_NODES as f64 * TAU / self.domain().outer().node_count() as f64;
        let len = arc.parameter_length();
        let step = |x: f64| 0.5 * (1.0 + (x / width).tanh());
        let data = |t: f64, _| {
            let s = (t - arc.t0).rem_euclid(TAU);
            (-1..=1).map(|m| s + m as f64 * TAU).map(|s| step(s) - step(s - len)).sum::<f64>()
        };
        let u = self.solve_er_harmonic(data)?;
        Ok(match start {
            Start::Point(z) => u.value(z),
            Start::Hole(i) => {
                self.check_hole(i)?;
                u.component_value(i)
            }
        })
    }

    /// Expected time for ERBM to leave the domain through the outer curve.
    pub fn expected_exit_time(&self) -> ExpectedExitTime {
        let center = self.domain().outer().kind().center();
        let q = |z: Complex64| 0.5 * (z - center).norm_sqr();
        let h0 = self.potential.solve_dirichlet(|_, _, z| q(z));
        let target: Vec<f64> = self.domain().holes().iter().map(|h| 2.0 * h.signed_area()).collect();
        let (field, c) = self.complete(Field::regular(h0), &target);
        ExpectedExitTime::new(center, field, c)
    }

    pub fn restart_densities(&self) -> Result<&[RestartDensity]> {
        self.restarts
            .get_or_init(|| self.collars.iter().map(|c| RestartDensity::from_collar(self.domain(), c.clone())).collect())
            .as_deref()
            .map_err(Clone::clone)
    }

    pub fn restart_density(&self, i: usize) -> Result<&RestartDensity> {
        self.check_hole(i)?;
        Ok(&self.restart_densities()?[i - 1])
    }

    /// Component-hit chain of ERBM restarted on this system's collars.
    pub fn boundary_chain(&self) -> Result<BoundaryChain> {
        let n = self.hole_count();
        if n == 0 {
            return Err(Error::InvalidArgument("the boundary chain needs at least one hole".into()));
        }
        let q = self
            .restart_densities()?
            .iter()
            .map(|rd| (0..=n).map(|k| rd.integrate(|z| self.omega(k).value(z))).collect())
            .collect();
        Ok(BoundaryChain::new(q, self.collar_factor()))
    }
}
