use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bm_kernels::{BoundaryPoint, Field, Singularity};
use crate::erbm::ErSystem;
use crate::error::{Error, Result};
use crate::geometry::{wrap_angle, Domain};

/// Chordal maps are not evaluated within this distance of the pole `w`.
pub const POLE_EXCLUSION: f64 = 1e-2;
/// Two slit heights closer than this are treated as coinciding.
pub const PLATEAU_COINCIDENCE: f64 = 1e-9;
/// Chordal anchor: inward offset (fraction of the diameter) from the point opposite `w`.
pub const ANCHOR_OFFSET: f64 = 0.1;
const GOLDEN_TOLERANCE: f64 = 1e-10;
const INJECTIVITY_PAIRS: usize = 100;

/// Logarithmic terms sharing one complementary region (a hole, the exterior,
/// or a single interior pole). Their sum is `total·log(z − base)` plus
/// single-valued logs of ratios `(z − c)/(z − base)`.
#[derive(Debug, Clone)]
struct LogGroup {
    base: Complex64,
    /// Logs are taken of `(z − base)·cut`; exterior groups rotate the branch
    /// cut to point away from the domain.
    cut: Complex64,
    terms: Vec<(Complex64, f64)>,
    total: f64,
}

impl LogGroup {
    fn log(&self, z: Complex64) -> Complex64 {
        ((z - self.base) * self.cut).ln()
    }

    fn ratio_part(&self, z: Complex64) -> Complex64 {
        self.terms.iter().map(|(c, a)| a * ((z - c) / (z - self.base)).ln()).sum()
    }
}

fn group_logs(domain: &Domain, terms: Vec<(Complex64, f64)>) -> Vec<LogGroup> {
    // Region key: hole index, 0 for the exterior, or usize::MAX for interior poles.
    let region = |c: Complex64| -> usize {
        for (i, h) in domain.holes().iter().enumerate() {
            if h.encloses(c) {
                return i + 1;
            }
        }
        if domain.outer().encloses(c) {
            usize::MAX
        } else {
            0
        }
    };
    let mut groups: Vec<(usize, LogGroup)> = Vec::new();
    for (c, a) in terms {
        let key = region(c);
        let existing = if key == usize::MAX { None } else { groups.iter_mut().find(|(k, _)| *k == key) };
        match existing {
            Some((_, g)) => {
                g.terms.push((c, a));
                g.total += a;
            }
            None => {
                let base = if (1..=domain.hole_count()).contains(&key) { domain.hole_point(key) } else { c };
                let cut = if key == 0 {
                    let out = base - domain.outer().kind().center();
                    -out.conj() / out.norm()
                } else {
                    Complex64::new(1.0, 0.0)
                };
                groups.push((key, LogGroup { base, cut, terms: vec![(c, a)], total: a }));
            }
        }
    }
    groups.into_iter().map(|(_, g)| g).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapKind {
    /// `f = i Ψ + x0`, `Im f = v`.
    Chordal,
    /// `f = e^{−Ψ}` up to a rotation, `|f| = e^{−u}`.
    Bilateral,
    Radial,
}

/// Holomorphic map assembled from the complex potential `Ψ` of a real
/// harmonic field (`Re Ψ` = the field).
///
/// Evaluation uses the layer representation of `Ψ` directly, which is single
/// valued wherever the field's fluxes make the map single valued; the path
/// quadrature in [`super::harmonic_conjugate`] is an independent check.
#[derive(Debug, Clone)]
pub struct AnalyticMapField {
    kind: MapKind,
    field: Field,
    groups: Vec<LogGroup>,
    anchor: Complex64,
    shift: f64,
    rotation: Complex64,
    pole: Option<Complex64>,
}

impl AnalyticMapField {
    fn new(kind: MapKind, field: Field, anchor: Complex64, pole: Option<Complex64>) -> Self {
        let groups = group_logs(field.domain(), field.log_terms());
        Self { kind, field, groups, anchor, shift: 0.0, rotation: Complex64::new(1.0, 0.0), pole }
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    /// The real harmonic field whose potential defines the map (`v` for the
    /// chordal map, `u` for the exponential ones).
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn domain(&self) -> &Domain {
        self.field.domain()
    }

    /// Point where the normalization is pinned.
    pub fn anchor(&self) -> Complex64 {
        self.anchor
    }

    fn dipoles(&self, z: Complex64) -> Complex64 {
        self.field.singular.iter().filter(|s| matches!(s, Singularity::Dipole { .. })).map(|s| s.potential(z)).sum()
    }

    /// `sv` is the single-valued part of the potential at `z`.
    fn assemble(&self, z: Complex64, sv: Complex64) -> Complex64 {
        match self.kind {
            MapKind::Chordal => {
                let logs: Complex64 = self.groups.iter().map(|g| g.total * g.log(z) + g.ratio_part(z)).sum();
                Complex64::i() * (sv + logs) + self.shift
            }
            MapKind::Bilateral | MapKind::Radial => {
                let mut factor = Complex64::new(1.0, 0.0);
                let mut exponent = sv;
                for g in &self.groups {
                    let m = g.total.round();
                    exponent += g.ratio_part(z) + (g.total - m) * g.log(z);
                    factor *= (z - g.base).powi(-(m as i32));
                }
                self.rotation * factor * (-exponent).exp()
            }
        }
    }

    /// `f(z)` at an interior point.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if let Some(w) = self.pole {
            if (z - w).norm() < POLE_EXCLUSION {
                return Err(Error::NearPole { limit: POLE_EXCLUSION });
            }
        }
        let sv = self.field.single_valued_potential(z).ok_or(Error::OutsideDomain { x: z.re, y: z.im })?;
        Ok(self.assemble(z, sv))
    }

    /// `f′(z)`.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        let dpsi = self.field.gradient(z).conj();
        Ok(match self.kind {
            MapKind::Chordal => Complex64::i() * dpsi,
            _ => -dpsi * self.eval(z)?,
        })
    }

    /// Boundary value of `f` at `γ_c(t)`.
    pub fn eval_boundary(&self, c: usize, t: f64) -> Complex64 {
        let z = self.domain().component(c).point(t);
        let (phi, _) = self.field.regular.boundary_phi_at(c, t);
        self.assemble(z, phi + self.dipoles(z))
    }
}

/// One horizontal slit of the chordal image domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChordalSlit {
    pub hole: usize,
    pub height: f64,
    pub x_min: f64,
    pub x_max: f64,
    /// Standard deviation of `Im f` over the hole's boundary nodes.
    pub flatness: f64,
}

/// Upper half-plane minus horizontal slits.
#[derive(Debug, Clone)]
pub struct ChordalSlitDomain {
    pub slits: Vec<ChordalSlit>,
    /// Random interior pairs with coinciding images (expected 0).
    pub injectivity_failures: usize,
}

/// A concentric circular arc of a circular-slit image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularArc {
    pub hole: usize,
    pub radius: f64,
    /// Angular interval `[theta0, theta1]`, `theta0 ∈ [0, 2π)`, `theta1 > theta0`.
    pub theta0: f64,
    pub theta1: f64,
    /// Largest `| |f| − radius |` over the hole's boundary nodes.
    pub radial_deviation: f64,
}

/// Annulus `ρ < |w| < 1` minus concentric arcs.
#[derive(Debug, Clone)]
pub struct CircularSlitRing {
    pub hole: usize,
    pub inner_radius: f64,
    /// Largest `| |f| − ρ |` over the nodes of the inner hole.
    pub inner_deviation: f64,
    pub arcs: Vec<CircularArc>,
}

/// Unit disk minus concentric arcs.
#[derive(Debug, Clone)]
pub struct CircularSlitDisk {
    pub center: Complex64,
    pub arcs: Vec<CircularArc>,
}

/// Minimum and maximum of `f` over one period, by node sampling followed by
/// golden-section refinement of the best bracket.
fn extrema(f: impl Fn(f64) -> f64, n: usize) -> (f64, f64) {
    let h = TAU / n as f64;
    let vals: Vec<f64> = (0..n).map(|k| f(k as f64 * h)).collect();
    let argmin = (0..n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    let argmax = (0..n).max_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    let lo = golden(&f, argmin as f64 * h - h, argmin as f64 * h + h).min(vals[argmin]);
    let hi = -golden(|t| -f(t), argmax as f64 * h - h, argmax as f64 * h + h).min(-vals[argmax]);
    (lo, hi)
}

fn golden(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > GOLDEN_TOLERANCE {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    fc.min(fd)
}

fn std_dev(v: &[f64]) -> f64 {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
}

fn random_interior(domain: &Domain, rng: &mut ChaCha8Rng, margin: f64) -> Complex64 {
    let p = domain.outer().polyline();
    let (mut lo, mut hi) = (p[0], p[0]);
    for z in p {
        lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
        hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
    }
    loop {
        let z = Complex64::new(rng.random_range(lo.re..hi.re), rng.random_range(lo.im..hi.im));
        if domain.contains(z) && domain.distance_to_boundary(z) > margin {
            return z;
        }
    }
}

/// Chordal map for the outer boundary point with parameter `t_w`:
/// `Im f = H^ER_D(·, w)`, `f(w) = ∞`, holes onto horizontal slits at heights
/// `H^ER(A_i, w)`. `Re f` is pinned to 0 at the anchor.
pub fn chordal_map(system: &ErSystem, t_w: f64) -> Result<(AnalyticMapField, ChordalSlitDomain)> {
    let domain = system.domain();
    let w = BoundaryPoint::outer(t_w);
    let kernel = system.er_poisson_kernel(w)?;
    let g = domain.boundary_geometry(0, t_w + PI);
    let anchor = g.point + ANCHOR_OFFSET * domain.diameter() * g.normal;
    let pole = domain.boundary_point(0, w.t);
    let mut map = AnalyticMapField::new(MapKind::Chordal, kernel.field().clone(), anchor, Some(pole));
    map.shift = -map.eval(anchor)?.re;

    let mut slits = Vec::new();
    for i in 1..=domain.hole_count() {
        let n = domain.component(i).node_count();
        let (x_min, x_max) = extrema(|t| map.eval_boundary(i, t).re, n);
        let heights: Vec<f64> = crate::spectral::nodes(n).map(|t| map.eval_boundary(i, t).im).collect();
        slits.push(ChordalSlit { hole: i, height: kernel.component_value(i), x_min, x_max, flatness: std_dev(&heights) });
    }
    for (a, s) in slits.iter().enumerate() {
        for t in &slits[a + 1..] {
            if (s.height - t.height).abs() < PLATEAU_COINCIDENCE && s.x_min <= t.x_max && t.x_min <= s.x_max {
                return Err(Error::PlateauDegeneracy { first: s.hole, second: t.hole, height: s.height });
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5117);
    let margin = 1e-3 * domain.diameter();
    let mut failures = 0;
    let mut checked = 0;
    while checked < INJECTIVITY_PAIRS {
        let (a, b) = (random_interior(domain, &mut rng, margin), random_interior(domain, &mut rng, margin));
        let (Ok(fa), Ok(fb)) = (map.eval(a), map.eval(b)) else { continue };
        checked += 1;
        if (fa - fb).norm() <= 1e-12 * (fa.norm() + fb.norm()) {
            failures += 1;
        }
    }
    Ok((map, ChordalSlitDomain { slits, injectivity_failures: failures }))
}

fn normalize_rotation(map: &mut AnalyticMapField) {
    let raw = map.eval_boundary(0, 0.0);
    map.rotation = raw.conj() / raw.norm();
}

/// Arc traced by the image of hole `j`: radius `e^{−u(A_j)}` and the range of
/// the continuous argument of `f` along the hole boundary.
fn image_arc(map: &AnalyticMapField, j: usize, value: f64) -> CircularArc {
    let domain = map.domain();
    let n = domain.component(j).node_count();
    let radius = (-value).exp();
    let ts: Vec<f64> = crate::spectral::nodes(n).collect();
    let fs: Vec<Complex64> = ts.iter().map(|&t| map.eval_boundary(j, t)).collect();
    let mut theta = vec![fs[0].arg()];
    for k in 1..n {
        theta.push(theta[k - 1] + (fs[k] / fs[k - 1]).arg());
    }
    let h = TAU / n as f64;
    let local = |k: usize, t: f64| theta[k] + (map.eval_boundary(j, t) / fs[k]).arg();
    let kmin = (0..n).min_by(|&a, &b| theta[a].total_cmp(&theta[b])).unwrap();
    let kmax = (0..n).max_by(|&a, &b| theta[a].total_cmp(&theta[b])).unwrap();
    let lo = golden(|t| local(kmin, t), ts[kmin] - h, ts[kmin] + h).min(theta[kmin]);
    let hi = -golden(|t| -local(kmax, t), ts[kmax] - h, ts[kmax] + h).min(-theta[kmax]);
    let deviation = fs.iter().map(|f| (f.norm() - radius).abs()).fold(0.0, f64::max);
    let theta0 = wrap_angle(lo);
    CircularArc { hole: j, radius, theta0, theta1: theta0 + (hi - lo), radial_deviation: deviation }
}

/// Bilateral map for hole `i`: `f = e^{−(u + iv)}` with `u = π G^ER_D(A_i, ·)`,
/// outer curve onto the unit circle, hole `i` onto the inner circle, other
/// holes onto concentric arcs. Rotation fixed by `f(γ_0(0)) > 0`.
pub fn bilateral_map(system: &ErSystem, i: usize) -> Result<(AnalyticMapField, CircularSlitRing)> {
    let g = system.er_green_component(i)?;
    let u = Field::combine(&[(PI, g.field())]);
    let anchor = system.domain().boundary_point(0, 0.0);
    let mut map = AnalyticMapField::new(MapKind::Bilateral, u, anchor, None);
    normalize_rotation(&mut map);
    let domain = system.domain();
    let inner_radius = (-PI * g.component_value(i)).exp();
    let inner_deviation = crate::spectral::nodes(domain.component(i).node_count())
        .map(|t| (map.eval_boundary(i, t).norm() - inner_radius).abs())
        .fold(0.0, f64::max);
    let arcs = (1..=domain.hole_count()).filter(|&j| j != i).map(|j| image_arc(&map, j, PI * g.component_value(j))).collect();
    Ok((map, CircularSlitRing { hole: i, inner_radius, inner_deviation, arcs }))
}

/// Radial map for the interior point `z0`: `f = e^{−(u + iv)}` with
/// `u = π G^ER_D(z0, ·)`, `f(z0) = 0`, outer curve onto the unit circle and
/// every hole onto a concentric arc. Rotation fixed by `f(γ_0(0)) > 0`.
pub fn radial_map(system: &ErSystem, z0: Complex64) -> Result<(AnalyticMapField, CircularSlitDisk)> {
    let g = system.er_green(z0)?;
    let u = Field::combine(&[(PI, g.field())]);
    let anchor = system.domain().boundary_point(0, 0.0);
    let mut map = AnalyticMapField::new(MapKind::Radial, u, anchor, None);
    normalize_rotation(&mut map);
    let arcs = (1..=system.hole_count()).map(|j| image_arc(&map, j, PI * g.component_value(j))).collect();
    Ok((map, CircularSlitDisk { center: z0, arcs }))
}
