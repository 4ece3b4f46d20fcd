use std::f64::consts::PI;
use std::fmt::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CliError, CliResult, Context, PointArgs};
use crate::bm_kernels::{flux, BoundaryPoint, Field, HarmonicEvaluator, Potential, Singularity};
use crate::erbm::{ErSystem, Start};
use crate::geometry::Domain;
use crate::report::Report;
use crate::sampler::{estimate_chain, estimate_exit_distribution, ChainEstimate};
use crate::slitmap::{
    bilateral_map, chordal_map, chordal_svg, conjugate_increment, disk_svg, domain_svg, field_csv, loop_path, map_csv,
    radial_map, ring_svg, trace_level_curve_from, GridSpec, LevelCurve,
};

const PROBE_SEED: u64 = 0x7a11;
const GRID: usize = 128;

/// Interior points drawn uniformly from the bounding box, at least `margin` from the boundary.
pub(super) fn probes(domain: &Domain, count: usize, margin: f64, seed: u64) -> Vec<Complex64> {
    let (lo, hi) = bounds(domain);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z = Complex64::new(rng.random_range(lo.re..hi.re), rng.random_range(lo.im..hi.im));
        if domain.contains(z) && domain.distance_to_boundary(z) > margin {
            out.push(z);
        }
    }
    out
}

pub(super) fn bounds(domain: &Domain) -> (Complex64, Complex64) {
    domain.outer().polyline().iter().fold(
        (Complex64::new(f64::INFINITY, f64::INFINITY), Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY)),
        |(lo, hi), z| (Complex64::new(lo.re.min(z.re), lo.im.min(z.im)), Complex64::new(hi.re.max(z.re), hi.im.max(z.im))),
    )
}

pub(super) fn grid(domain: &Domain, n: usize) -> GridSpec {
    let (lo, hi) = bounds(domain);
    GridSpec::square(n, lo, hi)
}

/// The node of a coarse grid farthest from the boundary.
pub(super) fn default_point(domain: &Domain) -> Complex64 {
    let spec = grid(domain, 41);
    let mut best = (f64::NEG_INFINITY, Complex64::new(0.0, 0.0));
    for j in 0..spec.ny {
        for i in 0..spec.nx {
            let z = spec.node(i, j);
            if domain.contains(z) {
                let d = domain.distance_to_boundary(z);
                if d > best.0 + 1e-12 {
                    best = (d, z);
                }
            }
        }
    }
    best.1
}

fn interior_point(ctx: &Context, p: &PointArgs, r: &mut Report) -> CliResult<Complex64> {
    let z = p.z.unwrap_or_else(|| default_point(&ctx.domain));
    if !ctx.domain.contains(z) {
        return Err(CliError::Usage(format!("--z {},{} is not in the domain", z.re, z.im)));
    }
    match p.z {
        Some(_) => r.input("z", format!("{}, {}", z.re, z.im)),
        None => r.text("z", format!("{}, {} (default)", z.re, z.im)),
    }
    Ok(z)
}

fn outer_parameter(p: &PointArgs, r: &mut Report) -> f64 {
    let w = p.w.unwrap_or(0.0);
    r.input("w", w);
    w
}

fn system(ctx: &Context) -> CliResult<ErSystem> {
    Ok(ErSystem::new(&ctx.domain, ctx.common.collar)?)
}

fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Largest flux of `field` across the collars of the holes that do not enclose `skip`.
fn collar_flux<F: HarmonicEvaluator + ?Sized>(system: &ErSystem, field: &F, skip: Option<Complex64>) -> CliResult<f64> {
    let mut worst: f64 = 0.0;
    for collar in system.collars() {
        if skip.is_some_and(|z| collar.curve.encloses(z)) {
            continue;
        }
        worst = worst.max(flux(field, &collar.curve)?.abs());
    }
    Ok(worst)
}

pub(super) fn pk(ctx: &Context, p: &PointArgs) -> CliResult<Report> {
    let mut r = ctx.report("pk");
    let z = interior_point(ctx, p, &mut r)?;
    let w = outer_parameter(p, &mut r);
    let tol = ctx.common.tol;
    let pot = Potential::new(&ctx.domain)?;
    let h = pot.poisson_kernel(z, BoundaryPoint::outer(w))?;
    r.section("results");
    r.scalar("poisson_kernel", h, tol);
    let measures = pot.component_harmonic_measures(z)?;
    r.row("harmonic_measure", &measures, tol);
    r.section("checks");
    r.check("unit_mass", (measures.iter().sum::<f64>() - 1.0).abs(), tol);
    r.check_that("positive", h > 0.0, "H > 0");
    let field = pot.poisson_kernel_field(BoundaryPoint::outer(w));
    ctx.write("pk.csv", &field_csv(&field, &grid(&ctx.domain, GRID)))?;
    ctx.write("domain.svg", &domain_svg(&ctx.domain, &[]))?;
    Ok(r)
}

pub(super) fn er_pk(ctx: &Context, p: &PointArgs) -> CliResult<Report> {
    let mut r = ctx.report("er-pk");
    let z = interior_point(ctx, p, &mut r)?;
    let w = outer_parameter(p, &mut r);
    let tol = ctx.common.tol;
    let s = system(ctx)?;
    let h = s.er_poisson_kernel(BoundaryPoint::outer(w))?;
    r.section("results");
    r.scalar("er_poisson_kernel", h.value(z), tol);
    r.row("constants", h.constants(), tol);
    r.section("checks");
    r.check("hole_flux", collar_flux(&s, &h, None)?, tol);
    r.check_that("positive", h.value(z) > 0.0, "H^ER > 0");
    ctx.write("er_pk.csv", &field_csv(&h, &grid(&ctx.domain, GRID)))?;
    Ok(r)
}

pub(super) fn green(ctx: &Context, p: &PointArgs) -> CliResult<Report> {
    let mut r = ctx.report("green");
    let z = interior_point(ctx, p, &mut r)?;
    let tol = ctx.common.tol;
    let pot = Potential::new(&ctx.domain)?;
    let g = pot.greens_function(z)?;
    // G(w) + (1/π) log|w − z| at w = z: the regular part plus any image source.
    let corrector = g.field.regular.value(z) + g.field.singular.iter().skip(1).map(|s: &Singularity| s.value(z)).sum::<f64>();
    r.section("results");
    r.scalar("corrector", corrector, tol);
    r.scalar("conformal_radius", (PI * corrector).exp(), tol);
    let pairs = probes(&ctx.domain, 5, 0.02 * ctx.domain.diameter(), PROBE_SEED);
    let mut asym: f64 = 0.0;
    for (k, &q) in pairs.iter().enumerate() {
        let a = g.value(q);
        r.scalar(&format!("green.{}", k + 1), a, tol);
        asym = asym.max((a - pot.greens_function(q)?.value(z)).abs());
    }
    r.section("checks");
    r.check("symmetry", asym, tol);
    ctx.write("green.csv", &field_csv(&g.field, &grid(&ctx.domain, GRID)))?;
    Ok(r)
}

pub(super) fn er_green(ctx: &Context, p: &PointArgs) -> CliResult<Report> {
    let mut r = ctx.report("er-green");
    let z = interior_point(ctx, p, &mut r)?;
    let tol = ctx.common.tol;
    let s = system(ctx)?;
    let g = s.er_green(z)?;
    let occupation = g.occupation_integral().unwrap_or(f64::NAN);
    let exit = s.expected_exit_time().value(z);
    r.section("results");
    r.row("constants", g.constants(), tol);
    r.scalar("occupation_integral", occupation, tol);
    r.scalar("expected_exit_time", exit, tol);
    r.section("checks");
    r.check("hole_flux", collar_flux(&s, &g, Some(z))?, tol);
    r.check("occupation_vs_exit_time", (occupation - exit).abs(), tol);
    ctx.write("er_green.csv", &field_csv(&g, &grid(&ctx.domain, GRID)))?;
    Ok(r)
}

fn write_matrix(r: &mut Report, name: &str, rows: &[Vec<f64>], tol: f64) {
    for (i, row) in rows.iter().enumerate() {
        r.row(&format!("{name}.{}", i + 1), row, tol);
    }
}

pub(super) fn chain(ctx: &Context) -> CliResult<Report> {
    let mut r = ctx.report("chain");
    let tol = ctx.common.tol;
    let s = system(ctx)?;
    if s.hole_count() == 0 {
        r.text("chain", "empty (no holes)");
        return Ok(r);
    }
    let chain = s.boundary_chain()?;
    r.section("results");
    write_matrix(&mut r, "q", chain.q_rows(), tol);
    write_matrix(&mut r, "p_tilde", chain.p_tilde_rows(), tol);
    r.scalar("spectral_radius", chain.spectral_radius(), tol);
    r.row("absorption", &chain.absorption(), tol);
    r.section("checks");
    r.check("row_sums", chain.row_sum_deviation(), tol);
    r.check_that("transient", chain.spectral_radius() < 1.0, "spectral radius < 1");
    let (lo, hi) = (0.8 * ctx.common.collar, 1.2 * ctx.common.collar);
    let a = ErSystem::new(&ctx.domain, lo)?.boundary_chain()?;
    let b = ErSystem::new(&ctx.domain, hi)?.boundary_chain()?;
    let diff = max_abs(a.p_tilde_rows().iter().flatten().zip(b.p_tilde_rows().iter().flatten()).map(|(x, y)| x - y));
    r.check("collar_independence", diff, 1e-4);
    Ok(r)
}

pub(super) fn map_chordal(ctx: &Context, p: &PointArgs) -> CliResult<Report> {
    let mut r = ctx.report("map-chordal");
    let w = outer_parameter(p, &mut r);
    let tol = ctx.common.tol;
    let s = system(ctx)?;
    let (f, slits) = chordal_map(&s, w)?;
    r.section("results");
    r.point("anchor", f.anchor(), tol);
    for slit in &slits.slits {
        let k = slit.hole;
        r.scalar(&format!("slit.{k}.height"), slit.height, tol);
        r.scalar(&format!("slit.{k}.x_min"), slit.x_min, tol);
        r.scalar(&format!("slit.{k}.x_max"), slit.x_max, tol);
        r.scalar(&format!("slit.{k}.aspect"), (slit.x_max - slit.x_min) / slit.height, tol);
    }
    r.section("checks");
    r.check("flatness", slits.slits.iter().map(|s| s.flatness).fold(0.0, f64::max), tol);
    r.check_that("injective", slits.injectivity_failures == 0, format!("{} failing pairs", slits.injectivity_failures));
    ctx.write("chordal.svg", &chordal_svg(&slits))?;
    ctx.write("chordal.csv", &map_csv(&f, &grid(&ctx.domain, GRID)))?;
    Ok(r)
}

pub(super) fn map_bilateral(ctx: &Context, hole: usize) -> CliResult<Report> {
    let mut r = ctx.report("map-bilateral");
    r.input("hole", hole);
    if hole == 0 || hole > ctx.domain.hole_count() {
        return Err(CliError::Usage(format!("--hole must be in 1..={}, got {hole}", ctx.domain.hole_count())));
    }
    let tol = ctx.common.tol;
    let s = system(ctx)?;
    let (f, ring) = bilateral_map(&s, hole)?;
    r.section("results");
    r.scalar("inner_radius", ring.inner_radius, tol);
    for arc in &ring.arcs {
        let k = arc.hole;
        r.scalar(&format!("arc.{k}.radius"), arc.radius, tol);
        r.scalar(&format!("arc.{k}.theta0"), arc.theta0, tol);
        r.scalar(&format!("arc.{k}.theta1"), arc.theta1, tol);
    }
    let g = s.er_green_component(hole)?;
    let u = Field::combine(&[(PI, g.field())]);
    let period = conjugate_increment(&u, &loop_path(&s.collars()[hole - 1].curve, 48))?;
    r.scalar("conjugate_period", period, 1e-4);
    r.section("checks");
    r.check("inner_circularity", ring.inner_deviation, tol);
    r.check("arc_circularity", ring.arcs.iter().map(|a| a.radial_deviation).fold(0.0, f64::max), tol);
    r.check("period", (period + 2.0 * PI).abs(), 1e-4);
    r.check("outer_modulus", outer_modulus_error(&ctx.domain, |t| f.eval_boundary(0, t)), 1e-5);
    ctx.write("ring.svg", &ring_svg(&ring))?;
    ctx.write("bilateral.csv", &map_csv(&f, &grid(&ctx.domain, GRID)))?;
    Ok(r)
}

pub(super) fn outer_modulus_error(domain: &Domain, f: impl Fn(f64) -> Complex64) -> f64 {
    let n = domain.outer().node_count();
    max_abs((0..n).map(|k| f(std::f64::consts::TAU * k as f64 / n as f64).norm() - 1.0))
}

/// `|f(z₀)|` by linear extrapolation, since `f` is not evaluated at its zero.
pub(super) fn zero_residual(f: impl Fn(Complex64) -> Option<Complex64>, z0: Complex64, delta: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for dir in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-0.6, 0.8)] {
        match (f(z0 + delta * dir), f(z0 + 2.0 * delta * dir)) {
            (Some(a), Some(b)) => worst = worst.max((2.0 * a - b).norm()),
            _ => return f64::INFINITY,
        }
    }
    worst
}

pub(super) fn map_radial(ctx: &Context, p: &PointArgs) -> CliResult<Report> {
    let mut r = ctx.report("map-radial");
    let z0 = interior_point(ctx, p, &mut r)?;
    let tol = ctx.common.tol;
    let s = system(ctx)?;
    let (f, disk) = radial_map(&s, z0)?;
    let g = s.er_green(z0)?;
    r.section("results");
    let mut radius_error: f64 = 0.0;
    for arc in &disk.arcs {
        let k = arc.hole;
        r.scalar(&format!("arc.{k}.radius"), arc.radius, tol);
        r.scalar(&format!("arc.{k}.theta0"), arc.theta0, tol);
        r.scalar(&format!("arc.{k}.theta1"), arc.theta1, tol);
        radius_error = radius_error.max((arc.radius - (-PI * g.component_value(k)).exp()).abs());
    }
    r.section("checks");
    r.check("zero_at_z", zero_residual(|z| f.eval(z).ok(), z0, 1e-4 * ctx.domain.diameter()), tol);
    r.check("arc_circularity", disk.arcs.iter().map(|a| a.radial_deviation).fold(0.0, f64::max), 1e-5);
    r.check("arc_radius_vs_green", radius_error, 1e-5);
    r.check("outer_modulus", outer_modulus_error(&ctx.domain, |t| f.eval_boundary(0, t)), 1e-5);
    ctx.write("radial.svg", &disk_svg(&disk))?;
    ctx.write("radial.csv", &map_csv(&f, &grid(&ctx.domain, GRID)))?;
    Ok(r)
}

/// Probe points the curve classifies wrongly: inside must exceed the level.
pub(super) fn separation_errors(curve: &LevelCurve, value: impl Fn(Complex64) -> f64, domain: &Domain, count: usize) -> usize {
    let guard = curve.max_spacing();
    probes(domain, count, 1e-3 * domain.diameter(), PROBE_SEED + 1)
        .into_iter()
        .filter(|z| !curve.points.iter().any(|p| (p - z).norm() < guard))
        .filter(|&z| {
            let v = value(z);
            if curve.encloses(z) {
                v <= curve.level
            } else {
                v >= curve.level
            }
        })
        .count()
}

/// A seed for level `r`: the probe whose value is nearest to `r`.
fn level_seed<F: HarmonicEvaluator + ?Sized>(field: &F, domain: &Domain, r: f64) -> Complex64 {
    probes(domain, 400, 1e-3 * domain.diameter(), PROBE_SEED + 2)
        .into_iter()
        .min_by(|a, b| (field.value(*a) - r).abs().total_cmp(&(field.value(*b) - r).abs()))
        .unwrap_or_else(|| default_point(domain))
}

fn report_curve<F: HarmonicEvaluator + ?Sized>(ctx: &Context, r: &mut Report, field: &F, curve: &LevelCurve) -> CliResult<()> {
    let diam = ctx.domain.diameter();
    r.section("results");
    r.count("points", curve.points.len());
    r.scalar("length", curve.length(), ctx.common.tol);
    r.section("checks");
    r.check("closure", curve.closure_gap, 1e-6 * diam);
    r.check_that("simple", curve.simple, "no self-intersection");
    let wrong = separation_errors(curve, |z| field.value(z), &ctx.domain, 1000);
    r.check_that("separation", wrong == 0, format!("{wrong} of 1000 probes misclassified"));
    let mut csv = String::from("x,y\n");
    for z in &curve.points {
        let _ = writeln!(csv, "{:.12},{:.12}", z.re, z.im);
    }
    ctx.write("level.csv", &csv)?;
    ctx.write("level.svg", &domain_svg(&ctx.domain, std::slice::from_ref(curve)))?;
    Ok(())
}

pub(super) fn trace(ctx: &Context, p: &PointArgs, level: f64) -> CliResult<Report> {
    let mut r = ctx.report("trace");
    r.input("level", level);
    let s = system(ctx)?;
    if p.z.is_some() {
        let z = interior_point(ctx, p, &mut r)?;
        r.text("field", "er-green");
        let g = s.er_green(z)?;
        let curve = trace_level_curve_from(&g, level, level_seed(&g, &ctx.domain, level))?;
        report_curve(ctx, &mut r, &g, &curve)?;
    } else {
        let w = outer_parameter(p, &mut r);
        r.text("field", "er-pk");
        let h = s.er_poisson_kernel(BoundaryPoint::outer(w))?;
        let curve = trace_level_curve_from(&h, level, level_seed(&h, &ctx.domain, level))?;
        report_curve(ctx, &mut r, &h, &curve)?;
    }
    Ok(r)
}

/// Reports an estimated chain next to the exact one; returns the worst deviation in standard errors.
pub(super) fn report_chain(r: &mut Report, prefix: &str, system: &ErSystem, est: &ChainEstimate) -> CliResult<f64> {
    let chain = system.boundary_chain()?;
    let mut worst: f64 = 0.0;
    for i in 1..=system.hole_count() {
        for k in 0..=system.hole_count() {
            let (q, qe) = (est.q[i - 1][k], est.q_error[i - 1][k]);
            let (pt, pe) = (est.p_tilde[i - 1][k], est.p_tilde_error[i - 1][k]);
            r.estimate(&format!("{prefix}q.{i}.{k}"), q, qe);
            r.estimate(&format!("{prefix}p_tilde.{i}.{k}"), pt, pe);
            for (x, e, exact) in [(q, qe, chain.q(i, k)), (pt, pe, chain.p_tilde(i, k))] {
                let dev = (x - exact).abs();
                worst = worst.max(if dev <= 1e-12 { 0.0 } else { dev / e.max(1e-300) });
            }
        }
    }
    Ok(worst)
}

pub(super) fn sample(ctx: &Context, p: &PointArgs, hole: Option<usize>, bins: usize) -> CliResult<Report> {
    let mut r = ctx.report("sample");
    let config = ctx.run_config();
    r.input("seed", config.seed);
    r.input("paths", config.path_count);
    r.input("bins", bins);
    let s = system(ctx)?;
    let start = match hole {
        Some(i) => {
            r.input("hole", i);
            Start::Hole(i)
        }
        None => Start::Point(interior_point(ctx, p, &mut r)?),
    };
    let est = estimate_exit_distribution(&s, start, bins, &config)?;
    r.section("results");
    let n = est.distribution.total as f64;
    for (k, (&f, &m)) in est.distribution.frequencies().iter().zip(&est.reference).enumerate() {
        r.estimate(&format!("exit.{k}"), f, (m * (1.0 - m) / n).sqrt());
    }
    r.count("truncated", est.truncated);
    let mut chain_sigmas = None;
    if s.hole_count() > 0 {
        let chain = estimate_chain(&s, &config)?;
        chain_sigmas = Some(report_chain(&mut r, "", &s, &chain)?);
    }
    r.section("checks");
    r.check("total_variation", est.total_variation, 0.02);
    r.check("truncation_rate", est.truncated as f64 / n, 1e-4);
    if let Some(sig) = chain_sigmas {
        r.check("chain_within_3se", sig, 3.0);
    }
    Ok(r)
}
