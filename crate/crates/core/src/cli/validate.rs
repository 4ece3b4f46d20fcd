//! The `validate` command: invariant suites of every module on each domain,
//! followed by a pass/fail matrix.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::commands::{default_point, grid, outer_modulus_error, probes, report_chain, separation_errors, zero_residual};
use super::{CliError, CliResult, Common, Context};
use crate::bm_kernels::{flux, BoundaryPoint, Field, Potential};
use crate::erbm::{ErSystem, Start};
use crate::report::Report;
use crate::sampler::{estimate_chain, estimate_exit_distribution, RunConfig};
use crate::slitmap::{
    bilateral_map, chordal_map, conjugate_increment, field_diagnostics, loop_path, radial_map, trace_level_curve_from,
};

const SUITES: [&str; 5] = ["geometry", "kernels", "erbm", "slitmap", "sampler"];
const PROBE_SEED: u64 = 0x5eed;
const DIAGNOSTIC_GRID: usize = 256;
const EXIT_BINS: usize = 16;

fn domain_label(path: &str) -> String {
    let file = path.rsplit('/').next().unwrap_or(path);
    file.strip_suffix(".dom").unwrap_or(file).to_string()
}

pub(super) fn run(common: &Common, contexts: &[Context]) -> CliResult<(String, usize)> {
    let mut r = Report::new("validate", !common.no_timestamp);
    r.input("nodes", common.nodes);
    r.input("collar", common.collar);
    r.input("seed", common.seed);
    r.input("paths", common.paths);
    let mut matrix: Vec<(String, Vec<bool>)> = Vec::new();
    for ctx in contexts {
        let label = domain_label(&ctx.domain_name);
        r.section(&label);
        r.text(&format!("{label}.domain"), &ctx.domain_name);
        let mut row = Vec::new();
        for suite in SUITES {
            let before = r.failures();
            let outcome = match suite {
                "geometry" => geometry(ctx, &label, &mut r),
                "kernels" => kernels(ctx, &label, &mut r),
                "erbm" => erbm_suite(ctx, &label, &mut r),
                "slitmap" => slitmap(ctx, &label, &mut r),
                _ => sampler(ctx, &label, &mut r),
            };
            if let Err(e) = outcome {
                let msg = match e {
                    CliError::Usage(m) => m,
                    CliError::Compute(e) => e.to_string(),
                };
                r.check_that(&format!("{label}.{suite}.completed"), false, msg);
            }
            row.push(r.failures() == before);
        }
        matrix.push((label, row));
    }
    r.section("matrix");
    for (s, suite) in SUITES.iter().enumerate() {
        let cells: Vec<String> =
            matrix.iter().map(|(label, row)| format!("{label}:{}", if row[s] { "pass" } else { "FAIL" })).collect();
        r.text(suite, cells.join(" "));
    }
    Ok((r.render(), r.failures()))
}

fn geometry(ctx: &Context, label: &str, r: &mut Report) -> CliResult<()> {
    let d = &ctx.domain;
    let issues = d.validate();
    r.check_that(&format!("{label}.geometry.layout"), issues.is_empty(), format!("{} issues", issues.len()));
    let mut collars_ok = true;
    for i in 1..=d.hole_count() {
        let collar = d.collar_curve(i, ctx.common.collar)?;
        collars_ok &= collar.curve.encloses(d.hole_point(i)) && d.contains(collar.curve.point(0.0));
    }
    r.check_that(&format!("{label}.geometry.collars"), collars_ok, "collars surround their holes inside the domain");
    let inside = probes(d, 200, 0.0, PROBE_SEED).iter().all(|&z| d.distance_to_boundary(z) > 0.0);
    r.check_that(&format!("{label}.geometry.containment"), inside, "probes are strictly interior");
    Ok(())
}

fn kernels(ctx: &Context, label: &str, r: &mut Report) -> CliResult<()> {
    let d = &ctx.domain;
    let pot = Potential::new(d)?;
    let pts = probes(d, 20, 0.02 * d.diameter(), PROBE_SEED + 1);
    let mut mass: f64 = 0.0;
    let mut min_kernel = f64::INFINITY;
    for &z in &pts {
        mass = mass.max((pot.component_harmonic_measures(z)?.iter().sum::<f64>() - 1.0).abs());
        for k in 0..8 {
            min_kernel = min_kernel.min(pot.poisson_kernel(z, BoundaryPoint::outer(TAU * k as f64 / 8.0))?);
        }
    }
    r.check(&format!("{label}.kernels.unit_mass"), mass, 1e-6);
    r.check_that(&format!("{label}.kernels.positive"), min_kernel > 0.0, format!("min H = {min_kernel:.3e}"));
    let mut asym: f64 = 0.0;
    for pair in pts.chunks(2).take(5) {
        let (a, b) = (pair[0], pair[1]);
        asym = asym.max((pot.greens_function(a)?.value(b) - pot.greens_function(b)?.value(a)).abs());
    }
    r.check(&format!("{label}.kernels.green_symmetry"), asym, 1e-6);
    Ok(())
}

fn erbm_suite(ctx: &Context, label: &str, r: &mut Report) -> CliResult<()> {
    let d = &ctx.domain;
    let s = ErSystem::new(d, ctx.common.collar)?;
    let key = |k: &str| format!("{label}.erbm.{k}");
    if s.hole_count() > 0 {
        let p = s.period_matrix();
        r.check(&key("period_symmetry"), p.asymmetry(), 1e-6);
        let top = p.eigenvalues().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        r.check_that(&key("period_negative"), top < 0.0, format!("largest eigenvalue {top:.6e}"));
    }
    let h = s.er_poisson_kernel(BoundaryPoint::outer(0.8))?;
    let mut fl: f64 = 0.0;
    for collar in s.collars() {
        fl = fl.max(flux(&h, &collar.curve)?.abs());
    }
    r.check(&key("er_flux"), fl, 1e-6);

    let data = |_: f64, z: Complex64| z.re + 0.5 * z.im * z.im;
    let u = s.solve_er_harmonic(data)?;
    let n = 2048;
    let (lo, hi) = (0..n)
        .map(|k| data(0.0, d.boundary_point(0, TAU * k as f64 / n as f64)))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let overshoot = probes(d, 1000, 1e-3 * d.diameter(), PROBE_SEED + 2)
        .into_iter()
        .map(|z| u.value(z))
        .chain(u.constants().iter().copied())
        .map(|v| (lo - v).max(v - hi).max(0.0))
        .fold(0.0, f64::max);
    r.check(&key("maximum_principle"), overshoot, 1e-6);

    if s.hole_count() > 0 {
        let chain = s.boundary_chain()?;
        r.check(&key("chain_row_sums"), chain.row_sum_deviation(), 1e-10);
        let a = ErSystem::new(d, 0.4)?;
        let b = ErSystem::new(d, 0.6)?;
        let (ca, cb) = (a.boundary_chain()?, b.boundary_chain()?);
        let dp = ca.p_tilde_rows().iter().flatten().zip(cb.p_tilde_rows().iter().flatten()).map(|(x, y)| (x - y).abs());
        r.check(&key("collar_p_tilde"), dp.fold(0.0, f64::max), 1e-4);
        let w = BoundaryPoint::outer(2.0);
        let (ha, hb) = (a.er_poisson_kernel(w)?, b.er_poisson_kernel(w)?);
        let dc = ha.constants().iter().zip(hb.constants()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        r.check(&key("collar_constants"), dc, 1e-5);
    }
    Ok(())
}

fn slitmap(ctx: &Context, label: &str, r: &mut Report) -> CliResult<()> {
    let d = &ctx.domain;
    let s = ErSystem::new(d, ctx.common.collar)?;
    let key = |k: &str| format!("{label}.slitmap.{k}");
    let diam = d.diameter();

    let (f, slits) = chordal_map(&s, 0.0)?;
    r.check(&key("chordal_flatness"), slits.slits.iter().map(|s| s.flatness).fold(0.0, f64::max), 1e-6);
    r.check_that(
        &key("chordal_injective"),
        slits.injectivity_failures == 0,
        format!("{} failing pairs", slits.injectivity_failures),
    );
    // Im f is the ER Poisson kernel with pole at the same boundary point.
    let h = s.er_poisson_kernel(BoundaryPoint::outer(0.0))?;
    let mut im_err: f64 = 0.0;
    for z in probes(d, 50, 0.05 * diam, PROBE_SEED + 3) {
        im_err = im_err.max((f.eval(z)?.im - h.value(z)).abs());
    }
    r.check(&key("chordal_imaginary_part"), im_err, 1e-6);

    if s.hole_count() > 0 {
        let (f, ring) = bilateral_map(&s, 1)?;
        r.check(&key("bilateral_inner_circularity"), ring.inner_deviation, 1e-6);
        r.check(&key("bilateral_arc_circularity"), ring.arcs.iter().map(|a| a.radial_deviation).fold(0.0, f64::max), 1e-6);
        r.check(&key("bilateral_outer_modulus"), outer_modulus_error(d, |t| f.eval_boundary(0, t)), 1e-5);
        let g = s.er_green_component(1)?;
        let u = Field::combine(&[(PI, g.field())]);
        let period = conjugate_increment(&u, &loop_path(&s.collars()[0].curve, 48))?;
        r.check(&key("bilateral_period"), (period + TAU).abs(), 1e-4);
    }

    let z0 = default_point(d);
    let (f, disk) = radial_map(&s, z0)?;
    r.check(&key("radial_zero"), zero_residual(|z| f.eval(z).ok(), z0, 1e-4 * diam), 1e-6);
    r.check(&key("radial_outer_modulus"), outer_modulus_error(d, |t| f.eval_boundary(0, t)), 1e-5);
    let g = s.er_green(z0)?;
    let radius_err =
        disk.arcs.iter().map(|a| (a.radius - (-PI * g.component_value(a.hole)).exp()).abs()).fold(0.0, f64::max);
    r.check(&key("radial_arc_radius"), radius_err, 1e-5);

    // Level curve of H^ER through a probe point away from all plateaus.
    let h = s.er_poisson_kernel(BoundaryPoint::outer(0.8))?;
    let plateaus = h.constants().to_vec();
    let seed = probes(d, 50, 0.1 * diam, PROBE_SEED + 4)
        .into_iter()
        .find(|&z| plateaus.iter().all(|p| (h.value(z) - p).abs() > 1e-3))
        .unwrap_or(z0);
    let curve = trace_level_curve_from(&h, h.value(seed), seed)?;
    r.check(&key("level_closure"), curve.closure_gap, 1e-6 * diam);
    r.check_that(&key("level_simple"), curve.simple, "no self-intersection");
    let wrong = separation_errors(&curve, |z| h.value(z), d, 1000);
    r.check_that(&key("level_separation"), wrong == 0, format!("{wrong} of 1000 probes misclassified"));

    let levels: Vec<f64> = (0..5).map(|k| 0.05 * 2f64.powi(k)).collect();
    let diag = field_diagnostics(&h, &grid(d, DIAGNOSTIC_GRID).with_levels(levels));
    r.check_that(
        &key("gradient_nonvanishing"),
        !diag.flagged && diag.min_gradient > 0.0,
        format!("min |grad| = {:.3e} over {} nodes", diag.min_gradient, diag.evaluated),
    );
    let connected = diag.sublevel_components.iter().all(|&(_, n)| n <= 1);
    r.check_that(&key("sublevel_connected"), connected, format!("{:?}", diag.sublevel_components));
    Ok(())
}

fn sampler(ctx: &Context, label: &str, r: &mut Report) -> CliResult<()> {
    let d = &ctx.domain;
    let s = ErSystem::new(d, ctx.common.collar)?;
    let key = |k: &str| format!("{label}.sampler.{k}");
    let config = ctx.run_config();
    let start = if s.hole_count() > 0 { Start::Hole(1) } else { Start::Point(default_point(d)) };
    let est = estimate_exit_distribution(&s, start, EXIT_BINS, &config)?;
    r.check(&key("exit_total_variation"), est.total_variation, 0.02);
    r.check(&key("truncation_rate"), est.truncated as f64 / est.distribution.total as f64, 1e-4);
    if s.hole_count() > 0 {
        let chain = estimate_chain(&s, &config)?;
        let sigmas = report_chain(r, &format!("{label}.sampler."), &s, &chain)?;
        r.check(&key("chain_within_3se"), sigmas, 3.0 + 1e-12);
    }
    let small = RunConfig { path_count: config.path_count.min(2000), ..config.clone() };
    let a = estimate_exit_distribution(&s, start, EXIT_BINS, &small)?;
    let b = estimate_exit_distribution(&s, start, EXIT_BINS, &small.clone().with_workers(small.worker_count.max(2) - 1))?;
    r.check_that(&key("reproducible"), a.distribution == b.distribution, "same seed, different worker count");
    Ok(())
}
