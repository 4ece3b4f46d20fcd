use std::f64::consts::{LN_2, PI, TAU};

use erbm::bm_kernels::{BoundaryPoint, Field, FnField, Potential};
use erbm::erbm::ErSystem;
use erbm::geometry::{Domain, SmoothClosedCurve};
use erbm::slitmap::{
    bilateral_map, chordal_map, conjugate_increment, field_diagnostics, harmonic_conjugate, loop_path, radial_map,
    trace_level_curve, trace_level_curve_from, GridSpec, LevelCurve,
};
use erbm::{Complex64, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn disk() -> ErSystem {
    ErSystem::new(&Domain::disk(0.0, 0.0, 1.0).unwrap(), 0.5).unwrap()
}

fn annulus() -> ErSystem {
    ErSystem::new(&Domain::annulus(0.25, 1.0).unwrap(), 0.5).unwrap()
}

fn one_hole() -> Domain {
    Domain::new(SmoothClosedCurve::circle(0.0, 0.0, 1.0).unwrap(), vec![SmoothClosedCurve::circle(0.3, 0.0, 0.2).unwrap()]).unwrap()
}

fn mirror_domain() -> Domain {
    Domain::new(
        SmoothClosedCurve::circle(0.0, 0.0, 1.0).unwrap(),
        vec![SmoothClosedCurve::circle(-0.4, 0.0, 0.2).unwrap(), SmoothClosedCurve::circle(0.4, 0.0, 0.2).unwrap()],
    )
    .unwrap()
}

/// One hole on the real axis and a pair mirrored across it.
fn mirror_triple() -> Domain {
    Domain::new(
        SmoothClosedCurve::circle(0.0, 0.0, 1.0).unwrap(),
        vec![
            SmoothClosedCurve::circle(-0.45, 0.0, 0.18).unwrap(),
            SmoothClosedCurve::circle(0.3, 0.4, 0.15).unwrap(),
            SmoothClosedCurve::circle(0.3, -0.4, 0.15).unwrap(),
        ],
    )
    .unwrap()
}

fn probes(d: &Domain, count: usize, margin: f64, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = d.diameter();
    let mut out = Vec::new();
    while out.len() < count {
        let z = c(rng.random_range(-r..r), rng.random_range(-r..r));
        if d.contains(z) && d.distance_to_boundary(z) > margin {
            out.push(z);
        }
    }
    out
}

#[test]
fn conjugates_of_closed_forms() {
    let v = FnField::new(|z: Complex64| z.im, |_| c(0.0, 1.0));
    assert!((harmonic_conjugate(&v, &[c(0.0, 0.0), c(0.5, 0.5), c(1.0, 0.0)]).unwrap() - 1.0).abs() < 1e-12);

    let u = FnField::new(|z: Complex64| -z.norm().ln(), |z: Complex64| -z / z.norm_sqr());
    let circle = SmoothClosedCurve::circle(0.0, 0.0, 0.5).unwrap();
    let period = conjugate_increment(&u, &loop_path(&circle, 64)).unwrap();
    assert!((period + TAU).abs() < 1e-8, "{period}");
}

#[test]
fn conjugate_paths_need_clearance() {
    let s = annulus();
    let g = s.er_green_component(1).unwrap();
    let err = conjugate_increment(&g, &[c(0.5, 0.0), c(0.2501, 0.0)]).unwrap_err();
    assert!(matches!(err, Error::PathTooCloseToBoundary { .. }), "{err:?}");
}

#[test]
fn chordal_map_of_the_disk() {
    let (f, slits) = chordal_map(&disk(), 0.0).unwrap();
    assert!(slits.slits.is_empty());
    let closed = |z: Complex64| c(0.0, 1.0) * (1.0 + z) / (1.0 - z) / TAU;
    let du = f.eval(c(0.0, 0.5)).unwrap().re - f.eval(c(0.0, 0.0)).unwrap().re;
    assert!((du + 0.8 / TAU).abs() < 1e-5, "{du}");
    assert!((f.eval(c(0.0, 0.0)).unwrap().im - 1.0 / TAU).abs() < 1e-8);
    let shift = f.eval(c(0.0, 0.0)).unwrap() - closed(c(0.0, 0.0));
    let mut worst = 0.0f64;
    for z in probes(f.domain(), 50, 0.02, 1) {
        if (z - 1.0).norm() < 0.05 {
            continue;
        }
        worst = worst.max((f.eval(z).unwrap() - closed(z) - shift).norm());
    }
    assert!(worst < 1e-5, "{worst}");
    assert!(shift.im.abs() < 1e-8);
    assert!(matches!(f.eval(c(0.995, 0.0)), Err(Error::NearPole { .. })));
    assert!(f.eval(f.anchor()).unwrap().re.abs() < 1e-12);
}

#[test]
fn chordal_slit_of_a_symmetric_hole() {
    let s = ErSystem::new(&one_hole(), 0.5).unwrap();
    let (f, slits) = chordal_map(&s, 0.0).unwrap();
    assert_eq!(slits.slits.len(), 1);
    let slit = slits.slits[0];
    assert!(slit.flatness < 1e-6, "{}", slit.flatness);
    assert!(slit.x_min < slit.x_max);
    assert!(slit.height > 0.0);
    assert!(f.anchor().im.abs() < 1e-12);
    assert!((0.5 * (slit.x_min + slit.x_max)).abs() < 1e-5, "{slit:?}");
    assert_eq!(slits.injectivity_failures, 0);

    // Cauchy–Riemann on a stencil and the map derivative.
    let h = 1e-4;
    for z in probes(f.domain(), 20, 0.05, 2) {
        if (z - 1.0).norm() < 0.1 {
            continue;
        }
        let fx = (f.eval(z + h).unwrap() - f.eval(z - h).unwrap()) / (2.0 * h);
        let fy = (f.eval(z + c(0.0, h)).unwrap() - f.eval(z - c(0.0, h)).unwrap()) / (2.0 * h);
        let residual = (fx.re - fy.im).abs() + (fx.im + fy.re).abs();
        assert!(residual < 1e-5, "{residual} at {z}");
        assert!((fx - f.derivative(z).unwrap()).norm() < 1e-5 * fx.norm().max(1.0));
    }
}

#[test]
fn chordal_slits_transform_with_the_domain() {
    let d = mirror_triple();
    let (_, slits) = chordal_map(&ErSystem::new(&d, 0.5).unwrap(), 0.3).unwrap();
    let (moved, offsets) = d.similarity(1.7, 0.9, c(0.4, -0.2)).unwrap();
    let (_, moved_slits) = chordal_map(&ErSystem::new(&moved, 0.5).unwrap(), 0.3 + offsets[0]).unwrap();
    for (a, b) in slits.slits.iter().zip(&moved_slits.slits) {
        assert!(a.flatness < 1e-6 && b.flatness < 1e-6, "{a:?} {b:?}");
        let ra = (a.x_max - a.x_min) / a.height;
        let rb = (b.x_max - b.x_min) / b.height;
        assert!((ra - rb).abs() < 1e-5, "{ra} {rb}");
        assert!((a.height / b.height - 1.7).abs() < 1e-5);
    }
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        let da = slits.slits[i].height - slits.slits[j].height;
        let db = moved_slits.slits[i].height - moved_slits.slits[j].height;
        assert!((da - 1.7 * db).abs() < 1e-5, "{da} {db}");
    }
    assert_eq!(slits.injectivity_failures, 0);
}

#[test]
fn representation_matches_path_conjugate() {
    let s = ErSystem::new(&mirror_domain(), 0.5).unwrap();
    let w = 0.7;
    let (f, _) = chordal_map(&s, w).unwrap();
    let v = s.er_poisson_kernel(BoundaryPoint::outer(w)).unwrap();
    let (a, b) = (c(-0.75, 0.0), c(0.75, 0.0));
    let above = harmonic_conjugate(&v, &[a, c(-0.4, 0.4), c(0.4, 0.4), b]).unwrap();
    let below = harmonic_conjugate(&v, &[a, c(-0.4, -0.4), c(0.4, -0.4), b]).unwrap();
    let between = harmonic_conjugate(&v, &[a, c(-0.4, 0.4), c(0.0, 0.0), c(0.4, -0.4), b]).unwrap();
    assert!((above - below).abs() < 1e-6, "{above} {below}");
    assert!((above - between).abs() < 1e-6);
    let direct = f.eval(b).unwrap().re - f.eval(a).unwrap().re;
    assert!((direct - above).abs() < 1e-6, "{direct} {above}");
    for hole in s.domain().holes() {
        let collar = SmoothClosedCurve::circle(hole.kind().center().re, hole.kind().center().im, 0.3).unwrap();
        let period = harmonic_conjugate(&v, &loop_path(&collar, 48)).unwrap();
        assert!(period.abs() < 1e-4, "{period}");
    }
}

#[test]
fn bilateral_map_of_the_annulus() {
    let s = annulus();
    let (f, ring) = bilateral_map(&s, 1).unwrap();
    assert!((ring.inner_radius - 0.25).abs() < 1e-5, "{}", ring.inner_radius);
    assert!(ring.inner_deviation < 1e-6);
    assert!(ring.arcs.is_empty());
    for z in probes(s.domain(), 200, 1e-3, 3) {
        let fz = f.eval(z).unwrap();
        assert!((fz.norm() - z.norm()).abs() < 1e-5, "{z} {fz}");
    }
    let rotation = f.eval(c(0.5, 0.0)).unwrap() / 0.5;
    assert!((rotation - 1.0).norm() < 1e-5, "{rotation}");
    let g = s.er_green_component(1).unwrap();
    let u = Field::combine(&[(PI, g.field())]);
    let period = conjugate_increment(&u, &loop_path(&SmoothClosedCurve::circle(0.0, 0.0, 0.6).unwrap(), 48)).unwrap();
    assert!((period + TAU).abs() < 1e-4, "{period}");
}

#[test]
fn bilateral_map_with_a_mirror_pair() {
    let d = mirror_triple();
    let s = ErSystem::new(&d, 0.5).unwrap();
    let (f, ring) = bilateral_map(&s, 1).unwrap();
    assert!(ring.inner_radius > 0.0 && ring.inner_radius < 1.0);
    assert_eq!(ring.arcs.len(), 2);
    let (a, b) = (ring.arcs[0], ring.arcs[1]);
    assert!((a.radius - b.radius).abs() < 1e-5, "{a:?} {b:?}");
    for arc in &ring.arcs {
        assert!(arc.radius > ring.inner_radius && arc.radius < 1.0);
        assert!(arc.radial_deviation < 1e-6, "{arc:?}");
        assert!(arc.theta1 > arc.theta0 && arc.theta1 - arc.theta0 < TAU);
    }
    assert!(ring.inner_deviation < 1e-6);
    for k in 0..256 {
        let t = TAU * k as f64 / 256.0;
        assert!((f.eval_boundary(0, t).norm() - 1.0).abs() < 1e-5);
        let g = d.boundary_geometry(0, t);
        let inside = f.eval(g.point + 1e-4 * g.normal).unwrap().norm();
        assert!(inside < 1.0 && inside > 1.0 - 1e-3, "{inside}");
    }
    let g = s.er_green_component(1).unwrap();
    let u = Field::combine(&[(PI, g.field())]);
    for (j, expected) in [(1, -TAU), (2, 0.0), (3, 0.0)] {
        let h = d.component(j);
        let center = h.kind().center();
        let loop_curve = SmoothClosedCurve::circle(center.re, center.im, 0.23).unwrap();
        let period = conjugate_increment(&u, &loop_path(&loop_curve, 48)).unwrap();
        assert!((period - expected).abs() < 1e-4, "hole {j}: {period}");
    }
}

#[test]
fn radial_maps() {
    let s = disk();
    let (f, slit) = radial_map(&s, c(0.0, 0.0)).unwrap();
    assert!(slit.arcs.is_empty());
    for z in probes(s.domain(), 100, 1e-3, 4) {
        assert!((f.eval(z).unwrap().norm() - z.norm()).abs() < 1e-5);
    }

    let s = annulus();
    let z0 = c(0.6, 0.0);
    let (f, slit) = radial_map(&s, z0).unwrap();
    let delta = 1e-4;
    for dir in [c(1.0, 0.0), c(0.0, 1.0), c(-0.6, 0.8)] {
        let extrapolated = 2.0 * f.eval(z0 + delta * dir).unwrap() - f.eval(z0 + 2.0 * delta * dir).unwrap();
        assert!(extrapolated.norm() < 1e-6, "{extrapolated}");
    }
    let g = s.er_green(z0).unwrap();
    let arc = slit.arcs[0];
    assert!((arc.radius - (-PI * g.component_value(1)).exp()).abs() < 1e-5);
    assert!(arc.radial_deviation < 1e-5, "{arc:?}");
    assert!(arc.radius > 0.0 && arc.radius < 1.0);
    for k in 0..256 {
        assert!((f.eval_boundary(0, TAU * k as f64 / 256.0).norm() - 1.0).abs() < 1e-5);
    }
}

fn assert_separates(curve: &LevelCurve, value: impl Fn(Complex64) -> f64, d: &Domain, seed: u64) {
    let guard = curve.max_spacing();
    for z in probes(d, 1000, 1e-3, seed) {
        if curve.points.iter().any(|p| (p - z).norm() < guard) {
            continue;
        }
        let v = value(z);
        if curve.encloses(z) {
            assert!(v > curve.level, "{z}: {v} inside level {}", curve.level);
        } else {
            assert!(v < curve.level, "{z}: {v} outside level {}", curve.level);
        }
    }
}

#[test]
fn disk_kernel_level_circle() {
    let d = Domain::disk(0.0, 0.0, 1.0).unwrap();
    let p = Potential::new(&d).unwrap();
    let h = p.poisson_kernel_field(BoundaryPoint::outer(0.0));
    let curve = trace_level_curve(&h, 1.0 / TAU).unwrap();
    assert!(curve.simple);
    assert!(curve.closure_gap < 1e-6 * d.diameter(), "{}", curve.closure_gap);
    let off = curve.points.iter().map(|z| ((z - 0.5).norm() - 0.5).abs()).fold(0.0, f64::max);
    assert!(off < 1e-6, "{off}");
    for k in 0..360 {
        let q = 0.5 + Complex64::from_polar(0.5, TAU * k as f64 / 360.0);
        let near = curve.points.iter().map(|z| (z - q).norm()).fold(f64::INFINITY, f64::min);
        assert!(near <= curve.max_spacing());
    }
    assert_separates(&curve, |z| h.value(z), &d, 5);
}

#[test]
fn radial_level_circle() {
    let u = FnField::new(|z: Complex64| -z.norm().ln(), |z: Complex64| -z / z.norm_sqr());
    let curve = trace_level_curve_from(&u, LN_2, c(0.3, 0.2)).unwrap();
    let off = curve.points.iter().map(|z| (z.norm() - 0.5).abs()).fold(0.0, f64::max);
    assert!(off < 1e-9, "{off}");
    assert!(curve.simple && curve.closure_gap < 1e-6);
    assert!((curve.length() - PI).abs() < 1e-3);
}

#[test]
fn er_kernel_level_curves_are_jordan() {
    let d = mirror_domain();
    let s = ErSystem::new(&d, 0.5).unwrap();
    let h = s.er_poisson_kernel(BoundaryPoint::outer(0.8)).unwrap();
    let plateaus = h.constants().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut traced = 0;
    while traced < 5 {
        let r = (rng.random_range(0.05f64.ln()..1.5f64.ln())).exp();
        if plateaus.iter().any(|p| (p - r).abs() < 1e-3) {
            continue;
        }
        let curve = trace_level_curve(&h, r).unwrap();
        assert!(curve.closure_gap < 1e-6 * d.diameter(), "level {r}: gap {}", curve.closure_gap);
        assert!(curve.simple, "level {r}");
        assert_separates(&curve, |z| h.value(z), &d, 7 + traced);
        traced += 1;
    }
    let err = trace_level_curve(&h, plateaus[0]).unwrap_err();
    assert!(matches!(err, Error::PlateauLevel { .. }), "{err:?}");
}

#[test]
fn er_green_level_curve() {
    let d = mirror_domain();
    let s = ErSystem::new(&d, 0.5).unwrap();
    let g = s.er_green(c(0.0, 0.5)).unwrap();
    let r = 0.5 * (g.component_value(1) + g.value(c(0.0, 0.7)));
    let curve = trace_level_curve_from(&g, r, c(0.0, 0.7)).unwrap();
    assert!(curve.simple && curve.closure_gap < 1e-6 * d.diameter());
    assert!(curve.encloses(c(0.0, 0.5)));
    assert_separates(&curve, |z| g.value(z), &d, 11);
}

#[test]
fn diagnostics_of_kernels() {
    let d = Domain::disk(0.0, 0.0, 1.0).unwrap();
    let p = Potential::new(&d).unwrap();
    let h = p.poisson_kernel_field(BoundaryPoint::outer(0.0));
    let spec = GridSpec::square(128, c(-0.9, -0.9), c(0.9, 0.9)).with_levels(vec![0.05, 0.2, 1.0]);
    let report = field_diagnostics(&h, &spec);
    assert!(!report.flagged);
    // |∇H| = 1/(π|1 − z|²) ≥ 1/(4π) on the disk.
    assert!(report.min_gradient >= 1.0 / (4.0 * PI) - 1e-9, "{}", report.min_gradient);
    assert!(report.sublevel_components.iter().all(|&(_, n)| n == 1), "{:?}", report.sublevel_components);

    let constant = FnField::new(|_| 1.0, |_| c(0.0, 0.0));
    let report = field_diagnostics(&constant, &GridSpec::square(16, c(-1.0, -1.0), c(1.0, 1.0)));
    assert_eq!(report.min_gradient, 0.0);
    assert!(report.flagged);
}

#[test]
fn diagnostics_of_an_er_kernel() {
    let d = mirror_domain();
    let s = ErSystem::new(&d, 0.5).unwrap();
    let h = s.er_poisson_kernel(BoundaryPoint::outer(0.8)).unwrap();
    let levels: Vec<f64> = (0..10).map(|k| 0.03 * 1.5f64.powi(k)).collect();
    let spec = GridSpec::square(512, c(-1.0, -1.0), c(1.0, 1.0)).with_levels(levels);
    let report = field_diagnostics(&h, &spec);
    assert!(!report.flagged && report.min_gradient > 0.0, "{:?}", report);
    assert!(report.evaluated > 150_000);
    assert!(report.sublevel_components.iter().all(|&(_, n)| n == 1), "{:?}", report.sublevel_components);
}
