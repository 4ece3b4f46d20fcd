use std::f64::consts::{PI, TAU};

use erbm::bm_kernels::{flux, BoundaryArc, BoundaryPoint, Potential};
use erbm::erbm::{ErSystem, GreenSource, Start};
use erbm::geometry::{Domain, SmoothClosedCurve};
use erbm::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn annulus() -> ErSystem {
    ErSystem::new(&Domain::annulus(0.25, 1.0).unwrap(), 0.5).unwrap()
}

fn mirror_domain() -> Domain {
    Domain::new(
        SmoothClosedCurve::circle(0.0, 0.0, 1.0).unwrap(),
        vec![SmoothClosedCurve::circle(-0.4, 0.0, 0.2).unwrap(), SmoothClosedCurve::circle(0.4, 0.0, 0.2).unwrap()],
    )
    .unwrap()
}

fn three_hole() -> Domain {
    Domain::new(
        SmoothClosedCurve::ellipse(0.0, 0.0, 1.2, 1.0, 0.1).unwrap(),
        vec![
            SmoothClosedCurve::circle(-0.5, 0.3, 0.15).unwrap(),
            SmoothClosedCurve::ellipse(0.4, 0.35, 0.22, 0.1, -0.4).unwrap(),
            SmoothClosedCurve::circle(0.1, -0.45, 0.2).unwrap(),
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
fn period_matrix_of_the_annulus() {
    let s = annulus();
    let p = s.period_matrix();
    assert_eq!(p.size(), 1);
    assert!((p.entry(1, 1) + TAU / 4f64.ln()).abs() < 1e-5, "{}", p.entry(1, 1));
    assert!((p.entry(1, 1) - (-4.53236)).abs() < 1e-5);
    assert!((p.collar_fluxes()[(0, 0)] - p.entry(1, 1)).abs() < 1e-8);
    let disk = ErSystem::new(&Domain::disk(0.0, 0.0, 1.0).unwrap(), 0.5).unwrap();
    assert_eq!(disk.period_matrix().size(), 0);
}

#[test]
fn period_matrix_of_three_holes() {
    let d = three_hole();
    let s = ErSystem::new(&d, 0.5).unwrap();
    let p = s.period_matrix();
    assert!(p.asymmetry() < 1e-6, "{}", p.asymmetry());
    assert!(p.eigenvalues().iter().all(|&l| l < 0.0), "{:?}", p.eigenvalues());
    for j in 0..3 {
        for i in 0..3 {
            assert!((p.collar_fluxes()[(j, i)] - p.matrix()[(j, i)]).abs() < 1e-8);
        }
    }
    let fine = ErSystem::new(&d.with_node_count(512).unwrap(), 0.5).unwrap();
    let diff = (fine.period_matrix().matrix() - p.matrix()).norm() / p.matrix().norm();
    assert!(diff < 1e-6, "{diff}");
    let other = ErSystem::new(&d, 0.3).unwrap();
    assert!((other.period_matrix().collar_fluxes() - p.collar_fluxes()).norm() < 1e-8);
}

#[test]
fn er_harmonic_examples() {
    let d = three_hole();
    let s = ErSystem::new(&d, 0.5).unwrap();
    let one = s.solve_er_harmonic(|_, _| 1.0).unwrap();
    for &ci in one.constants() {
        assert!((ci - 1.0).abs() < 1e-8, "{ci}");
    }
    for z in probes(&d, 20, 0.02, 1) {
        assert!((one.value(z) - 1.0).abs() < 1e-8);
    }

    let disk = ErSystem::new(&Domain::disk(0.0, 0.0, 1.0).unwrap(), 0.5).unwrap();
    let u = disk.solve_er_harmonic(|_, z| z.re).unwrap();
    assert!((u.value(c(0.3, 0.4)) - 0.3).abs() < 1e-8);

    let m = ErSystem::new(&mirror_domain(), 0.5).unwrap();
    let u = m.solve_er_harmonic(|_, z| z.im + z.re * z.re).unwrap();
    assert!((u.component_value(1) - u.component_value(2)).abs() < 1e-6);
}

#[test]
fn er_harmonic_invariants() {
    let d = three_hole();
    let s = ErSystem::new(&d, 0.5).unwrap();
    let f = |_: f64, z: Complex64| (2.0 * z.re).sin() + z.im * z.im;
    let g = |t: f64, _: Complex64| (3.0 * t).cos();
    let u = s.solve_er_harmonic(f).unwrap();
    for collar in s.collars() {
        let fl = flux(&u, &collar.curve).unwrap();
        assert!(fl.abs() < 1e-6, "hole {}: {fl}", collar.hole_index);
    }
    for i in 1..=3 {
        let vals = u.field().regular.boundary_values(i);
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let std = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64).sqrt();
        assert!(std < 1e-6 && (mean - u.component_value(i)).abs() < 1e-6, "hole {i}: {std} {mean}");
    }
    let data: Vec<f64> = (0..2048).map(|k| TAU * k as f64 / 2048.0).map(|t| f(t, d.boundary_point(0, t))).collect();
    let (lo, hi) = data.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    for z in probes(&d, 1000, 1e-3, 2) {
        let v = u.value(z);
        assert!(v > lo - 1e-6 && v < hi + 1e-6, "{z}: {v}");
    }
    for &ci in u.constants() {
        assert!(ci > lo - 1e-6 && ci < hi + 1e-6);
    }

    let v = s.solve_er_harmonic(g).unwrap();
    let w = s.solve_er_harmonic(|t, z| 2.0 * f(t, z) - 0.5 * g(t, z)).unwrap();
    for z in probes(&d, 20, 0.01, 3) {
        assert!((w.value(z) - 2.0 * u.value(z) + 0.5 * v.value(z)).abs() < 1e-8);
    }
}

#[test]
fn er_poisson_kernel_examples() {
    let disk_domain = Domain::disk(0.0, 0.0, 1.0).unwrap();
    let disk = ErSystem::new(&disk_domain, 0.5).unwrap();
    let pot = Potential::new(&disk_domain).unwrap();
    let h = disk.er_poisson_kernel(BoundaryPoint::outer(0.7)).unwrap();
    for z in [c(0.2, 0.1), c(-0.5, 0.4)] {
        assert!((h.value(z) - pot.poisson_kernel(z, BoundaryPoint::outer(0.7)).unwrap()).abs() < 1e-8);
    }

    let s = annulus();
    let values: Vec<f64> =
        [0.0, 1.0, 2.5, 4.0].iter().map(|&t| s.er_poisson_kernel(BoundaryPoint::outer(t)).unwrap().component_value(1)).collect();
    for v in &values {
        assert!((v - 1.0 / TAU).abs() < 1e-8, "{v}");
    }

    let d = three_hole();
    let s = ErSystem::new(&d, 0.5).unwrap();
    let h = s.er_poisson_kernel(BoundaryPoint::outer(1.0)).unwrap();
    for collar in s.collars() {
        assert!(flux(&h, &collar.curve).unwrap().abs() < 1e-6);
    }
    for z in probes(&d, 300, 1e-3, 4) {
        assert!(h.value(z) > 0.0, "{z}");
    }
    for &ci in h.constants() {
        assert!(ci > 0.0);
    }
    // Away from the pole the kernel vanishes on the outer curve.
    for t in [2.5, 3.5, 4.5, 5.5] {
        let g = d.boundary_geometry(0, t);
        assert!(h.value(g.point + 1e-3 * g.normal).abs() < 1e-3 * h.value(c(0.0, 0.1)));
    }
}

#[test]
fn er_green_examples() {
    let disk = ErSystem::new(&Domain::disk(0.0, 0.0, 1.0).unwrap(), 0.5).unwrap();
    let g = disk.er_green(c(0.0, 0.0)).unwrap();
    assert!((g.value(c(0.5, 0.0)) - 2f64.ln() / PI).abs() < 1e-6);

    let d = three_hole();
    let s = ErSystem::new(&d, 0.5).unwrap();
    let z0 = c(-0.1, 0.1);
    let g = s.er_green(z0).unwrap();
    assert_eq!(g.source(), GreenSource::Point(z0));
    let small = SmoothClosedCurve::circle(z0.re, z0.im, 0.05).unwrap();
    assert!((flux(&g, &small).unwrap() + 2.0).abs() < 1e-4);
    for collar in s.collars() {
        assert!(flux(&g, &collar.curve).unwrap().abs() < 1e-6);
    }
    for t in [0.0, 1.3, 2.9, 4.4] {
        let geo = d.boundary_geometry(0, t);
        assert!(g.value(geo.point + 1e-3 * geo.normal).abs() < 1e-3);
    }
    let r = 1.2;
    for a in 0..64 {
        for b in 0..64 {
            let z = c(-r + 2.0 * r * (a as f64 + 0.5) / 64.0, -r + 2.0 * r * (b as f64 + 0.5) / 64.0);
            if d.contains(z) && d.distance_to_boundary(z) > 1e-3 && (z - z0).norm() > 1e-6 {
                assert!(g.value(z) > 0.0, "{z}");
            }
        }
    }
}

#[test]
fn er_green_occupation_matches_exit_time() {
    for d in [Domain::annulus(0.25, 1.0).unwrap(), three_hole()] {
        let s = ErSystem::new(&d, 0.5).unwrap();
        let exit = s.expected_exit_time();
        for z in probes(&d, 4, 0.05, 5) {
            let occ = s.er_green(z).unwrap().occupation_integral().unwrap();
            assert!((occ - exit.value(z)).abs() < 1e-7, "{z}: {occ} vs {}", exit.value(z));
        }
    }
    // Annulus closed form: E_z τ = (1 − |z|²)/2 + r² log|z| with zero flux at |z| = r.
    let s = annulus();
    let exit = s.expected_exit_time();
    let z = c(0.6, 0.0);
    let exact = (1.0 - 0.36) / 2.0 + 0.0625 * 0.6f64.ln();
    assert!((exit.value(z) - exact).abs() < 1e-8);
    assert!((exit.component_value(1) - ((1.0 - 0.0625) / 2.0 + 0.0625 * 0.25f64.ln())).abs() < 1e-8);
}

#[test]
fn er_green_component_examples() {
    let s = annulus();
    let g = s.er_green_component(1).unwrap();
    assert!((g.value(c(0.5, 0.0)) - 2f64.ln() / PI).abs() < 1e-6);
    assert!((g.value(c(0.0, -0.7)) + 0.7f64.ln() / PI).abs() < 1e-6);
    for t in [0.0, 1.0, 2.0, 5.0] {
        assert!(g.field().boundary_value(0, t).abs() < 1e-6);
    }

    let m = ErSystem::new(&mirror_domain(), 0.5).unwrap();
    let g1 = m.er_green_component(1).unwrap();
    let g2 = m.er_green_component(2).unwrap();
    for z in probes(m.domain(), 30, 0.01, 6) {
        assert!((g1.value(z) - g2.value(-z.conj())).abs() < 1e-6);
    }
    for collar in m.collars() {
        let expected = if collar.hole_index == 1 { -2.0 } else { 0.0 };
        assert!((flux(&g1, &collar.curve).unwrap() - expected).abs() < 1e-6);
    }
}

#[test]
fn restart_density_examples() {
    let s = annulus();
    let rd = s.restart_density(1).unwrap();
    for &p in rd.density() {
        assert!((p - 1.0 / (TAU * 0.625)).abs() < 1e-9, "{p}");
    }
    assert!((rd.total_mass() - 1.0).abs() < 1e-10);
    assert!((rd.masses().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    let (r, big) = (0.25f64, 0.625f64);
    let crossing = (big * big - r * r) / 2.0 + r * r * (r / big).ln();
    assert!((rd.mean_crossing_time() - crossing).abs() < 1e-8, "{}", rd.mean_crossing_time());
    assert!((rd.sample_parameter(0.25) - PI / 2.0).abs() < 1e-6);

    let d = Domain::new(
        SmoothClosedCurve::circle(0.0, 0.0, 1.0).unwrap(),
        vec![SmoothClosedCurve::ellipse(0.3, -0.2, 0.25, 0.15, 0.4).unwrap()],
    )
    .unwrap();
    let coarse = erbm::erbm::restart_density(&d, 1, 0.5).unwrap();
    let fine = erbm::erbm::restart_density(&d.with_node_count(512).unwrap(), 1, 0.5).unwrap();
    assert!(coarse.density().iter().all(|&p| p > 0.0));
    assert!((coarse.total_mass() - 1.0).abs() < 1e-6);
    for k in 0..64 {
        let t = TAU * (k as f64 + 0.3) / 64.0;
        assert!((coarse.density_at(t) - fine.density_at(t)).abs() < 1e-6, "{t}");
    }
    let mut prev = -1.0;
    for k in 0..=100 {
        let t = coarse.sample_parameter(k as f64 / 100.0 * 0.999_999);
        assert!(t >= prev);
        prev = t;
    }
}

#[test]
fn boundary_chain_examples() {
    let chain = annulus().boundary_chain().unwrap();
    let outer = 2.5f64.ln() / 4f64.ln();
    assert!((chain.q(1, 0) - outer).abs() < 1e-6, "{}", chain.q(1, 0));
    assert!((chain.q(1, 1) - (1.0 - outer)).abs() < 1e-6);
    assert!((chain.p_tilde(1, 0) - 1.0).abs() < 1e-12);
    assert!(chain.row_sum_deviation() < 1e-10);

    let m = mirror_domain();
    let s = ErSystem::new(&m, 0.5).unwrap();
    let chain = s.boundary_chain().unwrap();
    assert!(chain.row_sum_deviation() < 1e-10);
    assert!((chain.p_tilde(1, 2) - chain.p_tilde(2, 1)).abs() < 1e-6);
    assert!(chain.spectral_radius() < 1.0);
    for a in chain.absorption() {
        assert!((a - 1.0).abs() < 1e-10);
    }

    let d = three_hole();
    let a = ErSystem::new(&d, 0.4).unwrap();
    let b = ErSystem::new(&d, 0.6).unwrap();
    let (ca, cb) = (a.boundary_chain().unwrap(), b.boundary_chain().unwrap());
    let exact = a.period_matrix().jump_probabilities();
    for i in 1..=3 {
        for k in 0..=3 {
            assert!((ca.p_tilde(i, k) - cb.p_tilde(i, k)).abs() < 1e-4);
            assert!((ca.p_tilde(i, k) - exact[i - 1][k]).abs() < 1e-6, "{i} {k}");
        }
    }
    assert!((ca.q(1, 1) - cb.q(1, 1)).abs() > 1e-3, "q depends on the collar");
    let w = BoundaryPoint::outer(2.0);
    let (ha, hb) = (a.er_poisson_kernel(w).unwrap(), b.er_poisson_kernel(w).unwrap());
    for (x, y) in ha.constants().iter().zip(hb.constants()) {
        assert!((x - y).abs() < 1e-5);
    }
}

#[test]
fn er_harmonic_measure_examples() {
    let s = annulus();
    let whole = BoundaryArc::whole(0);
    assert!((s.er_harmonic_measure(Start::Hole(1), whole).unwrap() - 1.0).abs() < 1e-8);
    assert!((s.er_harmonic_measure(Start::Point(c(0.1, 0.5)), whole).unwrap() - 1.0).abs() < 1e-8);
    for t0 in [0.0, 0.8, 2.0] {
        let half = BoundaryArc::new(0, t0, t0 + PI);
        assert!((s.er_harmonic_measure(Start::Hole(1), half).unwrap() - 0.5).abs() < 1e-6);
    }

    let d = three_hole();
    let s = ErSystem::new(&d, 0.5).unwrap();
    let arcs: Vec<BoundaryArc> = (0..8).map(|k| BoundaryArc::new(0, k as f64 * TAU / 8.0, (k + 1) as f64 * TAU / 8.0)).collect();
    for start in [Start::Point(c(0.0, 0.1)), Start::Hole(2)] {
        let m = s.er_harmonic_measures(start, &arcs).unwrap();
        assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-6);
        assert!(m.iter().all(|&x| (0.0..=1.0).contains(&x)));
        let smooth = s.er_harmonic_measure_smoothed(start, arcs[3]).unwrap();
        assert!((smooth - m[3]).abs() < 5e-4, "{smooth} vs {}", m[3]);
    }
    let hole_total: f64 = s.er_harmonic_measures(Start::Hole(1), &arcs).unwrap().iter().sum();
    let absorbed = s.boundary_chain().unwrap().absorption()[0];
    assert!((hole_total - absorbed).abs() < 1e-5);
}
