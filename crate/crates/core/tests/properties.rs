use std::f64::consts::TAU;
use std::sync::OnceLock;

use erbm::bm_kernels::{flux, BoundaryArc, BoundaryPoint, Potential};
use erbm::erbm::{ErSystem, Start};
use erbm::geometry::{parse_domain, Domain, SmoothClosedCurve};
use erbm::report::num;
use erbm::sampler::{estimate_exit_distribution, RunConfig};
use erbm::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn two_holes() -> &'static ErSystem {
    static SYSTEM: OnceLock<ErSystem> = OnceLock::new();
    SYSTEM.get_or_init(|| {
        let d = Domain::new(
            SmoothClosedCurve::ellipse(0.0, 0.0, 1.2, 1.0, 0.2).unwrap(),
            vec![
                SmoothClosedCurve::circle(-0.45, 0.1, 0.2).unwrap(),
                SmoothClosedCurve::ellipse(0.45, -0.15, 0.22, 0.14, 0.7).unwrap(),
            ],
        )
        .unwrap();
        ErSystem::new(&d, 0.5).unwrap()
    })
}

/// Interior points of the two-hole domain, kept away from the boundary.
fn interior() -> impl Strategy<Value = Complex64> {
    (-1.1..1.1f64, -0.9..0.9f64).prop_map(|(x, y)| c(x, y)).prop_filter("inside with margin", |&z| {
        let d = two_holes().domain();
        d.contains(z) && d.distance_to_boundary(z) > 0.02
    })
}

proptest! {
    #[test]
    fn report_numbers_round_trip(v in prop_oneof![-1e8..1e8f64, -1e-3..1e-3f64]) {
        let back: f64 = num(v).parse().unwrap();
        prop_assert!((back - v).abs() <= 1e-12 * v.abs() + 5e-13, "{v} -> {}", num(v));
    }

    #[test]
    fn domain_files_parse_what_they_describe(
        r in 0.3..3.0f64,
        holes in prop::collection::vec((0.0..TAU, 0.05..0.12f64), 0..4),
    ) {
        let mut text = format!("# generated\nouter circle 0 0 {r}\n");
        for (k, (a, s)) in holes.iter().enumerate() {
            // Holes on a ring at angles spread by index so they never touch.
            let theta = a / 8.0 + k as f64 * TAU / 4.0;
            let z = Complex64::from_polar(0.6 * r, theta);
            text.push_str(&format!("hole circle {} {} {}\n", z.re, z.im, s * r));
        }
        let d = parse_domain(&text, Some(64)).unwrap();
        prop_assert_eq!(d.hole_count(), holes.len());
        prop_assert!(d.contains(c(0.0, 0.0)));
        prop_assert!(!d.contains(c(1.01 * r, 0.0)));
        for i in 1..=holes.len() {
            prop_assert!(!d.contains(d.holes()[i - 1].kind().center()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn component_measures_are_a_probability(z in interior()) {
        let m = two_holes().potential().component_harmonic_measures(z).unwrap();
        prop_assert!(m.iter().all(|&x| (-1e-12..=1.0 + 1e-12).contains(&x)));
        prop_assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn green_is_symmetric_and_positive(z in interior(), w in interior()) {
        prop_assume!((z - w).norm() > 0.05);
        let p = two_holes().potential();
        let a = p.greens_function(z).unwrap().value(w);
        let b = p.greens_function(w).unwrap().value(z);
        prop_assert!(a > 0.0);
        prop_assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn er_poisson_kernel_has_no_hole_flux(t in 0.0..TAU, z in interior()) {
        let s = two_holes();
        let h = s.er_poisson_kernel(BoundaryPoint::outer(t)).unwrap();
        prop_assert!(h.value(z) > 0.0);
        for collar in s.collars() {
            prop_assert!(flux(&h, &collar.curve).unwrap().abs() < 1e-8);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn annulus_measure_is_logarithmic(r in 0.05..0.6f64, s in 0.0..1.0f64, theta in 0.0..TAU) {
        let p = Potential::new(&Domain::annulus(r, 1.0).unwrap()).unwrap();
        let rho = r + (1.0 - r) * (0.05 + 0.9 * s);
        let m = p.harmonic_measure(Complex64::from_polar(rho, theta), BoundaryArc::whole(1)).unwrap();
        prop_assert!((m - rho.ln() / r.ln()).abs() < 1e-8);
    }

    #[test]
    fn harmonic_measure_is_similarity_invariant(
        scale in 0.3..4.0f64,
        rotation in 0.0..TAU,
        sx in -3.0..3.0f64,
        sy in -3.0..3.0f64,
    ) {
        let d = Domain::new(
            SmoothClosedCurve::circle(0.0, 0.0, 1.0).unwrap(),
            vec![SmoothClosedCurve::ellipse(0.3, -0.1, 0.25, 0.15, 0.4).unwrap()],
        )
        .unwrap();
        let shift = c(sx, sy);
        let (moved, _) = d.similarity(scale, rotation, shift).unwrap();
        let z = c(-0.4, 0.3);
        let image = scale * Complex64::from_polar(1.0, rotation) * z + shift;
        let a = Potential::new(&d).unwrap().harmonic_measure(z, BoundaryArc::whole(1)).unwrap();
        let b = Potential::new(&moved).unwrap().harmonic_measure(image, BoundaryArc::whole(1)).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn chain_rows_are_stochastic(r1 in 0.08..0.22f64, r2 in 0.08..0.22f64, y in -0.3..0.3f64) {
        let d = Domain::new(
            SmoothClosedCurve::circle(0.0, 0.0, 1.0).unwrap(),
            vec![SmoothClosedCurve::circle(-0.45, y, r1).unwrap(), SmoothClosedCurve::circle(0.45, -y, r2).unwrap()],
        )
        .unwrap();
        let s = ErSystem::new(&d, 0.5).unwrap();
        let p = s.period_matrix();
        prop_assert!(p.asymmetry() < 1e-9);
        prop_assert!(p.eigenvalues().iter().all(|&e| e < 0.0));
        let chain = s.boundary_chain().unwrap();
        prop_assert!(chain.row_sum_deviation() < 1e-9);
        prop_assert!(chain.spectral_radius() < 1.0);
        for (i, row) in chain.p_tilde_rows().iter().enumerate() {
            prop_assert!(row.iter().all(|&x| x >= -1e-12));
            prop_assert!(row[i + 1].abs() < 1e-12, "a hole does not jump to itself");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn sampling_does_not_depend_on_workers(seed in any::<u64>(), workers in 2..5usize) {
        let s = two_holes();
        let base = RunConfig::default().with_paths(300).with_seed(seed);
        let start = Start::Point(c(0.0, 0.5));
        let a = estimate_exit_distribution(s, start, 8, &base).unwrap();
        let b = estimate_exit_distribution(s, start, 8, &base.clone().with_workers(workers)).unwrap();
        prop_assert_eq!(a.distribution, b.distribution);
    }
}
