use gccf::system::{geometry_report, letter_deriv_norm, ratio_constants, system_lens, verify_geometry, Parameter, Truncation};
use num_complex::Complex64;
use proptest::prelude::*;

fn parameter() -> impl Strategy<Value = Parameter> {
    (0.0..8.0f64, 1.0..8.0f64).prop_map(|(u, v)| Parameter::new(u, v).unwrap())
}

#[test]
fn geometry_suite_passes_on_reference_parameters() {
    for (u, v) in [(0.0, 1.0), (1.0, 1.0), (2.0, 3.0), (10.0, 10.0)] {
        let tau = Parameter::new(u, v).unwrap();
        let report = verify_geometry(&tau, Truncation::new(5).unwrap(), 1000, 11).unwrap();
        assert!(report.passed(), "{}", report.to_record());
    }
}

#[test]
fn geometry_report_is_deterministic() {
    let tau = Parameter::new(0.3, 1.4).unwrap();
    let a = geometry_report(&tau, Truncation::new(4).unwrap(), 500, 3).unwrap();
    let b = geometry_report(&tau, Truncation::new(4).unwrap(), 500, 3).unwrap();
    assert_eq!(a, b);
}

#[test]
fn ratio_constants_finite_off_axis() {
    let (c1, c2) = ratio_constants(&Parameter::new(1.0, 2.0).unwrap());
    assert!(c1 > 0.0 && c2.is_finite() && c1 < c2);
}

proptest! {
    #[test]
    fn closed_form_dominates_samples(tau in parameter(), m in 1u32..30, n in 1u32..30, r in 0.0..=1.0f64, th in 0.0..std::f64::consts::TAU) {
        let l = gccf::system::Letter::new(m, n).unwrap();
        let b = letter_deriv_norm(l, &tau);
        let z = Complex64::new(0.5, 0.0) + Complex64::from_polar(0.5 * r.sqrt(), th);
        let v = 1.0 / (z + l.value(&tau)).norm_sqr();
        prop_assert!(b.inf_norm * (1.0 - 1e-12) <= v && v <= b.sup_norm * (1.0 + 1e-12));
        prop_assert!(b.sup_norm <= 0.8);
    }

    #[test]
    fn letter_gap_is_at_least_one(tau in parameter(), m1 in 1u32..20, n1 in 1u32..20, m2 in 1u32..20, n2 in 1u32..20) {
        prop_assume!((m1, n1) != (m2, n2));
        let a = gccf::system::Letter::new(m1, n1).unwrap().value(&tau);
        let b = gccf::system::Letter::new(m2, n2).unwrap().value(&tau);
        prop_assert!((a - b).norm() >= 1.0 - 1e-12);
    }

    #[test]
    fn sampled_ratios_respect_constants(
        tau in parameter(),
        du in -1.0..=1.0f64, dv in -1.0..=1.0f64,
        m in 1u32..50, n in 1u32..50,
        r1 in 0.0..=1.0f64, t1 in 0.0..std::f64::consts::TAU,
        r2 in 0.0..=1.0f64, t2 in 0.0..std::f64::consts::TAU,
    ) {
        let uk = (tau.u() + du).max(0.0);
        let vk = (tau.v() + dv * tau.v() / 3.0).max(1.0);
        let tk = Complex64::new(uk, vk);
        let z = Complex64::new(0.5, 0.0) + Complex64::from_polar(0.5 * r1, t1);
        let z2 = Complex64::new(0.5, 0.0) + Complex64::from_polar(0.5 * r2, t2);
        let (mf, nf) = (m as f64, n as f64);
        let ratio = (z2 + mf + tk * nf).norm_sqr() / (z + mf + tau.tau() * nf).norm_sqr();
        let (c1, c2) = ratio_constants(&tau);
        prop_assert!(c1 <= ratio && ratio <= c2, "{ratio} not in [{c1}, {c2}]");
    }

    #[test]
    fn lens_sits_inside_canonical_disk(tau in parameter(), k in 0usize..2) {
        let corner = system_lens(&tau).corners()[k];
        prop_assert!((corner - Complex64::new(0.5, 0.0)).norm() <= 0.5 + 1e-12);
    }
}

mod checks {
    use gccf::system::*;

    #[test]
    fn ratio_constants_at_i() {
        let (c1, c2) = ratio_constants(&Parameter::new(0.0, 1.0).unwrap());
        assert!((c1 - 0.0015432).abs() < 1e-7);
        assert!((c1 - 1.0 / 648.0).abs() < 1e-15);
        assert!((c2 - 49.4444).abs() < 1e-4);
    }

    #[test]
    fn ratio_constants_bracket_one() {
        for (u, v) in [(0.0, 1.0), (1.0, 2.0), (5.0, 1.5), (0.2, 40.0)] {
            let (c1, c2) = ratio_constants(&Parameter::new(u, v).unwrap());
            assert!(c1 > 0.0 && c1 <= 1.0 && 1.0 <= c2 && c2.is_finite());
        }
    }

    #[test]
    fn report_at_i_passes() {
        let tau = Parameter::new(0.0, 1.0).unwrap();
        let report = verify_geometry(&tau, Truncation::new(5).unwrap(), 1000, 7).unwrap();
        assert!(report.passed());
        let record = report.to_record();
        assert!(record.contains("open_set_gap.passed=true"));
        assert!(record.ends_with("passed=true\n"));
    }

    #[test]
    fn open_set_gap_is_exact_for_adjacent_letters() {
        let tau = Parameter::new(0.0, 1.0).unwrap();
        let report = geometry_report(&tau, Truncation::new(2).unwrap(), 10, 1).unwrap();
        let gap = report.checks.iter().find(|c| c.name == "open_set_gap").unwrap();
        assert_eq!(gap.observed, 1.0);
    }

    #[test]
    fn too_few_samples() {
        let tau = Parameter::new(0.0, 1.0).unwrap();
        assert!(geometry_report(&tau, Truncation::new(2).unwrap(), 1, 1).is_err());
    }
}

mod letters {
    use gccf::error::*;
    use gccf::geometry::*;
    use gccf::system::*;
    use num_complex::Complex64;

    #[test]
    fn parameter_domain() {
        let corner = Parameter::new(0.0, 1.0).unwrap();
        assert!(!corner.is_interior());
        assert!(Parameter::new(1.0, 2.0).unwrap().is_interior());
        assert!(matches!(Parameter::new(-0.1, 1.0), Err(Error::OutOfDomain { .. })));
        assert!(Parameter::new(0.0, 0.999).is_err());
        assert!(Parameter::new(f64::NAN, 2.0).is_err());
    }

    #[test]
    fn letter_values() {
        let i = Parameter::new(0.0, 1.0).unwrap();
        let t = Parameter::new(1.0, 1.0).unwrap();
        assert_eq!(letter_value(Letter::new(1, 1).unwrap(), &i), Complex64::new(1.0, 1.0));
        assert_eq!(letter_value(Letter::new(2, 3).unwrap(), &t), Complex64::new(5.0, 3.0));
        assert!(Letter::new(0, 1).is_err());
    }

    #[test]
    fn letter_norms() {
        let i = Parameter::new(0.0, 1.0).unwrap();
        let b = letter_deriv_norm(Letter::new(1, 1).unwrap(), &i);
        assert!((b.inf_norm - 0.188580).abs() < 1e-6);
        assert!((b.sup_norm - 0.589197).abs() < 1e-6);
        let b = letter_deriv_norm(Letter::new(2, 1).unwrap(), &i);
        let r = 7.25f64.sqrt();
        assert!((b.inf_norm - (r + 0.5).powi(-2)).abs() < 1e-15);
        assert!((b.sup_norm - (r - 0.5).powi(-2)).abs() < 1e-15);
        assert!((b.inf_norm - 0.098116).abs() < 1e-5);
        assert!((b.sup_norm - 0.208021).abs() < 1e-5);
        let b = letter_deriv_norm(Letter::new(100, 1).unwrap(), &i);
        let delta = Complex64::new(100.5, 1.0).norm() - 0.5;
        assert!((b.distortion() - ((delta + 1.0) / delta).powi(2)).abs() < 1e-12);
        assert!((b.distortion() - 1.0201).abs() < 1e-4);
    }

    #[test]
    fn letter_norms_agree_with_matrix_bounds() {
        let tau = Parameter::new(0.7, 1.3).unwrap();
        let x = NormDomain::Disk(DiskDomain::canonical());
        for l in Truncation::new(4).unwrap().letters() {
            let closed = letter_deriv_norm(l, &tau);
            let matrix = MobiusMap::letter(l.value(&tau)).deriv_bounds(&x).unwrap();
            assert!((closed.sup_norm - matrix.sup_norm).abs() < 1e-14);
            assert!((closed.inf_norm - matrix.inf_norm).abs() < 1e-14);
        }
    }

    #[test]
    fn word_limits() {
        let l = Letter::new(1, 1).unwrap();
        assert!(Word::new(vec![]).is_err());
        assert!(Word::new(vec![l; 16]).is_ok());
        assert!(Word::new(vec![l; 17]).is_err());
        assert!(Word::with_max_len(vec![l; 17], 20).is_ok());
    }

    #[test]
    fn truncation_enumerates_square() {
        let t = Truncation::new(3).unwrap();
        let letters: Vec<_> = t.letters().collect();
        assert_eq!(letters.len() as u64, t.letter_count());
        assert_eq!(letters[0], Letter::new(1, 1).unwrap());
        assert_eq!(letters[1], Letter::new(2, 1).unwrap());
        assert!(Truncation::new(0).is_err());
    }

    #[test]
    fn lens_contains_letter_images() {
        for (u, v) in [(0.0, 1.0), (0.3, 1.0), (2.0, 3.5), (0.0, 7.0)] {
            let tau = Parameter::new(u, v).unwrap();
            let lens = system_lens(&tau);
            let x = DiskDomain::canonical();
            for l in Truncation::new(6).unwrap().letters() {
                let phi = MobiusMap::letter(l.value(&tau));
                for k in 0..64 {
                    let z = x.center() + Complex64::from_polar(0.5, k as f64 / 64.0 * std::f64::consts::TAU);
                    let w = phi.apply(z).unwrap();
                    assert!(lens.contains(w, 1e-12), "{tau:?} {l:?} {w}");
                    assert!(x.contains(w, 1e-12));
                }
            }
        }
    }
}
