use num_complex::Complex64;
use proptest::prelude::*;
use waveheat::kernel::hyperbolic::cosh;
use waveheat::kernel::*;

fn k(n: u64) -> ModeIndex {
    ModeIndex::new(n).unwrap()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

// Reference values: tests/oracle/kernel_values.py

#[test]
fn q_reference_value() {
    let q = q_of(k(1), Complex64::new(0.0, 1.0));
    assert!(rel(q, Complex64::new(3.1456112312996152972, 0.15895161964863154548)) < 1e-15);
}

#[test]
fn p_reference_value() {
    let p = p_of(k(2), SpectralParameter::on_axis(10.0));
    assert_eq!(p.re, 0.0);
    assert!((p.im - 7.7795618382812900888).abs() < 1e-14);
}

#[test]
fn real_arguments_give_real_roots() {
    let q = q_of(k(5), Complex64::new(-1.0, 0.0));
    assert_eq!(q.im, 0.0);
    assert!((q.re - (25.0 * std::f64::consts::PI.powi(2) - 1.0).sqrt()).abs() < 1e-13);
}

#[test]
fn scaled_determinant_reference_value() {
    let d = det_m_scaled(k(3), 50.0);
    assert!(rel(d, Complex64::new(-224.79553980851269296, 65.877511039322279305)) < 1e-12);
}

#[test]
fn scaled_determinant_dips_near_first_eigenvalue() {
    let s1 = 4.4690623010991663;
    let at = det_m_scaled(k(1), s1).norm();
    for ds in [-0.3, -0.15, 0.15, 0.3] {
        assert!(det_m_scaled(k(1), s1 + ds).norm() > at);
    }
}

#[test]
fn scaled_determinant_bounded_below_far_out() {
    let d = det_m_scaled(k(1), 1e6);
    assert!(d.norm().is_finite() && d.norm() > 1.0);
}

proptest! {
    #[test]
    fn branch_has_nonnegative_real_part(kk in 1u64..1000, re in -50.0f64..50.0, im in -500.0f64..500.0) {
        let l = Complex64::new(re, im);
        prop_assert!(p_of(k(kk), l).re >= 0.0);
        prop_assert!(q_of(k(kk), l).re >= 0.0);
    }

    #[test]
    fn factorization_identity_moderate_hyperbolics(kk in 1u64..=3, re in -5.0f64..5.0, im in -100.0f64..100.0) {
        let l = Complex64::new(re, im);
        let (p, q) = (p_of(k(kk), l), q_of(k(kk), l));
        let (cp, cq) = (cosh(p), cosh(q));
        prop_assume!(cp.norm() > 1e-6 && cp.norm() < 1e6 && cq.norm() > 1e-6 && cq.norm() < 1e6);
        let d = det_m(k(kk), l);
        let f = p * q * cp * cq * char_value(k(kk), l);
        prop_assert!((d - f).norm() <= 1e-10 * d.norm());
    }

    #[test]
    fn factorization_identity_away_from_poles(kk in 1u64..=50, re in -5.0f64..5.0, im in -100.0f64..100.0) {
        let l = Complex64::new(re, im);
        prop_assume!(char_poles_near(k(kk), l, 1e-4).is_empty());
        let (p, q) = (p_of(k(kk), l), q_of(k(kk), l));
        let d = det_m(k(kk), l);
        let f = p * q * cosh(p) * cosh(q) * char_value(k(kk), l);
        prop_assert!((d - f).norm() <= 1e-10 * d.norm());
    }

    #[test]
    fn conjugation_symmetry(kk in 1u64..200, re in -20.0f64..20.0, im in -700.0f64..700.0) {
        let l = Complex64::new(re, im);
        let a = char_value(k(kk), l.conj());
        let b = char_value(k(kk), l).conj();
        prop_assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0));
    }

    #[test]
    fn scaled_determinant_is_finite(kk in 1u64..=1_000_000, e in -3.0f64..12.0, neg in any::<bool>()) {
        let s = if neg { -(10f64.powf(e)) } else { 10f64.powf(e) };
        let d = det_m_scaled(k(kk), s);
        prop_assert!(d.re.is_finite() && d.im.is_finite());
    }

    #[test]
    fn q_on_axis_in_right_half_plane(kk in 1u64..100_000, e in -6.0f64..12.0) {
        let s = 10f64.powf(e);
        for s in [s, -s] {
            prop_assert!(q_of(k(kk), SpectralParameter::on_axis(s)).re > 0.0);
        }
    }
}

#[test]
fn scaled_determinant_minimum_matches_reference() {
    // tests/oracle/det_lower_bound.py
    let m = scaled_det_minimum(3.3, 1e6, 1000).unwrap();
    assert_eq!(m.k, ModeIndex::new(1).unwrap());
    assert!((m.value - 1.55409011074401).abs() < 1e-10 * m.value, "{m:?}");
    assert!((m.s - 4.46890675083857).abs() < 1e-9);
    assert!(scaled_det_minimum(1.0, 3.0, 10).is_none());
}
