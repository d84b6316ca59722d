use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use waveheat::kernel::{char_value, det_m, ModeIndex};
use waveheat::spectrum::*;

fn k(n: u64) -> ModeIndex {
    ModeIndex::new(n).unwrap()
}

/// Roots from 40-digit Newton, see tests/oracle/eigenvalues.py.
const REFERENCE_ROOTS: &[(u64, f64, f64)] = &[
    (1, -0.15491295581093071, 4.4690623010991663),
    (2, -0.031660316763404071, 7.0267617656475145),
    (3, -0.010580748089179481, 9.9350262344884797),
    (5, -0.0024456570206144638, 16.01910754755876),
    (10, -0.00031505301192009143, 31.572619987114721),
    (20, -3.9685976078167035e-5, 62.910344163177455),
    (50, -2.5454231946493092e-6, 157.11104547301029),
    (100, -3.1827686439275921e-7, 314.17497293006957),
    (200, -3.9787703525677383e-8, 628.32638465053736),
];

/// Extremes of `-Re(lambda) Im(lambda)^3` over `k = 10..200`, same oracle.
const R_BAND_MIN: f64 = 9.8697184548049497;
const R_BAND_MAX: f64 = 9.9155201866347147;

#[test]
fn roots_match_high_precision_reference() {
    for &(kk, re, im) in REFERENCE_ROOTS {
        let ev = refine_root(k(kk), seed_point(k(kk), Branch::Upper), NewtonOptions::default()).unwrap();
        // The real part is many orders below the ulp of the imaginary part at
        // large k, so its relative accuracy is limited by conditioning.
        assert!(
            ((ev.lambda.re - re) / re).abs() < 1e-7,
            "k={kk}: re {} vs {re}",
            ev.lambda.re
        );
        assert!(((ev.lambda.im - im) / im).abs() < 1e-14, "k={kk}: im {} vs {im}", ev.lambda.im);
        assert!(ev.lambda.re < 0.0);
    }
}

#[test]
fn first_root_residual_below_tolerance() {
    let ev = refine_root(k(1), seed_point(k(1), Branch::Upper), NewtonOptions::default()).unwrap();
    assert!(ev.residual <= 1e-12);
    assert!(char_value(k(1), ev.lambda).norm() <= 1e-10);
    let d = det_m(k(1), ev.lambda).norm();
    assert!(d < 1e-12, "det M at root {d}");
}

#[test]
fn roots_inside_seed_disks_and_certified() {
    let eigs = spectrum_branch(k(1), k(200), Branch::Upper, SpectrumOptions::default()).unwrap();
    assert_eq!(eigs.len(), 200);
    for ce in &eigs {
        let e = ce.eigenvalue;
        let r = seed_disk_radius(e.k);
        assert!((e.lambda - e.seed).norm() < r, "k={}", e.k);
        assert_eq!(ce.certificate.winding_count, 1);
    }
    assert_eq!(disk_certified_from(&eigs), Some(k(1)));
}

#[test]
fn imaginary_parts_increase_and_align_with_k_pi() {
    let eigs = spectrum_branch(k(1), k(50), Branch::Upper, SpectrumOptions::default()).unwrap();
    for w in eigs.windows(2) {
        assert!(w[1].eigenvalue.lambda.im > w[0].eigenvalue.lambda.im);
    }
    let e10 = eigs[9].eigenvalue;
    let ratio = e10.lambda.im / (10.0 * PI);
    assert!(ratio > 1.0 && ratio < 1.01, "{ratio}");
}

#[test]
fn lower_branch_is_conjugate() {
    let up = spectrum_branch(k(1), k(8), Branch::Upper, SpectrumOptions::default()).unwrap();
    let down = spectrum_branch(k(1), k(8), Branch::Lower, SpectrumOptions::default()).unwrap();
    for (a, b) in up.iter().zip(&down) {
        assert!((a.eigenvalue.lambda.conj() - b.eigenvalue.lambda).norm() < 2e-12);
    }
    let all: Vec<Eigenvalue> = up.iter().chain(&down).map(|c| c.eigenvalue).collect();
    let rep = asymptotics_report(&all).unwrap();
    for j in 0..8 {
        assert!((rep.rows[j].r_k - rep.rows[j + 8].r_k).abs() <= 1e-12 * rep.rows[j].r_k);
    }
}

#[test]
fn cubic_rate_band_matches_reference() {
    let eigs = spectrum_branch(k(10), k(200), Branch::Upper, SpectrumOptions::default()).unwrap();
    let evs: Vec<Eigenvalue> = eigs.iter().map(|c| c.eigenvalue).collect();
    let rep = asymptotics_report(&evs).unwrap();
    assert!(((rep.r_min - R_BAND_MIN) / R_BAND_MIN).abs() < 1e-6, "{}", rep.r_min);
    assert!(((rep.r_max - R_BAND_MAX) / R_BAND_MAX).abs() < 1e-6, "{}", rep.r_max);
    assert!(rep.band_ratio() <= 10.0);
    // the limit of r_k is pi^2
    assert!((rep.r_limit - PI * PI).abs() < 1e-2, "{}", rep.r_limit);
    for w in rep.rows.windows(2) {
        assert!(w[1].im_deviation < w[0].im_deviation);
    }
    assert!(rep.rows.last().unwrap().im_deviation < 1e-2);
}

#[test]
fn certificate_in_seed_disk_at_k20() {
    let c = count_roots_in_disk(k(20), seed_point(k(20), Branch::Upper), 20f64.powi(-3), 512).unwrap();
    assert_eq!(c.winding_count, 1);
    assert_eq!(c.poles_enclosed, 0);
}

#[test]
fn empty_disk_in_resolvent_region() {
    let center = Complex64::new(-10.0, PI * 26f64.sqrt());
    let c = count_roots_in_disk(k(5), center, 1e-3, 512).unwrap();
    assert_eq!(c.winding_count, 0);
}

#[test]
fn rectangle_sweep_finds_branch_root() {
    let opts = NewtonOptions::default();
    for kk in [1u64, 2, 4] {
        let roots = sweep_rectangle(k(kk), Rect::sweep_window(k(kk), Branch::Upper), opts).unwrap();
        let ev = refine_root(k(kk), seed_point(k(kk), Branch::Upper), opts).unwrap();
        assert!(
            roots.iter().any(|r| (r.eigenvalue.lambda - ev.lambda).norm() < 1e-10),
            "k={kk}: {roots:?}"
        );
        for r in &roots {
            assert!(r.eigenvalue.lambda.re < 0.0);
            assert_eq!(r.certificate.winding_count, 1);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugate_seeds_converge_to_conjugate_roots(kk in 1u64..120) {
        let opts = NewtonOptions::default();
        let up = refine_root(k(kk), seed_point(k(kk), Branch::Upper), opts).unwrap();
        let down = refine_root(k(kk), seed_point(k(kk), Branch::Lower), opts).unwrap();
        prop_assert!((up.lambda.conj() - down.lambda).norm() <= 2.0 * opts.tol.max(4.0 * f64::EPSILON * up.lambda.norm()));
        prop_assert!(up.lambda.re < 0.0);
    }

    #[test]
    fn enlarged_disk_certifies_single_root(kk in 1u64..200) {
        let ev = refine_root(k(kk), seed_point(k(kk), Branch::Upper), NewtonOptions::default()).unwrap();
        let r = seed_disk_radius(k(kk)).max(10.0 * (ev.lambda - ev.seed).norm());
        let c = count_roots_in_disk(k(kk), ev.seed, r, 512).unwrap();
        prop_assert_eq!(c.winding_count, 1);
    }
}
