use std::f64::consts::PI;

use num_complex::Complex64;
use waveheat::kernel::ModeIndex;
use waveheat::moderesolvent::InputBasis;
use waveheat::resolventscan::*;
use waveheat::spectrum::{certified_eigenvalue, Branch, SpectrumOptions};

fn k(n: u64) -> ModeIndex {
    ModeIndex::new(n).unwrap()
}

fn light() -> ScanOptions {
    ScanOptions {
        m: 16,
        n: 128,
        ..ScanOptions::default()
    }
}

fn lambda(kk: u64) -> Complex64 {
    certified_eigenvalue(k(kk), Branch::Upper, SpectrumOptions::default())
        .unwrap()
        .eigenvalue
        .lambda
}

#[test]
fn peak_aligns_with_mode_branch() {
    let s = lambda(5).im;
    let sample = resolvent_norm_at(s, &light()).unwrap();
    assert_eq!(sample.argmax_k, k(5));
    assert!(sample.argmax_k <= sample.k_cutoff);
    assert_eq!(sample.k_cutoff, k((2.0 * s / PI).ceil() as u64 + 8));
}

#[test]
fn midpoint_far_below_neighbouring_peaks() {
    let o = light();
    let mid = resolvent_norm_at(5.5 * PI, &o).unwrap().norm_estimate;
    for kk in [5, 6] {
        let peak = resolvent_norm_at(lambda(kk).im, &o).unwrap().norm_estimate;
        assert!(peak > 100.0 * mid, "k={kk}: peak {peak}, midpoint {mid}");
    }
}

#[test]
fn symmetric_in_s() {
    let o = light();
    for s in [0.7, 4.469, 17.3, 31.0] {
        let a = resolvent_norm_at(s, &o).unwrap();
        let b = resolvent_norm_at(-s, &o).unwrap();
        assert!((a.norm_estimate - b.norm_estimate).abs() <= 1e-8 * a.norm_estimate, "{s}");
        assert_eq!(a.argmax_k, b.argmax_k);
    }
}

#[test]
fn small_frequencies_give_a_table() {
    let s: Vec<f64> = (5..=30).step_by(5).map(|j| j as f64 * 0.1).collect();
    let out = sweep(&s, &light()).unwrap();
    assert_eq!(out.len(), s.len());
    assert!(out.windows(2).all(|w| w[0].s < w[1].s));
    assert!(out.iter().all(|x| x.norm_estimate > 0.0 && x.norm_estimate.is_finite()));
}

#[test]
fn refined_peaks_dominate_inverse_distance() {
    // the lightweight basis falls a few parts per million short of 1 / dist
    let o = ScanOptions::default();
    let peaks = peak_scan(k(1), k(10), &o).unwrap();
    assert!(peaks.windows(2).all(|w| w[0].s < w[1].s));
    for (j, p) in peaks.iter().enumerate() {
        let kk = j as u64 + 1;
        let lam = lambda(kk);
        let dist = (Complex64::new(0.0, p.s) - lam).norm();
        assert!(p.norm_estimate * dist >= 1.0 - 1e-6, "k={kk}: {} * {dist}", p.norm_estimate);
        assert!((p.s - lam.im).abs() <= 50.0 * lam.re.abs());
    }
    let s10 = peaks[9].s;
    assert!((s10 / (10.0 * PI) - 1.0).abs() < 0.02, "{s10}");
    assert!(cubic_bound_constant(&peaks) < 1.0);
}

#[test]
fn peak_slope_near_three_on_short_window() {
    let peaks = peak_scan(k(5), k(14), &light()).unwrap();
    let fit = fit_exponent(&peaks, (0.0, f64::INFINITY)).unwrap();
    assert!((fit.slope - 3.0).abs() < 0.15, "{}", fit.slope);
    assert!(fit.residual_rms < 0.1);
    let off = sweep(&midpoints(k(5), k(14)), &light()).unwrap();
    let off_fit = fit_exponent(&off, (0.0, f64::INFINITY)).unwrap();
    assert!(off_fit.slope < 3.0, "{}", off_fit.slope);
}

#[test]
fn norm_non_decreasing_in_basis_size() {
    // the bases are nested at a fixed grid
    for (kk, s) in [(1u64, 0.5), (3, 9.9), (6, 19.109)] {
        let mut last = 0.0;
        for m in [4usize, 8, 16, 32] {
            let v = InputBasis::new(m, 128).unwrap().operator_norm(k(kk), s).unwrap().norm;
            assert!(v >= last * (1.0 - 1e-12), "k={kk} s={s} m={m}: {v} < {last}");
            last = v;
        }
    }
}

#[test]
fn refinement_error_reported() {
    let sample = resolvent_norm_at(lambda(3).im, &light()).unwrap();
    assert!(sample.refinement_error >= 0.0);
    assert!(sample.refinement_error < 1e-2 * sample.norm_estimate);
}

#[test]
fn empty_window_rejected() {
    let peaks = peak_scan(k(5), k(6), &light()).unwrap();
    assert!(matches!(
        fit_exponent(&peaks, (1e3, 1e4)),
        Err(ScanError::InsufficientSamples { got: 0, .. })
    ));
}
