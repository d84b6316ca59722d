//! Resolvent norm along the imaginary axis, assembled from mode norms.
//!
//! The energy space splits orthogonally over transverse modes, so
//! `|R(is, A)|` is the supremum over `k` of the mode operator norms. Modes
//! with `k pi` well above `|s|` contribute at most a slowly decaying plateau of
//! height about `1 / |s|`, which is why the supremum is truncated at
//! `k_cutoff = ceil(rho |s| / pi) + 8` and the truncation is checked on the
//! last few modes.

use std::f64::consts::PI;

use log::debug;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fit::least_squares_line;
use crate::kernel::ModeIndex;
use crate::moderesolvent::{perturb_off_degeneracy, InputBasis, ResolventError};
use crate::spectrum::{certified_eigenvalue, Branch, SpectrumError, SpectrumOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScanError {
    #[error("mode norms at s = {s} have not decayed by k_cutoff = {k_cutoff} (tail/max = {ratio:.3}); increase rho")]
    TailNotDecayed { s: f64, k_cutoff: ModeIndex, ratio: f64 },
    #[error("need at least {needed} samples in the fit window, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Resolvent(#[from] ResolventError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    /// Truncation safety factor in `k_cutoff`.
    pub rho: f64,
    /// Basis functions per input component.
    pub m: usize,
    /// Interior grid nodes per interval.
    pub n: usize,
    pub golden_iterations: usize,
    /// Largest half-width of the peak bracket around `Im lambda_k`.
    pub peak_half_width: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            rho: 2.0,
            m: 32,
            n: 256,
            golden_iterations: 30,
            peak_half_width: 0.5,
        }
    }
}

impl ScanOptions {
    pub fn validate(&self) -> Result<(), ScanError> {
        if !(self.rho >= 1.5) {
            return Err(ScanError::InvalidArgument(format!("rho must be >= 1.5, got {}", self.rho)));
        }
        if self.m < 2 || 2 * self.m > self.n {
            return Err(ScanError::InvalidArgument(format!(
                "need 2 <= m <= n/2 (m = {}, n = {})",
                self.m, self.n
            )));
        }
        if !(self.peak_half_width > 0.0) {
            return Err(ScanError::InvalidArgument("peak half-width must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventSample {
    pub s: f64,
    pub norm_estimate: f64,
    pub argmax_k: ModeIndex,
    pub k_cutoff: ModeIndex,
    /// `|norm(m, n) - norm(m/2, n/2)|` on the dominating mode.
    pub refinement_error: f64,
    /// Largest of the last five mode norms relative to the maximum.
    pub tail_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    /// `(log |s|, log norm)` pairs that entered the fit.
    pub samples: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    pub window: (f64, f64),
}

pub const TAIL_MODES: usize = 5;
pub const TAIL_FRACTION: f64 = 0.1;
pub const MIN_FIT_SAMPLES: usize = 5;
/// Peak brackets never extend beyond this many `|Re lambda_k|` from
/// `Im lambda_k`, which keeps neighbouring roots of the same mode out.
const PEAK_BRACKET_WIDTHS: f64 = 50.0;

pub fn k_cutoff(s: f64, rho: f64) -> ModeIndex {
    let k = (rho * s.abs() / PI).ceil() as u64 + 8;
    ModeIndex::new(k).expect("cutoff is at least 8")
}

/// Norm of mode `k` at `s`, moved off `s = +-k pi` if needed.
fn mode_norm(basis: &InputBasis, k: ModeIndex, s: f64) -> Result<f64, ResolventError> {
    let s = perturb_off_degeneracy(k, s);
    Ok(basis.operator_norm(k, s)?.norm)
}

/// The truncation is accepted if the last modes are small against the
/// maximum, or if they are still non-increasing in `k` (the plateau regime of
/// small `|s|`, where the maximum sits at low `k` and the tail only creeps
/// down).
fn tail_accepted(norms: &[f64], max: f64) -> (bool, f64) {
    let tail = &norms[norms.len().saturating_sub(TAIL_MODES)..];
    let ratio = tail.iter().copied().fold(0.0, f64::max) / max;
    let monotone = tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
    let max_before_tail = norms.len() > TAIL_MODES && norms[..norms.len() - TAIL_MODES].iter().any(|&v| v >= max);
    (ratio < TAIL_FRACTION || (monotone && max_before_tail), ratio)
}

pub fn resolvent_norm_at(s: f64, opts: &ScanOptions) -> Result<ResolventSample, ScanError> {
    opts.validate()?;
    if !(s.abs() >= 0.1) || !s.is_finite() {
        return Err(ScanError::InvalidArgument(format!("|s| must be >= 0.1, got {s}")));
    }
    let basis = InputBasis::new(opts.m, opts.n)?;
    let kc = k_cutoff(s, opts.rho);
    let norms = (1..=kc.get())
        .into_par_iter()
        .map(|k| mode_norm(&basis, ModeIndex::new(k).expect("k >= 1"), s))
        .collect::<Result<Vec<f64>, _>>()?;
    let (imax, max) = norms
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let (ok, tail_ratio) = tail_accepted(&norms, max);
    if !ok {
        return Err(ScanError::TailNotDecayed {
            s,
            k_cutoff: kc,
            ratio: tail_ratio,
        });
    }
    let argmax = ModeIndex::new(imax as u64 + 1).expect("k >= 1");
    let coarse = InputBasis::new(opts.m / 2, opts.n / 2)?;
    let refinement_error = (max - mode_norm(&coarse, argmax, s)?).abs();
    debug!("s = {s}: norm {max:.6e} at k = {argmax}, cutoff {kc}");
    Ok(ResolventSample {
        s,
        norm_estimate: max,
        argmax_k: argmax,
        k_cutoff: kc,
        refinement_error,
        tail_ratio,
    })
}

/// Samples at every `s`, returned sorted by `s`.
pub fn sweep(s_values: &[f64], opts: &ScanOptions) -> Result<Vec<ResolventSample>, ScanError> {
    let mut out = s_values
        .par_iter()
        .map(|&s| resolvent_norm_at(s, opts))
        .collect::<Result<Vec<_>, _>>()?;
    out.sort_by(|a, b| a.s.total_cmp(&b.s));
    Ok(out)
}

/// Maximizer of a unimodal `f` on `[a, b]`.
pub fn golden_section_max(
    mut a: f64,
    mut b: f64,
    iterations: usize,
    mut f: impl FnMut(f64) -> Result<f64, ScanError>,
) -> Result<(f64, f64), ScanError> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..iterations {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// Peak location for mode `k`: the maximizer of its mode norm near
/// `Im lambda_k^+`, refined by golden section.
pub fn refine_peak(k: ModeIndex, opts: &ScanOptions) -> Result<f64, ScanError> {
    opts.validate()?;
    let lam = certified_eigenvalue(k, Branch::Upper, SpectrumOptions::default())?
        .eigenvalue
        .lambda;
    let half = opts.peak_half_width.min(PEAK_BRACKET_WIDTHS * lam.re.abs());
    let basis = InputBasis::new(opts.m, opts.n)?;
    let (s, _) = golden_section_max(lam.im - half, lam.im + half, opts.golden_iterations, |s| {
        Ok(mode_norm(&basis, k, s)?)
    })?;
    Ok(s)
}

/// Refined peak samples for `k_min..=k_max`, sorted by `s`.
pub fn peak_scan(k_min: ModeIndex, k_max: ModeIndex, opts: &ScanOptions) -> Result<Vec<ResolventSample>, ScanError> {
    if k_min > k_max {
        return Err(ScanError::InvalidArgument(format!("empty mode range {k_min}..{k_max}")));
    }
    let peaks = (k_min.get()..=k_max.get())
        .into_par_iter()
        .map(|k| refine_peak(ModeIndex::new(k).expect("k >= 1"), opts))
        .collect::<Result<Vec<f64>, _>>()?;
    sweep(&peaks, opts)
}

/// Off-peak points `s = (k + 1/2) pi`, halfway between neighbouring peaks.
pub fn midpoints(k_min: ModeIndex, k_max: ModeIndex) -> Vec<f64> {
    (k_min.get()..=k_max.get()).map(|k| (k as f64 + 0.5) * PI).collect()
}

/// Least-squares slope of `log norm` against `log |s|` over samples with
/// `|s|` in `window`.
pub fn fit_exponent(samples: &[ResolventSample], window: (f64, f64)) -> Result<GrowthFit, ScanError> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|x| x.s.abs() >= window.0 && x.s.abs() <= window.1)
        .map(|x| (x.s.abs().ln(), x.norm_estimate.ln()))
        .collect();
    if pts.len() < MIN_FIT_SAMPLES {
        return Err(ScanError::InsufficientSamples {
            needed: MIN_FIT_SAMPLES,
            got: pts.len(),
        });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
    let line = least_squares_line(&xs, &ys).ok_or(ScanError::InsufficientSamples {
        needed: MIN_FIT_SAMPLES,
        got: 1,
    })?;
    Ok(GrowthFit {
        samples: pts,
        slope: line.slope,
        intercept: line.intercept,
        residual_rms: line.residual_rms,
        window,
    })
}

/// `max norm / |s|^3` over the samples.
pub fn cubic_bound_constant(samples: &[ResolventSample]) -> f64 {
    samples
        .iter()
        .map(|x| x.norm_estimate / x.s.abs().powi(3))
        .fold(0.0, f64::max)
}
