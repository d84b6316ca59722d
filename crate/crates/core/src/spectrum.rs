//! Location and certification of eigenvalues near the imaginary axis.
//!
//! For every mode `k` the generator has an eigenvalue close to the seed
//! `mu_k^+- = +-i pi sqrt(k^2 + 1)`, where `p_k = i pi` and `tanh p_k` vanishes.
//! The root is refined by damped Newton on the characteristic function and
//! certified by the argument principle on a disk around the seed. The
//! characteristic function has poles on the imaginary axis, so the enclosed
//! zero count is the winding number plus the number of enclosed poles, which
//! are known in closed form (see [`char_poles_near`]).
//!
//! When the disk certificate fails (small `k`, where the seed is not yet close
//! enough), a rectangular region left of the axis is swept instead and
//! subdivided until every piece holds a single root.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::{char_poles_near, char_value, char_value_and_derivative, ModeIndex};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("Newton iteration for k={k} did not converge in {iterations} steps (last iterate {last}, residual {residual:e})")]
    NonConvergence {
        k: ModeIndex,
        last: Complex64,
        residual: f64,
        iterations: usize,
    },
    #[error("Newton iterate for k={k} left the open left half-plane at {last}")]
    EscapedHalfPlane { k: ModeIndex, last: Complex64 },
    #[error("characteristic function (k={k}) nearly vanishes on the contour at {point}")]
    ZeroOnContour { k: ModeIndex, point: Complex64 },
    #[error("argument-principle quadrature for k={k} is inconclusive (winding {winding}, defect {defect:.3})")]
    QuadratureInconclusive {
        k: ModeIndex,
        winding: Complex64,
        defect: f64,
    },
    #[error("no single-root certificate found for k={k} (last count {count})")]
    CertificateFailure { k: ModeIndex, count: i64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Which of the two conjugate branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Upper,
    Lower,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Upper => 1.0,
            Branch::Lower => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Branch::Upper => '+',
            Branch::Lower => '-',
        }
    }
}

/// A located root of the characteristic function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub k: ModeIndex,
    pub lambda: Complex64,
    /// `|char_value(k, lambda)|`.
    pub residual: f64,
    pub seed: Complex64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContourShape {
    Disk,
    Rectangle,
}

/// Argument-principle root count on a closed contour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootCertificate {
    pub k: ModeIndex,
    pub shape: ContourShape,
    pub center: Complex64,
    /// Disk radius, or half-diagonal of a rectangle.
    pub radius: f64,
    /// Number of enclosed zeros (winding number plus enclosed poles).
    pub winding_count: i64,
    pub poles_enclosed: usize,
    pub quadrature_points: usize,
    /// Distance of the raw winding number from the nearest integer.
    pub defect: f64,
    pub min_modulus: f64,
}

/// Eigenvalue paired with the certificate that isolates it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifiedEigenvalue {
    pub eigenvalue: Eigenvalue,
    pub certificate: RootCertificate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tol: 1e-12,
            max_iter: 60,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOptions {
    pub newton: NewtonOptions,
    pub contour_points: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            newton: NewtonOptions::default(),
            contour_points: 512,
        }
    }
}

/// `+-i pi sqrt(k^2 + 1)`.
pub fn seed_point(k: ModeIndex, branch: Branch) -> Complex64 {
    let kk = k.get() as f64;
    Complex64::new(0.0, branch.sign() * PI * (kk * kk + 1.0).sqrt())
}

/// Radius of the disk `Omega_k` around the seed, `k^-3`.
pub fn seed_disk_radius(k: ModeIndex) -> f64 {
    (k.get() as f64).powi(-3)
}

/// Damped Newton iteration on the characteristic function.
///
/// Converges when `|char_value| <= tol`, or when the Newton correction drops
/// below a few ulps of the iterate. At large `k` the derivative grows like
/// `k^2` and `tol` is no longer reachable by any representable `lambda`; the
/// second test then returns the closest double to the root.
pub fn refine_root(
    k: ModeIndex,
    seed: Complex64,
    opts: NewtonOptions,
) -> Result<Eigenvalue, SpectrumError> {
    if !(opts.tol > 0.0) {
        return Err(SpectrumError::InvalidArgument(format!(
            "tolerance must be positive, got {}",
            opts.tol
        )));
    }
    let mut z = seed;
    let (mut c, mut d) = char_value_and_derivative(k, z);
    let done = |z: Complex64, it: usize, c: Complex64| {
        if z.re >= 0.0 {
            return Err(SpectrumError::EscapedHalfPlane { k, last: z });
        }
        Ok(Eigenvalue {
            k,
            lambda: z,
            residual: c.norm(),
            seed,
            iterations: it,
        })
    };
    for it in 0..=opts.max_iter {
        if c.norm() <= opts.tol {
            return done(z, it, c);
        }
        let step = c / d;
        if step.norm() <= 4.0 * f64::EPSILON * z.norm() {
            return done(z, it, c);
        }
        if it == opts.max_iter {
            break;
        }
        let mut t = 1.0;
        let (mut zn, mut cn, mut dn);
        loop {
            zn = z - step * t;
            (cn, dn) = char_value_and_derivative(k, zn);
            if cn.norm() < c.norm() || t < 1.0 / 1024.0 {
                break;
            }
            t *= 0.5;
        }
        if !(zn.re.is_finite() && zn.im.is_finite()) {
            break;
        }
        z = zn;
        c = cn;
        d = dn;
        if z.re >= 0.0 {
            return Err(SpectrumError::EscapedHalfPlane { k, last: z });
        }
    }
    Err(SpectrumError::NonConvergence {
        k,
        last: z,
        residual: c.norm(),
        iterations: opts.max_iter,
    })
}

/// Argument-principle zero count of the characteristic function in the disk
/// `|lambda - center| < radius`, by trapezoid quadrature of the logarithmic
/// derivative on `n_points` equispaced nodes.
pub fn count_roots_in_disk(
    k: ModeIndex,
    center: Complex64,
    radius: f64,
    n_points: usize,
) -> Result<RootCertificate, SpectrumError> {
    if !(radius > 0.0) || n_points < 8 {
        return Err(SpectrumError::InvalidArgument(format!(
            "need radius > 0 and at least 8 nodes (radius {radius}, nodes {n_points})"
        )));
    }
    let n = n_points + n_points % 2;
    let mut terms = Vec::with_capacity(n);
    let mut min_mod = f64::INFINITY;
    let mut max_mod: f64 = 0.0;
    let mut argmin = center;
    for j in 0..n {
        let theta = 2.0 * PI * j as f64 / n as f64;
        let offset = Complex64::from_polar(radius, theta);
        let z = center + offset;
        let (c, d) = char_value_and_derivative(k, z);
        let m = c.norm();
        if m < min_mod {
            min_mod = m;
            argmin = z;
        }
        max_mod = max_mod.max(m);
        terms.push(d / c * offset);
    }
    if !(min_mod >= 1e-6 * max_mod) || !min_mod.is_finite() {
        return Err(SpectrumError::ZeroOnContour { k, point: argmin });
    }
    let full: Complex64 = terms.iter().sum::<Complex64>() / n as f64;
    let half: Complex64 = terms.iter().step_by(2).sum::<Complex64>() / (n / 2) as f64;
    let rounded = full.re.round();
    let defect = (full.re - rounded).abs() + full.im.abs() + (full - half).norm();
    if !(defect < 0.1) {
        return Err(SpectrumError::QuadratureInconclusive {
            k,
            winding: full,
            defect,
        });
    }
    let poles = char_poles_near(k, center, radius).len();
    Ok(RootCertificate {
        k,
        shape: ContourShape::Disk,
        center,
        radius,
        winding_count: rounded as i64 + poles as i64,
        poles_enclosed: poles,
        quadrature_points: n,
        defect,
        min_modulus: min_mod,
    })
}

/// Axis-aligned rectangle in the spectral plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.re_min + self.re_max),
            0.5 * (self.im_min + self.im_max),
        )
    }

    pub fn half_diagonal(&self) -> f64 {
        0.5 * Complex64::new(self.re_max - self.re_min, self.im_max - self.im_min).norm()
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re > self.re_min && z.re < self.re_max && z.im > self.im_min && z.im < self.im_max
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }

    fn quarters(&self) -> [Rect; 4] {
        let c = self.center();
        [
            Rect { re_max: c.re, im_max: c.im, ..*self },
            Rect { re_min: c.re, im_max: c.im, ..*self },
            Rect { re_min: c.re, im_min: c.im, ..*self },
            Rect { re_max: c.re, im_min: c.im, ..*self },
        ]
    }

    /// Default search window for mode `k` on the given branch:
    /// `Re in [-5, -1e-3]`, `|Im| in [k pi - 2, k pi + 4]`.
    pub fn sweep_window(k: ModeIndex, branch: Branch) -> Rect {
        let kp = k.wavenumber();
        let (lo, hi) = (kp - 2.0, kp + 4.0);
        let (im_min, im_max) = match branch {
            Branch::Upper => (lo, hi),
            Branch::Lower => (-hi, -lo),
        };
        Rect {
            re_min: -5.0,
            re_max: -1e-3,
            im_min,
            im_max,
        }
    }
}

/// Phase change of the characteristic function along a segment, with
/// adaptive bisection so that no sub-step turns by more than `pi/4`.
fn phase_along(
    k: ModeIndex,
    a: Complex64,
    ca: Complex64,
    b: Complex64,
    cb: Complex64,
    depth: u32,
    evals: &mut usize,
    scale: f64,
) -> Result<f64, SpectrumError> {
    let d = (cb / ca).arg();
    if d.abs() <= PI / 4.0 || depth == 0 {
        if depth == 0 && d.abs() > PI / 4.0 {
            return Err(SpectrumError::QuadratureInconclusive {
                k,
                winding: Complex64::new(d, 0.0),
                defect: d.abs(),
            });
        }
        return Ok(d);
    }
    let m = (a + b) * 0.5;
    let cm = char_value(k, m);
    *evals += 1;
    if cm.norm() < 1e-14 * scale {
        return Err(SpectrumError::ZeroOnContour { k, point: m });
    }
    Ok(phase_along(k, a, ca, m, cm, depth - 1, evals, scale)?
        + phase_along(k, m, cm, b, cb, depth - 1, evals, scale)?)
}

/// Zero count inside a rectangle by tracking the argument of the
/// characteristic function around its boundary.
pub fn count_roots_in_rect(k: ModeIndex, rect: Rect) -> Result<RootCertificate, SpectrumError> {
    const SEGMENTS_PER_EDGE: usize = 64;
    let corners = rect.corners();
    let mut pts = Vec::with_capacity(4 * SEGMENTS_PER_EDGE + 1);
    for e in 0..4 {
        let (a, b) = (corners[e], corners[(e + 1) % 4]);
        for j in 0..SEGMENTS_PER_EDGE {
            pts.push(a + (b - a) * (j as f64 / SEGMENTS_PER_EDGE as f64));
        }
    }
    pts.push(corners[0]);
    let vals: Vec<Complex64> = pts.iter().map(|&z| char_value(k, z)).collect();
    let scale = vals.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut min_mod = f64::INFINITY;
    for (z, c) in pts.iter().zip(&vals) {
        if !(c.norm() >= 1e-14 * scale) {
            return Err(SpectrumError::ZeroOnContour { k, point: *z });
        }
        min_mod = min_mod.min(c.norm());
    }
    let mut evals = pts.len();
    let mut total = 0.0;
    for j in 0..pts.len() - 1 {
        total += phase_along(k, pts[j], vals[j], pts[j + 1], vals[j + 1], 40, &mut evals, scale)?;
    }
    let winding = total / (2.0 * PI);
    let rounded = winding.round();
    let poles = char_poles_near(k, rect.center(), rect.half_diagonal())
        .into_iter()
        .filter(|&z| rect.contains(z))
        .count();
    Ok(RootCertificate {
        k,
        shape: ContourShape::Rectangle,
        center: rect.center(),
        radius: rect.half_diagonal(),
        winding_count: rounded as i64 + poles as i64,
        poles_enclosed: poles,
        quadrature_points: evals,
        defect: (winding - rounded).abs(),
        min_modulus: min_mod,
    })
}

/// All roots in `rect`, each isolated in its own sub-rectangle.
pub fn sweep_rectangle(
    k: ModeIndex,
    rect: Rect,
    opts: NewtonOptions,
) -> Result<Vec<CertifiedEigenvalue>, SpectrumError> {
    let mut found = Vec::new();
    sweep_into(k, rect, opts, 14, &mut found)?;
    found.sort_by(|a, b| {
        a.eigenvalue
            .lambda
            .im
            .total_cmp(&b.eigenvalue.lambda.im)
            .then(a.eigenvalue.lambda.re.total_cmp(&b.eigenvalue.lambda.re))
    });
    Ok(found)
}

fn sweep_into(
    k: ModeIndex,
    rect: Rect,
    opts: NewtonOptions,
    depth: u32,
    out: &mut Vec<CertifiedEigenvalue>,
) -> Result<(), SpectrumError> {
    let cert = match count_roots_in_rect(k, rect) {
        Ok(c) => c,
        // A root sitting on an internal cut line: nudge the split.
        Err(SpectrumError::ZeroOnContour { .. }) if depth > 0 => {
            let shrink = 1e-3 * (rect.re_max - rect.re_min);
            let nudged = Rect {
                re_max: rect.re_max - shrink,
                ..rect
            };
            return sweep_into(k, nudged, opts, depth - 1, out);
        }
        Err(e) => return Err(e),
    };
    match cert.winding_count {
        0 => Ok(()),
        1 => {
            if let Ok(ev) = refine_root(k, rect.center(), opts) {
                if rect.contains(ev.lambda) {
                    out.push(CertifiedEigenvalue {
                        eigenvalue: ev,
                        certificate: cert,
                    });
                    return Ok(());
                }
            }
            if depth == 0 {
                return Err(SpectrumError::CertificateFailure { k, count: 1 });
            }
            for q in rect.quarters() {
                sweep_into(k, q, opts, depth - 1, out)?;
            }
            Ok(())
        }
        n if n < 0 || depth == 0 => Err(SpectrumError::CertificateFailure { k, count: n }),
        _ => {
            for q in rect.quarters() {
                sweep_into(k, q, opts, depth - 1, out)?;
            }
            Ok(())
        }
    }
}

/// Locate and certify the eigenvalue of mode `k` on one branch.
///
/// First tries Newton from the seed with a disk certificate on `Omega_k`
/// (radius `k^-3`), then on the enlarged disk of radius
/// `max(k^-3, 10 |lambda - seed|)`. If neither isolates a single root the
/// default sweep window is searched and the root closest to the seed is kept.
pub fn certified_eigenvalue(
    k: ModeIndex,
    branch: Branch,
    opts: SpectrumOptions,
) -> Result<CertifiedEigenvalue, SpectrumError> {
    let seed = seed_point(k, branch);
    let newton = refine_root(k, seed, opts.newton);
    if let Ok(ev) = newton {
        let dist = (ev.lambda - seed).norm();
        let r0 = seed_disk_radius(k);
        let mut radii = Vec::with_capacity(2);
        if dist < r0 {
            radii.push(r0);
        }
        let enlarged = r0.max(10.0 * dist);
        if radii.first() != Some(&enlarged) {
            radii.push(enlarged);
        }
        for r in radii {
            if let Ok(cert) = count_roots_in_disk(k, seed, r, opts.contour_points) {
                if cert.winding_count == 1 {
                    return Ok(CertifiedEigenvalue {
                        eigenvalue: ev,
                        certificate: cert,
                    });
                }
            }
        }
    }
    let roots = sweep_rectangle(k, Rect::sweep_window(k, branch), opts.newton)?;
    let best = roots
        .into_iter()
        .min_by(|a, b| {
            let da = (a.eigenvalue.lambda - seed).norm();
            let db = (b.eigenvalue.lambda - seed).norm();
            da.total_cmp(&db)
        })
        .ok_or(match newton {
            Err(e) => e,
            Ok(_) => SpectrumError::CertificateFailure { k, count: 0 },
        })?;
    Ok(CertifiedEigenvalue {
        eigenvalue: Eigenvalue {
            seed,
            ..best.eigenvalue
        },
        certificate: best.certificate,
    })
}

/// One certified eigenvalue per mode in `k_min..=k_max`, ordered by `k`.
pub fn spectrum_branch(
    k_min: ModeIndex,
    k_max: ModeIndex,
    branch: Branch,
    opts: SpectrumOptions,
) -> Result<Vec<CertifiedEigenvalue>, SpectrumError> {
    if k_min > k_max {
        return Err(SpectrumError::InvalidArgument(format!(
            "empty mode range {k_min}..{k_max}"
        )));
    }
    (k_min.get()..=k_max.get())
        .into_par_iter()
        .map(|k| certified_eigenvalue(ModeIndex::new(k).expect("k >= 1"), branch, opts))
        .collect()
}

/// Smallest `k0` such that every mode from `k0` upward in `eigs` was certified
/// on the seed disk `Omega_k` itself, or `None` if the last one was not.
pub fn disk_certified_from(eigs: &[CertifiedEigenvalue]) -> Option<ModeIndex> {
    let mut k0 = None;
    for ce in eigs.iter().rev() {
        let c = &ce.certificate;
        let on_seed_disk = c.shape == ContourShape::Disk
            && (c.radius - seed_disk_radius(c.k)).abs() <= 1e-15 * c.radius;
        if !on_seed_disk {
            break;
        }
        k0 = Some(c.k);
    }
    k0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsRow {
    pub k: ModeIndex,
    pub lambda: Complex64,
    /// `-Re(lambda) |Im(lambda)|^3`.
    pub r_k: f64,
    /// `|Im(lambda)| / (k pi) - 1`.
    pub im_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsReport {
    pub rows: Vec<AsymptoticsRow>,
    pub r_min: f64,
    pub r_max: f64,
    /// Least-squares fit `r_k ~ limit + slope / k^2`; equals the single value
    /// when fewer than two distinct modes are present.
    pub r_limit: f64,
    pub r_slope: f64,
}

impl AsymptoticsReport {
    pub fn band_ratio(&self) -> f64 {
        self.r_max / self.r_min
    }
}

pub fn asymptotics_report(eigs: &[Eigenvalue]) -> Result<AsymptoticsReport, SpectrumError> {
    if eigs.is_empty() {
        return Err(SpectrumError::InvalidArgument("no eigenvalues".into()));
    }
    let rows: Vec<AsymptoticsRow> = eigs
        .iter()
        .map(|e| AsymptoticsRow {
            k: e.k,
            lambda: e.lambda,
            r_k: -e.lambda.re * e.lambda.im.abs().powi(3),
            im_deviation: e.lambda.im.abs() / e.k.wavenumber() - 1.0,
        })
        .collect();
    let r_min = rows.iter().map(|r| r.r_k).fold(f64::INFINITY, f64::min);
    let r_max = rows.iter().map(|r| r.r_k).fold(f64::NEG_INFINITY, f64::max);
    let xs: Vec<f64> = rows.iter().map(|r| (r.k.get() as f64).powi(-2)).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.r_k).collect();
    let (r_limit, r_slope) = match crate::fit::least_squares_line(&xs, &ys) {
        Some(line) => (line.intercept, line.slope),
        None => (ys.iter().sum::<f64>() / ys.len() as f64, 0.0),
    };
    Ok(AsymptoticsReport {
        rows,
        r_min,
        r_max,
        r_limit,
        r_slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn k(n: u64) -> ModeIndex {
        ModeIndex::new(n).unwrap()
    }

    #[test]
    fn seeds() {
        assert_relative_eq!(seed_point(k(1), Branch::Upper).im, PI * 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(seed_point(k(1), Branch::Lower), seed_point(k(1), Branch::Upper).conj());
        assert_relative_eq!(seed_point(k(10), Branch::Upper).im, PI * 101f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn refine_rejects_bad_tolerance() {
        let r = refine_root(k(1), seed_point(k(1), Branch::Upper), NewtonOptions { tol: 0.0, max_iter: 5 });
        assert!(matches!(r, Err(SpectrumError::InvalidArgument(_))));
    }

    #[test]
    fn nonconvergence_carries_last_iterate() {
        let r = refine_root(k(3), seed_point(k(3), Branch::Upper), NewtonOptions { tol: 1e-12, max_iter: 0 });
        match r {
            Err(SpectrumError::NonConvergence { last, .. }) => {
                assert_eq!(last, seed_point(k(3), Branch::Upper))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn escaping_seed_reported() {
        // Far right of the axis the iteration walks toward Re > 0 roots of the
        // analytic continuation or stays there.
        let r = refine_root(k(2), Complex64::new(3.0, 7.0), NewtonOptions::default());
        assert!(matches!(
            r,
            Err(SpectrumError::EscapedHalfPlane { .. }) | Err(SpectrumError::NonConvergence { .. })
        ));
    }

    #[test]
    fn conjugate_seed_gives_conjugate_root() {
        let up = refine_root(k(1), seed_point(k(1), Branch::Upper), NewtonOptions::default()).unwrap();
        let down = refine_root(k(1), up.lambda.conj() + Complex64::new(0.0, -1e-3), NewtonOptions::default()).unwrap();
        assert!((down.lambda - up.lambda.conj()).norm() < 1e-11);
    }

    #[test]
    fn disk_far_on_negative_axis_is_empty() {
        let c = count_roots_in_disk(k(2), Complex64::new(-3.0, 0.0), 0.5, 256).unwrap();
        assert_eq!(c.winding_count, 0);
    }

    #[test]
    fn zero_on_contour_detected() {
        let ev = refine_root(k(4), seed_point(k(4), Branch::Upper), NewtonOptions::default()).unwrap();
        let center = ev.lambda - Complex64::new(1e-3, 0.0);
        let r = count_roots_in_disk(k(4), center, 1e-3, 64);
        assert!(matches!(
            r,
            Err(SpectrumError::ZeroOnContour { .. }) | Err(SpectrumError::QuadratureInconclusive { .. })
        ));
    }

    #[test]
    fn branch_range_validated() {
        let r = spectrum_branch(k(5), k(3), Branch::Upper, SpectrumOptions::default());
        assert!(matches!(r, Err(SpectrumError::InvalidArgument(_))));
    }

    #[test]
    fn single_eigenvalue_report_echoes_r_k() {
        let ev = refine_root(k(6), seed_point(k(6), Branch::Upper), NewtonOptions::default()).unwrap();
        let rep = asymptotics_report(&[ev]).unwrap();
        let r = -ev.lambda.re * ev.lambda.im.powi(3);
        assert_eq!(rep.rows.len(), 1);
        assert_eq!(rep.r_min, r);
        assert_eq!(rep.r_limit, r);
    }
}
