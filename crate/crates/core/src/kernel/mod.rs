//! Characteristic functions of the mode-decomposed wave-heat generator.
//!
//! Expanding in the transverse basis `e_k(y) = sqrt(2) sin(k pi y)` reduces the
//! generator to a family of interface problems on `(-1,0) x (0,1)`. For each
//! mode `k` and spectral point `lambda` the homogeneous solutions are governed by
//!
//! * `p_k(lambda) = (k^2 pi^2 + lambda^2)^(1/2)` on the wave side,
//! * `q_k(lambda) = (k^2 pi^2 + lambda)^(1/2)` on the heat side,
//!
//! and the interface conditions reduce to the 2x2 coupling matrix
//!
//! ```text
//! M_k(lambda) = [ lambda sinh p   -sinh q ]
//!               [ p cosh p       q cosh q ]
//! ```
//!
//! whose determinant vanishes exactly at eigenvalues. Dividing by
//! `p q cosh p cosh q` gives the characteristic function
//! `lambda tanh(p)/p + tanh(q)/q`, which is what the root finder works with.

pub mod hyperbolic;

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use self::hyperbolic::{
    cosh, cosh_scaled, sinh, sinh_scaled, sqrt_principal, tanhc, tanhc_deriv_over_z,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("mode index must be at least 1, got {0}")]
    ZeroMode(u64),
}

/// Transverse mode number `k >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct ModeIndex(u64);

impl ModeIndex {
    pub fn new(k: u64) -> Result<Self, KernelError> {
        if k == 0 {
            return Err(KernelError::ZeroMode(k));
        }
        Ok(ModeIndex(k))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// `k * pi`.
    pub fn wavenumber(self) -> f64 {
        self.0 as f64 * PI
    }

    /// `k^2 pi^2`.
    pub fn wavenumber_sq(self) -> f64 {
        let kp = self.wavenumber();
        kp * kp
    }

    /// Transverse basis function `sqrt(2) sin(k pi y)`.
    pub fn basis(self, y: f64) -> f64 {
        std::f64::consts::SQRT_2 * (self.wavenumber() * y).sin()
    }
}

impl TryFrom<u64> for ModeIndex {
    type Error = KernelError;
    fn try_from(k: u64) -> Result<Self, Self::Error> {
        ModeIndex::new(k)
    }
}

impl From<ModeIndex> for u64 {
    fn from(k: ModeIndex) -> u64 {
        k.0
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A complex spectral point `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralParameter(pub Complex64);

impl SpectralParameter {
    /// `lambda = i s` on the imaginary axis.
    pub fn on_axis(s: f64) -> Self {
        SpectralParameter(Complex64::new(0.0, s))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }
}

impl From<Complex64> for SpectralParameter {
    fn from(z: Complex64) -> Self {
        SpectralParameter(z)
    }
}

/// All kernel quantities at one `(k, lambda)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValues {
    pub p: Complex64,
    pub q: Complex64,
    pub charval: Complex64,
    pub det_m: Complex64,
    /// `exp(-Re p - Re q) det M_k(lambda)`.
    pub det_m_scaled: Complex64,
}

/// `p_k(lambda)`, principal branch.
pub fn p_of(k: ModeIndex, lambda: impl Into<SpectralParameter>) -> Complex64 {
    sqrt_principal(wave_radicand(k, lambda.into().0))
}

/// Low-order part of `pi` in double-double form.
const PI_LO: f64 = 1.2246467991473532e-16;

/// `k^2 pi^2 + lambda^2`, evaluated as `(lambda - i k pi)(lambda + i k pi)` with
/// `k pi` carried in double-double. Near the seeds `lambda ~ +-i k pi` the
/// naive sum cancels down to `O(1)` and loses `log10(k^2)` digits.
fn wave_radicand(k: ModeIndex, l: Complex64) -> Complex64 {
    let kf = k.get() as f64;
    let hi = kf * PI;
    let lo = kf.mul_add(PI, -hi) + kf * PI_LO;
    let minus = Complex64::new(l.re, (l.im - hi) - lo);
    let plus = Complex64::new(l.re, (l.im + hi) + lo);
    minus * plus
}

/// `q_k(lambda)`, principal branch.
pub fn q_of(k: ModeIndex, lambda: impl Into<SpectralParameter>) -> Complex64 {
    let l = lambda.into().0;
    sqrt_principal(l + k.wavenumber_sq())
}

/// `lambda tanh(p)/p + tanh(q)/q`.
pub fn char_value(k: ModeIndex, lambda: impl Into<SpectralParameter>) -> Complex64 {
    let l = lambda.into().0;
    l * tanhc(p_of(k, l)) + tanhc(q_of(k, l))
}

/// Characteristic value together with its derivative in `lambda`.
///
/// With `D(z) = T'(z)/z` for `T(z) = tanh(z)/z` and `dp/dlambda = lambda/p`,
/// `dq/dlambda = 1/(2q)`, the derivative is `T(p) + lambda^2 D(p) + D(q)/2`.
/// Both `T` and `D` are even, so the result does not depend on the branch.
pub fn char_value_and_derivative(
    k: ModeIndex,
    lambda: impl Into<SpectralParameter>,
) -> (Complex64, Complex64) {
    let l = lambda.into().0;
    let p = p_of(k, l);
    let q = q_of(k, l);
    let tp = tanhc(p);
    let value = l * tp + tanhc(q);
    let deriv = tp + l * l * tanhc_deriv_over_z(p) + tanhc_deriv_over_z(q) * 0.5;
    (value, deriv)
}

/// `det M_k(lambda) = lambda q sinh p cosh q + p sinh q cosh p`.
///
/// Overflows once `Re p + Re q` exceeds roughly 700; use [`det_m_scaled`] there.
pub fn det_m(k: ModeIndex, lambda: impl Into<SpectralParameter>) -> Complex64 {
    let l = lambda.into().0;
    let p = p_of(k, l);
    let q = q_of(k, l);
    l * q * sinh(p) * cosh(q) + p * sinh(q) * cosh(p)
}

/// `exp(-Re p - Re q) det M_k(lambda)`, assembled from scaled hyperbolics.
pub fn det_m_scaled_at(k: ModeIndex, lambda: impl Into<SpectralParameter>) -> Complex64 {
    let l = lambda.into().0;
    let p = p_of(k, l);
    let q = q_of(k, l);
    l * q * sinh_scaled(p) * cosh_scaled(q) + p * sinh_scaled(q) * cosh_scaled(p)
}

/// Scaled determinant on the imaginary axis, `lambda = i s`.
///
/// Whenever `s^2 >= k^2 pi^2` the wave exponent `p` is purely imaginary and this
/// is exactly `exp(-Re q) det M_k(i s)`. Below that threshold `p` is real and
/// positive and the extra factor `exp(-p)` keeps the value representable.
pub fn det_m_scaled(k: ModeIndex, s: f64) -> Complex64 {
    det_m_scaled_at(k, SpectralParameter::on_axis(s))
}

/// Smallest `|det_m_scaled(k, s)|` seen by [`scaled_det_minimum`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledDetMinimum {
    pub value: f64,
    pub s: f64,
    pub k: ModeIndex,
    pub evaluations: usize,
}

/// Minimum of `|det_m_scaled(k, s)|` over `samples` log-spaced `s` in
/// `[s_min, s_max]` and every `k` with `k^2 pi^2 + 1 < s^2 <= 100 k^2 pi^2`,
/// the regime where the wave exponent is oscillatory and at most ten
/// wavelengths fit across the mode. `None` if no sample meets any mode.
pub fn scaled_det_minimum(s_min: f64, s_max: f64, samples: usize) -> Option<ScaledDetMinimum> {
    if !(s_min > 0.0 && s_max >= s_min && samples >= 2) {
        return None;
    }
    let mut best: Option<ScaledDetMinimum> = None;
    let mut evaluations = 0;
    for i in 0..samples {
        let s = s_min * (s_max / s_min).powf(i as f64 / (samples - 1) as f64);
        let mut k = ((s / (10.0 * PI)).ceil() as u64).max(1);
        loop {
            let kk = (k as f64 * PI).powi(2);
            if kk + 1.0 >= s * s {
                break;
            }
            if s * s <= 100.0 * kk {
                let mode = ModeIndex(k);
                let value = det_m_scaled(mode, s).norm();
                evaluations += 1;
                if best.map_or(true, |b| value < b.value) {
                    best = Some(ScaledDetMinimum { value, s, k: mode, evaluations: 0 });
                }
            }
            k += 1;
        }
    }
    best.map(|b| ScaledDetMinimum { evaluations, ..b })
}

pub fn kernel_values(k: ModeIndex, lambda: impl Into<SpectralParameter>) -> KernelValues {
    let l = lambda.into().0;
    KernelValues {
        p: p_of(k, l),
        q: q_of(k, l),
        charval: char_value(k, l),
        det_m: det_m(k, l),
        det_m_scaled: det_m_scaled_at(k, l),
    }
}

/// Poles of the characteristic function: zeros of `cosh p` sit on the
/// imaginary axis at `+-i pi sqrt(k^2 + (j + 1/2)^2)`, zeros of `cosh q` on the
/// negative real axis at `-pi^2 (k^2 + (j + 1/2)^2)`.
pub fn char_poles_near(k: ModeIndex, center: Complex64, radius: f64) -> Vec<Complex64> {
    let kk = (k.get() as f64).powi(2);
    let mut poles = Vec::new();
    let reach = center.norm() + radius;
    let mut j = 0u64;
    loop {
        let h = j as f64 + 0.5;
        let im = PI * (kk + h * h).sqrt();
        let re = -PI * PI * (kk + h * h);
        if im > reach && -re > reach {
            break;
        }
        for cand in [
            Complex64::new(0.0, im),
            Complex64::new(0.0, -im),
            Complex64::new(re, 0.0),
        ] {
            if (cand - center).norm() <= radius {
                poles.push(cand);
            }
        }
        j += 1;
    }
    poles
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn k(n: u64) -> ModeIndex {
        ModeIndex::new(n).unwrap()
    }

    #[test]
    fn zero_mode_rejected() {
        assert_eq!(ModeIndex::new(0), Err(KernelError::ZeroMode(0)));
    }

    #[test]
    fn p_at_seed_is_i_pi() {
        let lam = Complex64::new(0.0, PI * 2f64.sqrt());
        let p = p_of(k(1), lam);
        assert!(p.re.abs() < 1e-12);
        assert_relative_eq!(p.im, PI, epsilon = 1e-12);
    }

    #[test]
    fn p_at_zero() {
        assert_relative_eq!(p_of(k(3), Complex64::new(0.0, 0.0)).re, 3.0 * PI, epsilon = 1e-14);
    }

    #[test]
    fn p_purely_imaginary_past_cutoff() {
        let p = p_of(k(2), SpectralParameter::on_axis(10.0));
        assert_eq!(p.re, 0.0);
        assert_relative_eq!(p.im, (100.0 - 4.0 * PI * PI).sqrt(), epsilon = 1e-14);
        // same branch from below the axis
        let p = p_of(k(2), SpectralParameter::on_axis(-10.0));
        assert_eq!(p.re, 0.0);
        assert!(p.im > 0.0);
    }

    #[test]
    fn q_examples() {
        assert_relative_eq!(q_of(k(1), Complex64::new(0.0, 0.0)).re, PI, epsilon = 1e-15);
        let q = q_of(k(5), Complex64::new(-1.0, 0.0));
        assert_eq!(q.im, 0.0);
        assert_relative_eq!(q.re, (25.0 * PI * PI - 1.0).sqrt(), epsilon = 1e-14);
        let q = q_of(k(1), Complex64::new(0.0, 1.0));
        assert!(q.re > 0.0);
        assert_relative_eq!((q * q - Complex64::new(PI * PI, 1.0)).norm(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn q_has_positive_real_part_on_axis() {
        for kk in [1u64, 7, 100, 1_000_000] {
            for s in [-1e12, -3.0, -1e-3, 1e-3, 0.5, 40.0, 1e9] {
                let q = q_of(k(kk), SpectralParameter::on_axis(s));
                assert!(q.re > 0.0, "k={kk} s={s}");
            }
        }
    }

    #[test]
    fn char_value_at_seed_reduces_to_heat_term() {
        for kk in [1u64, 4, 30] {
            let r = ((kk * kk + 1) as f64).sqrt();
            for sign in [1.0, -1.0] {
                let mu = Complex64::new(0.0, sign * PI * r);
                let q = q_of(k(kk), mu);
                let expected = hyperbolic::tanh(q) / q;
                // lambda tanh(p)/p vanishes since p = i pi, up to rounding of
                // k^2 pi^2 + mu^2, which is of order eps |mu|^2
                let tol = 1e-14 * mu.norm().powi(3);
                assert_relative_eq!((char_value(k(kk), mu) - expected).norm(), 0.0, epsilon = tol);
            }
        }
    }

    #[test]
    fn char_value_real_on_negative_axis() {
        let v = char_value(k(4), Complex64::new(-1.0, 0.0));
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn det_m_where_sinh_p_vanishes() {
        let lam = Complex64::new(0.0, PI * 2f64.sqrt());
        let q = q_of(k(1), lam);
        let expected = Complex64::new(0.0, PI) * sinh(q) * (-1.0);
        let d = det_m(k(1), lam);
        assert_relative_eq!((d - expected).norm() / expected.norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn factorization_identity_sample() {
        let lam = Complex64::new(1.0, 1.0);
        let (p, q) = (p_of(k(2), lam), q_of(k(2), lam));
        let rhs = p * q * cosh(p) * cosh(q) * char_value(k(2), lam);
        let d = det_m(k(2), lam);
        assert_relative_eq!((d - rhs).norm() / d.norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn scaled_determinant_consistent_with_unscaled() {
        let s = 50.0;
        let lam = SpectralParameter::on_axis(s);
        let q = q_of(k(3), lam);
        let expected = det_m(k(3), lam) * (-q.re).exp();
        let got = det_m_scaled(k(3), s);
        assert_relative_eq!((got - expected).norm() / expected.norm(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn scaled_determinant_finite_at_extremes() {
        for &kk in &[1u64, 1000, 1_000_000] {
            for &s in &[1e-6, 1.0, 1e6, 1e12, -1e12] {
                let d = det_m_scaled(k(kk), s);
                assert!(d.re.is_finite() && d.im.is_finite(), "k={kk} s={s}");
            }
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let kk = k(3);
        let lam = Complex64::new(-0.2, 9.5);
        let (_, d) = char_value_and_derivative(kk, lam);
        let h = 1e-5;
        let fd = (char_value(kk, lam + h) - char_value(kk, lam - h)) / (2.0 * h);
        let fdi = (char_value(kk, lam + Complex64::new(0.0, h))
            - char_value(kk, lam - Complex64::new(0.0, h)))
            / Complex64::new(0.0, 2.0 * h);
        assert_relative_eq!((d - fd).norm() / d.norm(), 0.0, epsilon = 1e-7);
        assert_relative_eq!((d - fdi).norm() / d.norm(), 0.0, epsilon = 1e-7);
    }

    #[test]
    fn poles_listed_near_seed() {
        let mu = Complex64::new(0.0, PI * 2f64.sqrt());
        let poles = char_poles_near(k(1), mu, 1.0);
        assert_eq!(poles.len(), 1);
        assert_eq!(char_poles_near(k(1), mu, 1.6).len(), 2);
        assert_relative_eq!(poles[0].im, PI * 1.25f64.sqrt(), epsilon = 1e-14);
    }
}
