//! Overflow-safe complex square roots and hyperbolic functions.
//!
//! The characteristic functions of the coupled system involve `sinh`, `cosh`
//! and `tanh` of arguments whose real part grows like `k*pi` or `sqrt(|s|/2)`.
//! The plain `num_complex` implementations overflow long before the values of
//! interest become unrepresentable, so everything here works with functions
//! scaled by `exp(-|Re z|)`.

use num_complex::Complex64;

/// Below this modulus the direct (unscaled) formulas are used; they are more
/// accurate near the origin and cannot overflow.
const DIRECT_LIMIT: f64 = 1.0;

/// Principal square root with a branch cut along the negative real axis.
///
/// On the cut itself (`im == 0`, `re < 0`, either sign of zero) the limit from
/// the upper half-plane is returned, i.e. `+i*sqrt(|re|)`.
pub fn sqrt_principal(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        if z.re >= 0.0 {
            return Complex64::new(z.re.sqrt(), 0.0);
        }
        return Complex64::new(0.0, (-z.re).sqrt());
    }
    z.sqrt()
}

/// `exp(-|Re z|) * sinh(z)`.
pub fn sinh_scaled(z: Complex64) -> Complex64 {
    let x = z.re;
    if x.abs() < DIRECT_LIMIT {
        let (sy, cy) = z.im.sin_cos();
        return Complex64::new(x.sinh() * cy, x.cosh() * sy) * (-x.abs()).exp();
    }
    if x < 0.0 {
        return -sinh_scaled(-z);
    }
    // sinh z = e^x (e^{iy} - e^{-2x} e^{-iy}) / 2
    let e = Complex64::from_polar(1.0, z.im);
    let d = (-2.0 * x).exp();
    (e - e.conj() * d) * 0.5
}

/// `exp(-|Re z|) * cosh(z)`.
pub fn cosh_scaled(z: Complex64) -> Complex64 {
    let x = z.re;
    if x.abs() < DIRECT_LIMIT {
        let (sy, cy) = z.im.sin_cos();
        return Complex64::new(x.cosh() * cy, x.sinh() * sy) * (-x.abs()).exp();
    }
    if x < 0.0 {
        return cosh_scaled(-z);
    }
    let e = Complex64::from_polar(1.0, z.im);
    let d = (-2.0 * x).exp();
    (e + e.conj() * d) * 0.5
}

/// Unscaled `sinh`, finite as long as the true value is representable.
pub fn sinh(z: Complex64) -> Complex64 {
    sinh_scaled(z) * z.re.abs().exp()
}

/// Unscaled `cosh`, finite as long as the true value is representable.
pub fn cosh(z: Complex64) -> Complex64 {
    cosh_scaled(z) * z.re.abs().exp()
}

/// Complex `tanh`, bounded as `|Re z| -> inf` (tends to `sign(Re z)`).
pub fn tanh(z: Complex64) -> Complex64 {
    let x = z.re;
    let (s2y, c2y) = (2.0 * z.im).sin_cos();
    if x.abs() < 20.0 {
        let num = Complex64::new((2.0 * x).sinh(), s2y);
        return num / ((2.0 * x).cosh() + c2y);
    }
    // Multiply numerator and denominator by 2 e^{-2|x|}.
    let e2 = (-2.0 * x.abs()).exp();
    let e4 = e2 * e2;
    let num = Complex64::new(x.signum() * (1.0 - e4), 2.0 * e2 * s2y);
    num / (1.0 + e4 + 2.0 * e2 * c2y)
}

/// `tanh(z) / z`, extended continuously to `z = 0`.
pub fn tanhc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-8 {
        let z2 = z * z;
        return Complex64::new(1.0, 0.0) - z2 / 3.0 + z2 * z2 * (2.0 / 15.0);
    }
    tanh(z) / z
}

/// `T'(z) / z` where `T(z) = tanh(z)/z`; even and entire away from the poles
/// of `tanh`. Equals `2 d/dz^2 [tanh(z)/z]`.
pub fn tanhc_deriv_over_z(z: Complex64) -> Complex64 {
    let z2 = z * z;
    if z.norm() < 0.05 {
        // -2/3 + 8z^2/15 - 34z^4/105 + 496z^6/2835 - 2764z^8/31185
        let c = [
            -2.0 / 3.0,
            8.0 / 15.0,
            -34.0 / 105.0,
            496.0 / 2835.0,
            -2764.0 / 31185.0,
        ];
        let mut acc = Complex64::new(c[4], 0.0);
        for &ci in c[..4].iter().rev() {
            acc = acc * z2 + ci;
        }
        return acc;
    }
    let t = tanh(z);
    let sech2 = Complex64::new(1.0, 0.0) - t * t;
    (z * sech2 - t) / (z2 * z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sqrt_branch_on_cut_is_upper_limit() {
        let r = sqrt_principal(c(-4.0, 0.0));
        assert_eq!(r, c(0.0, 2.0));
        let r = sqrt_principal(c(-4.0, -0.0));
        assert_eq!(r, c(0.0, 2.0));
        let r = sqrt_principal(c(0.0, 2.0));
        assert_relative_eq!(r.re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(r.im, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn scaled_matches_unscaled_at_moderate_arguments() {
        for &z in &[c(0.3, 1.2), c(-2.5, 0.7), c(7.0, -3.0), c(-15.0, 40.0)] {
            let s = z.sinh() * (-z.re.abs()).exp();
            let ch = z.cosh() * (-z.re.abs()).exp();
            assert_relative_eq!((sinh_scaled(z) - s).norm(), 0.0, epsilon = 1e-14);
            assert_relative_eq!((cosh_scaled(z) - ch).norm(), 0.0, epsilon = 1e-14);
            assert_relative_eq!((tanh(z) - z.tanh()).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn large_arguments_stay_finite() {
        let z = c(1.0e6, 3.0);
        assert!(sinh_scaled(z).norm().is_finite());
        assert_relative_eq!(tanh(z).re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(tanh(-z).re, -1.0, epsilon = 1e-15);
        assert!(tanhc(c(800.0, 1.0)).norm().is_finite());
    }

    #[test]
    fn tanhc_is_continuous_at_origin() {
        let tiny = tanhc(c(1e-9, 1e-9));
        assert_relative_eq!(tiny.re, 1.0, epsilon = 1e-15);
        let just_above = tanhc(c(2e-8, 0.0));
        assert_relative_eq!(just_above.re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn derivative_series_matches_direct_formula_at_switch() {
        for &z in &[c(0.049, 0.0), c(0.0, 0.0499), c(0.03, 0.035)] {
            let z2 = z * z;
            let t = z.tanh();
            let direct = (z * (Complex64::new(1.0, 0.0) - t * t) - t) / (z2 * z);
            assert_relative_eq!(
                (tanhc_deriv_over_z(z) - direct).norm(),
                0.0,
                epsilon = 1e-11
            );
        }
    }
}
