//! Closed-form solutions of the mode problem, for verifying [`solve_mode`].

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{solve_mode, ModeRHS, ModeSolution, ResolventError};
use crate::grid::{GridFunction, Interval};
use crate::kernel::ModeIndex;

/// `u = c0 (x + 1) e^{c1 x}`, `w = (1 - x)(d0 + d1 x)` with `d1` fixed by the
/// flux condition, and `f` a quadratic chosen so that `v(0) = w(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Manufactured {
    pub k: ModeIndex,
    pub s: f64,
    pub c0: Complex64,
    pub c1: Complex64,
    pub d0: Complex64,
    pub e1: Complex64,
}

impl Manufactured {
    pub fn random(rng: &mut impl Rng, k: ModeIndex, s: f64) -> Self {
        let mut z = |scale: f64| {
            Complex64::new(rng.gen_range(-1.0..1.0) * scale, rng.gen_range(-1.0..1.0) * scale)
        };
        Manufactured {
            k,
            s,
            c0: z(1.0),
            c1: z(2.0),
            d0: z(1.0),
            e1: z(1.0),
        }
    }

    fn is(&self) -> Complex64 {
        Complex64::new(0.0, self.s)
    }

    fn d1(&self) -> Complex64 {
        self.d0 + self.c0 * (self.c1 + 1.0)
    }

    pub fn u(&self, x: f64) -> Complex64 {
        self.c0 * (x + 1.0) * (self.c1 * x).exp()
    }
    pub fn du(&self, x: f64) -> Complex64 {
        self.c0 * (self.c1 * x).exp() * (self.c1 * (x + 1.0) + 1.0)
    }
    fn d2u(&self, x: f64) -> Complex64 {
        self.c0 * (self.c1 * x).exp() * (self.c1 * 2.0 + self.c1 * self.c1 * (x + 1.0))
    }
    // w'(0) = d1 - d0 = u'(0)
    pub fn w(&self, x: f64) -> Complex64 {
        (self.d0 + self.d1() * x) * (1.0 - x)
    }
    pub fn dw(&self, x: f64) -> Complex64 {
        self.d1() - self.d0 - self.d1() * (2.0 * x)
    }
    fn d2w(&self) -> Complex64 {
        -self.d1() * 2.0
    }
    // f(-1) = 0 and f(0) = i s u(0) - w(0)
    pub fn f(&self, x: f64) -> Complex64 {
        (self.is() * self.c0 - self.d0) * (x + 1.0) + self.e1 * (x + 1.0) * x
    }
    pub fn v(&self, x: f64) -> Complex64 {
        self.is() * self.u(x) - self.f(x)
    }
    pub fn g(&self, x: f64) -> Complex64 {
        self.is() * self.v(x) - self.d2u(x) + self.u(x) * self.k.wavenumber_sq()
    }
    pub fn h(&self, x: f64) -> Complex64 {
        self.is() * self.w(x) - self.d2w() + self.w(x) * self.k.wavenumber_sq()
    }

    pub fn rhs(&self, n: usize) -> Result<ModeRHS, ResolventError> {
        ModeRHS::from_fns(self.k, n, |x| self.f(x), |x| self.g(x), |x| self.h(x))
    }

    /// The exact solution sampled on the grids of [`Manufactured::rhs`].
    pub fn exact(&self, n: usize) -> Result<ModeSolution, ResolventError> {
        let wave = |f: &dyn Fn(f64) -> Complex64| GridFunction::from_fn(Interval::Wave, n, f);
        let heat = |f: &dyn Fn(f64) -> Complex64| GridFunction::from_fn(Interval::Heat, n, f);
        let zero = Complex64::new(0.0, 0.0);
        Ok(ModeSolution {
            k: self.k,
            s: self.s,
            u: wave(&|x| self.u(x))?,
            du: wave(&|x| self.du(x))?,
            v: wave(&|x| self.v(x))?,
            w: heat(&|x| self.w(x))?,
            dw: heat(&|x| self.dw(x))?,
            a: zero,
            b: zero,
            a_scaled: zero,
            b_scaled: zero,
        })
    }

    /// Mode-norm error of [`solve_mode`] relative to the exact solution.
    pub fn relative_error(&self, n: usize) -> Result<f64, ResolventError> {
        let sol = solve_mode(self.k, self.s, &self.rhs(n)?)?;
        let exact = self.exact(n)?;
        Ok(sol.distance(&exact)? / exact.norms().mode)
    }
}

/// Random cases with `k <= k_max` and `0.5 < |s| < s_max`, kept `1e-3` away
/// from the degenerate points `|s| = k pi`.
pub fn random_cases(seed: u64, cases: usize, k_max: u64, s_max: f64) -> Result<Vec<Manufactured>, ResolventError> {
    if cases == 0 || k_max == 0 || !(s_max > 0.5) || !s_max.is_finite() {
        return Err(ResolventError::InvalidArgument(
            "self-test needs cases >= 1, k_max >= 1 and a finite s_max > 0.5".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..cases)
        .map(|_| {
            let k = ModeIndex::new(rng.gen_range(1..=k_max)).expect("k >= 1");
            let s = loop {
                let s: f64 = rng.gen_range(-s_max..s_max);
                if s.abs() > 0.5 && (s.abs() - k.wavenumber()).abs() > 1e-3 {
                    break s;
                }
            };
            Manufactured::random(&mut rng, k, s)
        })
        .collect())
}
