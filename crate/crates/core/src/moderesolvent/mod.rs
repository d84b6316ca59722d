//! Mode-by-mode solution of the resolvent equation `(i s - A) (u, v, w) = (f, g, h)`.
//!
//! For mode `k` the system reduces to
//!
//! ```text
//! v = i s u - f,
//! u'' - p^2 u = -(i s f + g)   on (-1, 0),   u(-1) = 0,
//! w'' - q^2 w = -h             on (0, 1),    w(1)  = 0,
//! v(0) = w(0),  u'(0) = w'(0),
//! ```
//!
//! with `p^2 = k^2 pi^2 - s^2` and `q^2 = k^2 pi^2 + i s`. Particular solutions
//! are built from the free-space Green's function `exp(-kappa |x - r|) / (2 kappa)`
//! and corrected at the outer boundary, which keeps every intermediate bounded
//! by the data even when `Re p` or `Re q` is large. The homogeneous parts use
//! `exp(-Re p) sinh(p (x + 1))` and `exp(-Re q) sinh(q (1 - x))`, so the
//! remaining 2x2 coupling system has the scaled determinant
//! [`crate::kernel::det_m_scaled`].

mod convolution;
mod norm;
pub mod manufactured;

pub use convolution::{left_sweep, right_sweep};
pub use norm::{mode_operator_norm, BasisKind, InputBasis, ModeNormEstimate};

use std::f64::consts::PI;

use log::warn;
use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{node_positions, GridError, GridFunction, Interval};
use crate::kernel::hyperbolic::{cosh_scaled, sinh_scaled};
use crate::kernel::{p_of, q_of, ModeIndex, SpectralParameter};

/// Below this `|p|` the wave exponent is treated as degenerate.
pub const P_DEGENERATE: f64 = 1e-6;

/// Below this `|p|` particular integrals use the direct `sinh(p(x - r)) / p`
/// kernel instead of the Green's-function split, which divides by `p`.
const SMALL_P: f64 = 1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResolventError {
    #[error("wave exponent p = {p} nearly vanishes at k={k}, s={s}; perturb s")]
    PNearZero { k: ModeIndex, s: f64, p: Complex64 },
    #[error("coupling system singular at k={k}, s={s} (scaled determinant {det:e})")]
    SingularCoupling { k: ModeIndex, s: f64, det: f64 },
    #[error("spectral parameter must be nonzero")]
    ZeroFrequency,
    #[error("f must vanish at x = -1, got {0}")]
    TraceCondition(Complex64),
    #[error("{0} is not an eigenvalue: scaled coupling matrix has relative smallest singular value {1:e}")]
    NotAnEigenvalue(Complex64, f64),
    #[error("eigenvector at {0} is trivial (q = 0 forces a = b = 0)")]
    TrivialEigenvector(Complex64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Data `(f, g, h)` of one mode; `f` and `g` live on `(-1, 0)`, `h` on `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeRHS {
    pub k: ModeIndex,
    pub f: GridFunction,
    pub g: GridFunction,
    pub h: GridFunction,
}

impl ModeRHS {
    pub fn new(
        k: ModeIndex,
        f: GridFunction,
        g: GridFunction,
        h: GridFunction,
    ) -> Result<Self, ResolventError> {
        if f.interval != Interval::Wave || g.interval != Interval::Wave || h.interval != Interval::Heat {
            return Err(ResolventError::InvalidArgument(
                "f and g belong on (-1,0), h on (0,1)".into(),
            ));
        }
        f.check_compatible(&g)?;
        if h.n != f.n {
            return Err(GridError::Incompatible("f and h grids differ in size".into()).into());
        }
        if f.first() != Complex64::new(0.0, 0.0) {
            return Err(ResolventError::TraceCondition(f.first()));
        }
        Ok(ModeRHS { k, f, g, h })
    }

    /// Sample `f`, `g`, `h` on grids with `n` interior nodes. The value of `f`
    /// at `-1` is set to zero.
    pub fn from_fns(
        k: ModeIndex,
        n: usize,
        f: impl Fn(f64) -> Complex64,
        g: impl Fn(f64) -> Complex64,
        h: impl Fn(f64) -> Complex64,
    ) -> Result<Self, ResolventError> {
        let mut fg = GridFunction::from_fn(Interval::Wave, n, f)?;
        fg.values[0] = Complex64::new(0.0, 0.0);
        let gg = GridFunction::from_fn(Interval::Wave, n, g)?;
        let hg = GridFunction::from_fn(Interval::Heat, n, h)?;
        ModeRHS::new(k, fg, gg, hg)
    }

    pub fn zeros(k: ModeIndex, n: usize) -> Result<Self, ResolventError> {
        let z = |_| Complex64::new(0.0, 0.0);
        ModeRHS::from_fns(k, n, z, z, z)
    }

    pub fn n(&self) -> usize {
        self.f.n
    }

    /// `(k^2 pi^2 |f|^2 + |f'|^2 + |g|^2 + |h|^2)^(1/2)`, with `f'` by finite
    /// differences.
    pub fn norm(&self) -> f64 {
        (self.k.wavenumber_sq() * self.f.norm_sq()
            + self.f.derivative_fd().norm_sq()
            + self.g.norm_sq()
            + self.h.norm_sq())
        .sqrt()
    }

    /// `H = i s f + g`.
    pub fn forcing(&self, s: f64) -> GridFunction {
        let is = Complex64::new(0.0, s);
        self.g
            .axpy(is, &self.f)
            .expect("f and g share a grid by construction")
    }

    pub fn linear_combination(
        &self,
        alpha: Complex64,
        other: &ModeRHS,
        beta: Complex64,
    ) -> Result<ModeRHS, ResolventError> {
        let comb = |a: &GridFunction, b: &GridFunction| a.scale(alpha).axpy(beta, b);
        ModeRHS::new(
            self.k,
            comb(&self.f, &other.f)?,
            comb(&self.g, &other.g)?,
            comb(&self.h, &other.h)?,
        )
    }
}

/// Particular solutions of the two boundary-value problems.
///
/// `u_hat` solves `u'' - p^2 u = -H`, `u(-1) = 0` and is bounded by the data;
/// `w_hat` likewise with `q`, `h` and `w(1) = 0`. The integrals of the closed
/// form, `U = -(1/p) int_{-1}^x sinh(p (x - r)) H dr` and its heat analogue,
/// differ from these by homogeneous solutions:
/// `U = u_hat - (wave_offset / p) sinh(p (x + 1))`,
/// `W = w_hat - (heat_offset / q) sinh(q (1 - x))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticularIntegrals {
    pub p: Complex64,
    pub q: Complex64,
    pub u_hat: GridFunction,
    pub du_hat: GridFunction,
    pub w_hat: GridFunction,
    pub dw_hat: GridFunction,
    /// `int_{-1}^0 exp(-p (r + 1)) H dr`, or zero on the direct small-`p` path.
    pub wave_offset: Complex64,
    /// `int_0^1 exp(-q (1 - r)) h dr`.
    pub heat_offset: Complex64,
}

impl ParticularIntegrals {
    /// The closed-form integral `U` on the grid. Large when `Re p` is.
    pub fn u_closed_form(&self) -> GridFunction {
        let c = self.wave_offset / self.p;
        let p = self.p;
        self.u_hat
            .map(|x, z| z - c * crate::kernel::hyperbolic::sinh(p * (x + 1.0)))
    }

    pub fn du_closed_form(&self) -> GridFunction {
        let c = self.wave_offset;
        let p = self.p;
        self.du_hat
            .map(|x, z| z - c * crate::kernel::hyperbolic::cosh(p * (x + 1.0)))
    }

    pub fn w_closed_form(&self) -> GridFunction {
        let c = self.heat_offset / self.q;
        let q = self.q;
        self.w_hat
            .map(|x, z| z - c * crate::kernel::hyperbolic::sinh(q * (1.0 - x)))
    }

    pub fn dw_closed_form(&self) -> GridFunction {
        let c = self.heat_offset;
        let q = self.q;
        self.dw_hat
            .map(|x, z| z + c * crate::kernel::hyperbolic::cosh(q * (1.0 - x)))
    }
}

fn check_frequency(k: ModeIndex, s: f64) -> Result<(Complex64, Complex64), ResolventError> {
    if s == 0.0 || !s.is_finite() {
        return Err(ResolventError::ZeroFrequency);
    }
    let lam = SpectralParameter::on_axis(s);
    let p = p_of(k, lam);
    if p.norm() < P_DEGENERATE {
        return Err(ResolventError::PNearZero { k, s, p });
    }
    Ok((p, q_of(k, lam)))
}

/// Move `s` off the degenerate points `s = +-k pi`, where `p_k(i s)` vanishes.
/// Returns `s` unchanged when `|p| >= 1e-6`, otherwise
/// `s + 1e-8 max(1, |s|)` with a warning.
pub fn perturb_off_degeneracy(k: ModeIndex, s: f64) -> f64 {
    let p = p_of(k, SpectralParameter::on_axis(s));
    if p.norm() >= P_DEGENERATE {
        return s;
    }
    let shifted = s + 1e-8 * s.abs().max(1.0);
    warn!("s = {s} is degenerate for k = {k} (|p| = {:.2e}); using s = {shifted}", p.norm());
    shifted
}

struct Sweeps {
    u: Vec<Complex64>,
    du: Vec<Complex64>,
    offset: Complex64,
}

/// Bounded particular solution of `y'' - kappa^2 y = -F` with `y = 0` at the
/// far end, on a grid whose node 0 is that end.
fn green_split(kappa: Complex64, h: f64, f: &[Complex64]) -> Sweeps {
    let l = left_sweep(kappa, h, f);
    let r = right_sweep(kappa, h, f);
    let offset = r[0];
    let two_k = kappa * 2.0;
    let mut u = Vec::with_capacity(f.len());
    let mut du = Vec::with_capacity(f.len());
    for j in 0..f.len() {
        let e = (-kappa * (j as f64 * h)).exp();
        u.push((l[j] + r[j] - offset * e) / two_k);
        du.push((r[j] - l[j] + offset * e) * 0.5);
    }
    Sweeps { u, du, offset }
}

/// Direct kernel `-(1/p) int sinh(p (x - r)) F dr` for small `|p|`.
fn direct_kernel(p: Complex64, h: f64, f: &[Complex64]) -> Sweeps {
    let lm = left_sweep(-p, h, f);
    let lp = left_sweep(p, h, f);
    let u = lm.iter().zip(&lp).map(|(a, b)| -(a - b) / (p * 2.0)).collect();
    let du = lm.iter().zip(&lp).map(|(a, b)| -(a + b) * 0.5).collect();
    Sweeps {
        u,
        du,
        offset: Complex64::new(0.0, 0.0),
    }
}

fn wave_particular(p: Complex64, h: f64, forcing: &[Complex64]) -> Sweeps {
    if p.norm() < SMALL_P {
        direct_kernel(p, h, forcing)
    } else {
        green_split(p, h, forcing)
    }
}

/// Heat side: reflect onto `x' = 1 - x` so the boundary sits at node 0.
fn heat_particular(q: Complex64, h: f64, heat: &[Complex64]) -> Sweeps {
    let rev: Vec<Complex64> = heat.iter().rev().copied().collect();
    let mut s = green_split(q, h, &rev);
    s.u.reverse();
    s.du.reverse();
    for d in s.du.iter_mut() {
        *d = -*d;
    }
    s
}

pub fn particular_integrals(
    k: ModeIndex,
    s: f64,
    rhs: &ModeRHS,
) -> Result<ParticularIntegrals, ResolventError> {
    let (p, q) = check_frequency(k, s)?;
    let n = rhs.n();
    let h = rhs.f.h();
    let forcing = rhs.forcing(s);
    let wave = wave_particular(p, h, &forcing.values);
    let heat = heat_particular(q, h, &rhs.h.values);
    let wg = |v| GridFunction::new(Interval::Wave, n, v);
    let hg = |v| GridFunction::new(Interval::Heat, n, v);
    Ok(ParticularIntegrals {
        p,
        q,
        u_hat: wg(wave.u)?,
        du_hat: wg(wave.du)?,
        w_hat: hg(heat.u)?,
        dw_hat: hg(heat.du)?,
        wave_offset: wave.offset,
        heat_offset: heat.offset,
    })
}

/// Scaled homogeneous solutions: `phi = exp(-Re p) sinh(p (x + 1))` on the wave
/// side and `psi = exp(-Re q) sinh(q (1 - x))` on the heat side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homogeneous {
    pub p: Complex64,
    pub q: Complex64,
}

impl Homogeneous {
    pub fn phi(&self, x: f64) -> Complex64 {
        sinh_scaled(self.p * (x + 1.0)) * (self.p.re * x).exp()
    }

    pub fn dphi(&self, x: f64) -> Complex64 {
        self.p * cosh_scaled(self.p * (x + 1.0)) * (self.p.re * x).exp()
    }

    pub fn psi(&self, x: f64) -> Complex64 {
        sinh_scaled(self.q * (1.0 - x)) * (-self.q.re * x).exp()
    }

    pub fn dpsi(&self, x: f64) -> Complex64 {
        -self.q * cosh_scaled(self.q * (1.0 - x)) * (-self.q.re * x).exp()
    }

    /// Scaled coupling matrix acting on the coefficients of `phi` and `psi`:
    /// rows `lambda u(0) = w(0)` and `u'(0) = w'(0)`.
    pub fn coupling_matrix(&self, lambda: Complex64) -> Matrix2<Complex64> {
        Matrix2::new(
            lambda * self.phi(0.0),
            -self.psi(0.0),
            self.dphi(0.0),
            -self.dpsi(0.0),
        )
    }
}

/// Solution `(u, v, w)` of one mode, with analytic derivatives of `u`, `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSolution {
    pub k: ModeIndex,
    pub s: f64,
    pub u: GridFunction,
    pub du: GridFunction,
    pub v: GridFunction,
    pub w: GridFunction,
    pub dw: GridFunction,
    /// Closed-form coefficients: `u = a sinh(p(x+1)) + U`, `w = b sinh(q(1-x)) + W`.
    /// May overflow to infinity when `Re p` exceeds about 700.
    pub a: Complex64,
    pub b: Complex64,
    /// Coefficients of the scaled homogeneous solutions `phi`, `psi`.
    pub a_scaled: Complex64,
    pub b_scaled: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionNorms {
    /// `k |u|`.
    pub ku: f64,
    /// `|s| |u|`.
    pub su: f64,
    pub du: f64,
    pub v: f64,
    pub w: f64,
    /// `(k^2 pi^2 |u|^2 + |u'|^2 + |v|^2 + |w|^2)^(1/2)`.
    pub mode: f64,
}

impl ModeSolution {
    pub fn norms(&self) -> SolutionNorms {
        let u2 = self.u.norm_sq();
        let du2 = self.du.norm_sq();
        let v2 = self.v.norm_sq();
        let w2 = self.w.norm_sq();
        SolutionNorms {
            ku: self.k.get() as f64 * u2.sqrt(),
            su: self.s.abs() * u2.sqrt(),
            du: du2.sqrt(),
            v: v2.sqrt(),
            w: w2.sqrt(),
            mode: (self.k.wavenumber_sq() * u2 + du2 + v2 + w2).sqrt(),
        }
    }

    /// Mode-norm distance to another solution on the same grids.
    pub fn distance(&self, other: &ModeSolution) -> Result<f64, GridError> {
        let u2 = self.u.sub(&other.u)?.norm_sq();
        let du2 = self.du.sub(&other.du)?.norm_sq();
        let v2 = self.v.sub(&other.v)?.norm_sq();
        let w2 = self.w.sub(&other.w)?.norm_sq();
        Ok((self.k.wavenumber_sq() * u2 + du2 + v2 + w2).sqrt())
    }
}

fn solve_2x2(
    m: &Matrix2<Complex64>,
    rhs: [Complex64; 2],
    k: ModeIndex,
    s: f64,
) -> Result<(Complex64, Complex64), ResolventError> {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let row = |i: usize| (m[(i, 0)].norm_sqr() + m[(i, 1)].norm_sqr()).sqrt();
    if !(det.norm() >= 1e-14 * row(0) * row(1)) {
        return Err(ResolventError::SingularCoupling {
            k,
            s,
            det: det.norm(),
        });
    }
    let a = (rhs[0] * m[(1, 1)] - m[(0, 1)] * rhs[1]) / det;
    let b = (m[(0, 0)] * rhs[1] - m[(1, 0)] * rhs[0]) / det;
    Ok((a, b))
}

/// Solve `(i s - A_k)(u, v, w) = (f, g, h)` for one mode.
pub fn solve_mode(k: ModeIndex, s: f64, rhs: &ModeRHS) -> Result<ModeSolution, ResolventError> {
    if rhs.k != k {
        return Err(ResolventError::InvalidArgument(format!(
            "data belong to mode {}, asked to solve mode {k}",
            rhs.k
        )));
    }
    let pi = particular_integrals(k, s, rhs)?;
    let hom = Homogeneous { p: pi.p, q: pi.q };
    let is = Complex64::new(0.0, s);
    let f0 = rhs.f.at_interface();
    let (u0, du0) = (pi.u_hat.at_interface(), pi.du_hat.at_interface());
    let (w0, dw0) = (pi.w_hat.at_interface(), pi.dw_hat.at_interface());
    let m = hom.coupling_matrix(is);
    let (a_s, b_s) = solve_2x2(&m, [f0 - is * u0 + w0, dw0 - du0], k, s)?;

    let u = pi.u_hat.map(|x, z| z + a_s * hom.phi(x));
    let du = pi.du_hat.map(|x, z| z + a_s * hom.dphi(x));
    let w = pi.w_hat.map(|x, z| z + b_s * hom.psi(x));
    let dw = pi.dw_hat.map(|x, z| z + b_s * hom.dpsi(x));
    let v = u.scale(is).sub(&rhs.f)?;
    Ok(ModeSolution {
        k,
        s,
        a: a_s * (-pi.p.re).exp() + pi.wave_offset / pi.p,
        b: b_s * (-pi.q.re).exp() + pi.heat_offset / pi.q,
        a_scaled: a_s,
        b_scaled: b_s,
        u,
        du,
        v,
        w,
        dw,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// Discrete `L^2` norm of `u'' - p^2 u + i s f + g` over interior nodes.
    pub interior_wave: f64,
    /// Same for `w'' - q^2 w + h`.
    pub interior_heat: f64,
    pub boundary_u: f64,
    pub boundary_w: f64,
    /// `|v(0) - w(0)|`.
    pub coupling_value: f64,
    /// `|u'(0) - w'(0)|` from one-sided second-order differences.
    pub coupling_flux: f64,
    /// `|u'(0) - w'(0)|` from the analytic derivatives.
    pub coupling_flux_exact: f64,
    /// Largest nodal magnitude among the solution and data, for scaling.
    pub scale: f64,
}

impl ResidualReport {
    pub fn interior(&self) -> f64 {
        self.interior_wave.max(self.interior_heat)
    }

    pub fn coupling(&self) -> f64 {
        self.coupling_value.max(self.coupling_flux_exact)
    }
}

fn interior_residual(y: &[Complex64], kappa_sq: Complex64, src: &[Complex64], h: f64) -> f64 {
    let inv = 1.0 / (h * h);
    let mut acc = 0.0;
    for j in 1..y.len() - 1 {
        let d2 = (y[j + 1] - y[j] * 2.0 + y[j - 1]) * inv;
        acc += (d2 - kappa_sq * y[j] + src[j]).norm_sqr();
    }
    (acc * h).sqrt()
}

pub fn residual_check(
    k: ModeIndex,
    s: f64,
    rhs: &ModeRHS,
    sol: &ModeSolution,
) -> Result<ResidualReport, ResolventError> {
    if rhs.n() < 32 {
        return Err(ResolventError::InvalidArgument(format!(
            "residual check needs n >= 32, got {}",
            rhs.n()
        )));
    }
    rhs.f.check_compatible(&sol.u)?;
    rhs.h.check_compatible(&sol.w)?;
    let lam = SpectralParameter::on_axis(s);
    let (p, q) = (p_of(k, lam), q_of(k, lam));
    let h = rhs.f.h();
    let forcing = rhs.forcing(s);
    let u = &sol.u.values;
    let w = &sol.w.values;
    let n = u.len() - 1;
    let du0 = (u[n] * 3.0 - u[n - 1] * 4.0 + u[n - 2]) / (2.0 * h);
    let dw0 = (w[0] * -3.0 + w[1] * 4.0 - w[2]) / (2.0 * h);
    let scale = [
        sol.u.max_abs(),
        sol.v.max_abs(),
        sol.w.max_abs(),
        forcing.max_abs(),
        rhs.h.max_abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(ResidualReport {
        interior_wave: interior_residual(u, p * p, &forcing.values, h),
        interior_heat: interior_residual(w, q * q, &rhs.h.values, h),
        boundary_u: sol.u.first().norm(),
        boundary_w: sol.w.last().norm(),
        coupling_value: (sol.v.at_interface() - sol.w.at_interface()).norm(),
        coupling_flux: (du0 - dw0).norm(),
        coupling_flux_exact: (sol.du.at_interface() - sol.dw.at_interface()).norm(),
        scale,
    })
}

/// Eigenfunction `u = A phi`, `v = lambda u`, `w = B psi` of mode `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenmode {
    pub k: ModeIndex,
    pub lambda: Complex64,
    pub p: Complex64,
    pub q: Complex64,
    pub a_scaled: Complex64,
    pub b_scaled: Complex64,
    /// `|M (A, B)|` for the row-normalized scaled coupling matrix.
    pub null_residual: f64,
}

impl Eigenmode {
    fn hom(&self) -> Homogeneous {
        Homogeneous { p: self.p, q: self.q }
    }

    pub fn u(&self, x: f64) -> Complex64 {
        self.a_scaled * self.hom().phi(x)
    }

    pub fn du(&self, x: f64) -> Complex64 {
        self.a_scaled * self.hom().dphi(x)
    }

    pub fn v(&self, x: f64) -> Complex64 {
        self.lambda * self.u(x)
    }

    pub fn w(&self, x: f64) -> Complex64 {
        self.b_scaled * self.hom().psi(x)
    }

    pub fn dw(&self, x: f64) -> Complex64 {
        self.b_scaled * self.hom().dpsi(x)
    }

    /// `1/2 (|u'|^2 + k^2 pi^2 |u|^2 + |v|^2 + |w|^2)` by Simpson quadrature with
    /// `n` interior nodes per interval.
    pub fn energy(&self, n: usize) -> f64 {
        let wave = node_positions(Interval::Wave, n);
        let heat = node_positions(Interval::Heat, n);
        let wts = crate::grid::simpson_weights(n + 1, 1.0 / (n + 1) as f64);
        let kk = self.k.wavenumber_sq();
        let mut e = 0.0;
        for (x, wt) in wave.iter().zip(&wts) {
            let u = self.u(*x);
            e += wt * (self.du(*x).norm_sqr() + kk * u.norm_sqr() + (self.lambda * u).norm_sqr());
        }
        for (x, wt) in heat.iter().zip(&wts) {
            e += wt * self.w(*x).norm_sqr();
        }
        0.5 * e
    }

    pub fn sample(&self, n: usize) -> Result<[GridFunction; 5], GridError> {
        Ok([
            GridFunction::from_fn(Interval::Wave, n, |x| self.u(x))?,
            GridFunction::from_fn(Interval::Wave, n, |x| self.du(x))?,
            GridFunction::from_fn(Interval::Wave, n, |x| self.v(x))?,
            GridFunction::from_fn(Interval::Heat, n, |x| self.w(x))?,
            GridFunction::from_fn(Interval::Heat, n, |x| self.dw(x))?,
        ])
    }
}

/// Eigenfunction for a located root `lambda`, normalized to unit mode energy
/// (quadrature with `n` interior nodes per interval).
pub fn eigenmode(k: ModeIndex, lambda: Complex64, n: usize) -> Result<Eigenmode, ResolventError> {
    let p = p_of(k, lambda);
    let q = q_of(k, lambda);
    if q.norm() < 1e-12 {
        return Err(ResolventError::TrivialEigenvector(lambda));
    }
    let hom = Homogeneous { p, q };
    let mut m = hom.coupling_matrix(lambda);
    for i in 0..2 {
        let r = (m[(i, 0)].norm_sqr() + m[(i, 1)].norm_sqr()).sqrt();
        if r > 0.0 {
            m[(i, 0)] /= r;
            m[(i, 1)] /= r;
        }
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let (imin, imax) = if svd.singular_values[0] <= svd.singular_values[1] {
        (0, 1)
    } else {
        (1, 0)
    };
    let ratio = svd.singular_values[imin] / svd.singular_values[imax];
    if !(ratio <= 1e-6) {
        return Err(ResolventError::NotAnEigenvalue(lambda, ratio));
    }
    let a = v_t[(imin, 0)].conj();
    let b = v_t[(imin, 1)].conj();
    let resid = (m * nalgebra::Vector2::new(a, b)).norm();
    let mut mode = Eigenmode {
        k,
        lambda,
        p,
        q,
        a_scaled: a,
        b_scaled: b,
        null_residual: resid,
    };
    let e = mode.energy(n);
    if !(e > 0.0) {
        return Err(ResolventError::TrivialEigenvector(lambda));
    }
    let c = 1.0 / e.sqrt();
    // fix the phase so that u'(-1) is real positive
    let phase = {
        let d = mode.du(-1.0);
        if d.norm() > 0.0 { d.conj() / d.norm() } else { Complex64::new(1.0, 0.0) }
    };
    mode.a_scaled *= phase * c;
    mode.b_scaled *= phase * c;
    Ok(mode)
}

/// Wave number `(j - 1/2) pi` of the `j`-th input basis function for `f`.
pub(crate) fn half_integer_frequency(j: usize) -> f64 {
    (j as f64 - 0.5) * PI
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(n: u64) -> ModeIndex {
        ModeIndex::new(n).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_data_give_zero_solution() {
        let rhs = ModeRHS::zeros(k(2), 64).unwrap();
        let sol = solve_mode(k(2), 3.0, &rhs).unwrap();
        assert_eq!(sol.norms().mode, 0.0);
        let pi = particular_integrals(k(2), 3.0, &rhs).unwrap();
        assert_eq!(pi.u_hat.max_abs(), 0.0);
        assert_eq!(pi.w_hat.max_abs(), 0.0);
        let r = residual_check(k(2), 3.0, &rhs, &sol).unwrap();
        assert_eq!(r.interior(), 0.0);
        assert_eq!(r.coupling(), 0.0);
    }

    #[test]
    fn trace_condition_enforced() {
        let f = GridFunction::from_fn(Interval::Wave, 8, |_| c(1.0, 0.0)).unwrap();
        let g = GridFunction::zeros(Interval::Wave, 8).unwrap();
        let h = GridFunction::zeros(Interval::Heat, 8).unwrap();
        assert!(matches!(ModeRHS::new(k(1), f, g, h), Err(ResolventError::TraceCondition(_))));
    }

    #[test]
    fn degenerate_p_rejected_and_perturbed() {
        let s = PI * 3.0;
        let rhs = ModeRHS::zeros(k(3), 32).unwrap();
        assert!(matches!(solve_mode(k(3), s, &rhs), Err(ResolventError::PNearZero { .. })));
        let s2 = perturb_off_degeneracy(k(3), s);
        assert!(s2 != s);
        assert!(solve_mode(k(3), s2, &rhs).is_ok());
        assert_eq!(perturb_off_degeneracy(k(3), 2.0), 2.0);
    }

    #[test]
    fn zero_frequency_rejected() {
        let rhs = ModeRHS::zeros(k(1), 32).unwrap();
        assert_eq!(solve_mode(k(1), 0.0, &rhs), Err(ResolventError::ZeroFrequency));
    }

    #[test]
    fn small_and_split_paths_agree() {
        // |p| just below and above the switch give the same solution.
        let kk = k(1);
        let target = |pabs: f64| (PI * PI - pabs * pabs).sqrt();
        let rhs = ModeRHS::from_fns(
            kk,
            256,
            |x| c((x + 1.0) * x.cos(), 0.0),
            |x| c(x.sin(), 1.0 + x),
            |x| c(1.0 - x, x * x),
        )
        .unwrap();
        let a = solve_mode(kk, target(0.999999), &rhs).unwrap();
        let b = solve_mode(kk, target(1.000001), &rhs).unwrap();
        let rel = a.distance(&b).unwrap() / a.norms().mode;
        assert!(rel < 1e-4, "{rel}");
    }

    #[test]
    fn closed_form_integrals_have_boundary_values() {
        let kk = k(2);
        let rhs = ModeRHS::from_fns(kk, 128, |x| c(x + 1.0, 0.0), |_| c(1.0, 0.0), |x| c(x, 0.5)).unwrap();
        let pi = particular_integrals(kk, 9.0, &rhs).unwrap();
        assert!(pi.u_closed_form().first().norm() < 1e-14);
        assert!(pi.du_closed_form().first().norm() < 1e-12);
        assert!(pi.w_closed_form().last().norm() < 1e-14);
        assert!(pi.dw_closed_form().last().norm() < 1e-12);
    }
}
