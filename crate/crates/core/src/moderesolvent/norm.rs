//! Operator norm of the mode resolvent restricted to a finite input basis.
//!
//! Two input bases are available, each with `m` functions per component:
//!
//! * [`BasisKind::HalfSine`]: `f_j = sin((j - 1/2) pi (x + 1))`,
//!   `g_j = sin(j pi (x + 1))`, `h_j = sin(j pi x)`, `j = 1..=m`. Orthogonal in
//!   the input norm, but every `f_j` has `f_j'(0) = 0` and every `g_j`, `h_j`
//!   vanishes at both ends, so generic data converge slowly.
//! * [`BasisKind::Lifted`]: `f` spanned by `x + 1` and `sin(j pi (x + 1))`,
//!   `g`, `h` by `cos(j pi (x + 1))`, `cos(j pi x)`, `j = 0..m`. The input Gram
//!   matrix is no longer diagonal but is still known in closed form.
//!
//! The input norm is `k^2 pi^2 |f|^2 + |f'|^2 + |g|^2 + |h|^2`, evaluated
//! exactly; the output norm `k^2 pi^2 |u|^2 + |u'|^2 + |v|^2 + |w|^2` by Simpson
//! quadrature.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{check_frequency, heat_particular, solve_2x2, wave_particular, Homogeneous, ResolventError};
use crate::grid::{node_positions, simpson_weights, Interval};
use crate::kernel::ModeIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum BasisKind {
    HalfSine,
    #[default]
    Lifted,
}

/// Sampled input basis on a fixed grid.
#[derive(Debug, Clone)]
pub struct InputBasis {
    pub kind: BasisKind,
    pub m: usize,
    pub n: usize,
    f: Vec<Vec<Complex64>>,
    g: Vec<Vec<Complex64>>,
    h: Vec<Vec<Complex64>>,
    wave_x: Vec<f64>,
    heat_x: Vec<f64>,
    sqrt_w: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeNormEstimate {
    pub k: ModeIndex,
    pub s: f64,
    pub norm: f64,
    pub m: usize,
    pub n: usize,
    /// Basis coefficients of a maximizing input, ordered `f`, `g`, `h`,
    /// scaled to unit input norm.
    pub maximizer: Vec<Complex64>,
}

fn sample(xs: &[f64], f: impl Fn(f64) -> f64) -> Vec<Complex64> {
    xs.iter().map(|&x| Complex64::new(f(x), 0.0)).collect()
}

impl InputBasis {
    pub fn new(m: usize, n: usize) -> Result<Self, ResolventError> {
        Self::with_kind(BasisKind::default(), m, n)
    }

    pub fn with_kind(kind: BasisKind, m: usize, n: usize) -> Result<Self, ResolventError> {
        if m == 0 || 2 * m > n || n < 4 {
            return Err(ResolventError::InvalidArgument(format!(
                "basis size must satisfy 1 <= m <= n/2 (m = {m}, n = {n})"
            )));
        }
        let wave_x = node_positions(Interval::Wave, n);
        let heat_x = node_positions(Interval::Heat, n);
        let (f, g, h): (Vec<_>, Vec<_>, Vec<_>) = match kind {
            BasisKind::HalfSine => (
                (1..=m)
                    .map(|j| {
                        let om = super::half_integer_frequency(j);
                        sample(&wave_x, |x| (om * (x + 1.0)).sin())
                    })
                    .collect(),
                (1..=m)
                    .map(|j| sample(&wave_x, |x| (j as f64 * PI * (x + 1.0)).sin()))
                    .collect(),
                (1..=m).map(|j| sample(&heat_x, |x| (j as f64 * PI * x).sin())).collect(),
            ),
            BasisKind::Lifted => (
                (0..m)
                    .map(|j| {
                        if j == 0 {
                            sample(&wave_x, |x| x + 1.0)
                        } else {
                            sample(&wave_x, |x| (j as f64 * PI * (x + 1.0)).sin())
                        }
                    })
                    .collect(),
                (0..m)
                    .map(|j| sample(&wave_x, |x| (j as f64 * PI * (x + 1.0)).cos()))
                    .collect(),
                (0..m).map(|j| sample(&heat_x, |x| (j as f64 * PI * x).cos())).collect(),
            ),
        };
        let sqrt_w = simpson_weights(n + 1, 1.0 / (n + 1) as f64)
            .into_iter()
            .map(f64::sqrt)
            .collect();
        Ok(InputBasis {
            kind,
            m,
            n,
            f,
            g,
            h,
            wave_x,
            heat_x,
            sqrt_w,
        })
    }

    pub fn dim(&self) -> usize {
        3 * self.m
    }

    /// Exact input Gram matrix for mode `k`.
    pub fn input_gram(&self, k: ModeIndex) -> DMatrix<f64> {
        let kk = k.wavenumber_sq();
        let m = self.m;
        let mut gram = DMatrix::<f64>::zeros(3 * m, 3 * m);
        match self.kind {
            BasisKind::HalfSine => {
                for j in 0..m {
                    let om = super::half_integer_frequency(j + 1);
                    gram[(j, j)] = (kk + om * om) / 2.0;
                    gram[(m + j, m + j)] = 0.5;
                    gram[(2 * m + j, 2 * m + j)] = 0.5;
                }
            }
            BasisKind::Lifted => {
                gram[(0, 0)] = kk / 3.0 + 1.0;
                for j in 1..m {
                    let jp = j as f64 * PI;
                    // k^2 pi^2 <x + 1, sin(j pi (x + 1))>; the derivative part vanishes
                    let c = kk * if j % 2 == 1 { 1.0 } else { -1.0 } / jp;
                    gram[(0, j)] = c;
                    gram[(j, 0)] = c;
                    gram[(j, j)] = (kk + jp * jp) / 2.0;
                }
                for j in 0..m {
                    let d = if j == 0 { 1.0 } else { 0.5 };
                    gram[(m + j, m + j)] = d;
                    gram[(2 * m + j, 2 * m + j)] = d;
                }
            }
        }
        gram
    }

    /// Weighted output samples of the solution for every basis input, one
    /// column per input, rows `(k pi u, u', v)` on the wave grid then `w`.
    pub fn output_matrix(&self, k: ModeIndex, s: f64) -> Result<DMatrix<Complex64>, ResolventError> {
        let (p, q) = check_frequency(k, s)?;
        let hom = Homogeneous { p, q };
        let is = Complex64::new(0.0, s);
        let h = 1.0 / (self.n + 1) as f64;
        let nodes = self.n + 2;
        let kp = k.wavenumber();
        let phi: Vec<Complex64> = self.wave_x.iter().map(|&x| hom.phi(x)).collect();
        let dphi: Vec<Complex64> = self.wave_x.iter().map(|&x| hom.dphi(x)).collect();
        let psi: Vec<Complex64> = self.heat_x.iter().map(|&x| hom.psi(x)).collect();
        let m2 = hom.coupling_matrix(is);
        let dim = self.dim();
        let mut out = DMatrix::<Complex64>::zeros(4 * nodes, dim);
        let zero = Complex64::new(0.0, 0.0);

        for col in 0..dim {
            let block = col / self.m;
            let j = col % self.m;
            // forcing on the wave side, f itself, heat data
            let (wave, f, heat): (Option<(Vec<Complex64>, Vec<Complex64>)>, Option<&Vec<Complex64>>, Option<&Vec<Complex64>>) =
                match block {
                    0 => {
                        let sw = wave_particular(p, h, &self.f[j]);
                        let u = sw.u.iter().map(|z| z * is).collect();
                        let du = sw.du.iter().map(|z| z * is).collect();
                        (Some((u, du)), Some(&self.f[j]), None)
                    }
                    1 => {
                        let sw = wave_particular(p, h, &self.g[j]);
                        (Some((sw.u, sw.du)), None, None)
                    }
                    _ => (None, None, Some(&self.h[j])),
                };
            let heat_sol = heat.map(|hv| heat_particular(q, h, hv));
            let (u0, du0) = wave
                .as_ref()
                .map(|(u, du)| (u[nodes - 1], du[nodes - 1]))
                .unwrap_or((zero, zero));
            let (w0, dw0) = heat_sol
                .as_ref()
                .map(|sw| (sw.u[0], sw.du[0]))
                .unwrap_or((zero, zero));
            let f0 = f.map(|fv| fv[nodes - 1]).unwrap_or(zero);
            let (a, b) = solve_2x2(&m2, [f0 - is * u0 + w0, dw0 - du0], k, s)?;
            for i in 0..nodes {
                let (up, dup) = wave.as_ref().map(|(u, du)| (u[i], du[i])).unwrap_or((zero, zero));
                let u = up + a * phi[i];
                let du = dup + a * dphi[i];
                let v = u * is - f.map(|fv| fv[i]).unwrap_or(zero);
                let wp = heat_sol.as_ref().map(|sw| sw.u[i]).unwrap_or(zero);
                let w = wp + b * psi[i];
                let sw = self.sqrt_w[i];
                out[(i, col)] = u * (kp * sw);
                out[(nodes + i, col)] = du * sw;
                out[(2 * nodes + i, col)] = v * sw;
                out[(3 * nodes + i, col)] = w * sw;
            }
        }
        Ok(out)
    }

    pub fn operator_norm(&self, k: ModeIndex, s: f64) -> Result<ModeNormEstimate, ResolventError> {
        let x = self.output_matrix(k, s)?;
        let chol = self
            .input_gram(k)
            .cholesky()
            .ok_or_else(|| ResolventError::InvalidArgument("input Gram matrix not positive definite".into()))?;
        let l = chol.l().map(|v| Complex64::new(v, 0.0));
        // C = L^-1 (X^H X) L^-H
        let b = gram_of_columns(&x);
        let t = l
            .solve_lower_triangular(&b)
            .expect("Cholesky factor has a positive diagonal");
        let c = l
            .solve_lower_triangular(&t.adjoint())
            .expect("Cholesky factor has a positive diagonal")
            .adjoint();
        let c = (&c + c.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(c);
        let (imax, lmax) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
        let y: DVector<Complex64> = eig.eigenvectors.column(imax).into_owned();
        let coeffs = l
            .adjoint()
            .solve_upper_triangular(&y)
            .expect("Cholesky factor has a positive diagonal");
        Ok(ModeNormEstimate {
            k,
            s,
            norm: lmax.max(0.0).sqrt(),
            m: self.m,
            n: self.n,
            maximizer: coeffs.iter().copied().collect(),
        })
    }

    /// Input `(f, g, h)` for basis coefficients `c`, sampled on the basis grid.
    pub fn synthesize(&self, k: ModeIndex, c: &[Complex64]) -> Result<super::ModeRHS, ResolventError> {
        if c.len() != self.dim() {
            return Err(ResolventError::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                self.dim(),
                c.len()
            )));
        }
        let zero = Complex64::new(0.0, 0.0);
        let mut fv = vec![zero; self.n + 2];
        let mut gv = fv.clone();
        let mut hv = fv.clone();
        for j in 0..self.m {
            for i in 0..self.n + 2 {
                fv[i] += c[j] * self.f[j][i];
                gv[i] += c[self.m + j] * self.g[j][i];
                hv[i] += c[2 * self.m + j] * self.h[j][i];
            }
        }
        fv[0] = zero;
        use crate::grid::GridFunction;
        super::ModeRHS::new(
            k,
            GridFunction::new(Interval::Wave, self.n, fv)?,
            GridFunction::new(Interval::Wave, self.n, gv)?,
            GridFunction::new(Interval::Heat, self.n, hv)?,
        )
    }

    /// Exact input norm of the data with basis coefficients `c`.
    pub fn input_norm(&self, k: ModeIndex, c: &[Complex64]) -> f64 {
        let g = self.input_gram(k).map(|v| Complex64::new(v, 0.0));
        let v = DVector::from_column_slice(c);
        (v.adjoint() * g * &v)[(0, 0)].re.max(0.0).sqrt()
    }
}

/// `X^H X` from real products of the real and imaginary parts, which take
/// the fast real matrix-multiply path.
fn gram_of_columns(x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let xr = x.map(|z| z.re);
    let xi = x.map(|z| z.im);
    let re = xr.tr_mul(&xr) + xi.tr_mul(&xi);
    let im = xr.tr_mul(&xi) - xi.tr_mul(&xr);
    re.zip_map(&im, Complex64::new)
}

/// Largest singular value of the mode-`k` resolvent at `i s` over the
/// `3m`-dimensional input basis, on grids with `n` interior nodes.
pub fn mode_operator_norm(k: ModeIndex, s: f64, m: usize, n: usize) -> Result<f64, ResolventError> {
    Ok(InputBasis::new(m, n)?.operator_norm(k, s)?.norm)
}
