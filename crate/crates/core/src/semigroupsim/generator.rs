//! Mode generator on a shared-interface grid.
//!
//! Each interval is cut into `n` cells of width `h = 1/n`. The unknowns are
//! `u_1..u_n` and `v_1..v_{n-1}` on the wave side, a single interface value
//! `c = v(0) = w(0)`, and `w_1..w_{n-1}` on the heat side; `u(-1) = 0` and
//! `w(1) = 0` are eliminated. They are interleaved by position,
//! `[u_1, v_1, .., u_n, c, w_1, .., w_{n-1}]`, which gives `A_h` three
//! sub- and one superdiagonal.
//!
//! The energy is `E = x^H Q x / 2` with `Q` the lumped stiffness of
//! `|u'|^2 + k^2 pi^2 |u|^2` plus the lumped mass of `v`, `c` and `w`. The
//! interface row is the finite-volume balance of the half cells on either
//! side of `x = 0`, so the flux condition `u'(0) = w'(0)` is imposed weakly and
//! `Q A_h + A_h^T Q = -2 S_w` exactly, with `S_w` the heat stiffness.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::banded::{BandLu, Banded};
use super::SimError;
use crate::kernel::ModeIndex;

pub const MIN_CELLS: usize = 16;

/// Position of each unknown in the state vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub n: usize,
}

impl Layout {
    pub fn dim(&self) -> usize {
        3 * self.n - 1
    }
    /// `u_i`, `i = 1..=n`.
    pub fn u(&self, i: usize) -> usize {
        2 * (i - 1)
    }
    /// `v_i`, `i = 1..=n`; `v_n` is the interface unknown.
    pub fn v(&self, i: usize) -> usize {
        2 * (i - 1) + 1
    }
    pub fn interface(&self) -> usize {
        2 * self.n - 1
    }
    /// `w_j`, `j = 0..n`; `w_0` is the interface unknown.
    pub fn w(&self, j: usize) -> usize {
        if j == 0 {
            self.interface()
        } else {
            2 * self.n - 1 + j
        }
    }
}

#[derive(Debug, Clone)]
pub struct ModeGenerator {
    pub k: ModeIndex,
    pub n: usize,
    pub layout: Layout,
    /// `A_h`.
    pub a: Banded<f64>,
    /// Energy weight `Q`, symmetric positive definite.
    pub q: Banded<f64>,
}

pub fn assemble_mode_generator(k: ModeIndex, n: usize) -> Result<ModeGenerator, SimError> {
    if n < MIN_CELLS {
        return Err(SimError::InvalidArgument(format!(
            "need at least {MIN_CELLS} cells per interval, got {n}"
        )));
    }
    let lay = Layout { n };
    let dim = lay.dim();
    let h = 1.0 / n as f64;
    let kk = k.wavenumber_sq();
    let ih2 = 1.0 / (h * h);
    let mut a = Banded::zeros(dim, 3, 1);
    let mut q = Banded::zeros(dim, 2, 2);

    for i in 1..=n {
        a.add(lay.u(i), lay.v(i), 1.0);
    }
    for i in 1..n {
        let r = lay.v(i);
        if i > 1 {
            a.add(r, lay.u(i - 1), ih2);
        }
        a.add(r, lay.u(i), -2.0 * ih2 - kk);
        a.add(r, lay.u(i + 1), ih2);
    }
    let c = lay.interface();
    if n > 1 {
        a.add(c, lay.u(n - 1), ih2);
    }
    a.add(c, lay.u(n), -ih2 - 0.5 * kk);
    a.add(c, c, -ih2 - 0.5 * kk);
    a.add(c, lay.w(1), ih2);
    for j in 1..n {
        let r = lay.w(j);
        a.add(r, lay.w(j - 1), ih2);
        a.add(r, r, -2.0 * ih2 - kk);
        if j + 1 < n {
            a.add(r, lay.w(j + 1), ih2);
        }
    }

    for i in 1..=n {
        let r = lay.u(i);
        let diag = if i < n { 2.0 / h + kk * h } else { 1.0 / h + 0.5 * kk * h };
        q.add(r, r, diag);
        if i < n {
            q.add(r, lay.u(i + 1), -1.0 / h);
            q.add(lay.u(i + 1), r, -1.0 / h);
        }
    }
    for i in 1..=n {
        q.add(lay.v(i), lay.v(i), h);
    }
    for j in 1..n {
        q.add(lay.w(j), lay.w(j), h);
    }
    Ok(ModeGenerator { k, n, layout: lay, a, q })
}

fn quad_form(q: &Banded<f64>, x: &[Complex64], y: &[Complex64]) -> Complex64 {
    // x^H Q y
    let qy = q.mul_vec(y);
    x.iter().zip(&qy).map(|(a, b)| a.conj() * b).sum()
}

impl ModeGenerator {
    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// `x^H Q x / 2`.
    pub fn energy(&self, x: &[Complex64]) -> f64 {
        0.5 * quad_form(&self.q, x, x).re
    }

    /// `-Re <A_h x, x>_Q`, the instantaneous energy loss rate.
    pub fn dissipation(&self, x: &[Complex64]) -> f64 {
        let ax = self.a.mul_vec(x);
        -quad_form(&self.q, x, &ax).re
    }

    /// The same loss rate from the heat unknowns alone:
    /// `sum |w_{j+1} - w_j|^2 / h + k^2 pi^2 h (|c|^2 / 2 + sum |w_j|^2)`.
    pub fn heat_dissipation(&self, x: &[Complex64]) -> f64 {
        let lay = self.layout;
        let h = self.h();
        let kk = self.k.wavenumber_sq();
        let w = |j: usize| if j == self.n { Complex64::new(0.0, 0.0) } else { x[lay.w(j)] };
        let mut grad = 0.0;
        for j in 0..self.n {
            grad += (w(j + 1) - w(j)).norm_sqr();
        }
        let mut mass = 0.5 * w(0).norm_sqr();
        for j in 1..self.n {
            mass += w(j).norm_sqr();
        }
        grad / h + kk * h * mass
    }

    /// Largest eigenvalue of `Q A_h + A_h^T Q`, with its scale `max |entry|`.
    /// Discrete dissipativity is `max_eig <= 1e-8 scale`.
    pub fn dissipativity(&self) -> Dissipativity {
        let qa = self.q.to_dense() * self.a.to_dense();
        let sym = &qa + qa.transpose();
        let scale = qa.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let max_eig = SymmetricEigen::new(sym).eigenvalues.max();
        Dissipativity { max_eig, scale }
    }

    pub fn check_dissipative(&self) -> Result<Dissipativity, SimError> {
        let d = self.dissipativity();
        if d.max_eig > 1e-8 * d.scale {
            return Err(SimError::NotDissipative {
                k: self.k,
                n: self.n,
                max_eig: d.max_eig,
            });
        }
        Ok(d)
    }

    /// Factors `alpha I + beta A_h`.
    pub fn factor_shifted(&self, alpha: f64, beta: f64) -> Result<BandLu<f64>, SimError> {
        self.a
            .shifted(alpha, beta)
            .factor()
            .map_err(|e| SimError::SolveFailure(format!("pivot {} vanished for k = {}", e.column, self.k)))
    }

    /// Eigenvalue of `A_h` closest to `target`, by shifted inverse iteration.
    pub fn nearest_eigenvalue(&self, target: Complex64) -> Result<(Complex64, Vec<Complex64>), SimError> {
        let shifted = self
            .a
            .map(|v| Complex64::new(v, 0.0))
            .shifted(-target, Complex64::new(1.0, 0.0));
        let lu = shifted
            .factor()
            .map_err(|_| SimError::SolveFailure(format!("{target} is an eigenvalue of A_h to working precision")))?;
        let dim = self.dim();
        let mut x: Vec<Complex64> = (0..dim)
            .map(|i| Complex64::new(1.0 + (i as f64 * 0.61).sin(), (i as f64 * 0.23).cos()))
            .collect();
        normalize(&mut x);
        let mut mu = target;
        for _ in 0..100 {
            let y = lu.solve(&x);
            // x ~ (mu - target) y for the dominant component
            let theta: Complex64 = x.iter().zip(&y).map(|(a, b)| a.conj() * b).sum();
            let next = target + 1.0 / theta;
            x = y;
            normalize(&mut x);
            let done = (next - mu).norm() <= 1e-14 * next.norm().max(1.0);
            mu = next;
            if done {
                break;
            }
        }
        Ok((mu, x))
    }

    /// Dense `A_h`, for diagnostics.
    pub fn dense(&self) -> DMatrix<f64> {
        self.a.to_dense()
    }
}

fn normalize(x: &mut [Complex64]) {
    let nrm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in x.iter_mut() {
        *z /= nrm;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dissipativity {
    pub max_eig: f64,
    pub scale: f64,
}
