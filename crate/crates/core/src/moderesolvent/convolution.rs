//! Running exponential convolutions on a uniform grid.
//!
//! `L_j = int_{x_0}^{x_j} exp(-kappa (x_j - r)) F(r) dr` is advanced interval by
//! interval, `L_{j+1} = exp(-z) L_j + h sum_i w_i(z) F_i` with `z = kappa h`.
//! The weights integrate the exponential exactly against the cubic through
//! four neighbouring nodes, so the rule stays fourth order however sharply the
//! kernel decays or oscillates within a cell.

use num_complex::Complex64;

/// `I_m(z) = int_0^1 exp(-z u) u^m du` for `m = 0..=3`.
fn exp_moments(z: Complex64) -> [Complex64; 4] {
    let mut out = [Complex64::new(0.0, 0.0); 4];
    if z.norm() < 1.0 {
        // sum_n (-z)^n / (n! (n + m + 1))
        for (m, slot) in out.iter_mut().enumerate() {
            let mut term = Complex64::new(1.0, 0.0);
            let mut acc = Complex64::new(0.0, 0.0);
            for n in 0..30 {
                acc += term / (n + m + 1) as f64;
                term *= -z / (n + 1) as f64;
            }
            *slot = acc;
        }
        return out;
    }
    let e = (-z).exp();
    out[0] = (Complex64::new(1.0, 0.0) - e) / z;
    for m in 1..4 {
        out[m] = (out[m - 1] * m as f64 - e) / z;
    }
    out
}

/// Monomial coefficients of the Lagrange basis polynomials on `nodes`.
fn lagrange_coefficients(nodes: [f64; 4]) -> [[f64; 4]; 4] {
    let mut c = [[0.0; 4]; 4];
    for i in 0..4 {
        let mut poly = [1.0, 0.0, 0.0, 0.0];
        let mut denom = 1.0;
        let mut deg = 0;
        for (l, &ul) in nodes.iter().enumerate() {
            if l == i {
                continue;
            }
            // poly *= (u - ul)
            for d in (0..=deg).rev() {
                poly[d + 1] += poly[d];
                poly[d] *= -ul;
            }
            deg += 1;
            denom *= nodes[i] - ul;
        }
        for d in 0..4 {
            c[i][d] = poly[d] / denom;
        }
    }
    c
}

/// Weights for one cell, given the positions of the four stencil nodes in
/// the local coordinate `u = (x_{j+1} - r) / h`.
fn cell_weights(moments: &[Complex64; 4], nodes: [f64; 4]) -> [Complex64; 4] {
    let c = lagrange_coefficients(nodes);
    let mut w = [Complex64::new(0.0, 0.0); 4];
    for i in 0..4 {
        for d in 0..4 {
            w[i] += moments[d] * c[i][d];
        }
    }
    w
}

/// `L_j` for `j = 0..f.len()`, with `L_0 = 0`.
pub fn left_sweep(kappa: Complex64, h: f64, f: &[Complex64]) -> Vec<Complex64> {
    let len = f.len();
    assert!(len >= 4, "need at least three cells");
    let z = kappa * h;
    let mom = exp_moments(z);
    let decay = (-z).exp();
    // Cell [x_j, x_{j+1}] uses nodes j-1..=j+2; node m sits at u = j + 1 - m.
    let first = cell_weights(&mom, [1.0, 0.0, -1.0, -2.0]); // nodes 0..=3
    let inner = cell_weights(&mom, [2.0, 1.0, 0.0, -1.0]); // nodes j-1..=j+2
    let last = cell_weights(&mom, [3.0, 2.0, 1.0, 0.0]); // nodes N-3..=N
    let cells = len - 1;
    let mut out = Vec::with_capacity(len);
    let mut acc = Complex64::new(0.0, 0.0);
    out.push(acc);
    for j in 0..cells {
        let (w, base) = if j == 0 {
            (&first, 0)
        } else if j == cells - 1 {
            (&last, cells - 3)
        } else {
            (&inner, j - 1)
        };
        let mut cell = Complex64::new(0.0, 0.0);
        for i in 0..4 {
            cell += w[i] * f[base + i];
        }
        acc = acc * decay + cell * h;
        out.push(acc);
    }
    out
}

/// `R_j = int_{x_j}^{x_N} exp(-kappa (r - x_j)) F(r) dr`.
pub fn right_sweep(kappa: Complex64, h: f64, f: &[Complex64]) -> Vec<Complex64> {
    let rev: Vec<Complex64> = f.iter().rev().copied().collect();
    let mut r = left_sweep(kappa, h, &rev);
    r.reverse();
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn moments_series_and_recurrence_agree_near_switch() {
        for z in [c(0.999, 0.0), c(1.001, 0.0), c(0.0, 0.9995), c(0.0, 1.0005), c(-0.7, 0.72)] {
            let a = exp_moments(z);
            let zz = z * (1.0 + 1e-9);
            let b = exp_moments(zz);
            for m in 0..4 {
                assert!((a[m] - b[m]).norm() < 1e-8, "{z} {m}");
            }
        }
        let m = exp_moments(c(0.0, 0.0));
        for (i, v) in m.iter().enumerate() {
            assert!((v.re - 1.0 / (i + 1) as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn exact_for_cubic_data() {
        // F(r) = r^3 on [0, 1], kappa = 0: L_j = x_j^4 / 4.
        let n = 10;
        let h = 1.0 / n as f64;
        let f: Vec<Complex64> = (0..=n).map(|j| c((j as f64 * h).powi(3), 0.0)).collect();
        let l = left_sweep(c(0.0, 0.0), h, &f);
        for (j, v) in l.iter().enumerate() {
            let x = j as f64 * h;
            assert!((v.re - x.powi(4) / 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn matches_closed_form_for_stiff_kernel() {
        // F = 1: L(x) = (1 - exp(-kappa x)) / kappa, for any kappa.
        let n = 64;
        let h = 1.0 / n as f64;
        let f = vec![c(1.0, 0.0); n + 1];
        for kappa in [c(300.0, 0.0), c(0.0, 250.0), c(12.0, -40.0), c(1e-7, 0.0)] {
            let l = left_sweep(kappa, h, &f);
            let r = right_sweep(kappa, h, &f);
            // (1 - exp(-kappa x)) / kappa without cancellation for small kappa x
            let exact_at = |x: f64| {
                let z = kappa * x;
                if z.norm() < 1e-3 {
                    (c(1.0, 0.0) - z / 2.0 + z * z / 6.0) * x
                } else {
                    (c(1.0, 0.0) - (-z).exp()) / kappa
                }
            };
            for j in 0..=n {
                let x = j as f64 * h;
                let exact = exact_at(x);
                let exact_r = exact_at(1.0 - x);
                assert!((l[j] - exact).norm() < 1e-13, "{kappa} {j}");
                assert!((r[j] - exact_r).norm() < 1e-13, "{kappa} {j}");
            }
        }
    }

    #[test]
    fn fourth_order_for_smooth_data() {
        let err = |n: usize| {
            let h = 1.0 / n as f64;
            let kappa = c(3.0, 5.0);
            let f: Vec<Complex64> = (0..=n).map(|j| c((j as f64 * h * 4.0).sin(), 0.0)).collect();
            let l = left_sweep(kappa, h, &f);
            // reference on a much finer grid
            let m = 16 * n;
            let hf = 1.0 / m as f64;
            let ff: Vec<Complex64> = (0..=m).map(|j| c((j as f64 * hf * 4.0).sin(), 0.0)).collect();
            let lf = left_sweep(kappa, hf, &ff);
            (l[n] - lf[m]).norm()
        };
        let ratio = err(32) / err(64);
        assert!(ratio > 10.0, "{ratio}");
    }
}
