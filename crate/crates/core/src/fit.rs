//! Ordinary least-squares line fits used for exponent readouts.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square of the fit residuals.
    pub residual_rms: f64,
}

/// Fit `y = intercept + slope * x`. Returns `None` for fewer than two points
/// or when all `x` coincide.
pub fn least_squares_line(xs: &[f64], ys: &[f64]) -> Option<Line> {
    weighted_least_squares_line(xs, ys, &vec![1.0; xs.len()])
}

/// Weighted fit minimizing `sum w_i (y_i - intercept - slope x_i)^2`; the
/// reported RMS uses the same weights.
pub fn weighted_least_squares_line(xs: &[f64], ys: &[f64], ws: &[f64]) -> Option<Line> {
    assert_eq!(xs.len(), ys.len(), "abscissa and ordinate lengths differ");
    assert_eq!(xs.len(), ws.len(), "weights and points differ in length");
    if xs.len() < 2 {
        return None;
    }
    let wsum: f64 = ws.iter().sum();
    if !(wsum > 0.0) {
        return None;
    }
    let mx = xs.iter().zip(ws).map(|(x, w)| x * w).sum::<f64>() / wsum;
    let my = ys.iter().zip(ws).map(|(y, w)| y * w).sum::<f64>() / wsum;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for ((&x, &y), &w) in xs.iter().zip(ys).zip(ws) {
        sxx += w * (x - mx) * (x - mx);
        sxy += w * (x - mx) * (y - my);
    }
    if !(sxx > 0.0) {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .zip(ws)
        .map(|((&x, &y), &w)| {
            let r = y - intercept - slope * x;
            w * r * r
        })
        .sum();
    Some(Line {
        slope,
        intercept,
        residual_rms: (ss / wsum).sqrt(),
    })
}

/// Fit `log y = c + alpha log x`; all inputs must be positive.
pub fn log_log_fit(xs: &[f64], ys: &[f64]) -> Option<Line> {
    if xs.iter().chain(ys).any(|&v| !(v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    least_squares_line(&lx, &ly)
}
