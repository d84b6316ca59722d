//! Crank–Nicolson time stepping and energy traces.
//!
//! `x+ = (I - dt/2 A_h)^{-1} (I + dt/2 A_h) x`, computed as
//! `2 (I - dt/2 A_h)^{-1} x - x`. Because `A_h` is dissipative in the `Q`
//! inner product, each step is a `Q`-contraction.
//!
//! Long horizons are integrated with the dense one-sample propagator
//! `B = R P^s R^{-1}`, `Q = R^T R`: in these energy coordinates `B` is a
//! Euclidean contraction, it is formed by repeated squaring, and the energy
//! is `|y|^2 / 2`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::banded::BandLu;
use super::generator::ModeGenerator;
use super::state::ModeState;
use super::SimError;
use crate::fit::{least_squares_line, weighted_least_squares_line};
use crate::kernel::ModeIndex;

#[derive(Debug, Clone)]
pub struct CrankNicolson {
    pub dt: f64,
    lu: BandLu<f64>,
}

impl CrankNicolson {
    pub fn new(gen: &ModeGenerator, dt: f64) -> Result<Self, SimError> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(SimError::InvalidArgument(format!("time step must be positive, got {dt}")));
        }
        Ok(CrankNicolson {
            dt,
            lu: gen.factor_shifted(1.0, -0.5 * dt)?,
        })
    }

    pub fn step_in_place(&self, x: &mut [Complex64]) {
        let mut y = x.to_vec();
        self.lu.solve_in_place(&mut y);
        for (a, b) in x.iter_mut().zip(&y) {
            *a = 2.0 * b - *a;
        }
    }
}

/// One Crank–Nicolson step of `state`.
pub fn step(gen: &ModeGenerator, state: &ModeState, dt: f64) -> Result<ModeState, SimError> {
    state.check(gen)?;
    let cn = CrankNicolson::new(gen, dt)?;
    let mut next = state.clone();
    cn.step_in_place(&mut next.x);
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Stepping {
    /// Banded solves every step; energy checked after every step.
    Direct,
    /// Dense squared propagator between samples.
    Propagator,
    /// Whichever is estimated cheaper.
    #[default]
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationOptions {
    pub dt: f64,
    pub t_end: f64,
    /// Steps between recorded samples.
    pub sample_every: usize,
    pub record_modes: bool,
    pub stepping: Stepping,
}

impl SimulationOptions {
    pub fn new(dt: f64, t_end: f64, sample_every: usize) -> Self {
        SimulationOptions {
            dt,
            t_end,
            sample_every,
            record_modes: false,
            stepping: Stepping::Auto,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(SimError::InvalidArgument(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(SimError::InvalidArgument(format!("T must be positive, got {}", self.t_end)));
        }
        if self.sample_every == 0 {
            return Err(SimError::InvalidArgument("sample_every must be at least 1".into()));
        }
        if self.samples() == 0 {
            return Err(SimError::InvalidArgument(format!(
                "T = {} is shorter than one sample interval ({} steps of {})",
                self.t_end, self.sample_every, self.dt
            )));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    /// Samples after `t = 0`.
    pub fn samples(&self) -> usize {
        self.steps() / self.sample_every
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.samples())
            .map(|j| (j * self.sample_every) as f64 * self.dt)
            .collect()
    }

    fn use_propagator(&self, dim: usize) -> bool {
        match self.stepping {
            Stepping::Direct => false,
            Stepping::Propagator => true,
            Stepping::Auto => {
                // measured costs in nanoseconds: dense products, dense sample
                // updates, banded steps
                let d = dim as f64;
                let s = self.sample_every as f64;
                let products = s.log2().floor() + self.sample_every.count_ones() as f64 + 2.0;
                let dense = 0.1 * d * d * d * products + 2.5 * d * d * self.samples() as f64;
                let direct = 40.0 * d * self.steps() as f64;
                dense < direct
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeTrace {
    pub k: ModeIndex,
    pub energy: Vec<f64>,
    pub dissipation: Vec<f64>,
    /// Largest `(E_next - E) / E` over consecutive steps (direct stepping) or
    /// samples (propagator).
    pub max_relative_increase: f64,
    pub final_state: ModeState,
}

fn relative_increase(prev: f64, next: f64) -> f64 {
    if prev > 0.0 {
        (next - prev) / prev
    } else if next > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

fn simulate_direct(gen: &ModeGenerator, state: &ModeState, opts: &SimulationOptions) -> Result<ModeTrace, SimError> {
    let cn = CrankNicolson::new(gen, opts.dt)?;
    let mut x = state.x.clone();
    let mut e = gen.energy(&x);
    let mut energy = vec![e];
    let mut dissipation = vec![gen.dissipation(&x)];
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..opts.samples() {
        for _ in 0..opts.sample_every {
            cn.step_in_place(&mut x);
            let e_next = gen.energy(&x);
            worst = worst.max(relative_increase(e, e_next));
            e = e_next;
        }
        energy.push(e);
        dissipation.push(gen.dissipation(&x));
    }
    Ok(ModeTrace {
        k: gen.k,
        energy,
        dissipation,
        max_relative_increase: worst,
        final_state: ModeState { x, ..state.clone() },
    })
}

/// `P^s` for `P` the single-step map, in energy coordinates.
#[derive(Debug, Clone)]
pub struct Propagator {
    /// Cholesky factor `L` of `Q`; `R = L^T`.
    l: DMatrix<f64>,
    /// `R P^s R^{-1}`.
    b: DMatrix<f64>,
    pub steps: usize,
}

impl Propagator {
    pub fn new(gen: &ModeGenerator, dt: f64, steps: usize) -> Result<Self, SimError> {
        let cn = CrankNicolson::new(gen, dt)?;
        let dim = gen.dim();
        let mut p = DMatrix::<f64>::zeros(dim, dim);
        let mut col = vec![0.0; dim];
        for j in 0..dim {
            col.iter_mut().for_each(|v| *v = 0.0);
            col[j] = 1.0;
            cn.lu.solve_in_place(&mut col);
            for i in 0..dim {
                p[(i, j)] = 2.0 * col[i] - if i == j { 1.0 } else { 0.0 };
            }
        }
        let l = gen
            .q
            .to_dense()
            .cholesky()
            .ok_or_else(|| SimError::SolveFailure("energy weight is not positive definite".into()))?
            .unpack();
        // B = L^T P L^{-T}; (P L^{-T})^T = L^{-1} P^T
        let pl = l
            .solve_lower_triangular(&p.transpose())
            .ok_or_else(|| SimError::SolveFailure("singular energy factor".into()))?
            .transpose();
        let b1 = l.transpose() * pl;
        Ok(Propagator {
            l,
            b: matrix_power(&b1, steps),
            steps,
        })
    }

    pub fn to_energy_coords(&self, x: &[Complex64]) -> DMatrix<f64> {
        let dim = x.len();
        let xm = DMatrix::from_fn(dim, 2, |i, c| if c == 0 { x[i].re } else { x[i].im });
        self.l.tr_mul(&xm)
    }

    pub fn from_energy_coords(&self, y: &DMatrix<f64>) -> Vec<Complex64> {
        let x = self
            .l
            .transpose()
            .solve_upper_triangular(y)
            .expect("Cholesky factor has a positive diagonal");
        (0..y.nrows()).map(|i| Complex64::new(x[(i, 0)], x[(i, 1)])).collect()
    }

    pub fn apply(&self, y: &DMatrix<f64>) -> DMatrix<f64> {
        &self.b * y
    }
}

fn matrix_power(b: &DMatrix<f64>, mut e: usize) -> DMatrix<f64> {
    let mut acc: Option<DMatrix<f64>> = None;
    let mut base = b.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => &a * &base,
            });
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc.unwrap_or_else(|| DMatrix::identity(b.nrows(), b.ncols()))
}

fn simulate_propagator(gen: &ModeGenerator, state: &ModeState, opts: &SimulationOptions) -> Result<ModeTrace, SimError> {
    let prop = Propagator::new(gen, opts.dt, opts.sample_every)?;
    let mut y = prop.to_energy_coords(&state.x);
    let mut e = 0.5 * y.norm_squared();
    let mut energy = vec![e];
    let mut dissipation = vec![gen.dissipation(&state.x)];
    let mut worst = f64::NEG_INFINITY;
    let mut x = state.x.clone();
    for _ in 0..opts.samples() {
        y = prop.apply(&y);
        let e_next = 0.5 * y.norm_squared();
        worst = worst.max(relative_increase(e, e_next));
        e = e_next;
        x = prop.from_energy_coords(&y);
        energy.push(e);
        dissipation.push(gen.dissipation(&x));
    }
    Ok(ModeTrace {
        k: gen.k,
        energy,
        dissipation,
        max_relative_increase: worst,
        final_state: ModeState { x, ..state.clone() },
    })
}

pub fn simulate_mode(gen: &ModeGenerator, state: &ModeState, opts: &SimulationOptions) -> Result<ModeTrace, SimError> {
    opts.validate()?;
    state.check(gen)?;
    if opts.use_propagator(gen.dim()) {
        simulate_propagator(gen, state, opts)
    } else {
        simulate_direct(gen, state, opts)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyTrace {
    pub times: Vec<f64>,
    pub total_energy: Vec<f64>,
    pub dissipation: Vec<f64>,
    pub modes: Vec<ModeIndex>,
    /// `per_mode_energy[i][j]`: mode `modes[i]` at `times[j]`.
    pub per_mode_energy: Option<Vec<Vec<f64>>>,
    pub per_mode_dissipation: Option<Vec<Vec<f64>>>,
    pub max_relative_increase: f64,
}

/// Advances every mode and sums energies in mode order.
pub fn simulate(modes: &[(ModeGenerator, ModeState)], opts: &SimulationOptions) -> Result<EnergyTrace, SimError> {
    opts.validate()?;
    if modes.is_empty() {
        return Err(SimError::InvalidArgument("no modes to simulate".into()));
    }
    let traces = modes
        .par_iter()
        .map(|(g, s)| simulate_mode(g, s, opts))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(combine(&traces, opts.times(), opts.record_modes))
}

fn combine(traces: &[ModeTrace], times: Vec<f64>, record_modes: bool) -> EnergyTrace {
    let len = times.len();
    let mut total = vec![0.0; len];
    let mut diss = vec![0.0; len];
    for t in traces {
        for j in 0..len {
            total[j] += t.energy[j];
            diss[j] += t.dissipation[j];
        }
    }
    // energy increase of the sum, sample to sample
    let worst_sum = total
        .windows(2)
        .map(|w| relative_increase(w[0], w[1]))
        .fold(f64::NEG_INFINITY, f64::max);
    let worst = traces
        .iter()
        .map(|t| t.max_relative_increase)
        .fold(worst_sum, f64::max);
    EnergyTrace {
        times,
        total_energy: total,
        dissipation: diss,
        modes: traces.iter().map(|t| t.k).collect(),
        per_mode_energy: record_modes.then(|| traces.iter().map(|t| t.energy.clone()).collect()),
        per_mode_dissipation: record_modes.then(|| traces.iter().map(|t| t.dissipation.clone()).collect()),
        max_relative_increase: worst,
    }
}

impl EnergyTrace {
    pub fn is_monotone(&self, tol: f64) -> bool {
        self.max_relative_increase <= tol
    }

    /// `|E(T) - E(0) + int_0^T D dt| / E(0)`, the integral by the trapezoid
    /// rule on the samples.
    pub fn balance_defect(&self) -> f64 {
        let mut integral = 0.0;
        for j in 1..self.times.len() {
            let dt = self.times[j] - self.times[j - 1];
            integral += 0.5 * dt * (self.dissipation[j] + self.dissipation[j - 1]);
        }
        let e0 = self.total_energy[0];
        let e1 = *self.total_energy.last().expect("trace has samples");
        (e1 - e0 + integral).abs() / e0
    }

    /// The trace of the modes `k <= k_max` alone.
    pub fn truncated(&self, k_max: ModeIndex) -> Result<EnergyTrace, SimError> {
        let (Some(pe), Some(pd)) = (&self.per_mode_energy, &self.per_mode_dissipation) else {
            return Err(SimError::InvalidArgument("trace was recorded without per-mode energies".into()));
        };
        let keep: Vec<usize> = (0..self.modes.len()).filter(|&i| self.modes[i] <= k_max).collect();
        if keep.is_empty() {
            return Err(SimError::InvalidArgument(format!("no modes with k <= {k_max}")));
        }
        let len = self.times.len();
        let sum = |rows: &Vec<Vec<f64>>| {
            let mut out = vec![0.0; len];
            for &i in &keep {
                for j in 0..len {
                    out[j] += rows[i][j];
                }
            }
            out
        };
        let total = sum(pe);
        let worst = total
            .windows(2)
            .map(|w| relative_increase(w[0], w[1]))
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(EnergyTrace {
            times: self.times.clone(),
            total_energy: total,
            dissipation: sum(pd),
            modes: keep.iter().map(|&i| self.modes[i]).collect(),
            per_mode_energy: Some(keep.iter().map(|&i| pe[i].clone()).collect()),
            per_mode_dissipation: Some(keep.iter().map(|&i| pd[i].clone()).collect()),
            max_relative_increase: worst,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Slope of `log E` against `log t`.
    pub exponent: f64,
    pub intercept: f64,
    pub residual: f64,
    pub decades: f64,
    pub samples: usize,
}

pub const MIN_DECADES: f64 = 1.5;

/// Least-squares slope of `log E` against `log t` over `window`, weighting
/// each sample by its share of `log t` so every decade counts alike.
pub fn decay_fit(trace: &EnergyTrace, window: (f64, f64)) -> Result<DecayFit, SimError> {
    let pts: Vec<(f64, f64)> = trace
        .times
        .iter()
        .zip(&trace.total_energy)
        .filter(|(&t, &e)| t > 0.0 && t >= window.0 && t <= window.1 && e > 0.0)
        .map(|(&t, &e)| (t.ln(), e.ln()))
        .collect();
    let decades = if pts.len() >= 2 {
        (pts[pts.len() - 1].0 - pts[0].0) / std::f64::consts::LN_10
    } else {
        0.0
    };
    if decades < MIN_DECADES {
        return Err(SimError::InsufficientDecades {
            decades,
            needed: MIN_DECADES,
        });
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let m = xs.len();
    let ws: Vec<f64> = (0..m)
        .map(|i| {
            let lo = if i == 0 { xs[0] } else { 0.5 * (xs[i - 1] + xs[i]) };
            let hi = if i + 1 == m { xs[m - 1] } else { 0.5 * (xs[i] + xs[i + 1]) };
            hi - lo
        })
        .collect();
    let line = weighted_least_squares_line(&xs, &ys, &ws).ok_or(SimError::InsufficientDecades {
        decades,
        needed: MIN_DECADES,
    })?;
    Ok(DecayFit {
        exponent: line.slope,
        intercept: line.intercept,
        residual: line.residual_rms,
        decades,
        samples: m,
    })
}

/// Slope of `log E` against `t`, for exponentially decaying traces.
pub fn exponential_rate(trace: &EnergyTrace) -> Option<f64> {
    let (ts, ls): (Vec<f64>, Vec<f64>) = trace
        .times
        .iter()
        .zip(&trace.total_energy)
        .filter(|(_, &e)| e > 0.0)
        .map(|(&t, &e)| (t, e.ln()))
        .unzip();
    least_squares_line(&ts, &ls).map(|l| l.slope)
}
