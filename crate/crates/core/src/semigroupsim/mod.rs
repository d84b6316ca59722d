//! Time-domain simulation of the mode-decomposed semigroup.
//!
//! Each transverse mode is an independent 1D interface problem. The grid
//! generator is dissipative in its energy inner product, and Crank–Nicolson
//! keeps the discrete energy non-increasing step by step.

pub mod banded;
mod generator;
mod integrate;
mod state;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use generator::{assemble_mode_generator, Dissipativity, Layout, ModeGenerator, MIN_CELLS};
pub use integrate::{
    decay_fit, exponential_rate, simulate, simulate_mode, step, CrankNicolson, DecayFit, EnergyTrace, ModeTrace,
    Propagator, SimulationOptions, Stepping, MIN_DECADES,
};
pub use state::{make_classical_data, project_eigenmode, random_state, ModeState, RANDOM_DATA_MODES};

use crate::kernel::ModeIndex;
use crate::moderesolvent::{eigenmode, ResolventError};
use crate::spectrum::{certified_eigenvalue, Branch, SpectrumError, SpectrumOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("linear solve failed: {0}")]
    SolveFailure(String),
    #[error("generator for k={k}, n={n} is not dissipative (max eigenvalue {max_eig:e})")]
    NotDissipative { k: ModeIndex, n: usize, max_eig: f64 },
    #[error("fit window spans {decades:.2} decades of t, need {needed}")]
    InsufficientDecades { decades: f64, needed: f64 },
    #[error(transparent)]
    Resolvent(#[from] ResolventError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

/// Random data on modes `1..=modes`, amplitude `1/k`, smoothed `smoothing_order`
/// times by `(I - A_h)^{-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayExperiment {
    pub modes: u64,
    pub smoothing_order: usize,
    pub n: usize,
    pub dt: f64,
    #[serde(rename = "T")]
    pub t_end: f64,
    pub seed: u64,
    pub sample_every: usize,
}

impl Default for DecayExperiment {
    fn default() -> Self {
        DecayExperiment {
            modes: 64,
            smoothing_order: 1,
            n: 128,
            dt: 1e-2,
            t_end: 1e3,
            seed: 1,
            sample_every: 100,
        }
    }
}

impl DecayExperiment {
    pub fn options(&self) -> SimulationOptions {
        SimulationOptions {
            record_modes: true,
            ..SimulationOptions::new(self.dt, self.t_end, self.sample_every)
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.modes == 0 {
            return Err(SimError::InvalidArgument("need at least one mode".into()));
        }
        if self.n < MIN_CELLS {
            return Err(SimError::InvalidArgument(format!("n must be at least {MIN_CELLS}")));
        }
        self.options().validate()
    }

    pub fn initial_data(&self) -> Result<Vec<(ModeGenerator, ModeState)>, SimError> {
        self.validate()?;
        (1..=self.modes)
            .into_par_iter()
            .map(|k| {
                let k = ModeIndex::new(k).expect("k >= 1");
                let gen = assemble_mode_generator(k, self.n)?;
                let raw = random_state(&gen, self.seed, 1.0 / k.get() as f64);
                let data = make_classical_data(&gen, &raw, self.smoothing_order)?;
                Ok((gen, data))
            })
            .collect()
    }

    pub fn run(&self) -> Result<EnergyTrace, SimError> {
        simulate(&self.initial_data()?, &self.options())
    }
}

/// The certified `lambda_k^+` and its eigenfunction sampled on an `n`-cell grid.
pub fn eigenmode_initial_data(k: ModeIndex, n: usize) -> Result<(ModeGenerator, ModeState, Complex64), SimError> {
    let lam = certified_eigenvalue(k, Branch::Upper, SpectrumOptions::default())?
        .eigenvalue
        .lambda;
    let gen = assemble_mode_generator(k, n)?;
    let mode = eigenmode(k, lam, 4 * n.max(128))?;
    let st = project_eigenmode(&gen, &mode)?;
    Ok((gen, st, lam))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenmodeDecay {
    pub k: ModeIndex,
    pub lambda: Complex64,
    pub trace: EnergyTrace,
    /// Fitted slope of `log E` against `t`.
    pub fitted_rate: f64,
    /// `E(T) / (E(0) exp(2 Re lambda T)) - 1`.
    pub final_deviation: f64,
}

/// Simulates the eigenmode of `lambda_k^+` over one e-folding of energy,
/// `T = 1 / (2 |Re lambda|)`, rounded to whole samples.
pub fn eigenmode_decay(k: ModeIndex, n: usize, dt: f64, samples: usize) -> Result<EigenmodeDecay, SimError> {
    if samples == 0 {
        return Err(SimError::InvalidArgument("need at least one sample".into()));
    }
    let (gen, st, lam) = eigenmode_initial_data(k, n)?;
    let horizon = 1.0 / (2.0 * lam.re.abs());
    let steps = (horizon / dt).round().max(samples as f64) as usize;
    let sample_every = steps / samples;
    let opts = SimulationOptions::new(dt, (sample_every * samples) as f64 * dt, sample_every);
    let trace = simulate(&[(gen, st)], &opts)?;
    let fitted_rate = exponential_rate(&trace).unwrap_or(f64::NAN);
    let t = *trace.times.last().expect("trace has samples");
    let ratio = trace.total_energy.last().expect("trace has samples") / trace.total_energy[0];
    Ok(EigenmodeDecay {
        k,
        lambda: lam,
        fitted_rate,
        final_deviation: ratio / (2.0 * lam.re * t).exp() - 1.0,
        trace,
    })
}

/// Energy of the `lambda_k^+` eigenmode at `t* = 1 / (2 |Re lambda_k|)`,
/// compared with a candidate rate `t^-rate_exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpnessWitness {
    pub k: ModeIndex,
    pub lambda: Complex64,
    pub t_star: f64,
    pub energy_ratio: f64,
    pub rate_exponent: f64,
    pub rate_bound: f64,
    pub holds: bool,
}

pub fn sharpness_witness(k: ModeIndex, n: usize, dt: f64, rate_exponent: f64) -> Result<SharpnessWitness, SimError> {
    let (gen, st, lam) = eigenmode_initial_data(k, n)?;
    let steps = ((1.0 / (2.0 * lam.re.abs())) / dt).round().max(1.0) as usize;
    let t_star = steps as f64 * dt;
    let opts = SimulationOptions::new(dt, t_star, steps);
    let trace = simulate(&[(gen, st)], &opts)?;
    let energy_ratio = trace.total_energy[1] / trace.total_energy[0];
    let rate_bound = t_star.powf(-rate_exponent);
    Ok(SharpnessWitness {
        k,
        lambda: lam,
        t_star,
        energy_ratio,
        rate_exponent,
        rate_bound,
        holds: energy_ratio > rate_bound,
    })
}
