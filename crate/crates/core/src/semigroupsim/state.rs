use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::generator::ModeGenerator;
use super::SimError;
use crate::kernel::ModeIndex;
use crate::moderesolvent::Eigenmode;

/// Grid values of one mode, laid out as in [`super::Layout`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeState {
    pub k: ModeIndex,
    pub n: usize,
    pub x: Vec<Complex64>,
}

impl ModeState {
    pub fn zeros(gen: &ModeGenerator) -> Self {
        ModeState {
            k: gen.k,
            n: gen.n,
            x: vec![Complex64::new(0.0, 0.0); gen.dim()],
        }
    }

    pub fn check(&self, gen: &ModeGenerator) -> Result<(), SimError> {
        if self.k != gen.k || self.n != gen.n || self.x.len() != gen.dim() {
            return Err(SimError::InvalidArgument(format!(
                "state (k = {}, n = {}) does not fit generator (k = {}, n = {})",
                self.k, self.n, gen.k, gen.n
            )));
        }
        if self.x.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(SimError::InvalidArgument("state has non-finite entries".into()));
        }
        Ok(())
    }

    /// `u` at `x_i = -1 + i h`, `i = 0..=n`.
    pub fn u(&self, gen: &ModeGenerator) -> Vec<Complex64> {
        let lay = gen.layout;
        std::iter::once(Complex64::new(0.0, 0.0))
            .chain((1..=self.n).map(|i| self.x[lay.u(i)]))
            .collect()
    }

    /// `v` at the wave nodes, `v(-1) = 0` included.
    pub fn v(&self, gen: &ModeGenerator) -> Vec<Complex64> {
        let lay = gen.layout;
        std::iter::once(Complex64::new(0.0, 0.0))
            .chain((1..=self.n).map(|i| self.x[lay.v(i)]))
            .collect()
    }

    /// `w` at `y_j = j h`, `j = 0..=n`.
    pub fn w(&self, gen: &ModeGenerator) -> Vec<Complex64> {
        let lay = gen.layout;
        (0..self.n)
            .map(|j| self.x[lay.w(j)])
            .chain(std::iter::once(Complex64::new(0.0, 0.0)))
            .collect()
    }

    pub fn scale(&mut self, c: f64) {
        for z in &mut self.x {
            *z *= c;
        }
    }
}

/// Sine modes per field in [`random_state`].
pub const RANDOM_DATA_MODES: usize = 8;

/// Smooth random data scaled to energy `amplitude^2 / 2`: `u`, `v` and `w` are
/// sums of `sin((j - 1/2) pi (x + 1))` (on the heat side
/// `sin((j - 1/2) pi (1 - x))`) with coefficients uniform in `[-1/j, 1/j]`,
/// and the interface value averages the two sides. Sampling a fixed function
/// keeps the data consistent under grid refinement and leaves the grid-scale
/// modes of `A_h` unexcited. The stream depends only on `(seed, k)`.
pub fn random_state(gen: &ModeGenerator, seed: u64, amplitude: f64) -> ModeState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(gen.k.get());
    let mut coeffs = |_: ()| -> Vec<f64> {
        (1..=RANDOM_DATA_MODES)
            .map(|j| rng.gen_range(-1.0..=1.0) / j as f64)
            .collect()
    };
    let (a, b, c) = (coeffs(()), coeffs(()), coeffs(()));
    let eval = |cs: &[f64], t: f64| -> f64 {
        cs.iter()
            .enumerate()
            .map(|(j, cj)| cj * ((j as f64 + 0.5) * PI * t).sin())
            .sum()
    };
    let lay = gen.layout;
    let h = gen.h();
    let mut st = ModeState::zeros(gen);
    for i in 1..=gen.n {
        let t = i as f64 * h;
        st.x[lay.u(i)] = Complex64::new(eval(&a, t), 0.0);
        if i < gen.n {
            st.x[lay.v(i)] = Complex64::new(eval(&b, t), 0.0);
        }
    }
    st.x[lay.interface()] = Complex64::new(0.5 * (eval(&b, 1.0) + eval(&c, 1.0)), 0.0);
    for j in 1..gen.n {
        st.x[lay.w(j)] = Complex64::new(eval(&c, 1.0 - j as f64 * h), 0.0);
    }
    let e = gen.energy(&st.x);
    if e > 0.0 {
        st.scale(amplitude / (2.0 * e).sqrt());
    }
    st
}

/// Applies `(I - A_h)^{-1}` `order` times, the discrete counterpart of mapping
/// data into `D(A^order)`.
pub fn make_classical_data(gen: &ModeGenerator, raw: &ModeState, order: usize) -> Result<ModeState, SimError> {
    raw.check(gen)?;
    let lu = gen.factor_shifted(1.0, -1.0)?;
    let mut x = raw.x.clone();
    for _ in 0..order {
        lu.solve_in_place(&mut x);
    }
    Ok(ModeState { x, ..raw.clone() })
}

/// Samples an eigenfunction of the continuous mode problem on the grid.
pub fn project_eigenmode(gen: &ModeGenerator, mode: &Eigenmode) -> Result<ModeState, SimError> {
    if mode.k != gen.k {
        return Err(SimError::InvalidArgument(format!(
            "eigenmode of k = {} on a k = {} grid",
            mode.k, gen.k
        )));
    }
    let lay = gen.layout;
    let h = gen.h();
    let mut st = ModeState::zeros(gen);
    for i in 1..=gen.n {
        let x = if i == gen.n { 0.0 } else { -1.0 + i as f64 * h };
        let u = mode.u(x);
        st.x[lay.u(i)] = u;
        if i < gen.n {
            st.x[lay.v(i)] = mode.lambda * u;
        }
    }
    st.x[lay.interface()] = mode.v(0.0);
    for j in 1..gen.n {
        st.x[lay.w(j)] = mode.w(j as f64 * h);
    }
    Ok(st)
}
