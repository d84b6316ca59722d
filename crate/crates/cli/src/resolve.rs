use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use waveheat::grid::{GridFunction, Interval};
use waveheat::kernel::{p_of, ModeIndex, SpectralParameter};
use waveheat::moderesolvent::manufactured::random_cases;
use waveheat::moderesolvent::{perturb_off_degeneracy, residual_check, solve_mode, ModeRHS};

use crate::config;
use crate::error::CliError;
use crate::output::{col, config_digest, num, Column, RunOutput, Table, Timings};

/// Largest relative error the manufactured-solution self-test accepts.
pub const SELF_TEST_TOL: f64 = 1e-6;

/// Below this `|p|` the solve is close to the degenerate point `|s| = k pi`.
const NEAR_DEGENERATE_P: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResolveConfig {
    pub k: u64,
    pub s: f64,
    /// Interior nodes per interval; taken from the file when `rhs` is set.
    pub n: usize,
    /// CSV with columns `x,f_re,f_im,g_re,g_im,h_re,h_im`, one row per
    /// wave node; `h` is read at `x + 1`.
    pub rhs: Option<PathBuf>,
    pub self_test: bool,
    pub cases: usize,
    pub seed: u64,
    pub k_max: u64,
    pub s_max: f64,
}

impl Default for ResolveConfig {
    fn default() -> Self {
        ResolveConfig {
            k: 1,
            s: 1.0,
            n: 512,
            rhs: None,
            self_test: false,
            cases: 20,
            seed: 1,
            k_max: 30,
            s_max: 100.0,
        }
    }
}

#[derive(Debug, Args)]
pub struct ResolveArgs {
    #[arg(long)]
    pub k: Option<u64>,
    /// Frequency s of the spectral point i s.
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Data file; without it f = 0, g = 1, h = 1.
    #[arg(long)]
    pub rhs: Option<PathBuf>,
    /// Solve random manufactured problems and report the largest error.
    #[arg(long)]
    pub self_test: bool,
    #[arg(long)]
    pub cases: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub k_max: Option<u64>,
    #[arg(long)]
    pub s_max: Option<f64>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl ResolveArgs {
    pub fn resolve(self) -> Result<ResolveConfig, CliError> {
        let mut c: ResolveConfig = config::load(self.config.as_deref())?;
        config::set(&mut c.k, self.k);
        config::set(&mut c.s, self.s);
        config::set(&mut c.n, self.n);
        if self.rhs.is_some() {
            c.rhs = self.rhs;
        }
        c.self_test |= self.self_test;
        config::set(&mut c.cases, self.cases);
        config::set(&mut c.seed, self.seed);
        config::set(&mut c.k_max, self.k_max);
        config::set(&mut c.s_max, self.s_max);
        c.validate()?;
        Ok(c)
    }
}

impl ResolveConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.n < 32 {
            return Err(CliError::Usage("--n must be at least 32".into()));
        }
        if self.self_test {
            if self.cases == 0 || self.k_max == 0 {
                return Err(CliError::Usage("--cases and --k-max must be at least 1".into()));
            }
            config::positive("s-max", self.s_max)?;
            if self.s_max <= 0.5 {
                return Err(CliError::Usage("--s-max must exceed 0.5".into()));
            }
            return Ok(());
        }
        if self.k == 0 {
            return Err(CliError::Usage("--k: modes start at 1".into()));
        }
        if !self.s.is_finite() || self.s == 0.0 {
            return Err(CliError::Usage(format!("--s must be finite and nonzero, got {}", self.s)));
        }
        if let Some(p) = &self.rhs {
            if !p.is_file() {
                return Err(CliError::MissingInput(format!("rhs file {} not found", p.display())));
            }
        }
        Ok(())
    }
}

const COLUMNS: [Column; 9] = [
    col("k", "1"),
    col("s", "1/time"),
    col("norm_in", "energy^(1/2)"),
    col("ku_norm", "energy^(1/2)"),
    col("su_norm", "energy^(1/2)"),
    col("du_norm", "energy^(1/2)"),
    col("w_norm", "energy^(1/2)"),
    col("residual_interior", "1"),
    col("residual_coupling", "1"),
];

fn parse_rhs(path: &Path, k: ModeIndex) -> Result<ModeRHS, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::MissingInput(format!("cannot read {}: {e}", path.display())))?;
    let bad = |line: usize, msg: String| CliError::Data(format!("{}:{line}: {msg}", path.display()));
    let mut rows: Vec<[f64; 7]> = Vec::new();
    let mut header_seen = false;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            header_seen = true;
            let names: Vec<&str> = line.split(',').map(str::trim).collect();
            if names != ["x", "f_re", "f_im", "g_re", "g_im", "h_re", "h_im"] {
                return Err(bad(i + 1, "expected header x,f_re,f_im,g_re,g_im,h_re,h_im".into()));
            }
            continue;
        }
        let cells: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| bad(i + 1, e.to_string()))?;
        let row: [f64; 7] = cells
            .try_into()
            .map_err(|c: Vec<f64>| bad(i + 1, format!("expected 7 columns, got {}", c.len())))?;
        rows.push(row);
    }
    if rows.len() < 34 {
        return Err(CliError::Data(format!(
            "{}: need at least 34 nodes, got {}",
            path.display(),
            rows.len()
        )));
    }
    let n = rows.len() - 2;
    let h = 1.0 / (n + 1) as f64;
    for (j, r) in rows.iter().enumerate() {
        if (r[0] - (-1.0 + j as f64 * h)).abs() > 1e-9 {
            return Err(CliError::Data(format!(
                "{}: node {j} at x = {} is off the uniform grid on [-1, 0]",
                path.display(),
                r[0]
            )));
        }
    }
    let pick = |a: usize| rows.iter().map(|r| Complex64::new(r[a], r[a + 1])).collect::<Vec<_>>();
    let f = GridFunction::new(Interval::Wave, n, pick(1)).map_err(|e| CliError::Data(e.to_string()))?;
    let g = GridFunction::new(Interval::Wave, n, pick(3)).map_err(|e| CliError::Data(e.to_string()))?;
    let hh = GridFunction::new(Interval::Heat, n, pick(5)).map_err(|e| CliError::Data(e.to_string()))?;
    Ok(ModeRHS::new(k, f, g, hh)?)
}

fn diagnostics(k: ModeIndex, s: f64, rhs: &ModeRHS) -> Result<(Vec<String>, f64), CliError> {
    let sol = solve_mode(k, s, rhs)?;
    let nrm = sol.norms();
    let rep = residual_check(k, s, rhs, &sol)?;
    let row = vec![
        k.to_string(),
        num(s),
        num(rhs.norm()),
        num(nrm.ku),
        num(nrm.su),
        num(nrm.du),
        num(nrm.w),
        num(rep.interior() / rep.scale),
        num(rep.coupling() / rep.scale),
    ];
    Ok((row, nrm.mode))
}

pub fn run(c: &ResolveConfig, timings: &mut Timings) -> Result<RunOutput, CliError> {
    let digest = config_digest(c);
    let mut out = RunOutput::new();
    if c.self_test {
        let mut cols = COLUMNS.to_vec();
        cols.push(col("relative_error", "1"));
        let mut table = Table::new("resolve self-test", &digest, &cols);
        let mut worst: f64 = 0.0;
        for mms in random_cases(c.seed, c.cases, c.k_max, c.s_max)? {
            let rhs = mms.rhs(c.n)?;
            let (mut row, _) = diagnostics(mms.k, mms.s, &rhs)?;
            let err = mms.relative_error(c.n)?;
            worst = worst.max(err);
            row.push(num(err));
            table.row(row);
        }
        timings.stage("solve");
        println!("max relative error {worst:e} over {} cases", c.cases);
        out.file("selftest.csv", table.render());
        out.note("max_relative_error", worst);
        out.note("tolerance", SELF_TEST_TOL);
        if !(worst <= SELF_TEST_TOL) {
            return Err(CliError::Verification(format!(
                "self-test error {worst:e} exceeds {SELF_TEST_TOL:e}"
            )));
        }
        return Ok(out);
    }

    let k = ModeIndex::new(c.k).expect("validated");
    let rhs = match &c.rhs {
        Some(p) => parse_rhs(p, k)?,
        None => ModeRHS::from_fns(
            k,
            c.n,
            |_| Complex64::new(0.0, 0.0),
            |_| Complex64::new(1.0, 0.0),
            |_| Complex64::new(1.0, 0.0),
        )?,
    };
    let p = p_of(k, SpectralParameter::on_axis(c.s)).norm();
    let s_used = perturb_off_degeneracy(k, c.s);
    if s_used != c.s {
        out.warn(format!("s = {} is degenerate for k = {k}; solved at s = {s_used}", c.s));
    } else if p < NEAR_DEGENERATE_P {
        out.warn(format!(
            "s = {} is near the degenerate point {k} pi (|p| = {p:.3e}); solved at s = {s_used}",
            c.s
        ));
    }
    let (row, _) = diagnostics(k, s_used, &rhs)?;
    timings.stage("solve");
    let mut table = Table::new("resolve", &digest, &COLUMNS);
    table.row(row);
    out.file("resolve.csv", table.render());
    out.note("s_requested", c.s);
    out.note("s_used", s_used);
    out.note("perturbed", s_used != c.s);
    out.note("p_abs", p);
    out.note("n", rhs.n());
    Ok(out)
}
