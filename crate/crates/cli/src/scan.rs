use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::json;
use waveheat::kernel::ModeIndex;
use waveheat::resolventscan::{
    cubic_bound_constant, fit_exponent, midpoints, peak_scan, sweep, ResolventSample, ScanOptions,
};

use crate::config::{self, IndexRange, RealRange};
use crate::error::CliError;
use crate::output::{col, config_digest, json_bytes, num, RunOutput, Table, Timings};

/// Largest number of sweep points accepted from `--s` and `--step`.
const MAX_SWEEP_POINTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    /// Refined peaks near `Im lambda_k`.
    pub peaks: Option<IndexRange>,
    /// `s = (k + 1/2) pi`.
    pub midpoints: Option<IndexRange>,
    /// Uniform sweep `s in start..end` in steps of `step`.
    pub s: Option<RealRange>,
    pub step: Option<f64>,
    /// `|s|` window of the growth fit.
    pub window: Option<RealRange>,
    /// Fit every sample rather than the peaks only.
    pub fit_all: bool,
    pub rho: f64,
    pub m: usize,
    pub n: usize,
    pub golden_iterations: usize,
    pub peak_half_width: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        let o = ScanOptions::default();
        ScanConfig {
            peaks: None,
            midpoints: None,
            s: None,
            step: None,
            window: None,
            fit_all: false,
            rho: o.rho,
            m: o.m,
            n: o.n,
            golden_iterations: o.golden_iterations,
            peak_half_width: o.peak_half_width,
        }
    }
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Refine the resolvent peak of each mode in the range, e.g. 5..50.
    #[arg(long)]
    pub peaks: Option<IndexRange>,
    /// Evaluate at the midpoints (k + 1/2) pi for each mode in the range.
    #[arg(long)]
    pub midpoints: Option<IndexRange>,
    /// Uniform sweep over s, e.g. 0.5..3; needs --step.
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<RealRange>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Fit window in |s|, e.g. 10..200. Defaults to every fitted sample.
    #[arg(long)]
    pub window: Option<RealRange>,
    /// Fit all samples instead of the refined peaks only.
    #[arg(long)]
    pub fit_all: bool,
    /// Truncation safety factor.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Basis functions per input component.
    #[arg(long)]
    pub m: Option<usize>,
    /// Interior grid nodes per interval.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub golden_iterations: Option<usize>,
    #[arg(long)]
    pub peak_half_width: Option<f64>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl ScanArgs {
    pub fn resolve(self) -> Result<ScanConfig, CliError> {
        let mut c: ScanConfig = config::load(self.config.as_deref())?;
        if self.peaks.is_some() {
            c.peaks = self.peaks;
        }
        if self.midpoints.is_some() {
            c.midpoints = self.midpoints;
        }
        if self.s.is_some() {
            c.s = self.s;
        }
        if self.step.is_some() {
            c.step = self.step;
        }
        if self.window.is_some() {
            c.window = self.window;
        }
        c.fit_all |= self.fit_all;
        config::set(&mut c.rho, self.rho);
        config::set(&mut c.m, self.m);
        config::set(&mut c.n, self.n);
        config::set(&mut c.golden_iterations, self.golden_iterations);
        config::set(&mut c.peak_half_width, self.peak_half_width);
        c.validate()?;
        Ok(c)
    }
}

impl ScanConfig {
    fn options(&self) -> ScanOptions {
        ScanOptions {
            rho: self.rho,
            m: self.m,
            n: self.n,
            golden_iterations: self.golden_iterations,
            peak_half_width: self.peak_half_width,
        }
    }

    fn sweep_points(&self) -> Vec<f64> {
        let (Some(r), Some(h)) = (self.s, self.step) else {
            return Vec::new();
        };
        let count = ((r.end - r.start) / h + 1e-9).floor() as usize + 1;
        (0..count).map(|i| r.start + i as f64 * h).filter(|&s| s != 0.0).collect()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.peaks.is_none() && self.midpoints.is_none() && self.s.is_none() {
            return Err(CliError::Usage("nothing to scan: give --peaks, --midpoints or --s".into()));
        }
        if let Some(r) = self.peaks {
            r.validate("peaks")?;
        }
        if let Some(r) = self.midpoints {
            r.validate("midpoints")?;
        }
        match (self.s, self.step) {
            (Some(r), Some(h)) => {
                r.validate("s")?;
                config::positive("step", h)?;
                if (r.end - r.start) / h > MAX_SWEEP_POINTS as f64 {
                    return Err(CliError::Usage(format!("sweep exceeds {MAX_SWEEP_POINTS} points")));
                }
            }
            (Some(_), None) => return Err(CliError::Usage("--s needs --step".into())),
            (None, Some(_)) => return Err(CliError::Usage("--step needs --s".into())),
            (None, None) => {}
        }
        if let Some(w) = self.window {
            w.validate("window")?;
        }
        self.options().validate()?;
        Ok(())
    }
}

fn mode(k: u64) -> ModeIndex {
    ModeIndex::new(k).expect("validated")
}

pub fn run(c: &ScanConfig, timings: &mut Timings) -> Result<RunOutput, CliError> {
    let opts = c.options();
    let mut samples: Vec<(&'static str, ResolventSample)> = Vec::new();
    if let Some(r) = c.peaks {
        samples.extend(peak_scan(mode(r.start), mode(r.end), &opts)?.into_iter().map(|x| ("peak", x)));
        timings.stage("peaks");
    }
    if let Some(r) = c.midpoints {
        let pts = midpoints(mode(r.start), mode(r.end));
        samples.extend(sweep(&pts, &opts)?.into_iter().map(|x| ("midpoint", x)));
        timings.stage("midpoints");
    }
    let pts = c.sweep_points();
    if !pts.is_empty() {
        samples.extend(sweep(&pts, &opts)?.into_iter().map(|x| ("sweep", x)));
        timings.stage("sweep");
    }

    let fitted: Vec<ResolventSample> = samples
        .iter()
        .filter(|(kind, _)| c.fit_all || *kind == "peak")
        .map(|(_, x)| x.clone())
        .collect();
    let fit = if fitted.is_empty() {
        None
    } else {
        let window = match c.window {
            Some(w) => (w.start, w.end),
            None => {
                let abs = fitted.iter().map(|x| x.s.abs());
                (abs.clone().fold(f64::INFINITY, f64::min), abs.fold(0.0, f64::max))
            }
        };
        Some(fit_exponent(&fitted, window)?)
    };
    let all: Vec<ResolventSample> = samples.iter().map(|(_, x)| x.clone()).collect();
    let bound = cubic_bound_constant(&all);

    let digest = config_digest(c);
    let mut table = Table::new(
        "scan",
        &digest,
        &[
            col("s", "1/time"),
            col("norm", "1"),
            col("argmax_k", "1"),
            col("k_cutoff", "1"),
            col("refinement_error", "1"),
            col("tail_ratio", "1"),
            col("kind", "-"),
        ],
    );
    for (kind, x) in &samples {
        table.row(vec![
            num(x.s),
            num(x.norm_estimate),
            x.argmax_k.to_string(),
            x.k_cutoff.to_string(),
            num(x.refinement_error),
            num(x.tail_ratio),
            kind.to_string(),
        ]);
    }
    let mut out = RunOutput::new();
    out.file("scan.csv", table.render());
    if let Some(f) = &fit {
        out.file(
            "fit.json",
            json_bytes(&json!({
                "slope": f.slope,
                "intercept": f.intercept,
                "residual_rms": f.residual_rms,
                "window": [f.window.0, f.window.1],
                "n_samples": f.samples.len(),
                "cubic_bound_constant": bound,
            })),
        );
    }
    out.note("samples", samples.len());
    out.note("cubic_bound_constant", bound);
    Ok(out)
}
