use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;
use waveheat::kernel::ModeIndex;
use waveheat::spectrum::{
    asymptotics_report, disk_certified_from, seed_point, spectrum_branch, Branch, NewtonOptions, SpectrumOptions,
};

use crate::config::{self, IndexRange};
use crate::error::CliError;
use crate::output::{col, config_digest, json_bytes, num, RunOutput, Table, Timings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Branches {
    Both,
    Upper,
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    pub k: IndexRange,
    pub tol: f64,
    pub max_iter: usize,
    pub contour_points: usize,
    pub branches: Branches,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        let opts = SpectrumOptions::default();
        SpectrumConfig {
            k: IndexRange { start: 1, end: 50 },
            tol: opts.newton.tol,
            max_iter: opts.newton.max_iter,
            contour_points: opts.contour_points,
            branches: Branches::Both,
        }
    }
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Mode range, inclusive, e.g. 1..50.
    #[arg(long)]
    pub k: Option<IndexRange>,
    /// Newton tolerance on the characteristic function.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Quadrature points on each certificate contour.
    #[arg(long)]
    pub contour_points: Option<usize>,
    #[arg(long, value_enum)]
    pub branches: Option<Branches>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl SpectrumArgs {
    pub fn resolve(self) -> Result<SpectrumConfig, CliError> {
        let mut c: SpectrumConfig = config::load(self.config.as_deref())?;
        config::set(&mut c.k, self.k);
        config::set(&mut c.tol, self.tol);
        config::set(&mut c.max_iter, self.max_iter);
        config::set(&mut c.contour_points, self.contour_points);
        config::set(&mut c.branches, self.branches);
        c.validate()?;
        Ok(c)
    }
}

impl SpectrumConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        self.k.validate("k")?;
        config::positive("tol", self.tol)?;
        if self.max_iter == 0 {
            return Err(CliError::Usage("--max-iter must be at least 1".into()));
        }
        if self.contour_points < 16 {
            return Err(CliError::Usage("--contour-points must be at least 16".into()));
        }
        Ok(())
    }

    fn options(&self) -> SpectrumOptions {
        SpectrumOptions {
            newton: NewtonOptions {
                tol: self.tol,
                max_iter: self.max_iter,
            },
            contour_points: self.contour_points,
        }
    }
}

pub fn run(c: &SpectrumConfig, timings: &mut Timings) -> Result<RunOutput, CliError> {
    let k_min = ModeIndex::new(c.k.start).expect("validated");
    let k_max = ModeIndex::new(c.k.end).expect("validated");
    let branches: &[Branch] = match c.branches {
        Branches::Both => &[Branch::Upper, Branch::Lower],
        Branches::Upper => &[Branch::Upper],
        Branches::Lower => &[Branch::Lower],
    };
    let mut per_branch = Vec::new();
    for &b in branches {
        let eigs = spectrum_branch(k_min, k_max, b, c.options())?;
        if let Some(bad) = eigs.iter().find(|e| e.certificate.winding_count != 1) {
            return Err(CliError::Verification(format!(
                "certificate for k = {} ({:?}) counts {} roots",
                bad.eigenvalue.k, b, bad.certificate.winding_count
            )));
        }
        per_branch.push((b, eigs));
    }
    timings.stage("roots");

    let digest = config_digest(c);
    let mut table = Table::new(
        "spectrum",
        &digest,
        &[
            col("k", "1"),
            col("sign", "1"),
            col("re_lambda", "1/time"),
            col("im_lambda", "1/time"),
            col("residual", "1"),
            col("r_k", "1/time^4"),
            col("certificate_count", "1"),
        ],
    );
    let count = (c.k.end - c.k.start + 1) as usize;
    for i in 0..count {
        for (b, eigs) in &per_branch {
            let e = &eigs[i].eigenvalue;
            table.row(vec![
                e.k.to_string(),
                format!("{:+}", b.sign() as i32),
                num(e.lambda.re),
                num(e.lambda.im),
                num(e.residual),
                num(-e.lambda.re * e.lambda.im.abs().powi(3)),
                eigs[i].certificate.winding_count.to_string(),
            ]);
        }
    }

    let mut out = RunOutput::new();
    out.file("spectrum.csv", table.render());
    let mut reports = serde_json::Map::new();
    for (b, eigs) in &per_branch {
        let plain: Vec<_> = eigs.iter().map(|e| e.eigenvalue).collect();
        let rep = asymptotics_report(&plain)?;
        let localization = eigs
            .iter()
            .map(|e| {
                let kk = e.eigenvalue.k.get() as f64;
                (e.eigenvalue.lambda - seed_point(e.eigenvalue.k, *b)).norm() * kk.powi(3)
            })
            .fold(0.0, f64::max);
        let last = rep.rows.last().expect("non-empty range");
        reports.insert(
            format!("{b:?}").to_lowercase(),
            json!({
                "k0": disk_certified_from(eigs).map(|k| k.get()),
                "max_seed_distance_times_k3": localization,
                "r_min": rep.r_min,
                "r_max": rep.r_max,
                "band_ratio": rep.band_ratio(),
                "r_limit": rep.r_limit,
                "r_slope": rep.r_slope,
                "im_deviation_at_k_max": last.im_deviation,
                "rows": rep.rows,
            }),
        );
    }
    out.file("asymptotics.json", json_bytes(&reports));
    out.note("eigenvalues", count * per_branch.len());
    Ok(out)
}
