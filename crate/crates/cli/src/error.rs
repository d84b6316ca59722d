use std::process::ExitCode;

use thiserror::Error;
use waveheat::moderesolvent::ResolventError;
use waveheat::resolventscan::ScanError;
use waveheat::semigroupsim::SimError;
use waveheat::spectrum::SpectrumError;

/// Failure classes, each with a fixed exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// An iteration or solve failed to converge.
    #[error("{0}")]
    NonConvergence(String),
    /// A certificate or self-check did not hold.
    #[error("{0}")]
    Verification(String),
    #[error("{0}")]
    Usage(String),
    /// Valid configuration, but the data cannot support the request.
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    MissingInput(String),
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::NonConvergence(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Usage(_) => 64,
            CliError::Data(_) => 65,
            CliError::MissingInput(_) => 66,
            CliError::Output(_) => 74,
        })
    }
}

impl From<SpectrumError> for CliError {
    fn from(e: SpectrumError) -> Self {
        let msg = e.to_string();
        match e {
            SpectrumError::NonConvergence { .. } | SpectrumError::EscapedHalfPlane { .. } => {
                CliError::NonConvergence(msg)
            }
            SpectrumError::ZeroOnContour { .. }
            | SpectrumError::QuadratureInconclusive { .. }
            | SpectrumError::CertificateFailure { .. } => CliError::Verification(msg),
            SpectrumError::InvalidArgument(_) => CliError::Usage(msg),
        }
    }
}

impl From<ResolventError> for CliError {
    fn from(e: ResolventError) -> Self {
        let msg = e.to_string();
        match e {
            ResolventError::InvalidArgument(_) | ResolventError::ZeroFrequency => CliError::Usage(msg),
            ResolventError::Grid(_) | ResolventError::TraceCondition(_) => CliError::Data(msg),
            _ => CliError::NonConvergence(msg),
        }
    }
}

impl From<ScanError> for CliError {
    fn from(e: ScanError) -> Self {
        let msg = e.to_string();
        match e {
            ScanError::InsufficientSamples { .. } => CliError::Data(msg),
            ScanError::InvalidArgument(_) => CliError::Usage(msg),
            ScanError::TailNotDecayed { .. } => CliError::NonConvergence(msg),
            ScanError::Resolvent(e) => e.into(),
            ScanError::Spectrum(e) => e.into(),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        let msg = e.to_string();
        match e {
            SimError::InvalidArgument(_) => CliError::Usage(msg),
            SimError::InsufficientDecades { .. } => CliError::Data(msg),
            SimError::SolveFailure(_) => CliError::NonConvergence(msg),
            SimError::NotDissipative { .. } => CliError::Verification(msg),
            SimError::Resolvent(e) => e.into(),
            SimError::Spectrum(e) => e.into(),
        }
    }
}
