use std::path::PathBuf;

use ruelle_core::euler::EulerError;
use ruelle_core::forms::FormError;
use ruelle_core::lie::LieError;
use ruelle_core::multiplicity::MultiplicityError;
use ruelle_core::spectrum::SpectrumError;
use ruelle_core::zeta::ZetaError;
use thiserror::Error;

/// Exit codes: 0 success, 2 usage, then one code per error family.
pub mod codes {
    pub const USAGE: u8 = 2;
    pub const LIE: u8 = 10;
    pub const FORMS: u8 = 11;
    pub const MULTIPLICITY: u8 = 12;
    pub const EULER: u8 = 13;
    pub const SPECTRUM: u8 = 14;
    pub const ZETA: u8 = 15;
    pub const IO: u8 = 16;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Forms(#[from] FormError),
    #[error(transparent)]
    Multiplicity(#[from] MultiplicityError),
    #[error(transparent)]
    Euler(#[from] EulerError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config {path}: {reason}")]
    Config { path: PathBuf, reason: String },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => codes::USAGE,
            CliError::Lie(_) => codes::LIE,
            CliError::Forms(_) => codes::FORMS,
            CliError::Multiplicity(e) => match e {
                MultiplicityError::Lie(_) => codes::LIE,
                MultiplicityError::Forms(_) => codes::FORMS,
                _ => codes::MULTIPLICITY,
            },
            CliError::Euler(_) => codes::EULER,
            CliError::Spectrum(_) => codes::SPECTRUM,
            CliError::Zeta(ZetaError::Spectrum(_)) => codes::SPECTRUM,
            CliError::Zeta(_) => codes::ZETA,
            CliError::Io { .. } | CliError::Config { .. } => codes::IO,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
