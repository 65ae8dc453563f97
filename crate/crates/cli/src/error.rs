use std::path::PathBuf;

use syzlab_core::chart_calculus::CalculusError;
use syzlab_core::duality::DualityError;
use syzlab_core::semiflat::SemiflatError;
use syzlab_lattice::cells::ComplexError;
use syzlab_lattice::k3::K3Error;
use syzlab_lattice::leray::TableError;
use syzlab_lattice::models::ModelError;
use syzlab_lattice::sheaf::SheafError;
use syzlab_lattice::snf::SnfError;
use syzlab_lattice::surd::SurdError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("scenario does not match the schema: {0}")]
    Schema(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    /// Process exit code: 2 for anything wrong with the input, 3 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Read { .. } | Self::Schema(_) | Self::Input(_) => 2,
            Self::Write { .. } | Self::Internal(_) => 3,
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Schema(e.to_string())
    }
}

impl From<CalculusError> for CliError {
    fn from(e: CalculusError) -> Self {
        match e {
            CalculusError::ZeroResolution | CalculusError::UnsupportedOrder(_) => Self::Internal(e.to_string()),
            _ => Self::Input(e.to_string()),
        }
    }
}

impl From<SemiflatError> for CliError {
    fn from(e: SemiflatError) -> Self {
        match e {
            SemiflatError::Calculus(c) => c.into(),
            other => Self::Input(other.to_string()),
        }
    }
}

impl From<DualityError> for CliError {
    fn from(e: DualityError) -> Self {
        match e {
            DualityError::Semiflat(s) => s.into(),
            DualityError::Calculus(c) => c.into(),
            other => Self::Input(other.to_string()),
        }
    }
}

impl From<SnfError> for CliError {
    fn from(e: SnfError) -> Self {
        match e {
            SnfError::Overflow => Self::Internal(e.to_string()),
            _ => Self::Input(e.to_string()),
        }
    }
}

impl From<SurdError> for CliError {
    fn from(e: SurdError) -> Self {
        Self::Internal(e.to_string())
    }
}

impl From<ComplexError> for CliError {
    fn from(e: ComplexError) -> Self {
        match e {
            ComplexError::Snf(s) => s.into(),
            other => Self::Input(other.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Complex(c) => c.into(),
            other => Self::Input(other.to_string()),
        }
    }
}

impl From<SheafError> for CliError {
    fn from(e: SheafError) -> Self {
        match e {
            SheafError::Snf(s) => s.into(),
            other => Self::Input(other.to_string()),
        }
    }
}

impl From<TableError> for CliError {
    fn from(e: TableError) -> Self {
        match e {
            TableError::Snf(s) => s.into(),
            TableError::Sheaf(s) => s.into(),
            other => Self::Input(other.to_string()),
        }
    }
}

impl From<K3Error> for CliError {
    fn from(e: K3Error) -> Self {
        match e {
            K3Error::Snf(s) => s.into(),
            K3Error::Surd(s) => s.into(),
            other => Self::Input(other.to_string()),
        }
    }
}
