use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::config::ConfigError;
use crate::model::ModelError;
use crate::simulator::SimulationError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Any failure surfaced by the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Simulation(#[from] SimulationError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}
