//! Domain types: parameters, delays, incidence functions and the state vector.

mod delay;
mod incidence;
mod params;
mod state;

pub use delay::{delay_expectation, DelayDensity, DelaySet, DelaySpec, DensityShape, QuadratureNode};
pub use delay::{DEFAULT_NODES, TRUNCATION_MASS};
pub use incidence::{
    standard_grid, validate_fn, validate_incidence, Axiom, AxiomCheck, AxiomReport, AxiomStatus,
    IncidenceModel,
};
pub use params::{nondimensionalize, DimensionalParams, DimensionlessParams, Nondimensionalized};
pub use state::{Compartment, State};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("parameter `{field}` must be {requirement}, got {value}")]
    InvalidParameter {
        field: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("invalid delay specification: {0}")]
    InvalidDelay(String),
    #[error("delay weight is not finite at node s = {node} (value {value})")]
    NonFiniteWeight { node: f64, value: f64 },
    #[error("invalid incidence model: {0}")]
    InvalidIncidence(String),
    #[error("invalid sample grid: {0}")]
    InvalidGrid(String),
}

pub(crate) fn require_positive(field: &'static str, value: f64) -> Result<(), ModelError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter {
            field,
            requirement: "finite and strictly positive",
            value,
        })
    }
}
