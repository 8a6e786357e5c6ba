#![allow(dead_code)]

use seirs_delay::model::{DelaySet, DimensionlessParams, IncidenceModel, State};

pub const BETA_EXTINCTION: f64 = 0.02146383;
pub const BETA_PERSISTENCE: f64 = 7.941616;

/// Reference dimensionless parameters with the given transmission rate.
pub fn table(beta: f64) -> DimensionlessParams {
    DimensionlessParams {
        birth_rate: 8.476678e-06,
        transmission: beta,
        death_rate: 8.476678e-06,
        vector_death_rate: 42.85714,
        disease_death_rate: 0.0001761252,
        recovery_rate: 0.08571429,
    }
}

pub fn table_delays() -> DelaySet {
    DelaySet::points(0.105, 0.175, 2.129167).unwrap()
}

pub fn holling() -> IncidenceModel {
    IncidenceModel::holling2(0.05).unwrap()
}

pub fn initial_fractions() -> State {
    State::new(10.0 / 23.0, 5.0 / 23.0, 6.0 / 23.0, 2.0 / 23.0)
}

/// A small parameter set far from the `B ≪ 1` regime, where every permanence
/// constraint can be met.
pub fn compact() -> (DimensionlessParams, DelaySet, IncidenceModel) {
    let p = DimensionlessParams {
        birth_rate: 1.0,
        transmission: 5.0,
        death_rate: 1.0,
        vector_death_rate: 2.0,
        disease_death_rate: 0.1,
        recovery_rate: 0.5,
    };
    (p, DelaySet::points(0.1, 0.1, 0.5).unwrap(), IncidenceModel::saturating(0.5).unwrap())
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}
