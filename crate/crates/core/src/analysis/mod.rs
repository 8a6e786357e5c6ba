//! Threshold and equilibrium analysis of the dimensionless system.

mod equilibrium;
mod permanence;
mod report;

pub use equilibrium::{
    endemic_equilibrium, equilibrium_residuals, existence_condition, DelayMoments, EndemicEquilibrium,
    EquilibriumFunction,
};
pub use permanence::{
    fraction_bound, infectious_floor, permanence_bounds, susceptible_envelope, susceptible_floor,
    PermanenceBounds,
};
pub use report::{analyze, AnalysisReport};

use std::fmt;

use thiserror::Error;

use crate::model::{delay_expectation, DelaySpec, DimensionlessParams, ModelError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("root finder did not converge after {iterations} iterations (|H| = {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("fraction q = {q} must lie in (0, {q_bar}) and below 1")]
    FractionOutOfRange { q: f64, q_bar: f64 },
    #[error("fraction bound q̄ = {q_bar} is not positive, no admissible q exists")]
    NoAdmissibleFraction { q_bar: f64 },
    #[error("scaling constant rho must be positive, got {0}")]
    InvalidRho(f64),
    #[error(
        "susceptible envelope {s_triangle} does not exceed S* = {s_star} \
         (rho = {rho}); choose a larger rho or a smaller q"
    )]
    EnvelopeTooLow { s_triangle: f64, s_star: f64, rho: f64 },
}

/// Basic reproduction number for constant delays: `β / (μ + d + α)`.
pub fn brn_constant_delays(p: &DimensionlessParams) -> f64 {
    p.transmission / p.removal_rate()
}

/// Proportionality value for the reproduction number with random delays:
/// `β / (μ + d + α) + α / (μ + d + α)`. The exact number is only known up to
/// a constant factor, so this is not a threshold by itself.
pub fn brn_random_delays(p: &DimensionlessParams) -> f64 {
    (p.transmission + p.recovery_rate) / p.removal_rate()
}

/// Expected survival probability of the parasite over its full cycle,
/// `E[exp(−μ_v·T1 − μ·T2)]`, assuming independent delays.
pub fn espr(p: &DimensionlessParams, vector: &DelaySpec, host: &DelaySpec) -> Result<f64, ModelError> {
    let in_vector = delay_expectation(vector, |s| (-p.vector_death_rate * s).exp())?;
    let in_host = delay_expectation(host, |u| (-p.death_rate * u).exp())?;
    Ok(in_vector * in_host)
}

/// Long-run classification derived from the threshold quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `R0* < 1`.
    ExtinctionByR0,
    /// `R0* ≥ 1` but the parasite survival expectation is below `1/R0*`.
    ExtinctionBySurvival,
    /// Neither extinction condition holds.
    EndemicCandidate,
    /// Inputs outside the domain of the criteria.
    Indeterminate,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::ExtinctionByR0 => "ExtinctionByR0",
            Regime::ExtinctionBySurvival => "ExtinctionBySurvival",
            Regime::EndemicCandidate => "EndemicCandidate",
            Regime::Indeterminate => "Indeterminate",
        }
    }

    pub fn is_extinction(self) -> bool {
        matches!(self, Regime::ExtinctionByR0 | Regime::ExtinctionBySurvival)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Extinction regime and the exponential decay rate `λ` of `I(t)`.
pub fn extinction_check(p: &DimensionlessParams, espr: f64) -> (Regime, Option<f64>) {
    if !(espr > 0.0 && espr <= 1.0) {
        return (Regime::Indeterminate, None);
    }
    let r0 = brn_constant_delays(p);
    if !r0.is_finite() {
        return (Regime::Indeterminate, None);
    }
    if r0 < 1.0 {
        let lambda = (1.0 - r0) * p.removal_rate();
        return (Regime::ExtinctionByR0, Some(lambda));
    }
    if espr < 1.0 / r0 {
        let lambda = p.transmission * p.dfe_susceptible() * (1.0 / r0 - espr);
        return (Regime::ExtinctionBySurvival, Some(lambda));
    }
    (Regime::EndemicCandidate, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> DimensionlessParams {
        DimensionlessParams {
            birth_rate: 8.476678e-06,
            transmission: 0.02146383,
            death_rate: 8.476678e-06,
            vector_death_rate: 42.85714,
            disease_death_rate: 0.0001761252,
            recovery_rate: 0.08571429,
        }
    }

    #[test]
    fn threshold_boundary_is_one() {
        let p = table();
        let p = p.with_transmission(p.removal_rate());
        assert_eq!(brn_constant_delays(&p), 1.0);
    }

    #[test]
    fn random_delay_value_limits() {
        let mut p = table();
        p.recovery_rate = 0.0;
        assert_eq!(brn_random_delays(&p), brn_constant_delays(&p));
        p.transmission = 0.0;
        assert_eq!(brn_random_delays(&p), 0.0);
    }

    #[test]
    fn homogeneous_in_transmission() {
        let p = table();
        for c in [0.5, 2.0, 17.0] {
            let scaled = p.with_transmission(p.transmission * c);
            let ratio = brn_constant_delays(&scaled) / brn_constant_delays(&p);
            assert!((ratio - c).abs() < 1e-14 * c);
        }
    }

    #[test]
    fn zero_delays_survive_surely() {
        let p = table();
        let v = espr(&p, &DelaySpec::PointMass(0.0), &DelaySpec::PointMass(0.0)).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn boundary_r0_uses_survival_branch() {
        let p = table();
        let p = p.with_transmission(p.removal_rate());
        let (regime, lambda) = extinction_check(&p, 0.3);
        assert_eq!(regime, Regime::ExtinctionBySurvival);
        let expected = p.transmission * p.dfe_susceptible() * (1.0 - 0.3);
        assert!((lambda.unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn lambda_vanishes_continuously_at_threshold() {
        let p = table();
        let p = p.with_transmission(p.removal_rate() * (1.0 - 1e-12));
        let (regime, lambda) = extinction_check(&p, 0.5);
        assert_eq!(regime, Regime::ExtinctionByR0);
        assert!(lambda.unwrap() > 0.0 && lambda.unwrap() < 1e-9);
    }

    #[test]
    fn out_of_range_survival_is_indeterminate() {
        assert_eq!(extinction_check(&table(), 0.0), (Regime::Indeterminate, None));
        assert_eq!(extinction_check(&table(), 1.5), (Regime::Indeterminate, None));
    }
}
