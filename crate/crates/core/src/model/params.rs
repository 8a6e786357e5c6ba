use super::{require_positive, DelaySet, ModelError};

/// Rates of the original (dimensional) vector–host model. Time unit: days.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionalParams {
    /// Human birth rate (humans per day).
    pub birth_rate: f64,
    /// Effective contacts per vector per day.
    pub contact_rate: f64,
    /// Human natural death rate.
    pub death_rate: f64,
    pub disease_death_rate: f64,
    pub recovery_rate: f64,
    /// Vector birth and death rate (equal, the vector population is constant).
    pub vector_turnover: f64,
    /// Human → vector transmission rate per human per day.
    pub vector_infection_rate: f64,
    /// Total vector count.
    pub vector_count: f64,
    /// Delays in days.
    pub delays: DelaySet,
}

impl DimensionalParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        require_positive("birth_rate", self.birth_rate)?;
        require_positive("contact_rate", self.contact_rate)?;
        require_positive("death_rate", self.death_rate)?;
        require_positive("disease_death_rate", self.disease_death_rate)?;
        require_positive("recovery_rate", self.recovery_rate)?;
        require_positive("vector_turnover", self.vector_turnover)?;
        require_positive("vector_infection_rate", self.vector_infection_rate)?;
        if !(self.vector_count.is_finite() && self.vector_count >= 1.0) {
            return Err(ModelError::InvalidParameter {
                field: "vector_count",
                requirement: "at least 1",
                value: self.vector_count,
            });
        }
        if self.vector_turnover <= self.death_rate {
            return Err(ModelError::InvalidParameter {
                field: "vector_turnover",
                requirement: "greater than the human death rate (vectors are short-lived)",
                value: self.vector_turnover,
            });
        }
        Ok(())
    }

    /// Disease-free human population size `B̂/μ̂`.
    pub fn carrying_size(&self) -> f64 {
        self.birth_rate / self.death_rate
    }

    /// Slow time scale factor `(B̂/μ̂)·Λ` mapping days to dimensionless time.
    pub fn time_scale(&self) -> f64 {
        self.carrying_size() * self.vector_infection_rate
    }
}

/// Rates of the dimensionless slow-timescale system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessParams {
    pub birth_rate: f64,
    /// Transmission rate (β).
    pub transmission: f64,
    /// Human natural death rate (μ).
    pub death_rate: f64,
    /// Vector death rate (μ_v).
    pub vector_death_rate: f64,
    /// Disease-induced death rate (d).
    pub disease_death_rate: f64,
    /// Recovery rate (α).
    pub recovery_rate: f64,
}

impl DimensionlessParams {
    /// Relative tolerance on `B/μ = 1` for parameters obtained from
    /// [`nondimensionalize`].
    pub const UNIT_RATIO_TOL: f64 = 1e-9;

    pub fn validate(&self) -> Result<(), ModelError> {
        require_positive("birth_rate", self.birth_rate)?;
        require_positive("death_rate", self.death_rate)?;
        require_positive("vector_death_rate", self.vector_death_rate)?;
        require_positive("disease_death_rate", self.disease_death_rate)?;
        // β = 0 (no transmission) and α = 0 (no recovery) are admissible limits.
        for (field, value) in [("transmission", self.transmission), ("recovery_rate", self.recovery_rate)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(ModelError::InvalidParameter {
                    field,
                    requirement: "finite and non-negative",
                    value,
                });
            }
        }
        Ok(())
    }

    /// `μ + d + α`, the total exit rate from the infectious class.
    pub fn removal_rate(&self) -> f64 {
        self.death_rate + self.disease_death_rate + self.recovery_rate
    }

    /// Disease-free susceptible level `B/μ`.
    pub fn dfe_susceptible(&self) -> f64 {
        self.birth_rate / self.death_rate
    }

    /// Whether `B/μ = 1` holds, as it does for any nondimensionalized set.
    /// Hand-built parameter sets may violate it.
    pub fn has_unit_ratio(&self) -> bool {
        (self.dfe_susceptible() - 1.0).abs() <= Self::UNIT_RATIO_TOL
    }

    pub fn with_transmission(self, transmission: f64) -> Self {
        Self { transmission, ..self }
    }
}

/// Result of [`nondimensionalize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Nondimensionalized {
    pub params: DimensionlessParams,
    /// Delays on the dimensionless time axis.
    pub delays: DelaySet,
    /// Factor `(B̂/μ̂)·Λ` applied to time.
    pub time_scale: f64,
}

/// Maps dimensional rates onto the slow timescale `η = (B̂/μ̂)·Λ·t`.
pub fn nondimensionalize(p: &DimensionalParams) -> Result<Nondimensionalized, ModelError> {
    p.validate()?;
    let size = p.carrying_size();
    let scale = p.time_scale();
    let params = DimensionlessParams {
        birth_rate: p.birth_rate / (size * size * p.vector_infection_rate),
        transmission: p.contact_rate * p.vector_count / p.vector_turnover,
        death_rate: p.death_rate / scale,
        vector_death_rate: p.vector_turnover / scale,
        disease_death_rate: p.disease_death_rate / scale,
        recovery_rate: p.recovery_rate / scale,
    };
    Ok(Nondimensionalized {
        params,
        delays: p.delays.rescale(scale)?,
        time_scale: scale,
    })
}
