use crate::model::{DelaySet, DimensionlessParams, IncidenceModel};

use super::{AnalysisError, DelayMoments, EndemicEquilibrium};

/// Margin by which the default `rho` must lift the envelope above `S*`.
const ENVELOPE_MARGIN: f64 = 1e-6;
const MAX_RHO_EXPONENT: i32 = 64;

/// Asymptotic floors of the permanence lemma for one choice of `(q, rho)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PermanenceBounds {
    pub v1: f64,
    pub v2: f64,
    pub q_bar: f64,
    pub q: f64,
    pub rho: f64,
    pub s_triangle: f64,
    /// Total cycle delay `h1 + h2`.
    pub h: f64,
}

/// `v1 = B / (μ + β·G(B/μ))`.
pub fn susceptible_floor(p: &DimensionlessParams, g: &IncidenceModel) -> f64 {
    p.birth_rate / (p.death_rate + p.transmission * g.value(p.dfe_susceptible()))
}

/// `v2 = q·I*·exp(−(μ+d+α)(ρ+1)h)`.
pub fn infectious_floor(p: &DimensionlessParams, i_star: f64, q: f64, rho: f64, h: f64) -> f64 {
    q * i_star * (-p.removal_rate() * (rho + 1.0) * h).exp()
}

/// Upper bound `q̄` for the fraction of `I*` used by the lemma.
pub fn fraction_bound(p: &DimensionlessParams, g: &IncidenceModel, m: &DelayMoments, i_star: f64) -> f64 {
    let waning = p.recovery_rate * m.immunity * i_star;
    let num = p.birth_rate * p.transmission * m.vector_host_rate * g.value(i_star) - p.death_rate * waning;
    num / ((p.birth_rate + waning) * p.transmission * i_star)
}

/// `S△ = (B/k)(1 − exp(−k·ρ·h))` with `k = μ + β·G(q·I*)`.
pub fn susceptible_envelope(
    p: &DimensionlessParams,
    g: &IncidenceModel,
    i_star: f64,
    q: f64,
    rho: f64,
    h: f64,
) -> f64 {
    let k = p.death_rate + p.transmission * g.value(q * i_star);
    p.birth_rate / k * (1.0 - (-k * rho * h).exp())
}

/// Permanence floors around `equilibrium`.
///
/// `q` defaults to `q̄/2`; `rho` defaults to the smallest power of two
/// (at least 1) for which the envelope clears `S*`.
pub fn permanence_bounds(
    p: &DimensionlessParams,
    g: &IncidenceModel,
    delays: &DelaySet,
    equilibrium: &EndemicEquilibrium,
    q: Option<f64>,
    rho: Option<f64>,
) -> Result<PermanenceBounds, AnalysisError> {
    let m = DelayMoments::compute(p, delays)?;
    let i_star = equilibrium.state.i;
    let s_star = equilibrium.state.s;
    let h = delays.cycle_horizon();

    let q_bar = fraction_bound(p, g, &m, i_star);
    if !(q_bar > 0.0) {
        return Err(AnalysisError::NoAdmissibleFraction { q_bar });
    }
    let q = q.unwrap_or(0.5 * q_bar.min(1.0));
    if !(q > 0.0 && q < q_bar && q < 1.0) {
        return Err(AnalysisError::FractionOutOfRange { q, q_bar });
    }

    let envelope = |rho: f64| susceptible_envelope(p, g, i_star, q, rho, h);
    let (rho, s_triangle) = match rho {
        Some(rho) => {
            if !(rho.is_finite() && rho > 0.0) {
                return Err(AnalysisError::InvalidRho(rho));
            }
            let s_triangle = envelope(rho);
            if !(s_triangle > s_star) {
                return Err(AnalysisError::EnvelopeTooLow { s_triangle, s_star, rho });
            }
            (rho, s_triangle)
        }
        None => {
            let target = s_star * (1.0 + ENVELOPE_MARGIN);
            let mut found = None;
            for j in 0..=MAX_RHO_EXPONENT {
                let rho = 2f64.powi(j);
                let s_triangle = envelope(rho);
                if s_triangle > target {
                    found = Some((rho, s_triangle));
                    break;
                }
            }
            match found {
                Some(pair) => pair,
                None => {
                    let rho = 2f64.powi(MAX_RHO_EXPONENT);
                    return Err(AnalysisError::EnvelopeTooLow { s_triangle: envelope(rho), s_star, rho });
                }
            }
        }
    };

    Ok(PermanenceBounds {
        v1: susceptible_floor(p, g),
        v2: infectious_floor(p, i_star, q, rho, h),
        q_bar,
        q,
        rho,
        s_triangle,
        h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn v1_without_transmission_is_dfe() {
        let p = DimensionlessParams {
            birth_rate: 2.0,
            transmission: 0.0,
            death_rate: 2.0,
            vector_death_rate: 5.0,
            disease_death_rate: 0.1,
            recovery_rate: 0.3,
        };
        let g = IncidenceModel::holling2(0.5).unwrap();
        assert_eq!(susceptible_floor(&p, &g), 1.0);
    }

    #[test]
    fn v2_is_monotone() {
        let p = DimensionlessParams {
            birth_rate: 1.0,
            transmission: 3.0,
            death_rate: 1.0,
            vector_death_rate: 2.0,
            disease_death_rate: 0.1,
            recovery_rate: 0.5,
        };
        let base = infectious_floor(&p, 0.2, 0.3, 2.0, 0.5);
        assert!(infectious_floor(&p, 0.2, 0.31, 2.0, 0.5) > base);
        assert!(infectious_floor(&p, 0.2, 0.3, 2.5, 0.5) < base);
        assert!(infectious_floor(&p, 0.2, 0.3, 2.0, 0.6) < base);
    }
}
