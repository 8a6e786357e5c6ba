use crate::model::{delay_expectation, DelaySet, DimensionlessParams, IncidenceModel, State};

use super::AnalysisError;

/// Lower end of the root bracket for `H`.
const BRACKET_LO: f64 = 1e-14;
/// Bisection stops once the bracket is this narrow.
const BRACKET_WIDTH: f64 = 1e-14;
const MAX_BISECTIONS: usize = 400;
const NEWTON_STEPS: usize = 5;

/// Survival expectations over the three delays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayMoments {
    /// `E[exp(−μ_v·T1)]`.
    pub vector: f64,
    /// `E[exp(−μ·T2)]`.
    pub host: f64,
    /// `E[exp(−μ·T3)]`.
    pub immunity: f64,
    /// `E[exp(−μ·T1)]`, used by the permanence bound.
    pub vector_host_rate: f64,
    /// `E[exp(−μ_v·T1 − μ·T2)]`.
    pub espr: f64,
}

impl DelayMoments {
    pub fn compute(p: &DimensionlessParams, delays: &DelaySet) -> Result<Self, AnalysisError> {
        let vector = delay_expectation(&delays.vector, |s| (-p.vector_death_rate * s).exp())?;
        let host = delay_expectation(&delays.host, |u| (-p.death_rate * u).exp())?;
        let immunity = delay_expectation(&delays.immunity, |r| (-p.death_rate * r).exp())?;
        let vector_host_rate = delay_expectation(&delays.vector, |s| (-p.death_rate * s).exp())?;
        Ok(Self { vector, host, immunity, vector_host_rate, espr: vector * host })
    }
}

/// The scalar function `H(I)` whose positive root is the infectious
/// component of the endemic equilibrium.
#[derive(Debug, Clone, Copy)]
pub struct EquilibriumFunction<'a> {
    p: &'a DimensionlessParams,
    g: &'a IncidenceModel,
    m: DelayMoments,
}

impl<'a> EquilibriumFunction<'a> {
    pub fn new(p: &'a DimensionlessParams, g: &'a IncidenceModel, m: DelayMoments) -> Self {
        Self { p, g, m }
    }

    fn linear_coefficient(&self) -> f64 {
        let p = self.p;
        let m = &self.m;
        ((p.death_rate + p.disease_death_rate) * m.vector
            + p.recovery_rate * m.vector * (1.0 - m.host * m.immunity))
            / m.espr
    }

    pub fn value(&self, i: f64) -> f64 {
        let p = self.p;
        let saturation = p.removal_rate() * p.death_rate / (p.transmission * self.g.value(i));
        p.birth_rate - i * saturation / self.m.espr - i * self.linear_coefficient()
    }

    pub fn derivative(&self, i: f64) -> f64 {
        let p = self.p;
        let gi = self.g.value(i);
        let ratio_slope = (gi - i * self.g.derivative(i)) / (gi * gi);
        -p.removal_rate() * p.death_rate / (p.transmission * self.m.espr) * ratio_slope
            - self.linear_coefficient()
    }

    /// `lim H(I)` as `I → 0⁺`.
    pub fn at_zero(&self) -> f64 {
        let p = self.p;
        p.birth_rate
            - p.removal_rate() * p.death_rate / (p.transmission * self.g.slope_at_zero() * self.m.espr)
    }
}

/// A positive steady state together with the quality of its root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndemicEquilibrium {
    pub state: State,
    /// `H(I*)` at the returned root.
    pub residual: f64,
    pub iterations: usize,
}

/// Sufficient condition for an endemic equilibrium as stated for the random
/// delay model: `ESPR ≥ R0 / ((R0 − α/(μ+d+α))·G'(0))`.
pub fn existence_condition(p: &DimensionlessParams, g: &IncidenceModel, espr: f64) -> bool {
    let r0 = super::brn_random_delays(p);
    let margin = r0 - p.recovery_rate / p.removal_rate();
    if !(r0 > 1.0 && margin > 0.0) {
        return false;
    }
    espr >= r0 / (margin * g.slope_at_zero())
}

/// Solves `H(I) = 0` on `[1e-14, B/μ]` by bisection followed by Newton
/// polishing and recovers the remaining components.
///
/// Returns `Ok(None)` when `H` does not change sign on the bracket, which
/// includes every case with `H(0) ≤ 0`.
pub fn endemic_equilibrium(
    p: &DimensionlessParams,
    g: &IncidenceModel,
    delays: &DelaySet,
) -> Result<Option<EndemicEquilibrium>, AnalysisError> {
    p.validate()?;
    g.validate()?;
    if p.transmission <= 0.0 {
        return Ok(None);
    }
    let m = DelayMoments::compute(p, delays)?;
    if !(m.espr > 0.0) {
        return Ok(None);
    }
    let h = EquilibriumFunction::new(p, g, m);
    if !(h.at_zero() > 0.0) {
        return Ok(None);
    }

    let (mut lo, mut hi) = (BRACKET_LO, p.dfe_susceptible());
    if !(h.value(lo) > 0.0) || h.value(hi) >= 0.0 {
        return Ok(None);
    }
    let mut iterations = 0;
    while hi - lo > BRACKET_WIDTH {
        if iterations == MAX_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            return Err(AnalysisError::NoConvergence { iterations, residual: h.value(mid).abs() });
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h.value(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }

    let mut root = 0.5 * (lo + hi);
    let mut residual = h.value(root);
    for _ in 0..NEWTON_STEPS {
        let slope = h.derivative(root);
        if !(slope < 0.0) {
            break;
        }
        let next = root - residual / slope;
        if !(next > 0.0 && next.is_finite()) {
            break;
        }
        let next_residual = h.value(next);
        iterations += 1;
        if next_residual.abs() >= residual.abs() {
            break;
        }
        root = next;
        residual = next_residual;
    }
    if !residual.is_finite() {
        return Err(AnalysisError::NoConvergence { iterations, residual });
    }

    Ok(Some(EndemicEquilibrium { state: recover_state(p, g, &m, root), residual, iterations }))
}

fn recover_state(p: &DimensionlessParams, g: &IncidenceModel, m: &DelayMoments, i: f64) -> State {
    let gi = g.value(i);
    let s = p.removal_rate() * i / (p.transmission * m.espr * gi);
    let e = p.transmission * s * gi * (m.vector - m.espr) / p.death_rate;
    let r = p.recovery_rate * i * (1.0 - m.immunity) / p.death_rate;
    State::new(s, e, i, r)
}

/// Right-hand sides of the four steady-state equations evaluated at `x`.
///
/// Each entry is zero at an exact equilibrium, in the order S, E, I, R.
pub fn equilibrium_residuals(
    p: &DimensionlessParams,
    g: &IncidenceModel,
    m: &DelayMoments,
    x: &State,
) -> [f64; 4] {
    let gi = g.value(x.i);
    let infection = p.transmission * x.s * gi;
    let waning = p.recovery_rate * m.immunity * x.i;
    [
        p.birth_rate - infection * m.vector - p.death_rate * x.s + waning,
        infection * m.vector - p.death_rate * x.e - infection * m.espr,
        infection * m.espr - p.removal_rate() * x.i,
        p.recovery_rate * x.i - p.death_rate * x.r - waning,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn persistence() -> DimensionlessParams {
        DimensionlessParams {
            birth_rate: 8.476678e-06,
            transmission: 7.941616,
            death_rate: 8.476678e-06,
            vector_death_rate: 42.85714,
            disease_death_rate: 0.0001761252,
            recovery_rate: 0.08571429,
        }
    }

    fn delays() -> DelaySet {
        DelaySet::points(0.105, 0.175, 2.129167).unwrap()
    }

    #[test]
    fn h_is_strictly_decreasing() {
        let p = persistence();
        let d = delays();
        let m = DelayMoments::compute(&p, &d).unwrap();
        for g in [IncidenceModel::holling2(0.05).unwrap(), IncidenceModel::saturating(0.05).unwrap()] {
            let h = EquilibriumFunction::new(&p, &g, m);
            let top = p.dfe_susceptible();
            let values: Vec<f64> = (1..=1000).map(|k| h.value(top * k as f64 / 1000.0)).collect();
            assert!(values.windows(2).all(|w| w[1] < w[0]), "{g}");
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = persistence();
        let m = DelayMoments::compute(&p, &delays()).unwrap();
        let g = IncidenceModel::saturating(0.05).unwrap();
        let h = EquilibriumFunction::new(&p, &g, m);
        for i in [1e-4, 1e-3, 0.05, 0.5] {
            let step = i * 1e-6;
            let fd = (h.value(i + step) - h.value(i - step)) / (2.0 * step);
            assert!(((fd - h.derivative(i)) / fd).abs() < 1e-6, "{i}");
        }
    }

    #[test]
    fn limit_at_zero_matches_small_argument() {
        let p = persistence();
        let m = DelayMoments::compute(&p, &delays()).unwrap();
        let g = IncidenceModel::holling2(0.05).unwrap();
        let h = EquilibriumFunction::new(&p, &g, m);
        assert!((h.value(1e-12) - h.at_zero()).abs() < 1e-9 * h.at_zero().abs());
    }

    #[test]
    fn no_root_without_transmission() {
        let p = persistence().with_transmission(0.0);
        let g = IncidenceModel::saturating(0.05).unwrap();
        assert_eq!(endemic_equilibrium(&p, &g, &delays()).unwrap(), None);
    }

    #[test]
    fn condition_fails_with_recovery_and_unit_slope() {
        let p = persistence();
        let g = IncidenceModel::saturating(0.05).unwrap();
        assert!(!existence_condition(&p, &g, 1.0));
    }
}
