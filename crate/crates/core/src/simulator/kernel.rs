use crate::model::{Compartment, DelaySpec, IncidenceModel};

use super::history::snap;
use super::{HistoryBuffer, SimulationError};

/// `∫ f_T1(s)·e^{−μ_v s}·G(I(t−s)) ds`.
pub fn kernel_single(
    history: &HistoryBuffer,
    g: &IncidenceModel,
    t1: &DelaySpec,
    mu_v: f64,
    t: f64,
) -> Result<f64, SimulationError> {
    let mut total = 0.0;
    for node in t1.nodes().iter() {
        let i = history.value(Compartment::Infectious, t - node.at)?;
        total += node.weight * (-mu_v * node.at).exp() * g.value(i);
    }
    Ok(total)
}

/// `∫∫ f_T2(u)·f_T1(s)·e^{−μ_v s − μ u}·S(t−u)·G(I(t−s−u)) ds du`.
pub fn kernel_double(
    history: &HistoryBuffer,
    g: &IncidenceModel,
    t1: &DelaySpec,
    t2: &DelaySpec,
    mu_v: f64,
    mu: f64,
    t: f64,
) -> Result<f64, SimulationError> {
    let mut total = 0.0;
    for u in t2.nodes().iter() {
        let s = history.value(Compartment::Susceptible, t - u.at)?;
        let inner = kernel_single(history, g, t1, mu_v, t - u.at)?;
        total += u.weight * (-mu * u.at).exp() * s * inner;
    }
    Ok(total)
}

/// `∫ f_T3(r)·e^{−μ r}·I(t−r) dr`.
pub fn kernel_recovery(history: &HistoryBuffer, t3: &DelaySpec, mu: f64, t: f64) -> Result<f64, SimulationError> {
    let mut total = 0.0;
    for node in t3.nodes().iter() {
        total += node.weight * (-mu * node.at).exp() * history.value(Compartment::Infectious, t - node.at)?;
    }
    Ok(total)
}

/// One quadrature node expressed as a fixed offset on the time grid.
#[derive(Debug, Clone, Copy)]
struct Lag {
    back: usize,
    frac: f64,
    weight: f64,
}

/// Quadrature nodes of one delay, discounted by `e^{−rate·lag}` and mapped to
/// grid offsets for a fixed `dt`.
#[derive(Debug, Clone)]
pub(crate) struct LagTable {
    lags: Vec<Lag>,
}

impl LagTable {
    pub(crate) fn new(spec: &DelaySpec, rate: f64, dt: f64) -> Self {
        let lags = spec
            .nodes()
            .iter()
            .filter(|n| n.weight != 0.0)
            .map(|n| {
                let q = snap(n.at / dt);
                let back = q.ceil();
                Lag { back: back as usize, frac: back - q, weight: n.weight * (-rate * n.at).exp() }
            })
            .collect();
        Self { lags }
    }

    /// Largest grid offset reached.
    pub(crate) fn reach(&self) -> usize {
        self.lags.iter().map(|l| l.back).max().unwrap_or(0)
    }

    #[inline]
    fn sample(x: &[f64], n: usize, lag: &Lag) -> f64 {
        let k = n - lag.back;
        if lag.frac == 0.0 {
            x[k]
        } else {
            x[k] + lag.frac * (x[k + 1] - x[k])
        }
    }

    /// `Σ w·f(x(t_n − lag))`.
    #[inline]
    pub(crate) fn apply(&self, x: &[f64], n: usize, f: impl Fn(f64) -> f64) -> f64 {
        self.lags.iter().map(|l| l.weight * f(Self::sample(x, n, l))).sum()
    }

    /// `Σ w·x(t_n − lag)·y(t_n − lag)`.
    #[inline]
    pub(crate) fn apply_product(&self, x: &[f64], y: &[f64], n: usize) -> f64 {
        self.lags.iter().map(|l| l.weight * Self::sample(x, n, l) * Self::sample(y, n, l)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DelayDensity, State, DEFAULT_NODES};

    #[test]
    fn constant_history_single() {
        let buf = HistoryBuffer::constant(State::new(0.5, 0.0, 0.3, 0.0), 1.0, 1e-3).unwrap();
        let g = IncidenceModel::holling2(0.05).unwrap();
        let k = kernel_single(&buf, &g, &DelaySpec::PointMass(0.105), 42.85714, 0.0).unwrap();
        let expected = (-42.85714f64 * 0.105).exp() * g.value(0.3);
        assert!((k - expected).abs() < 1e-15);
    }

    #[test]
    fn zero_infection_gives_zero() {
        let buf = HistoryBuffer::constant(State::new(1.0, 0.0, 0.0, 0.0), 1.0, 1e-2).unwrap();
        let g = IncidenceModel::saturating(0.5).unwrap();
        let t1 = DelaySpec::Density(DelayDensity::uniform(0.0, 0.4, DEFAULT_NODES).unwrap());
        let t2 = DelaySpec::PointMass(0.3);
        assert_eq!(kernel_single(&buf, &g, &t1, 1.0, 0.0).unwrap(), 0.0);
        assert_eq!(kernel_double(&buf, &g, &t1, &t2, 1.0, 1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn linear_history_closed_form() {
        // I(τ) = τ + 1 on [−1, 0] is I(t) = t on [0, 1] shifted to end at 0.
        let buf = HistoryBuffer::from_fn(-1.0, 0.0, 1e-3, |t| State::new(0.0, 0.0, t + 1.0, 0.0)).unwrap();
        let t1 = DelaySpec::Density(DelayDensity::uniform(0.0, 0.5, DEFAULT_NODES).unwrap());
        let k = kernel_single(&buf, &IncidenceModel::Linear, &t1, 0.0, 0.0).unwrap();
        assert!((k - 0.75).abs() < 1e-6, "{k}");
    }

    #[test]
    fn separable_double_kernel() {
        let buf = HistoryBuffer::constant(State::new(0.7, 0.0, 0.2, 0.0), 2.0, 1e-3).unwrap();
        let g = IncidenceModel::saturating(0.5).unwrap();
        let t1 = DelaySpec::Density(DelayDensity::uniform(0.1, 0.6, 65).unwrap());
        let t2 = DelaySpec::Density(DelayDensity::uniform(0.0, 0.8, 65).unwrap());
        let (mu_v, mu) = (3.0, 0.2);
        let k2 = kernel_double(&buf, &g, &t1, &t2, mu_v, mu, 0.0).unwrap();
        let k1 = kernel_single(&buf, &g, &t1, mu_v, 0.0).unwrap();
        let outer = kernel_recovery(&buf, &t2, mu, 0.0).unwrap() / 0.2;
        assert!((k2 - 0.7 * k1 * outer).abs() < 1e-8);
    }

    #[test]
    fn lag_table_matches_interpolation() {
        let buf = HistoryBuffer::from_fn(-1.0, 0.0, 0.01, |t| State::new(0.0, 0.0, (3.0 * t).sin() + 2.0, 0.0))
            .unwrap();
        let spec = DelaySpec::Density(DelayDensity::uniform(0.0, 0.777, 33).unwrap());
        let table = LagTable::new(&spec, 0.4, buf.dt());
        let n = buf.len() - 1;
        let fast = table.apply(buf.series(Compartment::Infectious), n, |x| x);
        let direct = kernel_recovery(&buf, &spec, 0.4, 0.0).unwrap();
        assert!((fast - direct).abs() < 1e-13);
    }
}
