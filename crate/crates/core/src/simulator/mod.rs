//! Explicit Euler integration of the four integro-delay equations.

mod history;
mod kernel;
mod trajectory;

pub use history::HistoryBuffer;
pub use kernel::{kernel_double, kernel_recovery, kernel_single};
pub use trajectory::{Event, EventKind, Trajectory};

use thiserror::Error;

use crate::exec::{self, Execution};
use crate::model::{Compartment, DelaySet, DimensionlessParams, IncidenceModel, ModelError, State};
use history::steps_for;
use kernel::LagTable;

pub const DEFAULT_DT: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimulationError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid simulation setup: {0}")]
    InvalidConfig(String),
    #[error("history does not reach t = {time}: a lag of {required} is needed but only {available} is stored")]
    HistoryUnderflow { time: f64, required: f64, available: f64 },
    #[error("{component} became negative ({value:e}) at step {step} (t = {time}); reduce dt")]
    Negative { step: usize, time: f64, component: Compartment, value: f64 },
    #[error("non-finite state at step {step} (t = {time})")]
    NonFinite { step: usize, time: f64 },
}

/// What to do when an Euler step leaves the non-negative orthant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NegativityPolicy {
    #[default]
    Error,
    ClampWithWarning,
}

impl NegativityPolicy {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "error" => Some(Self::Error),
            "clamp" => Some(Self::ClampWithWarning),
            _ => None,
        }
    }
}

/// Initial data on `[−T_max, 0]`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialHistory {
    Constant(State),
    /// Samples `(t, state)` with increasing `t ≤ 0`, linearly interpolated.
    Tabulated(Vec<(f64, State)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub dt: f64,
    pub t_end: f64,
    pub history: InitialHistory,
    pub negativity: NegativityPolicy,
    /// Keep every `stride`-th step in the trajectory.
    pub stride: usize,
}

impl SimulationConfig {
    pub fn new(history: State, t_end: f64) -> Self {
        Self {
            dt: DEFAULT_DT,
            t_end,
            history: InitialHistory::Constant(history),
            negativity: NegativityPolicy::Error,
            stride: 1,
        }
    }

    pub fn validate(&self) -> Result<(), SimulationError> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(SimulationError::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(SimulationError::InvalidConfig(format!("t_end must be positive, got {}", self.t_end)));
        }
        if self.stride == 0 {
            return Err(SimulationError::InvalidConfig("stride must be at least 1".into()));
        }
        Ok(())
    }

    /// Builds the history buffer covering the delays.
    pub fn build_history(&self, delays: &DelaySet) -> Result<HistoryBuffer, SimulationError> {
        let span = history_span(delays, self.dt);
        match &self.history {
            InitialHistory::Constant(x) => init_history_constant(*x, span, self.dt),
            InitialHistory::Tabulated(rows) => {
                let (times, states): (Vec<f64>, Vec<State>) = rows.iter().copied().unzip();
                for x in &states {
                    check_fraction(x)?;
                }
                HistoryBuffer::tabulated(&times, &states, span, self.dt)
            }
        }
    }
}

/// History length used for a delay set: `T_max` plus one grid step.
pub fn history_span(delays: &DelaySet, dt: f64) -> f64 {
    delays.max_lag() + dt
}

fn check_fraction(x: &State) -> Result<(), SimulationError> {
    for c in Compartment::ALL {
        let v = x.get(c);
        if !(v.is_finite() && v >= 0.0) {
            return Err(SimulationError::InvalidConfig(format!(
                "initial fraction {c} must be finite and non-negative, got {v}"
            )));
        }
    }
    if !(x.total() > 0.0) {
        return Err(SimulationError::InvalidConfig("initial fractions sum to zero".into()));
    }
    Ok(())
}

/// Constant history with the given fractions on `[−span, 0]`.
pub fn init_history_constant(fractions: State, span: f64, dt: f64) -> Result<HistoryBuffer, SimulationError> {
    check_fraction(&fractions)?;
    HistoryBuffer::constant(fractions, span, dt)
}

/// Right-hand side of the system given the three kernel values.
#[inline]
pub fn rates(p: &DimensionlessParams, state: &State, k1: f64, k2: f64, k3: f64) -> State {
    let infection = p.transmission * state.s * k1;
    let onset = p.transmission * k2;
    let waning = p.recovery_rate * k3;
    State::new(
        p.birth_rate - infection - p.death_rate * state.s + waning,
        infection - p.death_rate * state.e - onset,
        onset - p.removal_rate() * state.i,
        p.recovery_rate * state.i - p.death_rate * state.r - waning,
    )
}

struct Kernels {
    t1: LagTable,
    t2: LagTable,
    t3: LagTable,
}

/// Integrates from `t = 0` to `cfg.t_end` with the history in `cfg`.
pub fn simulate(
    p: &DimensionlessParams,
    g: &IncidenceModel,
    delays: &DelaySet,
    cfg: &SimulationConfig,
) -> Result<Trajectory, SimulationError> {
    cfg.validate()?;
    let history = cfg.build_history(delays)?;
    simulate_with_history(p, g, delays, cfg, history)
}

/// Integrates from the end of `history`, which must sit at `t = 0` on a grid
/// of step `cfg.dt`.
pub fn simulate_with_history(
    p: &DimensionlessParams,
    g: &IncidenceModel,
    delays: &DelaySet,
    cfg: &SimulationConfig,
    history: HistoryBuffer,
) -> Result<Trajectory, SimulationError> {
    cfg.validate()?;
    p.validate()?;
    g.validate()?;
    let dt = cfg.dt;
    if history.is_empty() || (history.dt() - dt).abs() > 1e-12 * dt || history.current_time().abs() > 1e-9 * dt {
        return Err(SimulationError::InvalidConfig(
            "history must end at t = 0 on the simulation grid".into(),
        ));
    }

    let kernels = Kernels {
        t1: LagTable::new(&delays.vector, p.vector_death_rate, dt),
        t2: LagTable::new(&delays.host, p.death_rate, dt),
        t3: LagTable::new(&delays.immunity, p.death_rate, dt),
    };
    let origin = history.len() - 1;
    let needed = (kernels.t1.reach() + kernels.t2.reach()).max(kernels.t3.reach());
    if needed > origin {
        return Err(SimulationError::HistoryUnderflow {
            time: -(needed as f64) * dt,
            required: needed as f64 * dt,
            available: origin as f64 * dt,
        });
    }

    let steps = steps_for(cfg.t_end, dt);
    let initial = history.clone();
    let mut s = history.series(Compartment::Susceptible).to_vec();
    let mut e = history.series(Compartment::Exposed).to_vec();
    let mut i = history.series(Compartment::Infectious).to_vec();
    let mut r = history.series(Compartment::Recovered).to_vec();
    for v in [&mut s, &mut e, &mut i, &mut r] {
        v.reserve(steps);
    }

    // K1 on the grid, so the double kernel reduces to one sum over T2 nodes.
    let reach1 = kernels.t1.reach();
    let mut k1 = vec![f64::NAN; origin + 1];
    k1.reserve(steps);
    for (n, slot) in k1.iter_mut().enumerate().skip(reach1) {
        *slot = kernels.t1.apply(&i, n, |x| g.value(x));
    }

    let mut traj = Trajectory::with_capacity(dt, cfg.stride, initial, steps / cfg.stride + 2);
    traj.record(0.0, history.latest());

    for step in 0..steps {
        let n = origin + step;
        let x = State::new(s[n], e[n], i[n], r[n]);
        let kd = kernels.t2.apply_product(&s, &k1, n);
        let kr = kernels.t3.apply(&i, n, |v| v);
        let d = rates(p, &x, k1[n], kd, kr);
        let mut next = State::new(x.s + dt * d.s, x.e + dt * d.e, x.i + dt * d.i, x.r + dt * d.r);
        let time = (step + 1) as f64 * dt;
        if !next.is_finite() {
            return Err(SimulationError::NonFinite { step: step + 1, time });
        }
        for c in Compartment::ALL {
            let v = next.get(c);
            if v < 0.0 {
                match cfg.negativity {
                    NegativityPolicy::Error => {
                        return Err(SimulationError::Negative { step: step + 1, time, component: c, value: v })
                    }
                    NegativityPolicy::ClampWithWarning => {
                        *next.get_mut(c) = 0.0;
                        traj.events.push(Event {
                            step: step + 1,
                            time,
                            kind: EventKind::Clamp,
                            message: format!("{c} = {v:e} clamped to 0"),
                        });
                    }
                }
            }
        }
        s.push(next.s);
        e.push(next.e);
        i.push(next.i);
        r.push(next.r);
        k1.push(kernels.t1.apply(&i, n + 1, |v| g.value(v)));
        if (step + 1) % cfg.stride == 0 || step + 1 == steps {
            traj.record(time, next);
        }
    }
    Ok(traj)
}

/// One independent simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationJob {
    pub params: DimensionlessParams,
    pub incidence: IncidenceModel,
    pub delays: DelaySet,
    pub config: SimulationConfig,
}

/// Runs independent jobs, in parallel when `exec` allows it. Results keep the
/// order of `jobs`.
pub fn simulate_batch(jobs: &[SimulationJob], exec: Execution) -> Vec<Result<Trajectory, SimulationError>> {
    exec::map(jobs, exec, |j| simulate(&j.params, &j.incidence, &j.delays, &j.config))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(beta: f64) -> DimensionlessParams {
        DimensionlessParams {
            birth_rate: 8.476678e-06,
            transmission: beta,
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
    fn rejects_bad_config() {
        let mut cfg = SimulationConfig::new(State::new(0.5, 0.1, 0.1, 0.1), 0.0);
        assert!(cfg.validate().is_err());
        cfg.t_end = 1.0;
        cfg.dt = -1.0;
        assert!(cfg.validate().is_err());
        cfg.dt = 1e-3;
        cfg.stride = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn negative_fraction_rejected() {
        assert!(init_history_constant(State::new(-0.1, 0.0, 0.0, 0.0), 1.0, 0.1).is_err());
        assert!(init_history_constant(State::new(0.0, 0.0, 0.0, 0.0), 1.0, 0.1).is_err());
    }

    #[test]
    fn short_history_is_reported() {
        let p = params(0.1);
        let g = IncidenceModel::holling2(0.05).unwrap();
        let cfg = SimulationConfig::new(State::new(0.5, 0.1, 0.1, 0.1), 1.0);
        let short = HistoryBuffer::constant(State::new(0.5, 0.1, 0.1, 0.1), 0.2, cfg.dt).unwrap();
        let err = simulate_with_history(&p, &g, &delays(), &cfg, short).unwrap_err();
        assert!(matches!(err, SimulationError::HistoryUnderflow { .. }), "{err}");
    }

    #[test]
    fn grid_kernels_match_direct_quadrature() {
        let p = params(7.941616);
        let g = IncidenceModel::holling2(0.05).unwrap();
        let d = delays();
        let cfg = SimulationConfig::new(State::new(10.0 / 23.0, 5.0 / 23.0, 6.0 / 23.0, 2.0 / 23.0), 5.0);
        let hist = cfg.build_history(&d).unwrap();
        let traj = simulate(&p, &g, &d, &cfg).unwrap();
        // Rebuild the full buffer and compare the grid kernels at the final time.
        let mut full = hist.clone();
        for k in 1..traj.len() {
            full.push(traj.state(k)).unwrap();
        }
        let t = full.current_time();
        let k1 = kernel_single(&full, &g, &d.vector, p.vector_death_rate, t).unwrap();
        let k2 = kernel_double(&full, &g, &d.vector, &d.host, p.vector_death_rate, p.death_rate, t).unwrap();
        let t1 = LagTable::new(&d.vector, p.vector_death_rate, cfg.dt);
        let n = full.len() - 1;
        let i = full.series(Compartment::Infectious);
        let fast_k1 = t1.apply(i, n, |x| g.value(x));
        assert!((fast_k1 - k1).abs() < 1e-15);
        let k1_series: Vec<f64> = (0..=n)
            .map(|m| if m >= t1.reach() { t1.apply(i, m, |x| g.value(x)) } else { f64::NAN })
            .collect();
        let t2 = LagTable::new(&d.host, p.death_rate, cfg.dt);
        let fast_k2 = t2.apply_product(full.series(Compartment::Susceptible), &k1_series, n);
        assert!((fast_k2 - k2).abs() < 1e-12 * k2.abs().max(1e-12), "{fast_k2} vs {k2}");
    }

    #[test]
    fn clamp_policy_logs_events() {
        let p = params(0.0);
        let g = IncidenceModel::Linear;
        let mut cfg = SimulationConfig::new(State::new(0.5, 0.1, 0.4, 0.1), 1.0);
        cfg.dt = 20.0;
        cfg.t_end = 40.0;
        assert!(matches!(simulate(&p, &g, &delays(), &cfg), Err(SimulationError::Negative { .. })));
        cfg.negativity = NegativityPolicy::ClampWithWarning;
        let traj = simulate(&p, &g, &delays(), &cfg).unwrap();
        assert!(!traj.events.is_empty());
        assert!(traj.i.iter().all(|&v| v >= 0.0));
    }
}
