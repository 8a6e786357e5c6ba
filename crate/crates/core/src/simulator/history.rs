use crate::model::{Compartment, State};

use super::SimulationError;

/// Rounds `q` to the nearest integer when it is within floating-point noise
/// of one, so that lags which are exact multiples of `dt` land on the grid.
pub(crate) fn snap(q: f64) -> f64 {
    let r = q.round();
    if (q - r).abs() <= 1e-9 * q.abs().max(1.0) {
        r
    } else {
        q
    }
}

/// Number of grid steps needed to reach back `span`.
pub(crate) fn steps_for(span: f64, dt: f64) -> usize {
    snap(span / dt).ceil() as usize
}

/// Uniformly sampled state history. Index 0 is the oldest sample.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryBuffer {
    dt: f64,
    start: f64,
    s: Vec<f64>,
    e: Vec<f64>,
    i: Vec<f64>,
    r: Vec<f64>,
}

impl HistoryBuffer {
    fn empty(start: f64, dt: f64, capacity: usize) -> Self {
        Self {
            dt,
            start,
            s: Vec::with_capacity(capacity),
            e: Vec::with_capacity(capacity),
            i: Vec::with_capacity(capacity),
            r: Vec::with_capacity(capacity),
        }
    }

    fn check_grid(lo: f64, hi: f64, dt: f64) -> Result<usize, SimulationError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(SimulationError::InvalidConfig(format!("dt must be positive, got {dt}")));
        }
        if !(lo.is_finite() && hi.is_finite() && hi >= lo) {
            return Err(SimulationError::InvalidConfig(format!("invalid history interval [{lo}, {hi}]")));
        }
        Ok(steps_for(hi - lo, dt))
    }

    /// Samples `f` on a grid of step `dt` that ends exactly at `hi` and
    /// starts at or before `lo`.
    pub fn from_fn(lo: f64, hi: f64, dt: f64, f: impl Fn(f64) -> State) -> Result<Self, SimulationError> {
        let n = Self::check_grid(lo, hi, dt)?;
        let start = hi - n as f64 * dt;
        let mut buf = Self::empty(start, dt, n + 1);
        for k in 0..=n {
            let t = if k == n { hi } else { start + k as f64 * dt };
            buf.push(f(t))?;
        }
        Ok(buf)
    }

    /// Constant history on `[−span, 0]`.
    pub fn constant(state: State, span: f64, dt: f64) -> Result<Self, SimulationError> {
        Self::from_fn(-span, 0.0, dt, |_| state)
    }

    /// Linear interpolation of tabulated samples onto `[−span, 0]`.
    ///
    /// `times` must be strictly increasing and cover the whole interval.
    pub fn tabulated(times: &[f64], states: &[State], span: f64, dt: f64) -> Result<Self, SimulationError> {
        if times.len() != states.len() || times.is_empty() {
            return Err(SimulationError::InvalidConfig(
                "tabulated history needs equally many times and states".into(),
            ));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(SimulationError::InvalidConfig("tabulated history times must increase".into()));
        }
        let n = Self::check_grid(-span, 0.0, dt)?;
        let start = -(n as f64) * dt;
        let tol = 1e-9 * dt;
        if times[0] > start + tol || times[times.len() - 1] < -tol {
            return Err(SimulationError::HistoryUnderflow {
                time: start,
                required: -start,
                available: -times[0],
            });
        }
        Self::from_fn(-span, 0.0, dt, |t| {
            let k = times.partition_point(|&x| x <= t).clamp(1, times.len().max(2) - 1);
            if times.len() == 1 {
                return states[0];
            }
            let (t0, t1) = (times[k - 1], times[k]);
            let w = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
            let (a, b) = (states[k - 1], states[k]);
            State::new(
                a.s + w * (b.s - a.s),
                a.e + w * (b.e - a.e),
                a.i + w * (b.i - a.i),
                a.r + w * (b.r - a.r),
            )
        })
    }

    pub fn push(&mut self, x: State) -> Result<(), SimulationError> {
        if !x.is_finite() {
            return Err(SimulationError::InvalidConfig(format!("non-finite history sample {x:?}")));
        }
        self.s.push(x.s);
        self.e.push(x.e);
        self.i.push(x.i);
        self.r.push(x.r);
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Time of the oldest sample.
    pub fn start(&self) -> f64 {
        self.start
    }

    /// Time of the newest sample.
    pub fn current_time(&self) -> f64 {
        self.time_at(self.len() - 1)
    }

    pub fn time_at(&self, index: usize) -> f64 {
        self.start + index as f64 * self.dt
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn latest(&self) -> State {
        self.state_at(self.len() - 1)
    }

    pub fn state_at(&self, index: usize) -> State {
        State::new(self.s[index], self.e[index], self.i[index], self.r[index])
    }

    pub fn series(&self, c: Compartment) -> &[f64] {
        match c {
            Compartment::Susceptible => &self.s,
            Compartment::Exposed => &self.e,
            Compartment::Infectious => &self.i,
            Compartment::Recovered => &self.r,
        }
    }

    /// Linearly interpolated value of `c` at time `t`.
    pub fn value(&self, c: Compartment, t: f64) -> Result<f64, SimulationError> {
        let x = self.series(c);
        let pos = snap((t - self.start) / self.dt);
        let last = (x.len() - 1) as f64;
        if pos < 0.0 || pos > last || !pos.is_finite() {
            return Err(SimulationError::HistoryUnderflow {
                time: t,
                required: self.current_time() - t,
                available: self.current_time() - self.start,
            });
        }
        let k = pos.floor() as usize;
        let frac = pos - k as f64;
        if frac == 0.0 {
            Ok(x[k])
        } else {
            Ok(x[k] + frac * (x[k + 1] - x[k]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_buffer_spans_requested_interval() {
        let x = State::new(10.0 / 23.0, 5.0 / 23.0, 6.0 / 23.0, 2.0 / 23.0);
        let buf = HistoryBuffer::constant(x, 2.129167, 1e-3).unwrap();
        assert!(buf.start() <= -2.129167);
        assert_eq!(buf.current_time(), 0.0);
        for k in 0..buf.len() {
            assert!((buf.state_at(k).total() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn interpolates_linearly() {
        let buf = HistoryBuffer::from_fn(-1.0, 0.0, 0.1, |t| State::new(t, 2.0 * t, 0.0, 1.0)).unwrap();
        let v = buf.value(Compartment::Exposed, -0.55).unwrap();
        assert!((v + 1.1).abs() < 1e-12);
        assert!(buf.value(Compartment::Susceptible, -1.5).is_err());
        assert!(buf.value(Compartment::Susceptible, 0.01).is_err());
    }

    #[test]
    fn tabulated_matches_source() {
        let times = [-3.0, -1.0, 0.0];
        let states = [State::new(0.0, 0.0, 0.0, 0.0), State::new(1.0, 0.0, 2.0, 0.0), State::new(1.0, 1.0, 0.0, 0.0)];
        let buf = HistoryBuffer::tabulated(&times, &states, 2.5, 0.01).unwrap();
        assert!((buf.value(Compartment::Susceptible, -2.0).unwrap() - 0.5).abs() < 1e-12);
        assert!((buf.value(Compartment::Infectious, -0.5).unwrap() - 1.0).abs() < 1e-12);
        assert!(HistoryBuffer::tabulated(&times, &states, 4.0, 0.01).is_err());
    }
}
