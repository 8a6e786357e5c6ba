use std::fmt;
use std::io::{self, Write};

use crate::model::{Compartment, State};

use super::{HistoryBuffer, SimulationError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Clamp,
    Warning,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::Clamp => "clamp",
            EventKind::Warning => "warning",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub step: usize,
    pub time: f64,
    pub kind: EventKind,
    pub message: String,
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step={} t={} {}: {}", self.step, self.time, self.kind, self.message)
    }
}

/// Sampled solution on `[0, t_end]` plus the history it started from.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Integration step.
    pub dt: f64,
    pub stride: usize,
    pub times: Vec<f64>,
    pub s: Vec<f64>,
    pub e: Vec<f64>,
    pub i: Vec<f64>,
    pub r: Vec<f64>,
    pub n: Vec<f64>,
    pub events: Vec<Event>,
    pub history: Option<HistoryBuffer>,
}

impl Trajectory {
    pub(crate) fn with_capacity(dt: f64, stride: usize, history: HistoryBuffer, capacity: usize) -> Self {
        let v = || Vec::with_capacity(capacity);
        Self {
            dt,
            stride,
            times: v(),
            s: v(),
            e: v(),
            i: v(),
            r: v(),
            n: v(),
            events: Vec::new(),
            history: Some(history),
        }
    }

    pub(crate) fn record(&mut self, t: f64, x: State) {
        self.times.push(t);
        self.s.push(x.s);
        self.e.push(x.e);
        self.i.push(x.i);
        self.r.push(x.r);
        self.n.push(x.total());
    }

    /// Builds a trajectory from given series, for post-processing data that
    /// did not come from [`simulate`](super::simulate).
    pub fn from_series(
        times: Vec<f64>,
        s: Vec<f64>,
        e: Vec<f64>,
        i: Vec<f64>,
        r: Vec<f64>,
    ) -> Result<Self, SimulationError> {
        let len = times.len();
        if len < 2 || [s.len(), e.len(), i.len(), r.len()].iter().any(|&l| l != len) {
            return Err(SimulationError::InvalidConfig("series must have equal length of at least 2".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(SimulationError::InvalidConfig("times must be strictly increasing".into()));
        }
        let n = (0..len).map(|k| s[k] + e[k] + i[k] + r[k]).collect();
        Ok(Self {
            dt: times[1] - times[0],
            stride: 1,
            times,
            s,
            e,
            i,
            r,
            n,
            events: Vec::new(),
            history: None,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn state(&self, k: usize) -> State {
        State::new(self.s[k], self.e[k], self.i[k], self.r[k])
    }

    pub fn last(&self) -> State {
        self.state(self.len() - 1)
    }

    pub fn t_end(&self) -> f64 {
        self.times[self.len() - 1]
    }

    pub fn series(&self, c: Compartment) -> &[f64] {
        match c {
            Compartment::Susceptible => &self.s,
            Compartment::Exposed => &self.e,
            Compartment::Infectious => &self.i,
            Compartment::Recovered => &self.r,
        }
    }

    /// Linearly interpolated value of `c` at `t`, `None` outside the span.
    pub fn value_at(&self, c: Compartment, t: f64) -> Option<f64> {
        if !(t >= self.times[0] && t <= self.t_end()) {
            return None;
        }
        let x = self.series(c);
        let k = self.times.partition_point(|&s| s <= t);
        if k == self.len() {
            return Some(x[k - 1]);
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let w = (t - t0) / (t1 - t0);
        Some(x[k - 1] + w * (x[k] - x[k - 1]))
    }

    /// CSV with header `t,S,E,I,R,N`.
    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "t,S,E,I,R,N")?;
        for k in 0..self.len() {
            writeln!(w, "{},{},{},{},{},{}", self.times[k], self.s[k], self.e[k], self.i[k], self.r[k], self.n[k])?;
        }
        Ok(())
    }

    /// Event log, one line per event.
    pub fn write_events(&self, mut w: impl Write) -> io::Result<()> {
        for ev in &self.events {
            writeln!(w, "{ev}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let traj = Trajectory::from_series(
            vec![0.0, 0.5],
            vec![1.0, 0.5],
            vec![0.0, 0.25],
            vec![0.0, 0.125],
            vec![0.0, 0.0],
        )
        .unwrap();
        let mut out = Vec::new();
        traj.write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "t,S,E,I,R,N\n0,1,0,0,0,1\n0.5,0.5,0.25,0.125,0,0.875\n");
    }

    #[test]
    fn interpolated_lookup() {
        let traj = Trajectory::from_series(
            vec![0.0, 1.0, 2.0],
            vec![0.0, 1.0, 3.0],
            vec![0.0; 3],
            vec![0.0; 3],
            vec![0.0; 3],
        )
        .unwrap();
        assert_eq!(traj.value_at(Compartment::Susceptible, 1.5), Some(2.0));
        assert_eq!(traj.value_at(Compartment::Susceptible, 2.0), Some(3.0));
        assert_eq!(traj.value_at(Compartment::Susceptible, 2.5), None);
    }
}
