//! Finite-time checks of the asymptotic statements on a simulated trajectory.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::analysis::{AnalysisReport, Regime};
use crate::model::{Compartment, DimensionlessParams};
use crate::simulator::Trajectory;

/// Absolute slack on the extinction-rate check at `t ≈ 1000`.
pub const LYAPUNOV_MARGIN: f64 = 0.02;
/// Tolerance of the susceptible running mean around `B/μ`.
pub const MEAN_BAND: f64 = 0.1;
/// Fraction of the trajectory treated as its tail.
pub const TAIL_FRACTION: f64 = 0.25;
pub const DEFAULT_EPSILON_EXTINCT: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiagnosticsError {
    #[error("window [{0}, {1}] is not inside the trajectory span")]
    InvalidWindow(f64, f64),
    #[error("log I is undefined: I(t = {time}) = {value} at sample {index}")]
    NonPositive { index: usize, time: f64, value: f64 },
}

fn window_indices(traj: &Trajectory, window: (f64, f64)) -> Result<(usize, usize), DiagnosticsError> {
    let (a, b) = window;
    let slack = 1e-9 * traj.t_end().abs().max(1.0);
    if !(a <= b && a >= traj.times[0] - slack && b <= traj.t_end() + slack) {
        return Err(DiagnosticsError::InvalidWindow(a, b));
    }
    let lo = traj.times.partition_point(|&t| t < a - slack);
    let hi = traj.times.partition_point(|&t| t <= b + slack);
    if lo >= hi {
        return Err(DiagnosticsError::InvalidWindow(a, b));
    }
    Ok((lo, hi))
}

/// Last [`TAIL_FRACTION`] of the trajectory span.
pub fn tail_window(traj: &Trajectory) -> (f64, f64) {
    let (t0, t1) = (traj.times[0], traj.t_end());
    (t1 - TAIL_FRACTION * (t1 - t0), t1)
}

/// Samples of `(1/t)·log I(t)` over a window.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovEstimate {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl LyapunovEstimate {
    /// Value at the right end of the window.
    pub fn tail(&self) -> f64 {
        self.values[self.values.len() - 1]
    }
}

/// `(1/t)·log I(t)` on `window`; samples at `t ≤ 0` are skipped.
pub fn lyapunov_estimate(traj: &Trajectory, window: (f64, f64)) -> Result<LyapunovEstimate, DiagnosticsError> {
    let (lo, hi) = window_indices(traj, window)?;
    let mut out = LyapunovEstimate { times: Vec::new(), values: Vec::new() };
    for k in lo..hi {
        let t = traj.times[k];
        let i = traj.i[k];
        if !(i > 0.0) {
            return Err(DiagnosticsError::NonPositive { index: k, time: t, value: i });
        }
        if t > 0.0 {
            out.times.push(t);
            out.values.push(i.ln() / t);
        }
    }
    if out.values.is_empty() {
        return Err(DiagnosticsError::InvalidWindow(window.0, window.1));
    }
    Ok(out)
}

/// Running mean `(1/(t − t0))·∫ x ds` from the first sample.
#[derive(Debug, Clone, PartialEq)]
pub struct RunningMean {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl RunningMean {
    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }
}

/// Trapezoid running mean of `c`, reported on `window`. At the first sample
/// the mean is the sample itself.
pub fn time_average(traj: &Trajectory, c: Compartment, window: (f64, f64)) -> Result<RunningMean, DiagnosticsError> {
    let (lo, hi) = window_indices(traj, window)?;
    let x = traj.series(c);
    let t0 = traj.times[0];
    let mut integral = 0.0;
    let mut out = RunningMean { times: Vec::with_capacity(hi - lo), values: Vec::with_capacity(hi - lo) };
    for k in 0..hi {
        if k > 0 {
            integral += 0.5 * (x[k] + x[k - 1]) * (traj.times[k] - traj.times[k - 1]);
        }
        if k >= lo {
            let span = traj.times[k] - t0;
            out.times.push(traj.times[k]);
            out.values.push(if span > 0.0 { integral / span } else { x[k] });
        }
    }
    Ok(out)
}

/// One diagnostic check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckEntry {
    pub name: String,
    /// The analytic statement being tested.
    pub source: String,
    pub target: f64,
    pub observed: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub window: (f64, f64),
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TheoremCheckReport {
    pub entries: Vec<CheckEntry>,
    pub outcome: Option<Outcome>,
}

impl TheoremCheckReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn get(&self, name: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        if let Some(o) = self.outcome {
            let _ = writeln!(out, "outcome={o}");
        }
        for e in &self.entries {
            let n = &e.name;
            let _ = writeln!(out, "{n}.pass={}", e.pass);
            let _ = writeln!(out, "{n}.source={}", e.source);
            let _ = writeln!(out, "{n}.target={}", e.target);
            let _ = writeln!(out, "{n}.observed={}", e.observed);
            let _ = writeln!(out, "{n}.tolerance={}", e.tolerance);
            let _ = writeln!(out, "{n}.window={}:{}", e.window.0, e.window.1);
            if !e.detail.is_empty() {
                let _ = writeln!(out, "{n}.detail={}", e.detail);
            }
        }
        out
    }
}

impl fmt::Display for TheoremCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(o) = self.outcome {
            writeln!(f, "Outcome: {o}")?;
        }
        for e in &self.entries {
            let mark = if e.pass { "PASS" } else { "FAIL" };
            let (lo, hi) = e.window;
            if e.observed.is_nan() && e.target.is_nan() {
                writeln!(f, "[{mark}] {} ({}) on [{lo}, {hi}]", e.name, e.source)?;
            } else {
                writeln!(
                    f,
                    "[{mark}] {} ({}): observed {} vs target {} (tol {}) on [{lo}, {hi}]",
                    e.name, e.source, e.observed, e.target, e.tolerance
                )?;
            }
            if !e.detail.is_empty() {
                writeln!(f, "       {}", e.detail)?;
            }
        }
        Ok(())
    }
}

/// Checks non-negativity, `N ≤ B/μ + 10·dt` and one-way entry into
/// `N ≥ B/(μ+d)`.
pub fn verify_feasible_region(traj: &Trajectory, p: &DimensionlessParams) -> CheckEntry {
    let slack = 10.0 * traj.dt;
    let upper = p.dfe_susceptible();
    let lower = p.birth_rate / (p.death_rate + p.disease_death_rate);
    let mut failure = None;
    let mut max_n = f64::NEG_INFINITY;
    let mut entered = false;
    for k in 0..traj.len() {
        let x = traj.state(k);
        let n = traj.n[k];
        max_n = max_n.max(n);
        if failure.is_some() {
            continue;
        }
        if let Some(c) = Compartment::ALL.into_iter().find(|&c| !(x.get(c) >= 0.0)) {
            failure = Some(format!("{c} = {} < 0 at sample {k} (t = {})", x.get(c), traj.times[k]));
        } else if n > upper + slack {
            failure = Some(format!("N = {n} exceeds {upper} at sample {k} (t = {})", traj.times[k]));
        } else if entered && n < lower - slack {
            failure = Some(format!("N = {n} left the region above {lower} at sample {k} (t = {})", traj.times[k]));
        }
        entered |= n >= lower;
    }
    CheckEntry {
        name: "feasible_region".into(),
        source: "feasible region invariance".into(),
        target: upper,
        observed: max_n,
        tolerance: slack,
        pass: failure.is_none(),
        window: (traj.times[0], traj.t_end()),
        detail: failure.unwrap_or_default(),
    }
}

/// Long-run behaviour of `I` on a finite trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Extinct,
    PermanentFloor,
    StronglyPermanentInMean,
    WeaklyPermanentInMean,
    Undetermined,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Extinct => "Extinct",
            Outcome::PermanentFloor => "PermanentFloor",
            Outcome::StronglyPermanentInMean => "StronglyPermanentInMean",
            Outcome::WeaklyPermanentInMean => "WeaklyPermanentInMean",
            Outcome::Undetermined => "Undetermined",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classifies `I` over the tail window. `liminf`/`limsup` are approximated
/// by the min/max over the tail; running means start at the first sample.
///
/// * `Extinct`: `max I < epsilon_extinct` on the tail.
/// * `PermanentFloor`: `min I ≥ floor` on the tail.
/// * `Strongly`/`WeaklyPermanentInMean`: min/max of the running mean of `I`
///   on the tail is at least `epsilon_extinct`.
pub fn classify_outcome(traj: &Trajectory, epsilon_extinct: f64, floor: Option<f64>) -> Outcome {
    let window = tail_window(traj);
    let Ok((lo, hi)) = window_indices(traj, window) else {
        return Outcome::Undetermined;
    };
    let tail = &traj.i[lo..hi];
    let max_i = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_i = tail.iter().copied().fold(f64::INFINITY, f64::min);
    if max_i < epsilon_extinct {
        return Outcome::Extinct;
    }
    if let Some(floor) = floor {
        if floor > 0.0 && min_i >= floor {
            return Outcome::PermanentFloor;
        }
    }
    if let Ok(mean) = time_average(traj, Compartment::Infectious, window) {
        let lo = mean.values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = mean.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if lo >= epsilon_extinct {
            return Outcome::StronglyPermanentInMean;
        }
        if hi >= epsilon_extinct {
            return Outcome::WeaklyPermanentInMean;
        }
    }
    Outcome::Undetermined
}

/// Runs every check that applies to the regime found by `analysis`.
pub fn run_default_checks(traj: &Trajectory, p: &DimensionlessParams, analysis: &AnalysisReport) -> TheoremCheckReport {
    let mut report = TheoremCheckReport::default();
    report.entries.push(verify_feasible_region(traj, p));
    let tail = tail_window(traj);
    let full = (traj.times[0], traj.t_end());

    if let (true, Some(lambda)) = (analysis.regime.is_extinction(), analysis.lambda) {
        let target = -lambda + LYAPUNOV_MARGIN;
        let mut entry = CheckEntry {
            name: "extinction_rate".into(),
            source: "exponential extinction of I".into(),
            target,
            observed: f64::NAN,
            tolerance: LYAPUNOV_MARGIN,
            pass: false,
            window: tail,
            detail: String::new(),
        };
        let (lo, hi) = window_indices(traj, tail).unwrap_or((0, 0));
        if hi > lo && traj.i[lo..hi].iter().all(|&i| i == 0.0) {
            entry.observed = f64::NEG_INFINITY;
            entry.pass = true;
            entry.detail = "I vanishes identically on the tail".into();
        } else {
            match lyapunov_estimate(traj, tail) {
                Ok(est) => {
                    entry.observed = est.tail();
                    entry.pass = est.tail() <= target;
                }
                Err(e) => entry.detail = e.to_string(),
            }
        }
        report.entries.push(entry);

        let dfe = p.dfe_susceptible();
        let mean = time_average(traj, Compartment::Susceptible, full).map(|m| m.last()).unwrap_or(f64::NAN);
        report.entries.push(CheckEntry {
            name: "susceptible_mean".into(),
            source: "mean persistence of S".into(),
            target: dfe,
            observed: mean,
            tolerance: MEAN_BAND,
            pass: mean >= dfe - MEAN_BAND && mean <= dfe,
            window: full,
            detail: String::new(),
        });
    }

    let floor = analysis.permanence.map(|b| b.v2);
    if let Some(b) = &analysis.permanence {
        if let Ok((lo, hi)) = window_indices(traj, tail) {
            let min_i = traj.i[lo..hi].iter().copied().fold(f64::INFINITY, f64::min);
            let min_s = traj.s[lo..hi].iter().copied().fold(f64::INFINITY, f64::min);
            report.entries.push(CheckEntry {
                name: "infectious_floor".into(),
                source: "strong permanence of I".into(),
                target: b.v2,
                observed: min_i,
                tolerance: 0.0,
                pass: min_i >= b.v2,
                window: tail,
                detail: String::new(),
            });
            report.entries.push(CheckEntry {
                name: "susceptible_floor".into(),
                source: "strong permanence of S".into(),
                target: b.v1,
                observed: min_s,
                tolerance: 0.0,
                pass: min_s >= b.v1,
                window: tail,
                detail: String::new(),
            });
        }
    }

    let outcome = classify_outcome(traj, DEFAULT_EPSILON_EXTINCT, floor);
    report.outcome = Some(outcome);
    let expected = if analysis.regime.is_extinction() {
        Some(Outcome::Extinct)
    } else if floor.is_some() {
        Some(Outcome::PermanentFloor)
    } else {
        None
    };
    if let Some(expected) = expected {
        report.entries.push(CheckEntry {
            name: "outcome".into(),
            source: match analysis.regime {
                Regime::ExtinctionByR0 | Regime::ExtinctionBySurvival => "extinction classification",
                _ => "permanence classification",
            }
            .into(),
            target: f64::NAN,
            observed: f64::NAN,
            tolerance: DEFAULT_EPSILON_EXTINCT,
            pass: outcome == expected,
            window: tail,
            detail: format!("expected {expected}, observed {outcome}"),
        });
    }
    report
}
