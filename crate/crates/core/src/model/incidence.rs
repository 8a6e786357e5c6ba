//! Nonlinear incidence functions and a numerical check of the axioms they
//! must satisfy.

use std::fmt;

use super::ModelError;

/// Incidence function `G` applied to the infectious fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IncidenceModel {
    /// `a·x / (1 + x)` with `0 < a ≤ 1`.
    Holling2 { scale: f64 },
    /// `x / (1 + θ·x)` with `θ > 0`.
    Saturating { theta: f64 },
    /// `x`. Not strictly concave and unbounded; kept for sanity checks.
    Linear,
}

impl IncidenceModel {
    pub fn holling2(scale: f64) -> Result<Self, ModelError> {
        let g = IncidenceModel::Holling2 { scale };
        g.validate()?;
        Ok(g)
    }

    pub fn saturating(theta: f64) -> Result<Self, ModelError> {
        let g = IncidenceModel::Saturating { theta };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        match *self {
            IncidenceModel::Holling2 { scale } if !(scale > 0.0 && scale <= 1.0) => Err(
                ModelError::InvalidIncidence(format!("holling2 scale must lie in (0, 1], got {scale}")),
            ),
            IncidenceModel::Saturating { theta } if !(theta.is_finite() && theta > 0.0) => Err(
                ModelError::InvalidIncidence(format!("saturating theta must be positive, got {theta}")),
            ),
            _ => Ok(()),
        }
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            IncidenceModel::Holling2 { scale } => scale * x / (1.0 + x),
            IncidenceModel::Saturating { theta } => x / (1.0 + theta * x),
            IncidenceModel::Linear => x,
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            IncidenceModel::Holling2 { scale } => scale / ((1.0 + x) * (1.0 + x)),
            IncidenceModel::Saturating { theta } => 1.0 / ((1.0 + theta * x) * (1.0 + theta * x)),
            IncidenceModel::Linear => 1.0,
        }
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        match *self {
            IncidenceModel::Holling2 { scale } => -2.0 * scale / (1.0 + x).powi(3),
            IncidenceModel::Saturating { theta } => -2.0 * theta / (1.0 + theta * x).powi(3),
            IncidenceModel::Linear => 0.0,
        }
    }

    /// `G'(0)`.
    pub fn slope_at_zero(&self) -> f64 {
        self.derivative(0.0)
    }

    /// `lim G(x)` as `x → ∞`, `None` when unbounded.
    pub fn limit(&self) -> Option<f64> {
        match *self {
            IncidenceModel::Holling2 { scale } => Some(scale),
            IncidenceModel::Saturating { theta } => Some(1.0 / theta),
            IncidenceModel::Linear => None,
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            IncidenceModel::Holling2 { .. } => "holling2",
            IncidenceModel::Saturating { .. } => "saturating",
            IncidenceModel::Linear => "linear",
        }
    }
}

impl fmt::Display for IncidenceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            IncidenceModel::Holling2 { scale } => write!(f, "G(x) = {scale}x/(1+x)"),
            IncidenceModel::Saturating { theta } => write!(f, "G(x) = x/(1+{theta}x)"),
            IncidenceModel::Linear => f.write_str("G(x) = x"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    /// A1: `G(0) = 0`.
    ZeroAtOrigin,
    /// A2: strictly increasing.
    Increasing,
    /// A3: `G'' < 0`.
    Concave,
    /// A4: finite limit at infinity.
    BoundedLimit,
    /// A5: `G(x) ≤ x`.
    SubLinear,
    /// A6: `(G(x)/x − G(y)/y)(G(x) − G(y)) ≤ 0` for all pairs.
    RatioMonotone,
}

impl Axiom {
    pub const ALL: [Axiom; 6] = [
        Axiom::ZeroAtOrigin,
        Axiom::Increasing,
        Axiom::Concave,
        Axiom::BoundedLimit,
        Axiom::SubLinear,
        Axiom::RatioMonotone,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Axiom::ZeroAtOrigin => "A1",
            Axiom::Increasing => "A2",
            Axiom::Concave => "A3",
            Axiom::BoundedLimit => "A4",
            Axiom::SubLinear => "A5",
            Axiom::RatioMonotone => "A6",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiomStatus {
    Pass,
    Fail,
    /// Satisfied only in the degenerate sense (e.g. `G'' ≡ 0`).
    Boundary,
}

impl AxiomStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            AxiomStatus::Pass => "pass",
            AxiomStatus::Fail => "fail",
            AxiomStatus::Boundary => "boundary",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub status: AxiomStatus,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn status(&self, axiom: Axiom) -> AxiomStatus {
        self.checks
            .iter()
            .find(|c| c.axiom == axiom)
            .map(|c| c.status)
            .expect("report covers every axiom")
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status == AxiomStatus::Pass)
    }

    /// Renders `A1 = pass` style lines.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!("{} = {}\n", c.axiom.label(), c.status.as_str()));
        }
        out
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{:<3} {:<9} {}", c.axiom.label(), c.status.as_str(), c.detail)?;
        }
        Ok(())
    }
}

/// 200 log-spaced points on `[1e-6, 10]`.
pub fn standard_grid() -> Vec<f64> {
    const N: usize = 200;
    let mut grid: Vec<f64> = (0..N)
        .map(|k| 10f64.powf(-6.0 + 7.0 * k as f64 / (N - 1) as f64))
        .collect();
    grid[0] = 1e-6;
    grid[N - 1] = 10.0;
    grid
}

/// Checks the axioms for one of the shipped incidence models.
pub fn validate_incidence(model: &IncidenceModel, grid: &[f64]) -> Result<AxiomReport, ModelError> {
    validate_fn(|x| model.value(x), grid)
}

/// Checks the axioms for an arbitrary function sampled on `grid`.
///
/// The grid must be strictly increasing and positive, hold at least 50
/// points, and span `[1e-6, 10]`.
pub fn validate_fn(g: impl Fn(f64) -> f64, grid: &[f64]) -> Result<AxiomReport, ModelError> {
    check_grid(grid)?;
    let values: Vec<f64> = grid.iter().map(|&x| g(x)).collect();
    let checks = vec![
        check_origin(&g),
        check_increasing(grid, &values),
        check_concave(grid, &values),
        check_bounded(&g, grid[grid.len() - 1]),
        check_sublinear(grid, &values),
        check_ratio(grid, &values),
    ];
    Ok(AxiomReport { checks })
}

fn check_grid(grid: &[f64]) -> Result<(), ModelError> {
    if grid.len() < 50 {
        return Err(ModelError::InvalidGrid(format!("need at least 50 points, got {}", grid.len())));
    }
    if grid.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(ModelError::InvalidGrid("points must be finite and positive".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ModelError::InvalidGrid("points must be strictly increasing".into()));
    }
    if grid[0] > 1e-6 || grid[grid.len() - 1] < 10.0 {
        return Err(ModelError::InvalidGrid(format!(
            "grid must span [1e-6, 10], got [{}, {}]",
            grid[0],
            grid[grid.len() - 1]
        )));
    }
    Ok(())
}

fn check(axiom: Axiom, status: AxiomStatus, detail: impl Into<String>) -> AxiomCheck {
    AxiomCheck {
        axiom,
        status,
        detail: detail.into(),
    }
}

fn check_origin(g: &impl Fn(f64) -> f64) -> AxiomCheck {
    let at_zero = g(0.0);
    if at_zero == 0.0 {
        check(Axiom::ZeroAtOrigin, AxiomStatus::Pass, "G(0) = 0")
    } else {
        check(Axiom::ZeroAtOrigin, AxiomStatus::Fail, format!("G(0) = {at_zero}"))
    }
}

fn check_increasing(grid: &[f64], values: &[f64]) -> AxiomCheck {
    match (1..grid.len()).find(|&k| !(values[k] > values[k - 1])) {
        None => check(Axiom::Increasing, AxiomStatus::Pass, "first differences positive"),
        Some(k) => check(
            Axiom::Increasing,
            AxiomStatus::Fail,
            format!("G({}) = {} is not above G({}) = {}", grid[k], values[k], grid[k - 1], values[k - 1]),
        ),
    }
}

/// Second divided difference at interior point `k` and its rounding-noise level.
fn second_difference(grid: &[f64], values: &[f64], k: usize) -> (f64, f64) {
    let (left, right) = (grid[k] - grid[k - 1], grid[k + 1] - grid[k]);
    let span = grid[k + 1] - grid[k - 1];
    let second = 2.0 * ((values[k + 1] - values[k]) / right - (values[k] - values[k - 1]) / left) / span;
    let noise = 16.0 * f64::EPSILON * (values[k - 1].abs() + values[k].abs() + values[k + 1].abs())
        / (left.min(right) * span);
    (second, noise)
}

fn check_concave(grid: &[f64], values: &[f64]) -> AxiomCheck {
    let (mut negative, mut flat) = (0usize, None);
    for k in 1..grid.len() - 1 {
        let (second, noise) = second_difference(grid, values, k);
        if second > noise {
            return check(
                Axiom::Concave,
                AxiomStatus::Fail,
                format!("second difference {second:e} > 0 at x = {}", grid[k]),
            );
        }
        if second < -noise {
            negative += 1;
        } else {
            flat.get_or_insert(k);
        }
    }
    match flat {
        None => check(Axiom::Concave, AxiomStatus::Pass, "second differences negative"),
        Some(_) if negative == 0 => {
            check(Axiom::Concave, AxiomStatus::Boundary, "second differences vanish (G'' = 0)")
        }
        Some(k) => check(
            Axiom::Concave,
            AxiomStatus::Fail,
            format!("not strictly concave near x = {}", grid[k]),
        ),
    }
}

fn check_bounded(g: &impl Fn(f64) -> f64, top: f64) -> AxiomCheck {
    let tail: Vec<f64> = (0..=15).map(|k| g(top * 10f64.powi(k))).collect();
    if tail.iter().any(|v| !v.is_finite()) {
        return check(Axiom::BoundedLimit, AxiomStatus::Fail, "non-finite tail value");
    }
    let n = tail.len();
    let last = (tail[n - 1] - tail[n - 2]).abs();
    let previous = (tail[n - 2] - tail[n - 3]).abs();
    let level = tail[n - 1].abs().max(f64::MIN_POSITIVE);
    let noise = 64.0 * f64::EPSILON * level;
    if last <= 1e-6 * level && (last <= previous || last <= noise) {
        check(
            Axiom::BoundedLimit,
            AxiomStatus::Pass,
            format!("tail flattens near {}", tail[n - 1]),
        )
    } else {
        check(
            Axiom::BoundedLimit,
            AxiomStatus::Fail,
            format!("tail still growing: last decade adds {last:e} to {}", tail[n - 1]),
        )
    }
}

fn check_sublinear(grid: &[f64], values: &[f64]) -> AxiomCheck {
    match grid
        .iter()
        .zip(values)
        .find(|(x, v)| **v > **x * (1.0 + 4.0 * f64::EPSILON))
    {
        None => check(Axiom::SubLinear, AxiomStatus::Pass, "G(x) <= x on the grid"),
        Some((x, v)) => check(Axiom::SubLinear, AxiomStatus::Fail, format!("G({x}) = {v} > {x}")),
    }
}

fn check_ratio(grid: &[f64], values: &[f64]) -> AxiomCheck {
    let ratios: Vec<f64> = grid.iter().zip(values).map(|(x, v)| v / x).collect();
    let mut violations = 0usize;
    let mut first = None;
    for a in 0..grid.len() {
        for b in (a + 1)..grid.len() {
            let product = (ratios[a] - ratios[b]) * (values[a] - values[b]);
            let tol = 4.0
                * f64::EPSILON
                * (ratios[a].abs() + ratios[b].abs())
                * (values[a].abs() + values[b].abs());
            if product > tol {
                violations += 1;
                first.get_or_insert((grid[a], grid[b], product));
            }
        }
    }
    let pairs = grid.len() * (grid.len() - 1) / 2;
    match first {
        None => check(
            Axiom::RatioMonotone,
            AxiomStatus::Pass,
            format!("inequality holds on all {pairs} pairs"),
        ),
        Some((x, y, p)) => check(
            Axiom::RatioMonotone,
            AxiomStatus::Fail,
            format!("{violations} of {pairs} pairs violate it, first at ({x}, {y}) with {p:e}"),
        ),
    }
}
