use std::fmt::Write as _;

use crate::model::{DelaySet, DimensionlessParams, IncidenceModel, State};

use super::{
    brn_constant_delays, brn_random_delays, endemic_equilibrium, existence_condition, extinction_check,
    permanence_bounds, susceptible_floor, AnalysisError, DelayMoments, EndemicEquilibrium,
    EquilibriumFunction, PermanenceBounds, Regime,
};

/// Every threshold quantity for one parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub dfe: State,
    pub r0_star: f64,
    pub r0_random: f64,
    pub espr: f64,
    pub moments: DelayMoments,
    /// `lim H(I)` as `I → 0⁺`; an endemic state exists iff this is positive.
    pub h_at_zero: f64,
    /// Whether the stated sufficient ESPR condition holds.
    pub existence_condition: bool,
    pub regime: Regime,
    pub lambda: Option<f64>,
    pub endemic: Option<EndemicEquilibrium>,
    pub susceptible_floor: f64,
    pub permanence: Option<PermanenceBounds>,
    /// Why the permanence floors could not be formed, when an endemic state exists.
    pub permanence_error: Option<String>,
    /// `B/μ = 1` within [`DimensionlessParams::UNIT_RATIO_TOL`].
    pub unit_ratio: bool,
}

/// Runs the full analysis with default permanence choices.
pub fn analyze(
    p: &DimensionlessParams,
    g: &IncidenceModel,
    delays: &DelaySet,
) -> Result<AnalysisReport, AnalysisError> {
    p.validate()?;
    g.validate()?;
    let moments = DelayMoments::compute(p, delays)?;
    let espr = moments.espr;
    let (regime, lambda) = extinction_check(p, espr);
    let h_at_zero = if p.transmission > 0.0 {
        EquilibriumFunction::new(p, g, moments).at_zero()
    } else {
        f64::NEG_INFINITY
    };
    let endemic = endemic_equilibrium(p, g, delays)?;
    let (permanence, permanence_error) = match &endemic {
        Some(eq) => match permanence_bounds(p, g, delays, eq, None, None) {
            Ok(b) => (Some(b), None),
            Err(e) => (None, Some(e.to_string())),
        },
        None => (None, None),
    };
    Ok(AnalysisReport {
        dfe: State::new(p.dfe_susceptible(), 0.0, 0.0, 0.0),
        r0_star: brn_constant_delays(p),
        r0_random: brn_random_delays(p),
        espr,
        moments,
        h_at_zero,
        existence_condition: existence_condition(p, g, espr),
        regime,
        lambda,
        endemic,
        susceptible_floor: susceptible_floor(p, g),
        permanence,
        permanence_error,
        unit_ratio: p.has_unit_ratio(),
    })
}

impl AnalysisReport {
    pub fn inv_r0_star(&self) -> f64 {
        1.0 / self.r0_star
    }

    /// Flat `key=value` lines.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k}={v}");
        };
        kv("dfe.S", self.dfe.s.to_string());
        kv("dfe.E", self.dfe.e.to_string());
        kv("dfe.I", self.dfe.i.to_string());
        kv("dfe.R", self.dfe.r.to_string());
        kv("unit_ratio", self.unit_ratio.to_string());
        kv("r0_star", self.r0_star.to_string());
        kv("inv_r0_star", self.inv_r0_star().to_string());
        kv("r0_random", self.r0_random.to_string());
        kv("espr", self.espr.to_string());
        kv("h_at_zero", self.h_at_zero.to_string());
        kv("existence_condition", self.existence_condition.to_string());
        kv("regime", self.regime.to_string());
        kv("lambda", opt(self.lambda));
        kv("endemic", self.endemic.is_some().to_string());
        if let Some(eq) = &self.endemic {
            kv("endemic.S", eq.state.s.to_string());
            kv("endemic.E", eq.state.e.to_string());
            kv("endemic.I", eq.state.i.to_string());
            kv("endemic.R", eq.state.r.to_string());
            kv("endemic.residual", eq.residual.to_string());
        }
        kv("susceptible_floor", self.susceptible_floor.to_string());
        if let Some(b) = &self.permanence {
            kv("permanence.v1", b.v1.to_string());
            kv("permanence.v2", b.v2.to_string());
            kv("permanence.q_bar", b.q_bar.to_string());
            kv("permanence.q", b.q.to_string());
            kv("permanence.rho", b.rho.to_string());
            kv("permanence.s_triangle", b.s_triangle.to_string());
            kv("permanence.h", b.h.to_string());
        }
        if let Some(e) = &self.permanence_error {
            kv("permanence.error", e.clone());
        }
        out
    }

    /// Human-readable report.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(w, "Disease-free equilibrium: S = {}, E = I = R = 0", self.dfe.s);
        if !self.unit_ratio {
            let _ = writeln!(w, "  warning: B/mu differs from 1");
        }
        let _ = writeln!(w, "R0* (constant delays):     {}", self.r0_star);
        let _ = writeln!(w, "1/R0*:                     {}", self.inv_r0_star());
        let _ = writeln!(w, "R0 (random delays, prop.): {}", self.r0_random);
        let _ = writeln!(w, "ESPR:                      {}", self.espr);
        let _ = writeln!(w, "Regime:                    {}", self.regime);
        match self.lambda {
            Some(l) => {
                let _ = writeln!(w, "Extinction rate lambda:    {l}");
            }
            None => {
                let _ = writeln!(w, "Extinction rate lambda:    none");
            }
        }
        let _ = writeln!(w);
        let _ = writeln!(w, "H(0+):                     {}", self.h_at_zero);
        let _ = writeln!(w, "ESPR existence condition:  {}", yes_no(self.existence_condition));
        match &self.endemic {
            Some(eq) => {
                let s = &eq.state;
                let _ = writeln!(w, "Endemic equilibrium:");
                let _ = writeln!(w, "  S* = {}", s.s);
                let _ = writeln!(w, "  E* = {}", s.e);
                let _ = writeln!(w, "  I* = {}", s.i);
                let _ = writeln!(w, "  R* = {}", s.r);
                let _ = writeln!(w, "  H(I*) = {:e}", eq.residual);
            }
            None => {
                let _ = writeln!(w, "Endemic equilibrium:       none");
            }
        }
        let _ = writeln!(w);
        let _ = writeln!(w, "Susceptible floor v1:      {}", self.susceptible_floor);
        if let Some(b) = &self.permanence {
            let _ = writeln!(w, "Permanence bounds (h = {}):", b.h);
            let _ = writeln!(w, "  q_bar = {}", b.q_bar);
            let _ = writeln!(w, "  q = {}, rho = {}", b.q, b.rho);
            let _ = writeln!(w, "  S_triangle = {}", b.s_triangle);
            let _ = writeln!(w, "  v2 = {}", b.v2);
        }
        if let Some(e) = &self.permanence_error {
            let _ = writeln!(w, "Permanence bounds unavailable: {e}");
        }
        out
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| x.to_string())
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "holds"
    } else {
        "does not hold"
    }
}
