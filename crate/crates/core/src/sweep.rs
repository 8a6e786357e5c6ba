//! One-dimensional parameter sweeps over a scenario.

use std::io::{self, Write};

use crate::analysis::{analyze, AnalysisReport};
use crate::config::{canonical_key, is_numeric_key, ConfigError, ConfigMap, Scenario};
use crate::exec::{self, Execution};

/// `key:lo:hi:n`, `n` evenly spaced values from `lo` to `hi` inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub key: String,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl SweepAxis {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let bad = |message: &str| ConfigError::InvalidValue {
            key: "sweep".into(),
            value: text.into(),
            line: None,
            message: message.into(),
        };
        let parts: Vec<&str> = text.rsplitn(4, ':').collect();
        let [count, hi, lo, key] = parts[..] else {
            return Err(bad("expected key:lo:hi:n"));
        };
        let key = canonical_key(key).ok_or_else(|| ConfigError::UnknownKey { key: key.into(), line: None })?;
        if !is_numeric_key(&key) {
            return Err(bad("key does not hold a number"));
        }
        let lo: f64 = lo.trim().parse().map_err(|_| bad("lo is not a number"))?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad("hi is not a number"))?;
        let count: usize = count.trim().parse().map_err(|_| bad("n is not a positive integer"))?;
        if count == 0 || !lo.is_finite() || !hi.is_finite() {
            return Err(bad("need n >= 1 and finite bounds"));
        }
        Ok(Self { key, lo, hi, count })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| if k + 1 == self.count { self.hi } else { self.lo + step * k as f64 })
            .collect()
    }
}

/// Result for one sweep point; failures are kept in the row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub result: Result<AnalysisReport, String>,
}

fn analyze_point(base: &ConfigMap, key: &str, value: f64) -> Result<AnalysisReport, String> {
    let mut map = base.clone();
    map.set(key, &value.to_string()).map_err(|e| e.to_string())?;
    let scenario = Scenario::from_map(&map).map_err(|e| e.to_string())?;
    analyze(&scenario.params, &scenario.incidence, &scenario.delays).map_err(|e| e.to_string())
}

/// Analyses every point of `axis`; rows follow the axis order.
pub fn run_sweep(base: &ConfigMap, axis: &SweepAxis, exec: Execution) -> Vec<SweepRow> {
    let values = axis.values();
    let results = exec::map(&values, exec, |&v| analyze_point(base, &axis.key, v));
    values.into_iter().zip(results).map(|(value, result)| SweepRow { value, result }).collect()
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// CSV with one row per sweep point.
pub fn write_sweep_csv(mut w: impl Write, axis: &SweepAxis, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(w, "{},r0_star,r0_random,espr,regime,lambda,S_star,I_star,v1,error", axis.key)?;
    for row in rows {
        match &row.result {
            Ok(r) => {
                let eq = r.endemic.map(|e| e.state);
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{},",
                    row.value,
                    r.r0_star,
                    r.r0_random,
                    r.espr,
                    r.regime,
                    cell(r.lambda),
                    cell(eq.map(|s| s.s)),
                    cell(eq.map(|s| s.i)),
                    r.susceptible_floor
                )?;
            }
            Err(e) => writeln!(w, "{},,,,,,,,,\"{}\"", row.value, e.replace('"', "'"))?,
        }
    }
    Ok(())
}
