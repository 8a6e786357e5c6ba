//! Drivers behind the `seirs-delay` binary. Each `run_*` function reads the
//! scenario, does the work and writes its artifacts into `out`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use seirs_delay::analysis::{analyze, AnalysisReport};
use seirs_delay::config::{incidence_from_map, ConfigMap, Scenario};
use seirs_delay::diagnostics::{run_default_checks, TheoremCheckReport};
use seirs_delay::model::{standard_grid, validate_incidence, AxiomReport};
use seirs_delay::simulator::{simulate, Trajectory};
use seirs_delay::sweep::{self, SweepAxis, SweepRow};
use seirs_delay::Execution;

/// Where parameters come from and where results go.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub config: Option<PathBuf>,
    pub overrides: Vec<String>,
    pub out: PathBuf,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub stride: Option<usize>,
}

impl RunOptions {
    /// The config file, then `--set` overrides, then the simulation flags.
    pub fn load(&self) -> Result<ConfigMap> {
        let mut map = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                ConfigMap::parse(&text).with_context(|| format!("in {}", path.display()))?
            }
            None => ConfigMap::default(),
        };
        for assignment in &self.overrides {
            map.apply_override(assignment).with_context(|| format!("--set {assignment}"))?;
        }
        let flags = [
            ("sim.dt", self.dt.map(|v| v.to_string())),
            ("sim.t_end", self.t_end.map(|v| v.to_string())),
            ("sim.stride", self.stride.map(|v| v.to_string())),
        ];
        for (key, value) in flags {
            if let Some(value) = value {
                map.set(key, &value)?;
            }
        }
        Ok(map)
    }

    fn scenario(&self) -> Result<Scenario> {
        Ok(Scenario::from_map(&self.load()?)?)
    }

    fn create(&self, name: &str) -> Result<BufWriter<File>> {
        fs::create_dir_all(&self.out).with_context(|| format!("creating {}", self.out.display()))?;
        let path = self.out.join(name);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        Ok(BufWriter::new(file))
    }

    fn write(&self, name: &str, contents: &str) -> Result<()> {
        let mut w = self.create(name)?;
        w.write_all(contents.as_bytes())?;
        w.flush().with_context(|| format!("writing {name}"))
    }
}

fn write_report(opts: &RunOptions, report: &AnalysisReport, checks: Option<&TheoremCheckReport>) -> Result<()> {
    let mut text = report.to_text();
    if let Some(checks) = checks {
        text.push_str("\nchecks\n");
        text.push_str(&checks.to_string());
    }
    opts.write("report.txt", &text)?;
    opts.write("report.kv", &report.to_kv())
}

/// Threshold and equilibrium analysis; writes `report.txt` and `report.kv`.
pub fn run_analyze(opts: &RunOptions) -> Result<AnalysisReport> {
    let s = opts.scenario()?;
    let report = analyze(&s.params, &s.incidence, &s.delays)?;
    write_report(opts, &report, None)?;
    Ok(report)
}

/// Output of [`run_simulate`].
#[derive(Debug)]
pub struct SimulationRun {
    pub trajectory: Trajectory,
    pub analysis: AnalysisReport,
    pub checks: TheoremCheckReport,
}

/// Simulates the scenario and checks the trajectory against the analysis.
///
/// Writes `trajectory.csv`, `events.log`, `checks.kv`, `report.txt` and
/// `report.kv`. Failed checks are reported, not returned as errors.
pub fn run_simulate(opts: &RunOptions) -> Result<SimulationRun> {
    let s = opts.scenario()?;
    let config = s.simulation_config()?;
    let trajectory = simulate(&s.params, &s.incidence, &s.delays, &config).context("simulation aborted")?;
    let analysis = analyze(&s.params, &s.incidence, &s.delays)?;
    let checks = run_default_checks(&trajectory, &s.params, &analysis);

    let mut w = opts.create("trajectory.csv")?;
    trajectory.write_csv(&mut w)?;
    w.flush()?;
    let mut w = opts.create("events.log")?;
    trajectory.write_events(&mut w)?;
    w.flush()?;
    opts.write("checks.kv", &checks.to_kv())?;
    write_report(opts, &analysis, Some(&checks))?;
    Ok(SimulationRun { trajectory, analysis, checks })
}

/// Checks the configured incidence function against the axioms and writes
/// `checks.kv`. Fails when any axiom does not hold.
pub fn run_validate(opts: &RunOptions) -> Result<AxiomReport> {
    let map = opts.load()?;
    let incidence = incidence_from_map(&map)?;
    let report = validate_incidence(&incidence, &standard_grid())?;
    opts.write("checks.kv", &format!("incidence = {incidence}\n{}", report.to_kv()))?;
    if !report.all_pass() {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| c.status.as_str() != "pass")
            .map(|c| c.axiom.label())
            .collect();
        bail!("{incidence} does not satisfy {}\n{report}", failed.join(", "));
    }
    Ok(report)
}

/// Analyses every point of `axis` and writes `sweep.csv`. Point failures
/// are kept in their rows; the sweep fails only when no point succeeds.
pub fn run_sweep(opts: &RunOptions, axis: &SweepAxis, exec: Execution) -> Result<Vec<SweepRow>> {
    let base = opts.load()?;
    let rows = sweep::run_sweep(&base, axis, exec);
    let mut w = opts.create("sweep.csv")?;
    sweep::write_sweep_csv(&mut w, axis, &rows)?;
    w.flush()?;
    if let Some(Err(first)) = rows.first().map(|r| &r.result) {
        if rows.iter().all(|r| r.result.is_err()) {
            bail!("every sweep point failed, first: {first}");
        }
    }
    Ok(rows)
}

/// `out/name` as a display string.
pub fn artifact(out: &Path, name: &str) -> String {
    out.join(name).display().to_string()
}
