mod common;

use common::*;
use seirs_delay::analysis::analyze;
use seirs_delay::diagnostics::*;
use seirs_delay::model::{Compartment, State};
use seirs_delay::simulator::{simulate, SimulationConfig, Trajectory};

fn run(beta: f64, x0: State, t_end: f64, dt: f64, stride: usize) -> Trajectory {
    let mut cfg = SimulationConfig::new(x0, t_end);
    cfg.dt = dt;
    cfg.stride = stride;
    simulate(&table(beta), &holling(), &table_delays(), &cfg).unwrap()
}

#[test]
fn extinction_run_checks() {
    let p = table(BETA_EXTINCTION);
    let traj = run(BETA_EXTINCTION, initial_fractions(), 1000.0, 1e-3, 10);
    let report = analyze(&p, &holling(), &table_delays()).unwrap();
    let lambda = report.lambda.unwrap();
    let est = lyapunov_estimate(&traj, tail_window(&traj)).unwrap();
    assert!(est.tail() <= -lambda + LYAPUNOV_MARGIN, "{}", est.tail());
    assert!(verify_feasible_region(&traj, &p).pass);
    assert_eq!(classify_outcome(&traj, 1e-3, None), Outcome::Extinct);

    let checks = run_default_checks(&traj, &p, &report);
    assert!(checks.get("extinction_rate").unwrap().pass);
    assert!(checks.get("feasible_region").unwrap().pass);
    assert!(checks.get("outcome").unwrap().pass);
    assert_eq!(checks.outcome, Some(Outcome::Extinct));
    let kv = checks.to_kv();
    assert!(kv.starts_with("outcome=Extinct\n"));
    assert!(kv.contains("feasible_region.pass=true\n"));
}

#[test]
fn population_relaxes_without_infection() {
    let p = table(0.0);
    let dt = 1e-2;
    let x0 = State::new(0.6, 0.2, 0.0, 0.1);
    let traj = run(0.0, x0, 200.0, dt, 1);
    let entry = verify_feasible_region(&traj, &p);
    assert!(entry.pass, "{}", entry.detail);
    assert!(entry.observed <= 1.0 + 10.0 * dt);
    for (k, &t) in traj.times.iter().enumerate() {
        let exact = 1.0 - 0.1 * (-p.death_rate * t).exp();
        assert!((traj.n[k] - exact).abs() < 1e-10, "t = {t}");
    }
    assert!(traj.n.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn running_mean_survives_thinning() {
    let dt = 1e-3;
    let full = run(BETA_EXTINCTION, initial_fractions(), 100.0, dt, 1);
    let thin = run(BETA_EXTINCTION, initial_fractions(), 100.0, dt, 50);
    let a = time_average(&full, Compartment::Susceptible, (50.0, 100.0)).unwrap().last();
    let b = time_average(&thin, Compartment::Susceptible, (50.0, 100.0)).unwrap().last();
    assert!((a - b).abs() < 50.0 * dt, "{a} vs {b}");
}

#[test]
fn raising_threshold_keeps_extinct() {
    let traj = run(BETA_EXTINCTION, initial_fractions(), 200.0, 1e-2, 1);
    let mut extinct = false;
    for eps in [1e-12, 1e-9, 1e-6, 1e-3, 1e-1, 1.0] {
        let now = classify_outcome(&traj, eps, None) == Outcome::Extinct;
        assert!(now || !extinct, "flipped at {eps}");
        extinct |= now;
    }
    assert!(extinct);
}

#[test]
fn report_text_marks_failures() {
    let mut traj = run(BETA_EXTINCTION, initial_fractions(), 10.0, 1e-2, 1);
    traj.s[3] = -0.5;
    let p = table(BETA_EXTINCTION);
    let analysis = analyze(&p, &holling(), &table_delays()).unwrap();
    let checks = run_default_checks(&traj, &p, &analysis);
    assert!(!checks.all_pass());
    assert!(checks.to_string().contains("[FAIL] feasible_region"));
}
