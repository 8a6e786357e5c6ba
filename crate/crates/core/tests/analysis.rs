mod common;

use common::*;
use rand::{Rng, SeedableRng};
use seirs_delay::analysis::*;
use seirs_delay::model::{DelayDensity, DelaySpec, IncidenceModel, DEFAULT_NODES};

#[test]
fn reproduction_numbers_from_table() {
    assert!(rel(brn_constant_delays(&table(BETA_EXTINCTION)), 0.2498732) < 1e-6);
    assert!(rel(brn_constant_delays(&table(BETA_PERSISTENCE)), 92.45307) < 1e-5);
    let p = table(BETA_EXTINCTION);
    let removal = 8.476678e-06 + 0.0001761252 + 0.08571429;
    let by_hand = (0.02146383 + 0.08571429) / removal;
    assert!(rel(brn_random_delays(&p), by_hand) < 1e-9);
    assert!((brn_random_delays(&p) - 1.2477241).abs() < 1e-6);
}

#[test]
fn extinction_rate_from_table() {
    let p = table(BETA_EXTINCTION);
    let d = table_delays();
    let e = espr(&p, &d.vector, &d.host).unwrap();
    let (regime, lambda) = extinction_check(&p, e);
    assert_eq!(regime, Regime::ExtinctionByR0);
    assert!(rel(lambda.unwrap(), 0.06443506) < 1e-6);
}

#[test]
fn survival_expectation_point_masses() {
    let p = table(BETA_PERSISTENCE);
    let d = table_delays();
    let e = espr(&p, &d.vector, &d.host).unwrap();
    assert_eq!(e, (-42.85714f64 * 0.105).exp() * (-8.476678e-06f64 * 0.175).exp());
    assert!(rel(e, 0.01110898) < 1e-6);
    assert!(rel(1.0 / brn_constant_delays(&p), 0.0108163) < 1e-5);
    let (regime, lambda) = extinction_check(&p, e);
    assert_eq!(regime, Regime::EndemicCandidate);
    assert_eq!(lambda, None);
}

/// Stratified Monte Carlo estimate of `E[exp(−μ_v·T1 − μ·T2)]` for
/// `T1 ~ U[0, 0.21]`, `T2 = 0.175`.
fn monte_carlo_espr(samples: usize) -> f64 {
    let p = table(BETA_PERSISTENCE);
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    let total: f64 = (0..samples)
        .map(|k| {
            let u = (k as f64 + rng.random::<f64>()) / samples as f64;
            (-p.vector_death_rate * 0.21 * u).exp()
        })
        .sum();
    total / samples as f64 * (-p.death_rate * 0.175).exp()
}

#[test]
fn survival_expectation_uniform_vector_delay() {
    let p = table(BETA_PERSISTENCE);
    let oracle = monte_carlo_espr(1_000_000);
    let host = DelaySpec::PointMass(0.175);
    let fine = DelaySpec::Density(DelayDensity::uniform(0.0, 0.21, 1025).unwrap());
    let v = espr(&p, &fine, &host).unwrap();
    assert!((v - oracle).abs() < 1e-5, "{v} vs {oracle}");
    // The default 257-node rule is second order; it lands about 1.1e-5 high here.
    let coarse = DelaySpec::Density(DelayDensity::uniform(0.0, 0.21, DEFAULT_NODES).unwrap());
    let v = espr(&p, &coarse, &host).unwrap();
    assert!((v - oracle).abs() < 2e-5, "{v} vs {oracle}");
}

#[test]
fn no_equilibrium_below_threshold() {
    let p = table(BETA_EXTINCTION);
    assert_eq!(endemic_equilibrium(&p, &holling(), &table_delays()).unwrap(), None);
}

#[test]
fn saturating_equilibrium_matches_high_precision_solution() {
    // Reference values from a 40-digit Newton solve of the steady-state system.
    let p = table(BETA_PERSISTENCE);
    let g = IncidenceModel::saturating(0.05).unwrap();
    let d = table_delays();
    let eq = endemic_equilibrium(&p, &g, &d).unwrap().expect("equilibrium exists");
    let x = eq.state;
    assert!(rel(x.s, 0.9737115825962983) < 1e-9);
    assert!(rel(x.e, 1.7982849041529286e-05) < 1e-8);
    assert!(rel(x.i, 0.0011962792408163057) < 1e-9);
    assert!(rel(x.r, 0.00021831903639880543) < 1e-9);
    assert!(eq.residual.abs() < 1e-12 * p.birth_rate);
    let m = DelayMoments::compute(&p, &d).unwrap();
    for r in equilibrium_residuals(&p, &g, &m, &x) {
        assert!(r.abs() < 1e-10, "{r}");
    }
}

#[test]
fn equilibrium_exists_iff_h_positive_at_zero() {
    let d = table_delays();
    let g = IncidenceModel::saturating(0.05).unwrap();
    for beta in [0.05, 0.5, 5.0, 7.7, 7.8, 7.9, 8.0, 20.0, 100.0] {
        let p = table(beta);
        let m = DelayMoments::compute(&p, &d).unwrap();
        let h0 = EquilibriumFunction::new(&p, &g, m).at_zero();
        let eq = endemic_equilibrium(&p, &g, &d).unwrap();
        assert_eq!(eq.is_some(), h0 > 0.0, "beta = {beta}");
    }
}

#[test]
fn table_holling_has_no_positive_root() {
    let p = table(BETA_PERSISTENCE);
    let d = table_delays();
    let m = DelayMoments::compute(&p, &d).unwrap();
    let g = holling();
    let h = EquilibriumFunction::new(&p, &g, m);
    assert!(h.at_zero() < 0.0);
    assert_eq!(endemic_equilibrium(&p, &holling(), &d).unwrap(), None);
}

#[test]
fn permanence_on_compact_parameters() {
    let (p, d, g) = compact();
    let eq = endemic_equilibrium(&p, &g, &d).unwrap().unwrap();
    assert!(rel(eq.state.s, 0.5049387454770707) < 1e-10);
    assert!(rel(eq.state.i, 0.33792389360989) < 1e-10);
    let b = permanence_bounds(&p, &g, &d, &eq, None, None).unwrap();
    assert!(rel(b.q_bar, 0.6470853148946379) < 1e-10);
    assert!(rel(b.q, 0.6470853148946379 / 2.0) < 1e-10);
    assert_eq!(b.rho, 8.0);
    assert!(rel(b.s_triangle, 0.600597061456872) < 1e-10);
    assert!(b.s_triangle > eq.state.s);
    assert!(rel(b.v2, 0.006137370492253167) < 1e-10);
    assert!(rel(b.v1, 3.0 / 13.0) < 1e-14);
    assert!((b.h - 0.2).abs() < 1e-15);
}

#[test]
fn permanence_rejects_bad_choices() {
    let (p, d, g) = compact();
    let eq = endemic_equilibrium(&p, &g, &d).unwrap().unwrap();
    let q_bar = permanence_bounds(&p, &g, &d, &eq, None, None).unwrap().q_bar;
    assert!(matches!(
        permanence_bounds(&p, &g, &d, &eq, Some(q_bar), None),
        Err(AnalysisError::FractionOutOfRange { .. })
    ));
    assert!(matches!(
        permanence_bounds(&p, &g, &d, &eq, None, Some(1.0)),
        Err(AnalysisError::EnvelopeTooLow { .. })
    ));
    assert!(matches!(permanence_bounds(&p, &g, &d, &eq, None, Some(-1.0)), Err(AnalysisError::InvalidRho(_))));
}

#[test]
fn floors_from_table() {
    let p = table(BETA_PERSISTENCE);
    assert!(rel(susceptible_floor(&p, &holling()), 4.269316e-05) < 1e-6);
    // The printed exponent coefficient is (μ+d+α)·h rounded to 8 decimals.
    let h = 0.105 + 0.175;
    assert!((p.removal_rate() * h - 0.02405169).abs() < 5e-9);
    for (q, rho) in [(0.1, 1.0), (0.25, 2.0), (0.5, 0.25), (0.9, 0.5)] {
        let v2 = infectious_floor(&p, 0.04550565, q, rho, h);
        let closed_form = 0.04550565 * q * (-0.02405169 * (1.0 + rho)).exp();
        assert!(rel(v2, closed_form) < 1e-9, "{q} {rho}");
    }
}

#[test]
fn report_for_both_scenarios() {
    let d = table_delays();
    let r = analyze(&table(BETA_EXTINCTION), &holling(), &d).unwrap();
    assert_eq!(r.regime, Regime::ExtinctionByR0);
    assert!(r.endemic.is_none() && r.permanence.is_none());
    let kv = r.to_kv();
    assert!(kv.contains("regime=ExtinctionByR0\n"));
    assert!(kv.contains("lambda=0.0644350"));

    let r = analyze(&table(BETA_PERSISTENCE), &holling(), &d).unwrap();
    assert_eq!(r.regime, Regime::EndemicCandidate);
    assert!(r.lambda.is_none());
    assert!(!r.existence_condition);
    let text = r.to_text();
    assert!(text.contains("EndemicCandidate"));
    assert!(r.to_kv().contains("lambda=none\n"));
}

#[test]
fn report_lists_permanence_when_available() {
    let (p, d, g) = compact();
    let r = analyze(&p, &g, &d).unwrap();
    assert!(r.permanence.is_some());
    assert!(!r.unit_ratio || p.birth_rate == p.death_rate);
    assert!(r.to_kv().contains("permanence.rho=8\n"));
}
