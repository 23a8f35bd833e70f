use std::f64::consts::PI;

use qdecide_core::analysis::{asymptotics, decision_time, noise_metric, Decision};
use qdecide_core::dynamics::{decision_series, delta_mu, propagator, TimeGrid};
use qdecide_core::model::build_generator;
use qdecide_core::oracle::{ltp_residual, propagator_residual};
use qdecide_core::presets::{self, figure_by_name};
use qdecide_core::{InitialState, ModelParams, ReservoirState, Scenario};

#[test]
fn free_propagator_residual_is_scalar_central_difference_error() {
    // V = diag(e^{iwt}); the central difference misses by |sin(wh)/h − w| on each entry
    let params = ModelParams { bath_coupling: [0.0, 0.0], ..presets::c1() };
    let gen = build_generator(&params).unwrap();
    let h = 1e-2;
    let prop = propagator(&gen, TimeGrid::new(h, 200)).unwrap();
    let w: f64 = 2.0;
    let expected = ((w * h).sin() / h - w).abs();
    let residual = propagator_residual(&gen, &prop);
    assert!((residual - expected).abs() < 1e-10, "{residual} vs {expected}");
    assert!((expected - w.powi(3) * h * h / 6.0).abs() < 1e-8);
}

#[test]
fn residual_bound_in_smooth_regime() {
    // f_max·dt = 0.05 at dt = 1e-4 for mu_ex = 500
    let params = ModelParams { mu_ex: 500.0, ..presets::c1() };
    let gen = build_generator(&params).unwrap();
    let prop = propagator(&gen, TimeGrid::new(1e-4, 2001)).unwrap();
    let u_norm = gen.u.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let v_max = prop.matrices.iter().map(|m| m.iter().map(|z| z.norm()).fold(0.0, f64::max)).fold(0.0, f64::max);
    let residual = propagator_residual(&gen, &prop);
    assert!(residual <= 1e-5 * u_norm * u_norm * v_max, "residual {residual}");
}

#[test]
fn residual_is_second_order() {
    let gen = build_generator(&ModelParams { mu_ex: 20.0, mu_coop: 5.0, ..presets::c2() }).unwrap();
    let r1 = propagator_residual(&gen, &propagator(&gen, TimeGrid::spanning(1.0, 2e-3)).unwrap());
    let r2 = propagator_residual(&gen, &propagator(&gen, TimeGrid::spanning(1.0, 1e-3)).unwrap());
    let ratio = r1 / r2;
    assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
}

#[test]
fn interference_equals_ltp_residual_early_on() {
    let mut s = figure_by_name("fig1-right").unwrap().scenario();
    s.t_max = 0.02;
    let ltp = ltp_residual(&s).unwrap();
    let k = ltp.grid.index_of(0.01).unwrap();
    let gen = build_generator(&s.params).unwrap();
    let prop = propagator(&gen, ltp.grid).unwrap();
    let dmu = delta_mu(prop.at(k), &s.initial);
    for (r, d) in ltp.residual.iter().zip(dmu) {
        assert!((r[k] - d).abs() < 1e-8);
    }
}

#[test]
fn phased_superposition_violates_ltp_with_sign_changes() {
    let s = figure_by_name("fig1-right").unwrap().scenario();
    let ltp = ltp_residual(&s).unwrap();
    for j in 0..2 {
        let early = &ltp.residual[j][..1000];
        assert!(early.iter().any(|r| r.abs() > 1e-2));
        let flips = early.windows(2).filter(|w| w[0].signum() != w[1].signum() && w[0] != 0.0).count();
        assert!(flips >= 2, "player {} residual changes sign {flips} times", j + 1);
    }
}

#[test]
fn basis_states_obey_ltp() {
    let base = figure_by_name("fig3-left").unwrap().scenario();
    for (k, l) in qdecide_core::algebra::BASIS_LABELS {
        let ltp = ltp_residual(&base.with_initial(InitialState::basis_state(k, l))).unwrap();
        assert!(ltp.max_abs(1) <= 1e-12 && ltp.max_abs(2) <= 1e-12);
    }
}

#[test]
fn decoupled_mean_approaches_bath_occupation() {
    let lambda: f64 = 0.8;
    let gamma = PI * lambda * lambda;
    let s = Scenario {
        params: ModelParams {
            omega: [1.0, 1.5],
            bath_slope: [1.0, 1.0],
            bath_coupling: [lambda, 0.0],
            mu_ex: 0.0,
            mu_coop: 0.0,
        },
        reservoir: ReservoirState::new(0.75, 0.0).unwrap(),
        initial: InitialState::basis_state(0, 0),
        t_max: 8.0 / gamma,
        dt: 1e-3,
        label: "decoupled".into(),
    };
    let series = decision_series(&s).unwrap();
    let report = asymptotics(&series, 0.2, 0.01).unwrap();
    assert!((report.players[0].mean - 0.75).abs() < 1e-3);
    assert!(report.players[0].converged);
}

#[test]
fn phases_delay_the_decision() {
    let left = decision_series(&figure_by_name("fig1-left").unwrap().scenario()).unwrap();
    let right = decision_series(&figure_by_name("fig1-right").unwrap().scenario()).unwrap();
    let eps = 1e-3;
    let window = 0.05;
    let a = decision_time(&left, eps, window).unwrap();
    let b = decision_time(&right, eps, window).unwrap();
    for j in 0..2 {
        let ta = a[j].tau.expect("C_alpha1 settles");
        let tb = b[j].tau.unwrap_or(f64::INFINITY);
        assert!(tb >= ta, "player {}: {tb} < {ta}", j + 1);
    }
}

#[test]
fn full_bath_pushes_both_players_to_one() {
    let series = decision_series(&figure_by_name("fig2-left").unwrap().scenario()).unwrap();
    let out = decision_time(&series, 0.01, 0.05).unwrap();
    for o in &out {
        assert_eq!(o.decision, Some(Decision::One));
    }
}

#[test]
fn phased_state_is_noisier_mid_transient() {
    let left = decision_series(&figure_by_name("fig3-left").unwrap().scenario()).unwrap();
    let right = decision_series(&figure_by_name("fig3-right").unwrap().scenario()).unwrap();
    let a = noise_metric(&left, 0.05, 0.25).unwrap();
    let b = noise_metric(&right, 0.05, 0.25).unwrap();
    assert!(b[0] > a[0] && b[1] > a[1]);
}
