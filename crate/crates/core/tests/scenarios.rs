use std::f64::consts::PI;
use std::time::Instant;

use oat_core::experiments::{preset_by_name, presets, run_scenario, run_sweep, ModelKind};
use oat_core::model::ModelParams;
use oat_core::observables::fidelity;
use oat_core::propagation::{evolve_lindblad, lindblad_spec, MasterEquation, TimeGrid};
use oat_core::spin::{collective_operators, css_state, rotate, Axis, CssSpec, SpinEnsemble};

#[test]
fn every_preset_runs_quickly_with_sane_output() {
    for cfg in presets() {
        let start = Instant::now();
        let r = run_scenario(&cfg).unwrap();
        let secs = start.elapsed().as_secs_f64();
        assert!(secs < 60.0, "{} took {secs} s", cfg.id);
        assert!(r.metadata.n_max.is_none_or(|n| n <= 20), "{}", cfg.id);
        assert_eq!(r.rows.len(), cfg.time.steps + 1);
        for row in &r.rows {
            assert!(row.xi2.is_finite() && row.xi2 > 0.0, "{}", cfg.id);
            assert!((0.0..=1.0 + 1e-9).contains(&row.fidelity_ghz), "{}", cfg.id);
            assert!(row.purity <= 1.0 + 1e-9 && row.purity > 0.0);
            assert!(row.trace_error < 1e-10);
            assert!(row.min_variance > 0.0);
        }
        assert!((r.rows[0].xi2 - 1.0).abs() < 1e-9, "{} starts from a coherent spin state", cfg.id);
    }
}

#[test]
fn zero_dissipation_sweeps_agree() {
    let run = |name: &str| run_sweep(&preset_by_name(name).unwrap(), "gamma", &[0.0], 1, false).unwrap().summary()[0].clone();
    let exchange = run("fig4_exchange");
    let doubled = run("fig4_dephasing_doubled");
    assert!((exchange.min_xi2 - doubled.min_xi2).abs() < 1e-8);
    assert!((exchange.max_fidelity - doubled.max_fidelity).abs() < 1e-8);
}

#[test]
fn zero_dissipation_dephasing_is_slowed_exchange_twist() {
    // -(χ/2)Sx² from the pole at 2t matches χSy² from the x equator at t up to a rotation
    let ens = SpinEnsemble::new(10).unwrap();
    let ops = collective_operators(ens);
    let grid = TimeGrid::uniform(0.0, 2.0, 40).unwrap();
    let half_grid = TimeGrid::uniform(0.0, 1.0, 40).unwrap();
    let p = ModelParams::new(10).with_gamma(0.0);
    let dephasing = evolve_lindblad(
        &lindblad_spec(MasterEquation::TwistDephasing, &p, 0.0, &ops).unwrap(),
        &css_state(ens, CssSpec::north_pole()),
        &grid,
    )
    .unwrap();
    let exchange = evolve_lindblad(
        &lindblad_spec(MasterEquation::TwistExchange, &p, 0.0, &ops).unwrap(),
        &css_state(ens, CssSpec::equator_x()),
        &half_grid,
    )
    .unwrap();
    for (a, b) in dephasing.iter().zip(&exchange) {
        let xa = oat_core::observables::squeezing_parameter(a, &ops).unwrap().xi2;
        let xb = oat_core::observables::squeezing_parameter(b, &ops).unwrap().xi2;
        assert!((xa - xb).abs() < 1e-8);
    }
}

#[test]
fn dispersive_ghz_fidelity_at_quarter_turn() {
    let r = run_scenario(&preset_by_name("fig2b_red").unwrap()).unwrap();
    let row = r.rows.iter().find(|row| (row.t - PI / 2.0).abs() < 1e-12).unwrap();
    assert!((row.fidelity_ghz - 0.5 * (1.0 + (-2.0f64).exp())).abs() < 1e-4);
}

#[test]
fn pulse_train_prepares_ghz_state() {
    let r = run_scenario(&preset_by_name("fig3b_cyan").unwrap()).unwrap();
    let peak = r.rows.iter().filter(|row| (row.t - PI / 2.0).abs() < 0.25).map(|row| row.fidelity_ghz).fold(0.0, f64::max);
    assert!(peak > 0.95, "{peak}");
}

#[test]
fn lamb_shift_compensation_tightens_the_full_model() {
    let mut cfg = preset_by_name("fig2a_red").unwrap();
    cfg.n_atoms = 2;
    cfg.time.t_end = 0.2;
    cfg.time.steps = 4;
    let reference = run_scenario(&cfg).unwrap();
    let deviation = |lamb_compensation: bool| {
        let mut full = cfg.clone();
        full.model = ModelKind::FullTc { ratio: 20.0, lamb_compensation };
        let r = run_scenario(&full).unwrap();
        r.rows.iter().zip(&reference.rows).map(|(a, b)| (a.sx_mean - b.sx_mean).abs()).fold(0.0, f64::max)
    };
    let (with, without) = (deviation(true), deviation(false));
    assert!(with < 0.05, "{with}");
    assert!(with < without, "{with} vs {without}");
}

#[test]
fn ideal_twists_reach_ghz_at_quarter_turn() {
    let ens = SpinEnsemble::new(10).unwrap();
    let ops = collective_operators(ens);
    for (axis, strength, init, flip) in [
        (Axis::Y, 1.0, CssSpec::equator_x(), Axis::Z),
        (Axis::X, -0.5, CssSpec::north_pole(), Axis::X),
    ] {
        let psi0 = css_state(ens, init);
        let target = oat_core::experiments::ghz_target(ens, &ops, &psi0, (axis, strength)).unwrap();
        // the target is a cat state of two antipodal coherent states
        let f = fidelity(&psi0, &target).unwrap();
        assert!((f - 0.5).abs() < 1e-9, "{f}");
        let opposite = rotate(&psi0, &ops, flip, PI).unwrap();
        assert!((fidelity(&opposite, &target).unwrap() - 0.5).abs() < 1e-9);
    }
}
