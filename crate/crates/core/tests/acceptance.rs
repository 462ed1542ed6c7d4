//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use oat_core::analytics::{
    fit_power_law, ghz_fidelity_closed_form, optimal_squeezing, reduced_spin_state, ScalingRegime, VarianceFormula,
};
use oat_core::boson::{input_state, truncation_recommendation, BosonInput, BosonSpace};
use oat_core::experiments::{preset_by_name, run_scenario, run_sweep, ResultSeries};
use oat_core::model::{h_atomic_drive, h_eff_driven, h_eff_tc, h_full_driven_tc, step_phase, AtomicDrive, CompositeOperators, DriveWaveform, ModelParams};
use oat_core::numerics::{kron_states, partial_trace_boson, max_abs_diff};
use oat_core::observables::{fidelity, mixed_fidelity, purity};
use oat_core::propagation::{evolve_lindblad, evolve_unitary_static, lindblad_spec, MasterEquation, TimeGrid};
use oat_core::spin::{collective_operators, css_state, oat_state, rotate, Axis, CssSpec, SpinEnsemble};
use oat_core::QuantumState;

struct Report {
    failed: usize,
}

impl Report {
    fn check(&mut self, id: &str, ok: bool, detail: String) {
        if !ok {
            self.failed += 1;
        }
        println!("{} {id}: {detail}", if ok { "PASS" } else { "FAIL" });
    }

    fn info(&self, id: &str, detail: String) {
        println!("INFO {id}: {detail}");
    }
}

fn composite(n: usize, input: &BosonInput, n_max: usize) -> (CompositeOperators, QuantumState) {
    let ens = SpinEnsemble::new(n).unwrap();
    let space = BosonSpace::new(n_max);
    let psi = kron_states(&css_state(ens, CssSpec::equator_x()), &input_state(space, input).unwrap()).unwrap();
    (CompositeOperators::new(ens, space), psi)
}

fn sample_at(series: &ResultSeries, t: f64) -> usize {
    series.rows.iter().position(|r| (r.t - t).abs() < 1e-12).expect("sample time on grid")
}

fn max_rel_dev(a: &ResultSeries, b: &ResultSeries, t_max: f64) -> f64 {
    a.rows
        .iter()
        .zip(&b.rows)
        .filter(|(r, _)| r.t <= t_max + 1e-12)
        .map(|(r, s)| {
            assert!((r.t - s.t).abs() < 1e-12);
            ((r.xi2 - s.xi2) / s.xi2).abs()
        })
        .fold(0.0, f64::max)
}

fn criterion1(rep: &mut Report) {
    let start = Instant::now();
    let expected = 0.5 * (1.0 + (-2.0f64).exp());
    let series = run_scenario(&preset_by_name("fig2b_red").unwrap()).unwrap();
    let f = series.rows[sample_at(&series, series.rows[200].t)].fidelity_ghz;
    assert!((series.rows[200].t - PI / 2.0).abs() < 1e-12);
    let closed = ghz_fidelity_closed_form(&BosonInput::coherent(1.0));
    let secs = start.elapsed().as_secs_f64();
    rep.check("1a numeric GHZ fidelity", (f - expected).abs() < 1e-4, format!("F = {f:.7}, expected {expected:.7}"));
    rep.check("1b closed-form GHZ fidelity", (closed - expected).abs() < 1e-10, format!("F = {closed:.12}"));
    rep.check("1c runtime", secs < 5.0, format!("{secs:.2} s (limit 5 s)"));
}

fn criterion2(rep: &mut Report) {
    let n = 10;
    let ens = SpinEnsemble::new(n).unwrap();
    let times: Vec<f64> = (0..=50).map(|k| k as f64 * PI / 100.0).collect();
    let grid = TimeGrid::new(times).unwrap();
    let (mut worst_purity, mut worst_fid) = (0.0f64, 0.0f64);
    for n0 in [0usize, 1, 3] {
        let input = BosonInput::Fock { n0 };
        let (ops, psi) = composite(n, &input, n0 + 2);
        let h = h_eff_tc(&ModelParams::new(n), &ops).unwrap();
        for (state, &t) in evolve_unitary_static(&h, &psi, &grid).unwrap().iter().zip(grid.samples()) {
            let rho = partial_trace_boson(state).unwrap();
            worst_purity = worst_purity.max((purity(&rho) - 1.0).abs());
            let target = oat_state(ens, 2.0 * t, 2.0 * n0 as f64 * t);
            worst_fid = worst_fid.max((fidelity(&rho, &target).unwrap() - 1.0).abs());
        }
    }
    rep.check("2a Fock-input purity", worst_purity < 1e-9, format!("max |Tr ρ² - 1| = {worst_purity:.2e}"));
    rep.check("2b Fock-input rotated OAT state", worst_fid < 1e-9, format!("max |F - 1| = {worst_fid:.2e}"));
}

fn criterion3(rep: &mut Report) {
    let start = Instant::now();
    let inputs = [
        BosonInput::Fock { n0: 2 },
        BosonInput::coherent(1.0),
        BosonInput::Thermal { nbar: 0.5 },
        BosonInput::Squeezed { r: 0.5 },
    ];
    let times: Vec<f64> = (0..=10).map(|k| k as f64 * PI / 20.0).collect();
    let grid = TimeGrid::new(times).unwrap();
    let mut worst = 0.0f64;
    for n in [2usize, 4, 10] {
        let ens = SpinEnsemble::new(n).unwrap();
        for input in &inputs {
            let (ops, psi0) = composite(n, input, truncation_recommendation(input));
            // mixed inputs enter as density matrices
            let h = h_eff_tc(&ModelParams::new(n), &ops).unwrap();
            for (state, &t) in evolve_unitary_static(&h, &psi0, &grid).unwrap().iter().zip(grid.samples()) {
                let brute = partial_trace_boson(state).unwrap();
                let exact = reduced_spin_state(ens, input, t).unwrap();
                worst = worst.max(max_abs_diff(&brute.density_matrix(), &exact.density_matrix()));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    rep.check("3a reduced state vs brute force", worst < 1e-9, format!("max entrywise deviation {worst:.2e}"));
    rep.check("3b runtime", secs < 60.0, format!("{secs:.2} s (limit 60 s)"));
}

fn criterion4(rep: &mut Report) {
    let start = Instant::now();
    let spins = [50.0, 100.0, 200.0, 400.0, 800.0];
    let xi2 = |regime, formula| -> Vec<f64> {
        spins.iter().map(|&s| optimal_squeezing((2.0 * s) as usize, regime, formula).1).collect()
    };
    let (p_vac, _) = fit_power_law(&spins, &xi2(ScalingRegime::Vacuum, VarianceFormula::Closed));
    rep.check("4a vacuum exponent", (p_vac + 2.0 / 3.0).abs() < 0.05, format!("p = {p_vac:.4}, expected -0.6667 ± 0.05"));
    let prefactor = 5.0 / (4.0 * 12f64.powf(0.2));
    for (label, formula) in [("closed", VarianceFormula::Closed), ("leading-order", VarianceFormula::Leading)] {
        let ys = xi2(ScalingRegime::Balanced, formula);
        let (p, _) = fit_power_law(&spins, &ys);
        // prefactor with the exponent pinned to -2/5
        let a = (ys.iter().zip(&spins).map(|(y, s)| (y * s.powf(0.4)).ln()).sum::<f64>() / spins.len() as f64).exp();
        rep.check(
            &format!("4b balanced exponent ({label})"),
            (p + 0.4).abs() < 0.05,
            format!("p = {p:.4}, expected -0.4 ± 0.05"),
        );
        rep.check(
            &format!("4c balanced prefactor ({label})"),
            ((a - prefactor) / prefactor).abs() < 0.10,
            format!("A = {a:.4}, expected {prefactor:.4} ± 10%"),
        );
    }
    let secs = start.elapsed().as_secs_f64();
    rep.check("4d runtime", secs < 10.0, format!("{secs:.2} s (limit 10 s)"));
}

fn criterion5(rep: &mut Report) {
    let start = Instant::now();
    let ideal = run_scenario(&preset_by_name("fig2a_ideal").unwrap()).unwrap();
    let cyan = run_scenario(&preset_by_name("fig2a_cyan").unwrap()).unwrap();
    let blue = run_scenario(&preset_by_name("fig2a_blue").unwrap()).unwrap();
    let dev = max_rel_dev(&cyan, &ideal, 0.5);
    rep.check("5a Ω₀=160χ tracks -(χ/2)Sx²", dev < 0.05, format!("max relative ξ² deviation over χt ≤ 0.5: {:.2}%", 100.0 * dev));
    let (b, i) = (blue.min_xi2(), ideal.min_xi2());
    rep.check("5b Ω₀=16χ beats ideal OAT", b < i, format!("min ξ² = {b:.5} vs ideal {i:.5}"));
    let secs = start.elapsed().as_secs_f64();
    rep.check("5c runtime", secs < 60.0, format!("{secs:.2} s (limit 60 s)"));
}

fn criterion6(rep: &mut Report) {
    let start = Instant::now();
    let ideal = run_scenario(&preset_by_name("fig3a_ideal").unwrap()).unwrap();
    let cyan = run_scenario(&preset_by_name("fig3a_cyan").unwrap()).unwrap();
    let dev = max_rel_dev(&cyan, &ideal, 0.2);
    rep.check("6a d=0.01 tracks χSy²", dev < 0.05, format!("max relative ξ² deviation over χt ≤ 0.2: {:.2}%", 100.0 * dev));
    let ghz = run_scenario(&preset_by_name("fig3b_cyan").unwrap()).unwrap();
    let (t_peak, peak) = ghz
        .rows
        .iter()
        .filter(|r| (r.t - PI / 2.0).abs() <= 0.25)
        .map(|r| (r.t, r.fidelity_ghz))
        .fold((0.0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    rep.check("6b d=0.04 GHZ fidelity peak", peak > 0.95, format!("F = {peak:.5} at χt = {t_peak:.3}"));
    let secs = start.elapsed().as_secs_f64();
    rep.check("6c runtime", secs < 120.0, format!("{secs:.2} s (limit 120 s)"));
}

fn criterion7(rep: &mut Report) {
    let w = DriveWaveform::canonical_pulse_train(0.1, 0.1, 0.0).unwrap();
    let worst = (0..10)
        .map(|m| {
            let t = (m as f64 + 0.5) * 0.1;
            (step_phase(&w, t, true).unwrap() - (m as f64 + 0.5) * PI).abs()
        })
        .fold(0.0, f64::max);
    rep.check("7 step phase (m+½)π", worst < 1e-6, format!("max deviation {worst:.2e}"));
}

fn criterion8(rep: &mut Report) {
    let start = Instant::now();
    let gammas = [0.005, 0.01, 0.02, 0.05];
    let sweep = |name: &str| {
        let s = run_sweep(&preset_by_name(name).unwrap(), "gamma", &gammas, 4, false).unwrap();
        assert!(s.failures().is_empty());
        s.summary()
    };
    let exchange = sweep("fig4_exchange");
    let dephasing = sweep("fig4_dephasing");
    let doubled = sweep("fig4_dephasing_doubled");
    let fmt = |v: &[oat_core::experiments::SweepSummaryRow], f: fn(&oat_core::experiments::SweepSummaryRow) -> f64| {
        v.iter().map(|r| format!("{:.4}", f(r))).collect::<Vec<_>>().join("/")
    };
    let sq = exchange.iter().zip(&dephasing).zip(&doubled).all(|((e, d), dd)| e.min_xi2 <= d.min_xi2 && e.min_xi2 <= dd.min_xi2);
    rep.check(
        "8a squeezing: exchange ≤ dephasing",
        sq,
        format!(
            "min ξ² exchange {} | dephasing {} | dephasing at doubled coupling {}",
            fmt(&exchange, |r| r.min_xi2),
            fmt(&dephasing, |r| r.min_xi2),
            fmt(&doubled, |r| r.min_xi2)
        ),
    );
    let fid = exchange.iter().zip(&doubled).all(|(e, d)| d.max_fidelity >= e.max_fidelity);
    rep.check(
        "8b GHZ fidelity: dephasing (equal coupling) ≥ exchange",
        fid,
        format!("max F dephasing at doubled coupling {} | exchange {}", fmt(&doubled, |r| r.max_fidelity), fmt(&exchange, |r| r.max_fidelity)),
    );
    rep.info(
        "8b",
        format!("dephasing at the literal half coupling reaches max F {}", fmt(&dephasing, |r| r.max_fidelity)),
    );

    let ens = SpinEnsemble::new(10).unwrap();
    let ops = collective_operators(ens);
    let grid = TimeGrid::with_step(4.0, 0.01).unwrap();
    let (mut trace_err, mut floor) = (0.0f64, f64::INFINITY);
    for eq in [MasterEquation::TwistDephasing, MasterEquation::TwistDephasingDoubled, MasterEquation::TwistExchange] {
        for &g in &gammas {
            let spec = lindblad_spec(eq, &ModelParams::new(10).with_gamma(g), 0.0, &ops).unwrap();
            for rho in evolve_lindblad(&spec, &css_state(ens, CssSpec::north_pole()), &grid).unwrap() {
                trace_err = trace_err.max((rho.trace() - 1.0).abs());
                floor = floor.min(rho.min_eigenvalue());
            }
        }
    }
    rep.check("8c trace preservation", trace_err < 1e-10, format!("max |Tr ρ - 1| = {trace_err:.2e}"));
    rep.check("8d eigenvalue floor", floor >= -1e-8, format!("min eigenvalue {floor:.2e}"));
    let secs = start.elapsed().as_secs_f64();
    rep.check("8e runtime", secs < 120.0, format!("{secs:.2} s (limit 120 s)"));
}

fn criterion9(rep: &mut Report) {
    let n = 2;
    let input = BosonInput::coherent(1.0);
    let ens = SpinEnsemble::new(n).unwrap();
    let spin = collective_operators(ens);
    let grid = TimeGrid::uniform(0.0, 0.2, 20).unwrap();
    let reference = {
        let (ops, psi) = composite(n, &input, truncation_recommendation(&input));
        let h = h_eff_driven(&ModelParams::new(n), 0.0, &ops).unwrap();
        evolve_unitary_static(&h, &psi, &grid).unwrap().iter().map(|s| partial_trace_boson(s).unwrap()).collect::<Vec<_>>()
    };
    let mut at_end = Vec::new();
    let mut over_window = Vec::new();
    for ratio in [10.0, 20.0, 40.0] {
        let (ops, psi) = composite(n, &input, truncation_recommendation(&input) + n);
        let h = h_full_driven_tc(&ModelParams::dispersive(n, 1.0, ratio), 0.0, &ops).unwrap();
        let devs: Vec<f64> = evolve_unitary_static(&h, &psi, &grid)
            .unwrap()
            .iter()
            .zip(grid.samples())
            .zip(&reference)
            .map(|((s, &t), r)| {
                let rho = rotate(&partial_trace_boson(s).unwrap(), &spin, Axis::Z, t).unwrap();
                1.0 - mixed_fidelity(&rho, r).unwrap()
            })
            .collect();
        at_end.push(*devs.last().unwrap());
        over_window.push(devs.iter().cloned().fold(0.0, f64::max));
    }
    let monotone = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    let show = |v: &[f64]| v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(" > ");
    rep.check("9a dispersive limit at χt=0.2", monotone(&at_end), format!("1 - F over Δ′/g = 10, 20, 40: {}", show(&at_end)));
    rep.check("9b dispersive limit over χt ≤ 0.2", monotone(&over_window), format!("max 1 - F: {}", show(&over_window)));
}

fn criterion10(rep: &mut Report) {
    let n = 10;
    let (ops, _) = composite(n, &BosonInput::Fock { n0: 0 }, 8);
    let mut params = ModelParams::new(n);
    let base = h_eff_tc(&params, &ops).unwrap();
    params.omega0 = Some(1e6);
    let exact = [AtomicDrive::ConstantDrive, AtomicDrive::OscillatingDrive]
        .iter()
        .all(|&v| h_atomic_drive(&params, v, 0.0, &ops).unwrap().max_abs_diff(&base) == 0.0);
    rep.check("10a undriven variants equal the dispersive model", exact, "bitwise identical".into());
    let amp = 1.0;
    let h = h_atomic_drive(&params, AtomicDrive::OscillatingDrive, amp, &ops).unwrap();
    let rwa = &base + &ops.sx.scale(amp / 2.0);
    let diff = h.max_abs_diff(&rwa);
    rep.check("10b fast oscillating drive", diff < 1e-6 * amp, format!("Ω₀ = {amp}χ, ω₀ = 1e6χ: max entry deviation {diff:.2e}"));
}

fn main() -> ExitCode {
    let mut rep = Report { failed: 0 };
    criterion1(&mut rep);
    criterion2(&mut rep);
    criterion3(&mut rep);
    criterion4(&mut rep);
    criterion5(&mut rep);
    criterion6(&mut rep);
    criterion7(&mut rep);
    criterion8(&mut rep);
    criterion9(&mut rep);
    criterion10(&mut rep);
    println!("acceptance: {} failed", rep.failed);
    if rep.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
