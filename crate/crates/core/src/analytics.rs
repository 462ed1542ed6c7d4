//! Closed-form results for the dispersive model: photon-number characteristic functions,
//! reduced spin states, squeezing moments and minimal variances, the OAT-mixture picture
//! and GHZ fidelities.
//!
//! Throughout, `μ = 2χt` and `μ′ = 4|α|²χ²t²`.

use nalgebra::DMatrix;

use crate::boson::{truncated_weights, truncation_recommendation, BosonInput};
use crate::error::Result;
use crate::numerics::QuantumState;
use crate::spin::{css_equator_coefficients, oat_state, SpinEnsemble};
use crate::C64;

/// Photon-number characteristic function `φ(m - m′) = Σ |c_n|² e^{2inχt(m-m′)}`.
pub fn characteristic_function(input: &BosonInput, chi_t: f64, m_diff: i64) -> C64 {
    if m_diff == 0 {
        return C64::new(1.0, 0.0);
    }
    let theta = 2.0 * chi_t * m_diff as f64;
    let one = C64::new(1.0, 0.0);
    let e = C64::from_polar(1.0, theta);
    match *input {
        BosonInput::Fock { n0 } => C64::from_polar(1.0, n0 as f64 * theta),
        BosonInput::Coherent { .. } => {
            let a2 = input.mean_photons();
            (-(one - e) * a2).exp()
        }
        BosonInput::Thermal { nbar } => one / (one + (one - e) * nbar),
        BosonInput::Squeezed { r } => {
            // real part stays >= 1, so the principal root is continuous in χt
            let z = C64::new(r.cosh().powi(2), 0.0) - C64::from_polar(r.sinh().powi(2), 2.0 * theta);
            one / z.sqrt()
        }
    }
}

fn spin_density(ens: SpinEnsemble, coherence: impl Fn(f64, f64, i64) -> C64) -> Result<QuantumState> {
    let c = css_equator_coefficients(ens);
    let ms: Vec<f64> = ens.m_values().collect();
    let d = ens.dim();
    let rho = DMatrix::from_fn(d, d, |i, j| {
        let (m, mp) = (ms[i], ms[j]);
        C64::new(c[i] * c[j], 0.0) * coherence(m, mp, i as i64 - j as i64)
    });
    QuantumState::from_density(rho, ens.basis())
}

/// Exact spin state after tracing out the mode, starting from `|π/2, 0⟩ ⊗ input`.
pub fn reduced_spin_state(ens: SpinEnsemble, input: &BosonInput, chi_t: f64) -> Result<QuantumState> {
    input.validate()?;
    spin_density(ens, |m, mp, dm| {
        C64::from_polar(1.0, -chi_t * (m * m - mp * mp)) * characteristic_function(input, chi_t, dm)
    })
}

/// Short-time approximation for a coherent input: rotation `e^{2i|α|²χt(m-m′)}` and
/// Gaussian damping `e^{-2|α|²χ²t²(m-m′)²}`.
pub fn gaussian_cf_approx_state(ens: SpinEnsemble, alpha2: f64, chi_t: f64) -> Result<QuantumState> {
    gaussian_state(ens, alpha2, chi_t, true)
}

fn gaussian_state(ens: SpinEnsemble, alpha2: f64, chi_t: f64, rotate: bool) -> Result<QuantumState> {
    let rot = if rotate { 2.0 * alpha2 * chi_t } else { 0.0 };
    spin_density(ens, |m, mp, dm| {
        let dm = dm as f64;
        let damping = (-2.0 * alpha2 * chi_t * chi_t * dm * dm).exp();
        C64::from_polar(damping, -chi_t * (m * m - mp * mp) + rot * dm)
    })
}

/// Gaussian approximate state with the linear rotation removed (the frame of the moment formulas).
pub fn gaussian_cf_state_unrotated(ens: SpinEnsemble, alpha2: f64, chi_t: f64) -> Result<QuantumState> {
    gaussian_state(ens, alpha2, chi_t, false)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OatMoments {
    pub sx_mean: f64,
    pub sy2_mean: f64,
    /// `⟨S_y S_z + S_z S_y⟩`.
    pub tyz_mean: f64,
}

fn mu_pair(alpha2: f64, chi_t: f64) -> (f64, f64) {
    (2.0 * chi_t, 4.0 * alpha2 * chi_t * chi_t)
}

pub fn moments_closed_form(n_atoms: usize, alpha2: f64, chi_t: f64) -> OatMoments {
    let s = 0.5 * n_atoms as f64;
    let (mu, mup) = mu_pair(alpha2, chi_t);
    let c_half = (0.5 * mu).cos();
    OatMoments {
        sx_mean: (-0.5 * mup).exp() * s * c_half.powf(2.0 * s - 1.0),
        sy2_mean: 0.5 * s * (s + 0.5) - (-2.0 * mup).exp() * 0.5 * s * (s - 0.5) * mu.cos().powf(2.0 * s - 2.0),
        tyz_mean: 2.0 * (-0.5 * mup).exp() * s * (s - 0.5) * c_half.powf(2.0 * s - 2.0) * (0.5 * mu).sin(),
    }
}

fn min_variance_mu(s: f64, mu: f64, mup: f64) -> f64 {
    if s <= 0.5 {
        return 0.5 * s;
    }
    let a = 1.0 - (-2.0 * mup).exp() * mu.cos().powf(2.0 * s - 2.0);
    let b = 4.0 * (-0.5 * mup).exp() * (0.5 * mu).cos().powf(2.0 * s - 2.0) * (0.5 * mu).sin();
    // 𝒜(1 - √(1 + ℬ²/𝒜²)) written without the division
    0.5 * s * (1.0 + 0.5 * (s - 0.5) * (a - a.hypot(b)))
}

/// Minimal transverse variance; returns `S/2` at `χt = 0`.
pub fn min_variance_closed_form(n_atoms: usize, alpha2: f64, chi_t: f64) -> f64 {
    let (mu, mup) = mu_pair(alpha2, chi_t);
    min_variance_mu(0.5 * n_atoms as f64, mu, mup)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionParams {
    pub delta: f64,
    pub delta_prime: f64,
    pub beta: f64,
    pub mu: f64,
    pub mu_prime: f64,
    pub vartheta: f64,
    pub spin: f64,
    pub alpha2: f64,
}

impl ExpansionParams {
    pub fn new(n_atoms: usize, alpha2: f64, chi_t: f64) -> Self {
        let (mu, _) = mu_pair(alpha2, chi_t);
        Self::from_mu(0.5 * n_atoms as f64, alpha2, mu)
    }

    fn from_mu(s: f64, alpha2: f64, mu: f64) -> Self {
        let mup = alpha2 * mu * mu;
        Self {
            delta: 0.5 * s * mu,
            delta_prime: 0.5 * s * mup,
            beta: 0.25 * s * mu * mu,
            mu,
            mu_prime: mup,
            vartheta: 2.0 * alpha2 + s - 1.0,
            spin: s,
            alpha2,
        }
    }

    /// `ϑμ² ≪ 1`, `μ ≪ 1`, `S ≫ |α|²` and `ℬ/𝒜 ≈ 2/(ϑμ) ≪ 1`, each read as "at most a tenth".
    pub fn within_validity(&self) -> bool {
        let theta_mu = self.vartheta * self.mu;
        theta_mu * self.mu <= 0.1 && self.mu <= 0.1 && self.alpha2 <= 0.1 * self.spin && 2.0 / theta_mu <= 0.1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionOrder {
    /// `(S/2)[δ′/(δ′+δ²) + δ⁴/(4(δ′+δ²)³) + (2/3)β²]`.
    Leading,
    /// `(S/2)(1 - S/ϑ + S/(2ϑ²) + S/(ϑ³μ²) + ϑμ⁴S/24)`.
    Intermediate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expansion {
    pub value: f64,
    /// False when the small-parameter conditions do not hold.
    pub within_validity: bool,
}

fn expansion_value(p: &ExpansionParams, order: ExpansionOrder) -> f64 {
    let s = p.spin;
    match order {
        ExpansionOrder::Leading => {
            let q = p.delta_prime + p.delta * p.delta;
            0.5 * s * (p.delta_prime / q + p.delta.powi(4) / (4.0 * q.powi(3)) + 2.0 / 3.0 * p.beta * p.beta)
        }
        ExpansionOrder::Intermediate => {
            let th = p.vartheta;
            let mu = p.mu;
            0.5 * s * (1.0 - s / th + s / (2.0 * th * th) + s / (th.powi(3) * mu * mu) + th * mu.powi(4) * s / 24.0)
        }
    }
}

pub fn min_variance_expansion(n_atoms: usize, alpha2: f64, chi_t: f64, order: ExpansionOrder) -> Expansion {
    let p = ExpansionParams::new(n_atoms, alpha2, chi_t);
    Expansion { value: expansion_value(&p, order), within_validity: p.within_validity() }
}

/// `(|c_n|², nμ)` pairs: the reduced state is `Σ |c_n|² |OAT_μ, nμ⟩⟨OAT_μ, nμ|`.
pub fn oat_mixture_weights(input: &BosonInput, mu: f64) -> Result<Vec<(f64, f64)>> {
    input.validate()?;
    let (weights, _) = truncated_weights(input, truncation_recommendation(input))?;
    Ok(weights
        .into_iter()
        .enumerate()
        .filter(|(_, w)| *w > 0.0)
        .map(|(n, w)| (w, n as f64 * mu))
        .collect())
}

/// Density matrix `Σ w |OAT_μ, φ⟩⟨OAT_μ, φ|` of a mixture.
pub fn oat_mixture_state(ens: SpinEnsemble, mu: f64, mixture: &[(f64, f64)]) -> Result<QuantumState> {
    let d = ens.dim();
    let mut rho = DMatrix::<C64>::zeros(d, d);
    for &(w, phi) in mixture {
        let v = oat_state(ens, mu, phi);
        let v = v.vector().unwrap();
        rho += v * v.adjoint() * C64::new(w, 0.0);
    }
    QuantumState::from_density(rho, ens.basis())
}

/// GHZ fidelity at `χt = π/2`: the even-photon-number weight `Σ |c_{2n}|²`.
pub fn ghz_fidelity_closed_form(input: &BosonInput) -> f64 {
    match *input {
        BosonInput::Fock { n0 } => {
            if n0 % 2 == 0 {
                1.0
            } else {
                0.0
            }
        }
        BosonInput::Coherent { .. } => 0.5 * (1.0 + (-2.0 * input.mean_photons()).exp()),
        BosonInput::Thermal { nbar } => (1.0 + nbar) / (1.0 + 2.0 * nbar),
        BosonInput::Squeezed { .. } => 1.0,
    }
}

/// Photon-number regime for the squeezing scaling laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingRegime {
    /// `α = 0`.
    Vacuum,
    /// `δ = δ′`, i.e. `|α|² = 1/μ` at every trial μ.
    Balanced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarianceFormula {
    Closed,
    Leading,
}

/// Minimum over μ of `ξ² = 2V/S`, returning `(μ_min, ξ²_min)`.
pub fn optimal_squeezing(n_atoms: usize, regime: ScalingRegime, formula: VarianceFormula) -> (f64, f64) {
    let s = 0.5 * n_atoms as f64;
    let xi2 = |ln_mu: f64| {
        let mu = ln_mu.exp();
        let alpha2 = match regime {
            ScalingRegime::Vacuum => 0.0,
            ScalingRegime::Balanced => 1.0 / mu,
        };
        let v = match formula {
            VarianceFormula::Closed => min_variance_mu(s, mu, alpha2 * mu * mu),
            VarianceFormula::Leading => expansion_value(&ExpansionParams::from_mu(s, alpha2, mu), ExpansionOrder::Leading),
        };
        2.0 * v / s
    };
    // coarse log scan, then golden-section refinement around the best point
    let (lo, hi, n) = (1e-6f64.ln(), 1.0f64.ln(), 400);
    let step = (hi - lo) / n as f64;
    let best = (0..=n)
        .map(|i| lo + i as f64 * step)
        .min_by(|a, b| xi2(*a).total_cmp(&xi2(*b)))
        .unwrap();
    let (mut a, mut b) = (best - step, best + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    while b - a > 1e-12 {
        if xi2(c) < xi2(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    let x = 0.5 * (a + b);
    (x.exp(), xi2(x))
}

/// Least-squares fit of `y = A x^p` in log-log space, returning `(p, A)`.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let p = sxy / sxx;
    (p, (my - p * mx).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boson::{ln_factorial, BosonSpace};
    use crate::numerics::max_abs_diff;
    use crate::observables::{fidelity, purity, squeezing_parameter};
    use crate::spin::{collective_operators, css_state, ghz_state, CssSpec};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn inputs() -> Vec<BosonInput> {
        vec![
            BosonInput::Fock { n0: 3 },
            BosonInput::coherent(1.0),
            BosonInput::Thermal { nbar: 0.8 },
            BosonInput::Squeezed { r: 0.6 },
        ]
    }

    #[test]
    fn printed_cf_values() {
        let c = characteristic_function(&BosonInput::coherent(1.0), FRAC_PI_2, 1);
        assert!((c - C64::new((-2.0f64).exp(), 0.0)).norm() < 1e-15);
        let t = characteristic_function(&BosonInput::Thermal { nbar: 1.0 }, FRAC_PI_2, 1);
        assert!((t - C64::new(1.0 / 3.0, 0.0)).norm() < 1e-15);
        for input in inputs() {
            assert_eq!(characteristic_function(&input, 0.37, 0), C64::new(1.0, 0.0));
        }
    }

    #[test]
    fn cf_matches_series() {
        for input in inputs() {
            let n_max = truncation_recommendation(&input);
            let (w, _) = truncated_weights(&input, n_max).unwrap();
            for k in 0..20 {
                let chi_t = 0.173 * k as f64 - 0.4;
                for dm in -10i64..=10 {
                    let series: C64 = w
                        .iter()
                        .enumerate()
                        .map(|(n, p)| C64::from_polar(*p, 2.0 * n as f64 * chi_t * dm as f64))
                        .sum();
                    let cf = characteristic_function(&input, chi_t, dm);
                    assert!((cf - series).norm() < 1e-8, "{input:?} χt={chi_t} Δm={dm}");
                    assert!(cf.norm() <= 1.0 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn reduced_state_limits() {
        let ens = SpinEnsemble::new(6).unwrap();
        let css = css_state(ens, CssSpec::equator_x());
        let r0 = reduced_spin_state(ens, &BosonInput::coherent(1.0), 0.0).unwrap();
        assert!(max_abs_diff(&r0.density_matrix(), &css.density_matrix()) < 1e-14);
        for chi_t in [0.1, 0.7, 2.0] {
            let f = reduced_spin_state(ens, &BosonInput::Fock { n0: 2 }, chi_t).unwrap();
            assert!((purity(&f) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_state_properties() {
        let ens = SpinEnsemble::new(10).unwrap();
        let vac = gaussian_cf_approx_state(ens, 0.0, 0.3).unwrap();
        let oat = oat_state(ens, 0.6, 0.0);
        assert!((fidelity(&vac, &oat).unwrap() - 1.0).abs() < 1e-12);

        let chi_t = 0.02;
        let approx = gaussian_cf_approx_state(ens, 1.0, chi_t).unwrap();
        let exact = reduced_spin_state(ens, &BosonInput::coherent(1.0), chi_t).unwrap();
        let diff = approx.density_matrix() - exact.density_matrix();
        let eig = diff.symmetric_eigenvalues();
        let trace_distance = 0.5 * eig.iter().map(|x| x.abs()).sum::<f64>();
        assert!(trace_distance < 1e-3, "{trace_distance}");

        // extreme coherence m - m′ = N
        let alpha2 = 1.3;
        let chi_t = 0.05;
        let g = gaussian_cf_approx_state(ens, alpha2, chi_t).unwrap().density_matrix();
        let c = css_equator_coefficients(ens);
        let damping = g[(10, 0)].norm() / (c[10] * c[0]);
        assert!((damping - (-2.0 * alpha2 * chi_t * chi_t * 100.0).exp()).abs() < 1e-14);
    }

    #[test]
    fn moments_match_gaussian_state() {
        let ens = SpinEnsemble::new(10).unwrap();
        let ops = collective_operators(ens);
        let st = gaussian_cf_state_unrotated(ens, 1.0, 0.05).unwrap();
        let m = moments_closed_form(10, 1.0, 0.05);
        assert!((st.expectation(&ops.sx).unwrap().re - m.sx_mean).abs() < 1e-8);
        assert!((st.expectation(&(&ops.sy * &ops.sy)).unwrap().re - m.sy2_mean).abs() < 1e-8);
        let t = ops.sy.anticommutator(&ops.sz);
        assert!((st.expectation(&t).unwrap().re - m.tyz_mean).abs() < 1e-8);

        let m0 = moments_closed_form(10, 0.0, 0.0);
        assert_eq!((m0.sx_mean, m0.sy2_mean, m0.tyz_mean), (5.0, 2.5, 0.0));
        for k in 1..30 {
            let chi_t = k as f64 * PI / 60.0;
            assert!(moments_closed_form(10, 0.5, chi_t).tyz_mean > 0.0);
        }
    }

    #[test]
    fn min_variance_matches_covariance() {
        let ens = SpinEnsemble::new(10).unwrap();
        let ops = collective_operators(ens);
        let st = gaussian_cf_state_unrotated(ens, 1.0, 0.05).unwrap();
        let r = squeezing_parameter(&st, &ops).unwrap();
        assert!((r.min_variance - min_variance_closed_form(10, 1.0, 0.05)).abs() < 1e-8);
        assert_eq!(min_variance_closed_form(10, 1.0, 0.0), 2.5);
        assert_eq!(min_variance_closed_form(1, 1.0, 0.3), 0.25);
    }

    #[test]
    fn expansions() {
        // vacuum form
        let (n, chi_t) = (400usize, 0.01);
        let p = ExpansionParams::new(n, 0.0, chi_t);
        let e = min_variance_expansion(n, 0.0, chi_t, ExpansionOrder::Leading);
        let vac = 0.5 * p.spin * (1.0 / (4.0 * p.delta * p.delta) + 2.0 / 3.0 * p.beta * p.beta);
        assert!((e.value - vac).abs() < 1e-12 * vac);

        // N=200, |α|²=20, μ=0.01 sits at ℬ/𝒜 ≈ 1.4, outside the expansion's premise
        let e = min_variance_expansion(200, 20.0, 0.005, ExpansionOrder::Leading);
        assert!(!e.within_validity);

        // deep in the small-ℬ/𝒜 regime the expansion tracks the closed form
        for (n, alpha2, mu) in [(20_000usize, 20.0, 0.003), (200_000, 200.0, 0.0005)] {
            let chi_t = 0.5 * mu;
            let exact = min_variance_closed_form(n, alpha2, chi_t);
            for order in [ExpansionOrder::Leading, ExpansionOrder::Intermediate] {
                let e = min_variance_expansion(n, alpha2, chi_t, order);
                assert!(e.within_validity);
                assert!(((e.value - exact) / exact).abs() < 0.02, "{order:?} N={n}: {} vs {exact}", e.value);
            }
        }
    }

    #[test]
    fn mixture_reconstructs_reduced_state() {
        let ens = SpinEnsemble::new(6).unwrap();
        for input in inputs() {
            for mu in [0.3, PI] {
                let w = oat_mixture_weights(&input, mu).unwrap();
                assert!((w.iter().map(|p| p.0).sum::<f64>() - 1.0).abs() < 1e-10);
                let mix = oat_mixture_state(ens, mu, &w).unwrap();
                let exact = reduced_spin_state(ens, &input, 0.5 * mu).unwrap();
                assert!(max_abs_diff(&mix.density_matrix(), &exact.density_matrix()) < 1e-9, "{input:?}");
            }
        }
        assert_eq!(oat_mixture_weights(&BosonInput::Fock { n0: 4 }, 0.2).unwrap(), vec![(1.0, 4.0 * 0.2)]);
        let w = oat_mixture_weights(&BosonInput::coherent(1.0), 0.1).unwrap();
        for (n, (p, _)) in w.iter().enumerate().take(8) {
            let poisson = (-1.0 - ln_factorial(n)).exp();
            assert!((p - poisson).abs() < 1e-12);
        }
        let _ = BosonSpace::new(1);
    }

    #[test]
    fn ghz_fidelity_matches_reduced_state() {
        assert_eq!(ghz_fidelity_closed_form(&BosonInput::Fock { n0: 0 }), 1.0);
        assert_eq!(ghz_fidelity_closed_form(&BosonInput::Fock { n0: 1 }), 0.0);
        assert!((ghz_fidelity_closed_form(&BosonInput::coherent(1.0)) - 0.567668).abs() < 1e-6);
        for n in [4usize, 5, 10] {
            let ens = SpinEnsemble::new(n).unwrap();
            let ghz = ghz_state(ens);
            for input in inputs().into_iter().chain([BosonInput::Fock { n0: 2 }, BosonInput::Squeezed { r: 1.2 }]) {
                let rho = reduced_spin_state(ens, &input, FRAC_PI_2).unwrap();
                let f = fidelity(&rho, &ghz).unwrap();
                assert!((f - ghz_fidelity_closed_form(&input)).abs() < 1e-8, "N={n} {input:?}");
            }
        }
    }

    #[test]
    fn power_law_fit_recovers_exponent() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-0.4)).collect();
        let (p, a) = fit_power_law(&xs, &ys);
        assert!((p + 0.4).abs() < 1e-12 && (a - 3.0).abs() < 1e-12);
    }

    #[test]
    fn vacuum_scaling_exponent() {
        let s: Vec<f64> = [50.0, 100.0, 200.0, 400.0, 800.0].to_vec();
        let xi: Vec<f64> = s.iter().map(|s| optimal_squeezing((2.0 * s) as usize, ScalingRegime::Vacuum, VarianceFormula::Closed).1).collect();
        let (p, _) = fit_power_law(&s, &xi);
        assert!((p + 2.0 / 3.0).abs() < 0.05, "{p}");
    }
}
