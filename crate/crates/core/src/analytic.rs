//! Closed-form results for the coherent switch (`R_b >= L`, two-level medium)
//! driven by a narrow-band pulse.
//!
//! All fields are functions of the retarded time `t - z/c`. They follow from
//! expanding the two-level susceptibility `χ = (2g/γ)[i - 2ω/γ - 4iω²/γ²]` in
//! the pulse bandwidth; the expansions are only trustworthy for `γτ` of a few
//! or more, which the [`RegimeGuard`] reports.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::physics::{MediumParams, PulseSpec};
use crate::special::{erf, erfc, exp_erfc, one_plus_erf};

/// Shortest pulse (in units of `1/γ`) for which the fidelity bracket
/// `1 - 2/(γτ)² + 12/(γτ)⁴` stays at or below one: `γτ = √6`.
pub const MIN_GAMMA_TAU: f64 = 2.449_489_742_783_178;

#[derive(Debug, Clone, PartialEq)]
pub enum RegimeWarning {
    /// The blockade does not cover the medium; χ is not two-level everywhere.
    PartialBlockade { blockade_radius: f64, length: f64 },
    /// Ω/|V| at the far end of the medium is not small.
    WeakShift { ratio: f64 },
    ShortPulse { gamma_tau: f64 },
    /// `ξ(L)² <= 0`: the chirped field is undefined at the exit face.
    ChirpBreakdown { xi_squared: f64 },
}

impl std::fmt::Display for RegimeWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::PartialBlockade { blockade_radius, length } => {
                write!(f, "R_b = {blockade_radius:.3} um < L = {length:.3} um")
            }
            Self::WeakShift { ratio } => write!(f, "Omega/|V| reaches {ratio:.3} inside the medium"),
            Self::ShortPulse { gamma_tau } => {
                write!(f, "gamma*tau = {gamma_tau:.3} below {MIN_GAMMA_TAU:.3}")
            }
            Self::ChirpBreakdown { xi_squared } => write!(f, "xi(L)^2 = {xi_squared:.4} <= 0"),
        }
    }
}

/// Regime diagnostics attached to every analytic evaluation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RegimeGuard {
    pub warnings: Vec<RegimeWarning>,
}

impl RegimeGuard {
    pub fn check(params: &MediumParams, pulse: &PulseSpec) -> Self {
        let mut warnings = Vec::new();
        let l = params.length();
        if params.omega_c() > 0.0 {
            match params.blockade_radius() {
                // R_b set to exactly L round-trips through C6 with a few ulps of error
                Ok(rb) if rb < l * (1.0 - 1e-9) => warnings.push(RegimeWarning::PartialBlockade {
                    blockade_radius: rb,
                    length: l,
                }),
                _ => {}
            }
            // The weakest shift is a full medium length from the gate.
            let ratio = if params.c6() == 0.0 {
                f64::INFINITY
            } else {
                params.omega_c() * l.powi(6) / params.c6().abs()
            };
            if ratio > 1.0 {
                warnings.push(RegimeWarning::WeakShift { ratio });
            }
        }
        let gamma_tau = params.gamma() * pulse.tau();
        if gamma_tau < MIN_GAMMA_TAU {
            warnings.push(RegimeWarning::ShortPulse { gamma_tau });
        }
        let xi2 = xi_squared(params, pulse, l);
        if xi2 <= 0.0 {
            warnings.push(RegimeWarning::ChirpBreakdown { xi_squared: xi2 });
        }
        Self { warnings }
    }

    /// True when the closed forms apply. A chirp breakdown alone does not
    /// count: the transmission then falls back to its simplified form.
    pub fn in_regime(&self) -> bool {
        self.warnings
            .iter()
            .all(|w| matches!(w, RegimeWarning::ChirpBreakdown { .. }))
    }
}

/// `ξ(z)² = 1 - 4αz/(Lγ²τ²)`.
pub fn xi_squared(params: &MediumParams, pulse: &PulseSpec, z: f64) -> f64 {
    let g = params.gamma();
    let alpha_per_length = params.optical_depth() / params.length();
    1.0 - 4.0 * alpha_per_length * z / (g * g * pulse.tau() * pulse.tau())
}

/// Group advance `4g²z/(cγ²)` of the resonant two-level medium.
fn advance(params: &MediumParams, z: f64) -> f64 {
    4.0 * params.g().powi(2) * z / (params.c_light() * params.gamma().powi(2))
}

/// Amplitude attenuation exponent `2g²z/(cγ)`.
fn half_depth(params: &MediumParams, z: f64) -> f64 {
    2.0 * params.g().powi(2) * z / (params.c_light() * params.gamma())
}

/// Chirped, broadened field from the second-order expansion:
///
/// `E = exp[-2g²z/cγ - u²/(2ξ²τ²)] / (√(√π cτ) ξ)`, `u = t + 4g²z/(cγ²) + z0/c`.
pub fn analytic_field(params: &MediumParams, pulse: &PulseSpec, z: f64, t: f64) -> Result<f64> {
    let xi2 = xi_squared(params, pulse, z);
    if xi2 <= 0.0 {
        return Err(Error::Regime(format!("xi(z)^2 = {xi2} <= 0 at z = {z} um")));
    }
    let c = params.c_light();
    let tau = pulse.tau();
    let u = t + advance(params, z) + pulse.z0() / c;
    let norm = ((PI.sqrt() * c * tau).sqrt() * xi2.sqrt()).recip();
    Ok(norm * (-half_depth(params, z) - u * u / (2.0 * xi2 * tau * tau)).exp())
}

/// Field with the susceptibility expanded only to first order: the input
/// pulse attenuated by `e^{-2g²z/cγ}` and advanced by `4g²z/(cγ²)`.
pub fn first_order_field(params: &MediumParams, pulse: &PulseSpec, z: f64, t: f64) -> f64 {
    (-half_depth(params, z)).exp() * pulse.boundary_signal(t + advance(params, z))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticTransmission {
    /// With the `ξ(L)` chirp factor; absent when `ξ(L)² <= 0`.
    pub chirped: Option<f64>,
    /// The `ξ = 1` simplification.
    pub simplified: f64,
    pub guard: RegimeGuard,
}

impl AnalyticTransmission {
    /// The chirped form where defined, else the simplified one.
    pub fn value(&self) -> f64 {
        self.chirped.unwrap_or(self.simplified)
    }
}

/// `T = e^{-α}/ξ(L) · [1 + erf((L - z0)/(cτξ) - α/(γτξ))] / [1 - erf(z0/cτ)]`.
pub fn analytic_transmission(params: &MediumParams, pulse: &PulseSpec) -> AnalyticTransmission {
    let c = params.c_light();
    let tau = pulse.tau();
    let z0 = pulse.z0();
    let l = params.length();
    let alpha = params.optical_depth();
    let gt = params.gamma() * tau;
    let incident = erfc(z0 / (c * tau));

    let at = |xi: f64| {
        (-alpha).exp() / xi * one_plus_erf((l - z0) / (c * tau * xi) - alpha / (gt * xi)) / incident
    };
    let xi2 = xi_squared(params, pulse, l);
    AnalyticTransmission {
        chirped: (xi2 > 0.0).then(|| at(xi2.sqrt())),
        simplified: at(1.0),
        guard: RegimeGuard::check(params, pulse),
    }
}

/// Which closed-form convolution of the field gives the polarisation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolarizationForm {
    /// Linear response to the first-order field: `exp[-4g²z/cγ]·erfc(...)`.
    LinearResponse,
    /// Linear response to the chirped field: `exp[-6g²z/cγ]·[1 + erf(...)]`.
    /// Undefined where `ξ(z)² <= 0`.
    Chirped,
    /// `Chirped` where `ξ(z)² > 0`, `LinearResponse` elsewhere.
    Auto,
}

/// `P(z,t) = ig ∫_{-∞}^t dt' e^{-γ(t-t')/2} E(z,t')` in closed form.
pub fn analytic_polarization(
    params: &MediumParams,
    pulse: &PulseSpec,
    form: PolarizationForm,
    z: f64,
    t: f64,
) -> Result<Complex64> {
    let g = params.g();
    let gamma = params.gamma();
    let c = params.c_light();
    let tau = pulse.tau();
    let s = c * t + pulse.z0();
    let pre = g * (PI.sqrt() * tau / (2.0 * c)).sqrt();
    let base = (c * gamma * gamma * tau * tau - 4.0 * gamma * s) / (8.0 * c);

    let linear = || {
        let a = base - 4.0 * g * g * z / (c * gamma);
        let x = (c * gamma.powi(3) * tau * tau - 2.0 * gamma * gamma * s - 8.0 * g * g * z)
            / (2.0 * SQRT_2 * c * tau * gamma * gamma);
        exp_erfc(a, x)
    };
    let chirped = |xi2: f64| {
        let xi = xi2.sqrt();
        let a = base - 6.0 * g * g * z / (c * gamma);
        let y = (1.0 - 3.0 * xi2) / (4.0 * SQRT_2 * xi) * gamma * tau + s / (SQRT_2 * xi * c * tau);
        // 1 + erf(y) = erfc(-y)
        exp_erfc(a, -y)
    };

    let xi2 = xi_squared(params, pulse, z);
    let v = match form {
        PolarizationForm::LinearResponse => linear(),
        PolarizationForm::Chirped if xi2 <= 0.0 => {
            return Err(Error::Regime(format!("xi(z)^2 = {xi2} <= 0 at z = {z} um")));
        }
        PolarizationForm::Chirped => chirped(xi2),
        PolarizationForm::Auto if xi2 > 0.0 => chirped(xi2),
        PolarizationForm::Auto => linear(),
    };
    Ok(Complex64::new(0.0, pre * v))
}

/// Second-order polynomial polarisation used for the fidelity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolynomialForm {
    /// Literal form: `igE/(32c²τ⁴γ⁹){...}` with the chirped
    /// field and a `-4c²γ³τ²` term.
    ChirpedLiteral,
    /// Consistent form: `2igE₁/(c²τ⁴γ⁷){...}` with the first-order field `E₁` and
    /// `-4c²γ⁴τ²`. Equal to `(2ig/γ)E₁[1 + 2u/γτ² + 4u²/γ²τ⁴ - 4/γ²τ²]`.
    FirstOrder,
}

pub fn analytic_polarization_poly(
    params: &MediumParams,
    pulse: &PulseSpec,
    form: PolynomialForm,
    z: f64,
    t: f64,
) -> Result<Complex64> {
    let g = params.g();
    let gm = params.gamma();
    let c = params.c_light();
    let tau = pulse.tau();
    let s = c * t + pulse.z0();
    let (t2, t4) = (tau * tau, tau.powi(4));
    let head = c * c * gm.powi(6) * t4 + 8.0 * c * z * gm.powi(3) * t2 * g * g;
    let tail = 2.0 * c * gm.powi(5) * t2 * s + 4.0 * (gm * gm * s + 4.0 * g * g * z).powi(2);
    let v = match form {
        PolynomialForm::ChirpedLiteral => {
            let e = analytic_field(params, pulse, z, t)?;
            let brace = head - 4.0 * c * c * gm.powi(3) * t2 + tail;
            g * e * brace / (32.0 * c * c * t4 * gm.powi(9))
        }
        PolynomialForm::FirstOrder => {
            let e = first_order_field(params, pulse, z, t);
            let brace = head - 4.0 * c * c * gm.powi(4) * t2 + tail;
            2.0 * g * e * brace / (c * c * t4 * gm.powi(7))
        }
    };
    Ok(Complex64::new(0.0, v))
}

/// Bandwidth bracket `1 - 2/(γτ)² + 12/(γτ)⁴`.
pub fn fidelity_bracket(gamma_tau: f64) -> f64 {
    let x = gamma_tau.powi(-2);
    1.0 - 2.0 * x + 12.0 * x * x
}

/// `F = (1 - e^{-α})[1 - 2/(γτ)² + 12/(γτ)⁴]`.
pub fn analytic_fidelity(params: &MediumParams, pulse: &PulseSpec) -> f64 {
    (1.0 - (-params.optical_depth()).exp()) * fidelity_bracket(params.gamma() * pulse.tau())
}

/// `I_p(z) = ∫_{t≥0} |P(z,t)|² dt` of a closed form, by trapezoid on `time`.
pub fn intensity_profile_with(
    time: &TimeGrid,
    z: &[f64],
    p: impl Fn(f64, f64) -> Result<Complex64> + Sync,
) -> Result<Vec<f64>> {
    let w = time.causal_weights();
    z.iter()
        .map(|&zi| {
            w.iter()
                .enumerate()
                .filter(|(_, w)| **w > 0.0)
                .map(|(k, w)| Ok(w * p(zi, time.time(k))?.norm_sqr()))
                .sum()
        })
        .collect()
}

/// Largest `|P_linear - P_chirped|` over the samples, relative to the largest
/// `|P_linear|`. Points with `ξ(z)² <= 0` are skipped.
pub fn polarization_form_discrepancy(
    params: &MediumParams,
    pulse: &PulseSpec,
    z: &[f64],
    t: &[f64],
) -> f64 {
    let mut peak: f64 = 0.0;
    let mut worst: f64 = 0.0;
    for &zi in z {
        if xi_squared(params, pulse, zi) <= 0.0 {
            continue;
        }
        for &ti in t {
            let a = analytic_polarization(params, pulse, PolarizationForm::LinearResponse, zi, ti).unwrap_or_default();
            let b = analytic_polarization(params, pulse, PolarizationForm::Chirped, zi, ti).unwrap_or_default();
            peak = peak.max(a.norm());
            worst = worst.max((a - b).norm());
        }
    }
    if peak > 0.0 {
        worst / peak
    } else {
        0.0
    }
}

/// Reference: `(1 - erf(z0/cτ))/(2c)`, the incident norm over `t >= 0`.
pub fn incident_norm(pulse: &PulseSpec) -> f64 {
    (1.0 - erf(pulse.z0() / (pulse.c_light() * pulse.tau()))) / (2.0 * pulse.c_light())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn setup(g: f64, gamma_tau: f64) -> (MediumParams, PulseSpec) {
        let p = MediumParams::rubidium_defaults()
            .with_blockade_radius(20.0)
            .unwrap()
            .with_g(g)
            .unwrap();
        let pulse = PulseSpec::with_default_offset(gamma_tau, p.c_light()).unwrap();
        (p, pulse)
    }

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for k in 1..n {
            s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn fidelity_point_value() {
        let (p, pulse) = setup(1000.0, 5.0);
        assert_relative_eq!(fidelity_bracket(5.0), 0.9392, epsilon = 1e-12);
        let alpha = p.optical_depth();
        assert!((analytic_fidelity(&p, &pulse) - 0.9392 * (1.0 - (-alpha).exp())).abs() < 1e-6);
        assert!((analytic_fidelity(&p, &pulse) - 0.94).abs() < 0.005);
    }

    #[test]
    fn fidelity_long_pulse_limit() {
        let (p, pulse) = setup(700.0, 1e4);
        let alpha = p.optical_depth();
        assert!((analytic_fidelity(&p, &pulse) - (1.0 - (-alpha).exp())).abs() < 1e-7);
    }

    #[test]
    fn field_at_entrance_is_input_pulse() {
        let (p, pulse) = setup(1000.0, 5.0);
        for t in [10.0, 25.0, 31.0] {
            let a = analytic_field(&p, &pulse, 0.0, t).unwrap();
            assert_relative_eq!(a, pulse.boundary_signal(t), max_relative = 1e-13);
        }
    }

    #[test]
    fn exit_peak_attenuation() {
        let (p, pulse) = setup(500.0, 5.0);
        let l = p.length();
        let xi = xi_squared(&p, &pulse, l).sqrt();
        let t_peak = pulse.arrival_time() - advance(&p, l);
        let ratio = (analytic_field(&p, &pulse, l, t_peak).unwrap()
            / analytic_field(&p, &pulse, 0.0, pulse.arrival_time()).unwrap())
        .powi(2);
        assert_relative_eq!(ratio, (-p.optical_depth()).exp() / xi.powi(2), max_relative = 1e-12);
        // the time-integrated intensity carries one factor 1/ξ
        let num = simpson(|t| analytic_field(&p, &pulse, l, t).unwrap().powi(2), 0.0, 80.0, 4000);
        let expect = (-p.optical_depth()).exp() / (2.0 * p.c_light() * xi)
            * one_plus_erf((l - pulse.z0()) / (p.c_light() * pulse.tau() * xi)
                - p.optical_depth() / (pulse.tau() * xi));
        assert_relative_eq!(num, expect, max_relative = 1e-6);
    }

    #[test]
    fn chirp_breakdown_is_an_error() {
        let (p, pulse) = setup(1000.0, 5.0);
        assert!(xi_squared(&p, &pulse, p.length()) < 0.0);
        assert!(matches!(
            analytic_field(&p, &pulse, p.length(), 20.0),
            Err(Error::Regime(_))
        ));
        let t = analytic_transmission(&p, &pulse);
        assert!(t.chirped.is_none());
        assert_eq!(t.value(), t.simplified);
        assert!(t
            .guard
            .warnings
            .iter()
            .any(|w| matches!(w, RegimeWarning::ChirpBreakdown { .. })));
        assert!(t.guard.in_regime());
    }

    #[test]
    fn transmission_limits() {
        let (p, pulse) = setup(0.0, 5.0);
        let t = analytic_transmission(&p, &pulse);
        assert!((t.value() - 1.0).abs() < 1e-6);
        assert!((t.simplified - 1.0).abs() < 1e-6);

        let (p, pulse) = setup(600.0, 1e5);
        let t = analytic_transmission(&p, &pulse);
        let expect = (-p.optical_depth()).exp();
        assert_relative_eq!(t.value(), expect, max_relative = 1e-3);
    }

    #[test]
    fn incident_norm_integral() {
        let (_, pulse) = setup(0.0, 5.0);
        let num = simpson(|t| pulse.boundary_signal(t).powi(2), 0.0, 100.0, 2000);
        assert_relative_eq!(num, incident_norm(&pulse), max_relative = 1e-9);
    }

    #[test]
    fn polarization_vanishes_without_coupling() {
        let (p, pulse) = setup(0.0, 5.0);
        for form in [PolarizationForm::LinearResponse, PolarizationForm::Chirped, PolarizationForm::Auto] {
            assert_eq!(analytic_polarization(&p, &pulse, form, 3.0, 25.0).unwrap().norm(), 0.0);
        }
        for form in [PolynomialForm::ChirpedLiteral, PolynomialForm::FirstOrder] {
            assert_eq!(analytic_polarization_poly(&p, &pulse, form, 3.0, 25.0).unwrap().norm(), 0.0);
        }
    }

    #[test]
    fn linear_response_form_is_convolution_of_first_order_field() {
        let (p, pulse) = setup(500.0, 5.0);
        let gamma = p.gamma();
        for (z, t) in [(0.0, 25.0), (7.0, 20.0), (15.0, 30.0)] {
            let conv = simpson(
                |s| (-gamma * (t - s) / 2.0).exp() * first_order_field(&p, &pulse, z, s),
                t - 80.0,
                t,
                8000,
            ) * p.g();
            let closed = analytic_polarization(&p, &pulse, PolarizationForm::LinearResponse, z, t).unwrap();
            assert_relative_eq!(closed.im, conv, max_relative = 1e-8);
        }
    }

    #[test]
    fn chirped_form_is_convolution_of_chirped_field() {
        let (p, pulse) = setup(300.0, 8.0);
        let gamma = p.gamma();
        for (z, t) in [(2.0, 35.0), (12.0, 40.0), (20.0, 42.0)] {
            let conv = simpson(
                |s| (-gamma * (t - s) / 2.0).exp() * analytic_field(&p, &pulse, z, s).unwrap(),
                t - 120.0,
                t,
                12000,
            ) * p.g();
            let closed = analytic_polarization(&p, &pulse, PolarizationForm::Chirped, z, t).unwrap();
            assert_relative_eq!(closed.im, conv, max_relative = 1e-8);
        }
    }

    #[test]
    fn first_order_polynomial_integrates_to_fidelity() {
        for (g, gt) in [(1000.0, 5.0), (400.0, 3.0), (700.0, 12.0)] {
            let (p, pulse) = setup(g, gt);
            let t0 = pulse.arrival_time();
            let span = 14.0 * pulse.tau();
            let l = p.length();
            let inner = |z: f64| {
                let c = t0 - advance(&p, z);
                simpson(
                    |t| analytic_polarization_poly(&p, &pulse, PolynomialForm::FirstOrder, z, t).unwrap().norm_sqr(),
                    c - span,
                    c + span,
                    4000,
                )
            };
            let total = p.gamma() * simpson(inner, 0.0, l, 400);
            assert_relative_eq!(total, analytic_fidelity(&p, &pulse), max_relative = 1e-7);
        }
    }

    #[test]
    fn first_order_polynomial_matches_truncated_fourier_integral() {
        // Oracle: ∫dω χ₂(ω) Ẽ0(ω) e^{-iωt + i(gz/c)χ₁(ω)} by direct quadrature.
        let (p, pulse) = setup(600.0, 6.0);
        let (g, gm, c) = (p.g(), p.gamma(), p.c_light());
        let i = Complex64::new(0.0, 1.0);
        for (z, t) in [(4.0, 26.0), (13.0, 33.0), (20.0, 29.0)] {
            let integrand = |w: f64| {
                let chi2 = (2.0 * g / gm) * (i - 2.0 * w / gm - 4.0 * i * w * w / (gm * gm));
                let chi1 = (2.0 * g / gm) * (i - 2.0 * w / gm);
                chi2 * pulse.spectrum(w) * (-i * w * t + i * g * z / c * chi1).exp()
            };
            let wmax = 12.0 / pulse.tau();
            let n = 6000;
            let h = 2.0 * wmax / n as f64;
            let mut sum = integrand(-wmax) + integrand(wmax);
            for k in 1..n {
                sum += integrand(-wmax + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
            }
            let oracle = sum * h / 3.0;
            let closed = analytic_polarization_poly(&p, &pulse, PolynomialForm::FirstOrder, z, t).unwrap();
            assert!((oracle - closed).norm() <= 1e-9 * closed.norm().max(1e-12), "z={z} t={t}");
        }
    }

    #[test]
    fn literal_polynomial_matches_raw_expression() {
        // Compare with the raw expression evaluated independently.
        let (p, pulse) = setup(300.0, 8.0);
        let (g, gm, c, tau, z0) = (p.g(), p.gamma(), p.c_light(), pulse.tau(), pulse.z0());
        let (z, t) = (6.0, 37.0);
        let lab = t + z / c;
        let e = analytic_field(&p, &pulse, z, t).unwrap();
        let q = c * lab - z + z0;
        let brace = c * c * gm.powi(6) * tau.powi(4) + 8.0 * c * z * gm.powi(3) * tau * tau * g * g
            - 4.0 * c * c * gm.powi(3) * tau * tau
            + 2.0 * c * gm.powi(5) * tau * tau * q
            + 4.0 * (gm * gm * q + 4.0 * g * g * z).powi(2);
        let expect = g * e / (32.0 * c * c * tau.powi(4) * gm.powi(9)) * brace;
        let got = analytic_polarization_poly(&p, &pulse, PolynomialForm::ChirpedLiteral, z, t).unwrap();
        assert_relative_eq!(got.im, expect, max_relative = 1e-6);
    }

    #[test]
    fn forms_agree_for_long_pulses() {
        // With ξ(L) close to 1 all intensity profiles coincide within 5%.
        let (p, pulse) = setup(250.0, 20.0);
        assert!(xi_squared(&p, &pulse, p.length()) > 0.95f64.powi(2));
        let tg = TimeGrid::new(0.0, 250.0, 5001).unwrap();
        let z: Vec<f64> = (0..=10).map(|k| 2.0 * k as f64).collect();
        let a12 = intensity_profile_with(&tg, &z, |z, t| {
            analytic_polarization(&p, &pulse, PolarizationForm::Chirped, z, t)
        })
        .unwrap();
        let a13 = intensity_profile_with(&tg, &z, |z, t| {
            analytic_polarization_poly(&p, &pulse, PolynomialForm::FirstOrder, z, t)
        })
        .unwrap();
        let eq6 = intensity_profile_with(&tg, &z, |z, t| {
            analytic_polarization(&p, &pulse, PolarizationForm::LinearResponse, z, t)
        })
        .unwrap();
        for k in 0..z.len() {
            assert!((a12[k] / a13[k] - 1.0).abs() < 0.05, "z={} {} {}", z[k], a12[k], a13[k]);
            assert!((eq6[k] / a13[k] - 1.0).abs() < 0.05);
        }
        let t: Vec<f64> = (0..200).map(|k| k as f64).collect();
        assert!(polarization_form_discrepancy(&p, &pulse, &z, &t) > 0.0);
    }

    proptest! {
        #[test]
        fn transmission_monotone_in_coupling_and_length(
            g in 50.0f64..900.0, dg in 1.0f64..100.0,
            l in 5.0f64..30.0, dl in 0.5f64..10.0,
            gt in 3.0f64..40.0,
        ) {
            let base = MediumParams::rubidium_defaults();
            let pulse = PulseSpec::with_default_offset(gt, base.c_light()).unwrap();
            let at = |g: f64, l: f64| {
                let p = base.clone().with_g(g).unwrap().with_length(l).unwrap();
                analytic_transmission(&p, &pulse).simplified
            };
            prop_assert!(at(g + dg, l) <= at(g, l) * (1.0 + 1e-12));
            prop_assert!(at(g, l + dl) <= at(g, l) * (1.0 + 1e-12));
        }

        #[test]
        fn fidelity_in_unit_interval(g in 0.0f64..2000.0, gt in MIN_GAMMA_TAU..100.0) {
            let (p, pulse) = setup(g, gt);
            let f = analytic_fidelity(&p, &pulse);
            prop_assert!((0.0..=1.0).contains(&f));
        }
    }
}
