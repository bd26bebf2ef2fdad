//! Medium parameters, the incident photon pulse and the stored spinwave.
//!
//! All quantities are in internal units (see [`crate::units`]). Frequencies
//! are detunings from the probe resonance in the rotating frame. The Fourier
//! convention throughout the crate is
//! `f(t) = ∫dω e^{-iωt} f̃(ω)`, `f̃(ω) = (1/2π) ∫dt e^{iωt} f(t)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::units::UnitSystem;

/// Physical constants of the atomic medium, in internal units.
///
/// `c6` may be negative; only its magnitude enters the blockade radius.
#[derive(Debug, Clone, PartialEq)]
pub struct MediumParams {
    gamma: f64,
    omega_c: f64,
    g: f64,
    g_single: Option<f64>,
    n_atoms: Option<f64>,
    length: f64,
    c6: f64,
    c_light: f64,
}

impl MediumParams {
    pub fn new(gamma: f64, omega_c: f64, g: f64, length: f64, c6: f64, c_light: f64) -> Result<Self> {
        let p = Self {
            gamma,
            omega_c,
            g,
            g_single: None,
            n_atoms: None,
            length,
            c6,
            c_light,
        };
        p.validate()?;
        Ok(p)
    }

    /// Rubidium parameters used for the transmission figures: L = 20 um,
    /// Ω = 2γ, g = 1000γ and C6 = 4.2e6 GHz·um⁶ (cyclic), with γ = 2π×5.7 MHz.
    pub fn rubidium_defaults() -> Self {
        let units = UnitSystem::rubidium();
        let c6_si = 2.0 * PI * 4.2e6 * 1e9 * 1e-36;
        Self::new(
            1.0,
            2.0,
            1000.0,
            20.0,
            units.c6_to_internal(c6_si),
            units.speed_of_light(),
        )
        .expect("default parameters are valid")
    }

    fn validate(&self) -> Result<()> {
        let finite = [self.gamma, self.omega_c, self.g, self.length, self.c6, self.c_light]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(invalid("medium", "all parameters must be finite"));
        }
        if self.gamma <= 0.0 {
            return Err(invalid("gamma", "must be > 0"));
        }
        if self.omega_c < 0.0 {
            return Err(invalid("omega_c", "must be >= 0"));
        }
        if self.g < 0.0 {
            return Err(invalid("g", "must be >= 0"));
        }
        if self.length <= 0.0 {
            return Err(invalid("length", "must be > 0"));
        }
        if self.c_light <= 0.0 {
            return Err(invalid("c_light", "must be > 0"));
        }
        if let (Some(gs), Some(n)) = (self.g_single, self.n_atoms) {
            let expect = n.sqrt() * gs;
            if ((self.g - expect) / expect.max(f64::MIN_POSITIVE)).abs() > 1e-12 {
                return Err(invalid("g", "must equal sqrt(n_atoms) * g_single"));
            }
        }
        Ok(())
    }

    /// Sets the collective coupling from the single-atom coupling and atom count.
    pub fn with_atoms(mut self, g_single: f64, n_atoms: f64) -> Result<Self> {
        if !(g_single >= 0.0 && n_atoms > 0.0) {
            return Err(invalid("n_atoms", "need g_single >= 0 and n_atoms > 0"));
        }
        self.g_single = Some(g_single);
        self.n_atoms = Some(n_atoms);
        self.g = n_atoms.sqrt() * g_single;
        self.validate()?;
        Ok(self)
    }

    pub fn with_g(mut self, g: f64) -> Result<Self> {
        self.g = g;
        self.g_single = None;
        self.n_atoms = None;
        self.validate()?;
        Ok(self)
    }

    pub fn with_omega_c(mut self, omega_c: f64) -> Result<Self> {
        self.omega_c = omega_c;
        self.validate()?;
        Ok(self)
    }

    pub fn with_length(mut self, length: f64) -> Result<Self> {
        self.length = length;
        self.validate()?;
        Ok(self)
    }

    pub fn with_c6(mut self, c6: f64) -> Result<Self> {
        self.c6 = c6;
        self.validate()?;
        Ok(self)
    }

    /// Chooses C6 (positive sign) so that the blockade radius equals `radius`.
    pub fn with_blockade_radius(self, radius: f64) -> Result<Self> {
        if self.omega_c == 0.0 {
            return Err(Error::BlockadeUndefined);
        }
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(invalid("blockade_radius", "must be finite and >= 0"));
        }
        let c6 = 2.0 * self.omega_c * self.omega_c * radius.powi(6) / self.gamma;
        self.with_c6(c6)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }
    pub fn g(&self) -> f64 {
        self.g
    }
    pub fn g_single(&self) -> Option<f64> {
        self.g_single
    }
    pub fn n_atoms(&self) -> Option<f64> {
        self.n_atoms
    }
    pub fn length(&self) -> f64 {
        self.length
    }
    pub fn c6(&self) -> f64 {
        self.c6
    }
    pub fn c_light(&self) -> f64 {
        self.c_light
    }

    pub fn blockade_radius(&self) -> Result<f64> {
        blockade_radius(self)
    }

    pub fn optical_depth(&self) -> f64 {
        optical_depth(self)
    }
}

/// `R_b = |γ C6 / 2Ω²|^{1/6}`.
pub fn blockade_radius(params: &MediumParams) -> Result<f64> {
    if params.omega_c == 0.0 {
        return Err(Error::BlockadeUndefined);
    }
    let r6 = (params.gamma * params.c6 / (2.0 * params.omega_c * params.omega_c)).abs();
    Ok(r6.powf(1.0 / 6.0))
}

/// Resonant two-level optical depth `α = 4g²L/(cγ)`.
pub fn optical_depth(params: &MediumParams) -> f64 {
    4.0 * params.g * params.g * params.length / (params.c_light * params.gamma)
}

/// Gaussian single-photon pulse, normalised in space at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    tau: f64,
    z0: f64,
    c_light: f64,
}

impl PulseSpec {
    /// `z0` must lie well before the medium: `z0 <= -4 c τ`.
    pub fn new(tau: f64, z0: f64, c_light: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(invalid("tau", "must be > 0"));
        }
        if !(c_light.is_finite() && c_light > 0.0) {
            return Err(invalid("c_light", "must be > 0"));
        }
        if !(z0.is_finite() && z0 < 0.0 && z0.abs() >= 4.0 * c_light * tau) {
            return Err(invalid("z0", "must satisfy z0 < 0 and |z0| >= 4 c tau"));
        }
        Ok(Self { tau, z0, c_light })
    }

    /// Pulse centred at `z0 = -5 c τ`.
    pub fn with_default_offset(tau: f64, c_light: f64) -> Result<Self> {
        Self::new(tau, -5.0 * c_light * tau, c_light)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
    pub fn z0(&self) -> f64 {
        self.z0
    }
    pub fn c_light(&self) -> f64 {
        self.c_light
    }

    /// Time at which the pulse centre reaches `z = 0`.
    pub fn arrival_time(&self) -> f64 {
        -self.z0 / self.c_light
    }

    fn peak(&self) -> f64 {
        (PI * self.c_light * self.c_light * self.tau * self.tau).powf(-0.25)
    }

    /// Free-space field `E(z, t) = E(z - ct, 0)`.
    pub fn field(&self, z: f64, t: f64) -> f64 {
        let ct = self.c_light * self.tau;
        let x = z - self.c_light * t - self.z0;
        self.peak() * (-x * x / (2.0 * ct * ct)).exp()
    }

    /// The incident signal `E(0, t)` seen at the medium entrance.
    pub fn boundary_signal(&self, t: f64) -> f64 {
        let u = (t - self.arrival_time()) / self.tau;
        self.peak() * (-0.5 * u * u).exp()
    }

    /// Analytic Fourier transform of [`boundary_signal`](Self::boundary_signal).
    pub fn spectrum(&self, omega: f64) -> Complex64 {
        let amp = self.peak() * self.tau * (2.0 * PI).sqrt() / (2.0 * PI)
            * (-0.5 * omega * omega * self.tau * self.tau).exp();
        Complex64::from_polar(amp, omega * self.arrival_time())
    }
}

pub fn gaussian_pulse(spec: &PulseSpec, z: f64, t: f64) -> Complex64 {
    Complex64::new(spec.field(z, t), 0.0)
}

pub fn gaussian_pulse_spectrum(spec: &PulseSpec, omega: f64) -> Complex64 {
    spec.spectrum(omega)
}

/// A single stored gate excitation delocalised over candidate positions.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinwaveState {
    positions: Vec<f64>,
    wavenumber: f64,
    weights: Vec<Complex64>,
}

impl SpinwaveState {
    /// Uniform spinwave `(1/√N) Σ e^{ikZ_j} |Z_j⟩`.
    pub fn uniform(positions: Vec<f64>, wavenumber: f64, length: f64) -> Result<Self> {
        let n = positions.len();
        if n == 0 {
            return Err(invalid("spinwave.positions", "at least one position required"));
        }
        let norm = (n as f64).sqrt().recip();
        let weights = positions
            .iter()
            .map(|z| Complex64::from_polar(norm, wavenumber * z))
            .collect();
        Self::with_weights(positions, wavenumber, weights, length)
    }

    /// `n` positions at the centres of equal cells covering `[0, length]`.
    pub fn cell_centred(n: usize, length: f64, wavenumber: f64) -> Result<Self> {
        let positions = (0..n)
            .map(|j| (j as f64 + 0.5) * length / n as f64)
            .collect();
        Self::uniform(positions, wavenumber, length)
    }

    pub fn with_weights(
        positions: Vec<f64>,
        wavenumber: f64,
        weights: Vec<Complex64>,
        length: f64,
    ) -> Result<Self> {
        if positions.is_empty() {
            return Err(invalid("spinwave.positions", "at least one position required"));
        }
        if weights.len() != positions.len() {
            return Err(invalid("spinwave.weights", "one weight per position required"));
        }
        if positions
            .iter()
            .any(|z| !(z.is_finite() && (0.0..=length).contains(z)))
        {
            return Err(invalid("spinwave.positions", "positions must lie in [0, L]"));
        }
        let norm: f64 = weights.iter().map(|w| w.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(invalid("spinwave.weights", format!("sum |w|^2 = {norm}, expected 1")));
        }
        if !wavenumber.is_finite() {
            return Err(invalid("spinwave.wavenumber", "must be finite"));
        }
        Ok(Self {
            positions,
            wavenumber,
            weights,
        })
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }
    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }
    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }
    pub fn len(&self) -> usize {
        self.positions.len()
    }
    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// True when every weight has modulus `1/√N`.
    pub fn is_uniform(&self) -> bool {
        let expect = 1.0 / self.len() as f64;
        self.weights.iter().all(|w| (w.norm_sqr() - expect).abs() < 1e-12)
    }

    /// Same spinwave with every weight multiplied by `e^{iφ}`.
    pub fn with_global_phase(&self, phase: f64) -> Self {
        let rot = Complex64::from_polar(1.0, phase);
        Self {
            weights: self.weights.iter().map(|w| w * rot).collect(),
            ..self.clone()
        }
    }
}
