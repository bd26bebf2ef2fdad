//! Van der Waals gate potential and the probe susceptibility.
//!
//! The susceptibility here carries a factor of `g`, so that the field picks up
//! the phase `(g/c)∫χ dz` while crossing the medium.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::physics::MediumParams;

/// Positions closer than this fraction of `R_b` to the gate atom use the
/// two-level limit of the susceptibility.
pub const TWO_LEVEL_SWITCH_FRACTION: f64 = 1e-3;

/// How the stored gate excitation shifts the Rydberg level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InteractionModel {
    /// `V(z) = C6/(Z - z)^6`.
    VanDerWaals,
    /// Infinite shift everywhere: an ensemble of two-level atoms.
    TwoLevel,
    /// No gate atom, `V = 0` (plain EIT).
    NoGate,
}

/// Level shift at a point. `Infinite` marks the blockaded core.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    Finite(f64),
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GatePotential {
    position: f64,
    c6: f64,
    model: InteractionModel,
    switch_radius: f64,
}

impl GatePotential {
    pub fn new(params: &MediumParams, position: f64, model: InteractionModel) -> Self {
        let switch_radius = params
            .blockade_radius()
            .map(|rb| TWO_LEVEL_SWITCH_FRACTION * rb)
            .unwrap_or(0.0);
        Self {
            position,
            c6: params.c6(),
            model,
            switch_radius,
        }
    }

    pub fn position(&self) -> f64 {
        self.position
    }
    pub fn c6(&self) -> f64 {
        self.c6
    }
    pub fn model(&self) -> InteractionModel {
        self.model
    }

    /// True when the potential does not depend on `z`.
    pub fn is_uniform(&self) -> bool {
        match self.model {
            InteractionModel::VanDerWaals => self.c6 == 0.0,
            _ => true,
        }
    }

    pub fn at(&self, z: f64) -> Potential {
        match self.model {
            InteractionModel::NoGate => Potential::Finite(0.0),
            InteractionModel::TwoLevel => Potential::Infinite,
            InteractionModel::VanDerWaals => {
                if self.c6 == 0.0 {
                    return Potential::Finite(0.0);
                }
                let d = z - self.position;
                if d.abs() < self.switch_radius || d == 0.0 {
                    return Potential::Infinite;
                }
                let v = self.c6 / d.powi(6);
                if v.is_finite() {
                    Potential::Finite(v)
                } else {
                    Potential::Infinite
                }
            }
        }
    }
}

pub fn vdw_potential(pot: &GatePotential, z: f64) -> Potential {
    pot.at(z)
}

/// Two-level susceptibility `-g/(ω + iγ/2)`.
pub fn chi_two_level(params: &MediumParams, omega: f64) -> Complex64 {
    -params.g() / Complex64::new(omega, params.gamma() / 2.0)
}

/// `χ = g(ω - V)/(Ω² - (ω - V)(ω + iγ/2))` at shift `v`.
pub fn chi_at(params: &MediumParams, v: Potential, omega: f64) -> Complex64 {
    let chi = match v {
        Potential::Infinite => chi_two_level(params, omega),
        // Without a control field the (ω - V) factor cancels exactly.
        Potential::Finite(_) if params.omega_c() == 0.0 => chi_two_level(params, omega),
        Potential::Finite(v) => {
            let det = omega - v;
            let d = Complex64::new(omega, params.gamma() / 2.0);
            let om2 = params.omega_c() * params.omega_c();
            params.g() * det / (om2 - det * d)
        }
    };
    debug_assert!(
        chi.im >= -1e-12 * chi.norm().max(1.0),
        "susceptibility has gain: chi = {chi} at omega = {omega}"
    );
    chi
}

pub fn chi(params: &MediumParams, pot: &GatePotential, z: f64, omega: f64) -> Complex64 {
    chi_at(params, pot.at(z), omega)
}

/// Ratio `S̃/Ẽ = -Ωg/(Ω² - (ω - V)(ω + iγ/2))`.
///
/// Algebraically equal to `-Ω/(ω - V) · χ` but without the spurious pole at
/// `ω = V`.
pub fn spin_response_at(params: &MediumParams, v: Potential, omega: f64) -> Complex64 {
    let om = params.omega_c();
    match v {
        Potential::Infinite => Complex64::new(0.0, 0.0),
        _ if om == 0.0 => Complex64::new(0.0, 0.0),
        Potential::Finite(v) => {
            let d = Complex64::new(omega, params.gamma() / 2.0);
            -om * params.g() / (om * om - (omega - v) * d)
        }
    }
}

pub fn spin_response(params: &MediumParams, pot: &GatePotential, z: f64, omega: f64) -> Complex64 {
    spin_response_at(params, pot.at(z), omega)
}

/// Small-ω expansion of the two-level susceptibility,
/// `(2g/γ)[i - 2ω/γ - 4iω²/γ²]`, truncated after `order`.
pub fn chi_series(params: &MediumParams, omega: f64, order: u32) -> Result<Complex64> {
    if order > 2 {
        return Err(Error::UnsupportedOrder(order));
    }
    let x = omega / params.gamma();
    let terms = [
        Complex64::new(0.0, 1.0),
        Complex64::new(-2.0 * x, 0.0),
        Complex64::new(0.0, -4.0 * x * x),
    ];
    let sum: Complex64 = terms[..=order as usize].iter().sum();
    Ok(sum * (2.0 * params.g() / params.gamma()))
}
