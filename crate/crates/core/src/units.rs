//! Conversion between SI quantities and the internal unit system.
//!
//! Internally every rate is measured in units of the excited-state decay
//! rate `gamma` (so `gamma = 1`), times in `1/gamma`, and lengths in
//! micrometres. The speed of light then becomes a large number
//! (about 8.4e6 um*gamma for rubidium), which is why the solvers work in the
//! retarded frame.

use crate::error::{invalid, Result};

/// Vacuum speed of light in m/s.
pub const SPEED_OF_LIGHT_SI: f64 = 299_792_458.0;

/// Decay rate of the rubidium D-line excited state, 2pi x 5.7 MHz, in rad/s.
pub const RUBIDIUM_GAMMA_SI: f64 = 2.0 * std::f64::consts::PI * 5.7e6;

const UM_PER_M: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    gamma_si: f64,
}

impl UnitSystem {
    /// `gamma_si` is the decay rate in rad/s that becomes the unit of frequency.
    pub fn new(gamma_si: f64) -> Result<Self> {
        if !(gamma_si.is_finite() && gamma_si > 0.0) {
            return Err(invalid("gamma", "must be positive and finite"));
        }
        Ok(Self { gamma_si })
    }

    pub fn rubidium() -> Self {
        Self {
            gamma_si: RUBIDIUM_GAMMA_SI,
        }
    }

    pub fn gamma_si(&self) -> f64 {
        self.gamma_si
    }

    pub fn frequency_to_internal(&self, rad_per_s: f64) -> f64 {
        rad_per_s / self.gamma_si
    }

    pub fn frequency_to_si(&self, internal: f64) -> f64 {
        internal * self.gamma_si
    }

    pub fn time_to_internal(&self, seconds: f64) -> f64 {
        seconds * self.gamma_si
    }

    pub fn time_to_si(&self, internal: f64) -> f64 {
        internal / self.gamma_si
    }

    pub fn length_to_internal(&self, metres: f64) -> f64 {
        metres * UM_PER_M
    }

    pub fn length_to_si(&self, micrometres: f64) -> f64 {
        micrometres / UM_PER_M
    }

    pub fn speed_to_internal(&self, m_per_s: f64) -> f64 {
        m_per_s * UM_PER_M / self.gamma_si
    }

    pub fn speed_to_si(&self, internal: f64) -> f64 {
        internal * self.gamma_si / UM_PER_M
    }

    /// C6 given in rad/s * m^6.
    pub fn c6_to_internal(&self, si: f64) -> f64 {
        si / self.gamma_si * UM_PER_M.powi(6)
    }

    pub fn c6_to_si(&self, internal: f64) -> f64 {
        internal * self.gamma_si / UM_PER_M.powi(6)
    }

    /// Speed of light in internal units.
    pub fn speed_of_light(&self) -> f64 {
        self.speed_to_internal(SPEED_OF_LIGHT_SI)
    }
}
