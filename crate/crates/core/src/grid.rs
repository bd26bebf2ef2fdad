//! Discretisation grids shared by the solvers.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::physics::{MediumParams, PulseSpec};

/// Uniform frequency samples `ω_m = (m - n/2) Δω`, `m = 0..n`, with
/// `Δω = 2 ω_max / n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    n: usize,
    omega_max: f64,
}

impl FrequencyGrid {
    pub fn new(n: usize, omega_max: f64) -> Result<Self> {
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::Grid(format!("n_omega = {n} must be even and >= 2")));
        }
        if !(omega_max.is_finite() && omega_max > 0.0) {
            return Err(Error::Grid("omega_max must be > 0".into()));
        }
        Ok(Self { n, omega_max })
    }

    /// Smallest power-of-two grid satisfying [`validate`](Self::validate).
    pub fn auto(params: &MediumParams, pulse: &PulseSpec) -> Self {
        let omega_max = required_band(params, pulse);
        let spacing = required_spacing(params, pulse);
        let n = ((2.0 * omega_max / spacing).ceil() as usize).next_power_of_two().max(64);
        Self { n, omega_max }
    }

    pub fn validate(&self, params: &MediumParams, pulse: &PulseSpec) -> Result<()> {
        let band = required_band(params, pulse);
        if self.omega_max < band * (1.0 - 1e-12) {
            return Err(Error::Grid(format!(
                "omega_max = {} must cover max(8/tau, 4 gamma) = {band}",
                self.omega_max
            )));
        }
        let spacing = required_spacing(params, pulse);
        if self.spacing() > spacing * (1.0 + 1e-12) {
            return Err(Error::Grid(format!(
                "frequency spacing {} exceeds limit {spacing}",
                self.spacing()
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }
    pub fn spacing(&self) -> f64 {
        2.0 * self.omega_max / self.n as f64
    }
    pub fn omega(&self, m: usize) -> f64 {
        (m as f64 - (self.n / 2) as f64) * self.spacing()
    }
    pub fn omegas(&self) -> Vec<f64> {
        (0..self.n).map(|m| self.omega(m)).collect()
    }

    /// Period `2π/Δω` of the reconstructed time signal.
    pub fn window(&self) -> f64 {
        2.0 * PI / self.spacing()
    }

    /// Time samples of the inverse transform. The window starts an eighth of
    /// a period before `t = 0` so the incident tail never touches its edge.
    pub fn time_grid(&self) -> TimeGrid {
        let w = self.window();
        TimeGrid {
            start: -w / 8.0,
            step: w / self.n as f64,
            n: self.n,
        }
    }
}

fn required_band(params: &MediumParams, pulse: &PulseSpec) -> f64 {
    (8.0 / pulse.tau()).max(4.0 * params.gamma())
}

/// Slowest time the signal needs: arrival, pulse tail, EIT group delay and
/// ten lifetimes of ringing.
fn slowest_timescale(params: &MediumParams, pulse: &PulseSpec) -> f64 {
    let delay = if params.omega_c() > 0.0 {
        params.g().powi(2) * params.length() / (params.c_light() * params.omega_c().powi(2))
    } else {
        0.0
    };
    pulse.arrival_time() + 6.0 * pulse.tau() + delay + 10.0 / params.gamma()
}

fn required_spacing(params: &MediumParams, pulse: &PulseSpec) -> f64 {
    let base = (1.0 / (8.0 * pulse.tau())).min(params.gamma() / 32.0);
    // the window starts at -W/8, so 7/8 of it must outlast the signal
    let window_limit = 2.0 * PI * 7.0 / 8.0 / slowest_timescale(params, pulse);
    base.min(window_limit)
}

/// Uniform time samples `t_k = start + k·step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub step: f64,
    pub n: usize,
}

impl TimeGrid {
    pub fn new(start: f64, end: f64, n: usize) -> Result<Self> {
        if n < 2 || end.is_nan() || start.is_nan() || end <= start {
            return Err(Error::Grid("time grid needs n >= 2 and end > start".into()));
        }
        Ok(Self {
            start,
            step: (end - start) / (n - 1) as f64,
            n,
        })
    }

    pub fn time(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }
    pub fn times(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.time(k)).collect()
    }
    pub fn end(&self) -> f64 {
        self.time(self.n - 1)
    }

    /// Trapezoid weights restricted to `t >= 0`.
    pub fn causal_weights(&self) -> Vec<f64> {
        let first = (0..self.n).find(|&k| self.time(k) >= 0.0).unwrap_or(self.n);
        let mut w = vec![0.0; self.n];
        if first + 1 < self.n {
            for wk in w.iter_mut().take(self.n).skip(first) {
                *wk = self.step;
            }
            w[first] *= 0.5;
            w[self.n - 1] *= 0.5;
        }
        w
    }

    pub fn approx_eq(&self, other: &TimeGrid) -> bool {
        self.n == other.n
            && (self.start - other.start).abs() <= 1e-12 * self.start.abs().max(1.0)
            && (self.step - other.step).abs() <= 1e-12 * self.step.abs()
    }
}

/// `n_z` uniform points covering `[0, L]`, both boundaries included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    n_z: usize,
    length: f64,
}

pub const DEFAULT_N_Z: usize = 257;

impl SpatialGrid {
    pub fn new(n_z: usize, length: f64) -> Result<Self> {
        if n_z < 2 {
            return Err(Error::Grid("n_z must be >= 2".into()));
        }
        if length.is_nan() || length <= 0.0 {
            return Err(Error::Grid("length must be > 0".into()));
        }
        Ok(Self { n_z, length })
    }

    pub fn auto(params: &MediumParams) -> Self {
        let needed = min_points(params);
        Self {
            n_z: needed.max(DEFAULT_N_Z),
            length: params.length(),
        }
    }

    /// At least 64 points per `min(R_b, L)`.
    pub fn validate(&self, params: &MediumParams) -> Result<()> {
        if (self.length - params.length()).abs() > 1e-12 * params.length() {
            return Err(Error::Grid("spatial grid length differs from medium length".into()));
        }
        let needed = min_points(params);
        if self.n_z < needed {
            return Err(Error::Grid(format!(
                "n_z = {} too coarse; need >= {needed} to resolve the blockade radius",
                self.n_z
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n_z
    }
    pub fn is_empty(&self) -> bool {
        self.n_z == 0
    }
    pub fn length(&self) -> f64 {
        self.length
    }
    pub fn spacing(&self) -> f64 {
        self.length / (self.n_z - 1) as f64
    }
    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n_z {
            self.length
        } else {
            i as f64 * self.spacing()
        }
    }
    pub fn points(&self) -> Vec<f64> {
        (0..self.n_z).map(|i| self.point(i)).collect()
    }

    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let h = self.spacing();
        let mut w = vec![h; self.n_z];
        w[0] *= 0.5;
        w[self.n_z - 1] *= 0.5;
        w
    }
}

fn min_points(params: &MediumParams) -> usize {
    let scale = match params.blockade_radius() {
        Ok(rb) if rb > 0.0 => rb.min(params.length()),
        _ => params.length(),
    };
    (64.0 * params.length() / scale).ceil() as usize + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(tau: f64) -> (MediumParams, PulseSpec) {
        let p = MediumParams::rubidium_defaults();
        let pulse = PulseSpec::with_default_offset(tau, p.c_light()).unwrap();
        (p, pulse)
    }

    #[test]
    fn auto_grids_are_valid() {
        for tau in [0.1, 1.0, 5.0, 50.0] {
            let (p, pulse) = setup(tau);
            let fg = FrequencyGrid::auto(&p, &pulse);
            fg.validate(&p, &pulse).unwrap();
            assert!(fg.len().is_power_of_two());
            let tg = fg.time_grid();
            assert!(tg.start <= -6.0 * tau);
            assert!(tg.end() > pulse.arrival_time() + 6.0 * tau + 10.0);
        }
        let (p, _) = setup(5.0);
        SpatialGrid::auto(&p).validate(&p).unwrap();
    }

    #[test]
    fn frequency_grid_rejects_narrow_band_and_coarse_spacing() {
        let (p, pulse) = setup(5.0);
        assert!(FrequencyGrid::new(512, 2.0).unwrap().validate(&p, &pulse).is_err());
        assert!(FrequencyGrid::new(64, 4.0).unwrap().validate(&p, &pulse).is_err());
        assert!(FrequencyGrid::new(7, 4.0).is_err());
    }

    #[test]
    fn spatial_grid_resolves_blockade_radius() {
        let p = MediumParams::rubidium_defaults().with_blockade_radius(2.0).unwrap();
        assert!(SpatialGrid::new(257, 20.0).unwrap().validate(&p).is_err());
        let g = SpatialGrid::auto(&p);
        assert!(g.spacing() <= 2.0 / 64.0 + 1e-15);
        assert_eq!(g.point(g.len() - 1), 20.0);
    }

    #[test]
    fn causal_weights_start_at_zero() {
        let tg = TimeGrid { start: -2.0, step: 0.5, n: 9 };
        let w = tg.causal_weights();
        assert_eq!(w[..4], [0.0; 4]);
        assert_eq!(w[4], 0.25);
        assert_eq!(w[8], 0.25);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-15);
    }
}
