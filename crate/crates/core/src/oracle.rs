//! Direct time-domain integration of the propagation equations, kept
//! independent of the spectral solver so the two can check each other.
//!
//! In retarded coordinates `(ζ, T) = (z, t - z/c)` the equations read
//!
//! ```text
//! ∂_ζ E = (ig/c) P
//! ∂_T P = -(γ/2) P + ig E + iΩ S
//! ∂_T S = -iV(ζ) S + iΩ P
//! ```
//!
//! The march in ζ uses the implicit trapezoid rule. At each ζ the `(P, S)`
//! system is advanced exactly for an `E` that is linear across the time
//! step, so the stiff shift `V` near the gate atom costs nothing. Both steps
//! are A-stable; the step bounds in [`OracleConfig`] are for accuracy only.

use nalgebra::{Matrix2, Matrix4, Vector2};
use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::grid::{SpatialGrid, TimeGrid};
use crate::physics::{MediumParams, PulseSpec};
use crate::solution::{FieldSolution, SolverKind};
use crate::susceptibility::{GatePotential, Potential};

/// Shifts above this are treated as an infinite (two-level) shift; the
/// neglected coupling is of relative order `Ω²/(γ|V|)`.
const SHIFT_CUTOFF: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub n_z: usize,
    pub time: TimeGrid,
    /// Largest allowed resonant optical depth `4g²Δz/(cγ)` per ζ step.
    pub max_step_depth: f64,
    /// Largest allowed time step as a fraction of τ.
    pub max_step_fraction: f64,
}

impl OracleConfig {
    pub fn new(n_z: usize, time: TimeGrid) -> Self {
        Self {
            n_z,
            time,
            max_step_depth: 0.5,
            max_step_fraction: 0.25,
        }
    }

    /// Same ζ samples as `sol`, time step divided by `refine`.
    pub fn matching(sol: &FieldSolution, refine: usize) -> Result<Self> {
        if refine == 0 {
            return Err(invalid("refine", "must be >= 1"));
        }
        let time = TimeGrid {
            start: sol.time.start,
            step: sol.time.step / refine as f64,
            n: (sol.time.n - 1) * refine + 1,
        };
        Ok(Self::new(sol.n_z(), time))
    }

    pub fn validate(&self, params: &MediumParams, pulse: &PulseSpec) -> Result<()> {
        if self.n_z < 2 || self.time.n < 2 {
            return Err(Error::Grid("oracle needs n_z >= 2 and n_t >= 2".into()));
        }
        let dz = params.length() / (self.n_z - 1) as f64;
        let depth = 4.0 * params.g().powi(2) * dz / (params.c_light() * params.gamma());
        if depth > self.max_step_depth {
            return Err(Error::Grid(format!(
                "optical depth per z step {depth:.3} exceeds {}",
                self.max_step_depth
            )));
        }
        if self.time.step > self.max_step_fraction * pulse.tau() {
            return Err(Error::Grid(format!(
                "time step {} exceeds {} tau",
                self.time.step, self.max_step_fraction
            )));
        }
        if self.time.start > pulse.arrival_time() - 6.0 * pulse.tau() {
            return Err(Error::Grid("time grid must start >= 6 tau before the pulse arrives".into()));
        }
        Ok(())
    }
}

/// One-step propagator of `(P, S)` at fixed ζ.
struct LocalStep {
    phi: Matrix2<Complex64>,
    /// `h(φ₁ - φ₂)(Ah) b`, weighting `E_n`.
    from_start: Vector2<Complex64>,
    /// `h φ₂(Ah) b`, weighting `E_{n+1}`.
    from_end: Vector2<Complex64>,
}

impl LocalStep {
    fn new(params: &MediumParams, v: Potential, h: f64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let (omega, shift) = match v {
            Potential::Finite(v) if v.abs() < SHIFT_CUTOFF => (params.omega_c(), v),
            // two-level: S decouples and stays zero
            _ => (0.0, 0.0),
        };
        let a = Matrix2::new(
            Complex64::new(-params.gamma() / 2.0, 0.0),
            i * omega,
            i * omega,
            -i * shift,
        ) * Complex64::new(h, 0.0);
        let b = Vector2::new(i * params.g() * h, zero);

        // exp([[A, b, 0], [0, 0, 1], [0, 0, 0]]) = [[e^A, φ₁(A)b, φ₂(A)b], ...]
        let mut aug = Matrix4::zeros();
        aug.fixed_view_mut::<2, 2>(0, 0).copy_from(&a);
        aug.fixed_view_mut::<2, 1>(0, 2).copy_from(&b);
        aug[(2, 3)] = Complex64::new(1.0, 0.0);
        let ex = aug.exp();
        let phi = ex.fixed_view::<2, 2>(0, 0).into_owned();
        let phi1_b: Vector2<Complex64> = ex.fixed_view::<2, 1>(0, 2).into_owned();
        let phi2_b: Vector2<Complex64> = ex.fixed_view::<2, 1>(0, 3).into_owned();
        Self {
            phi,
            from_start: phi1_b - phi2_b,
            from_end: phi2_b,
        }
    }
}

/// March the fields from `ζ = 0` to `L` for one gate position.
pub fn integrate_maxwell_bloch(
    params: &MediumParams,
    pot: &GatePotential,
    pulse: &PulseSpec,
    config: &OracleConfig,
) -> Result<FieldSolution> {
    config.validate(params, pulse)?;
    let space = SpatialGrid::new(config.n_z, params.length())?;
    let z = space.points();
    let tg = config.time;
    let (n_z, n_t) = (z.len(), tg.n);
    let h = tg.step;

    let mut e = Array2::<Complex64>::zeros((n_z, n_t));
    let mut p = Array2::<Complex64>::zeros((n_z, n_t));
    let mut s = Array2::<Complex64>::zeros((n_z, n_t));
    for k in 0..n_t {
        e[[0, k]] = Complex64::new(pulse.boundary_signal(tg.time(k)), 0.0);
    }
    // the entrance row responds to the incident field as any other
    march_time(&LocalStep::new(params, pot.at(z[0]), h), 0, None, &mut e, &mut p, &mut s);

    for i in 1..n_z {
        let step = LocalStep::new(params, pot.at(z[i]), h);
        let kappa = Complex64::new(0.0, params.g() * (z[i] - z[i - 1]) / (2.0 * params.c_light()));
        march_time(&step, i, Some(kappa), &mut e, &mut p, &mut s);
        if !(e.row(i).iter().chain(p.row(i).iter()).all(|v| v.is_finite())) {
            return Err(Error::NonFinite { step: i, position: z[i] });
        }
    }

    Ok(FieldSolution {
        z,
        time: tg,
        e,
        p,
        s,
        params: params.clone(),
        gate_position: pot.position(),
        component: 0,
        solver: SolverKind::TimeDomain,
    })
}

/// Advance `(P, S)` along row `i`. With `kappa = ig Δζ/2c` the field on the
/// row is solved simultaneously from the trapezoid rule in ζ; without it the
/// row's field is taken as given.
fn march_time(
    step: &LocalStep,
    i: usize,
    kappa: Option<Complex64>,
    e: &mut Array2<Complex64>,
    p: &mut Array2<Complex64>,
    s: &mut Array2<Complex64>,
) {
    let n_t = e.ncols();
    if let Some(k) = kappa {
        e[[i, 0]] = e[[i - 1, 0]] + k * p[[i - 1, 0]];
    }
    let mut x = Vector2::new(p[[i, 0]], s[[i, 0]]);
    let one = Complex64::new(1.0, 0.0);
    for n in 0..n_t - 1 {
        let known = step.phi * x + step.from_start * e[[i, n]];
        let e_next = match kappa {
            Some(k) => {
                (e[[i - 1, n + 1]] + k * (p[[i - 1, n + 1]] + known[0])) / (one - k * step.from_end[0])
            }
            None => e[[i, n + 1]],
        };
        x = known + step.from_end * e_next;
        e[[i, n + 1]] = e_next;
        p[[i, n + 1]] = x[0];
        s[[i, n + 1]] = x[1];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::susceptibility::InteractionModel;

    #[test]
    fn augmented_exponential_gives_phi_functions() {
        let p = MediumParams::rubidium_defaults().with_omega_c(0.0).unwrap();
        let h = 0.7;
        let st = LocalStep::new(&p, Potential::Infinite, h);
        let a = -p.gamma() / 2.0 * h;
        let phi1 = (a.exp() - 1.0) / a;
        let phi2 = (a.exp() - 1.0 - a) / (a * a);
        let bh = p.g() * h;
        assert!((st.phi[(0, 0)].re - a.exp()).abs() < 1e-14);
        assert!((st.from_end[0].im - bh * phi2).abs() < 1e-10 * bh);
        assert!((st.from_start[0].im - bh * (phi1 - phi2)).abs() < 1e-10 * bh);
        assert_eq!(st.from_end[1], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn stiff_shift_is_harmless() {
        let p = MediumParams::rubidium_defaults();
        for v in [1e3, 1e6, 9e7, 1e15] {
            let st = LocalStep::new(&p, Potential::Finite(v), 0.5);
            assert!(st.phi.iter().all(|x| x.is_finite() && x.norm() <= 1.0 + 1e-6));
            assert!(st.from_end.iter().all(|x| x.is_finite()));
        }
    }

    #[test]
    fn vacuum_passes_input_unchanged() {
        let p = MediumParams::rubidium_defaults().with_g(0.0).unwrap();
        let pulse = PulseSpec::with_default_offset(5.0, p.c_light()).unwrap();
        let cfg = OracleConfig::new(33, TimeGrid::new(-20.0, 80.0, 401).unwrap());
        let pot = GatePotential::new(&p, 10.0, InteractionModel::VanDerWaals);
        let sol = integrate_maxwell_bloch(&p, &pot, &pulse, &cfg).unwrap();
        for k in 0..sol.n_t() {
            assert_eq!(sol.e[[32, k]], sol.e[[0, k]]);
            assert_eq!(sol.p[[32, k]].norm(), 0.0);
        }
    }

    #[test]
    fn bounds_are_enforced() {
        let p = MediumParams::rubidium_defaults();
        let pulse = PulseSpec::with_default_offset(5.0, p.c_light()).unwrap();
        // α = 9.55 over 8 steps
        let coarse_z = OracleConfig::new(9, TimeGrid::new(-20.0, 80.0, 401).unwrap());
        assert!(coarse_z.validate(&p, &pulse).is_err());
        let coarse_t = OracleConfig::new(257, TimeGrid::new(-20.0, 80.0, 41).unwrap());
        assert!(coarse_t.validate(&p, &pulse).is_err());
        let late = OracleConfig::new(257, TimeGrid::new(0.0, 80.0, 801).unwrap());
        assert!(late.validate(&p, &pulse).is_err());
    }
}
