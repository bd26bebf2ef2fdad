//! Figures of merit computed from solved fields.
//!
//! Every scattering event projects the gate spinwave onto the polarisation
//! profile of the component that scattered. Integrating `|P|²` over the
//! medium therefore gives both the loss probability and, through the
//! cross-overlaps `A_jk`, the coherence left in the spinwave afterwards.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::physics::SpinwaveState;
use crate::solution::{FieldSolution, SolverKind};

/// `c ∫_{t≥0} |E(z_i, t)|² dt`.
fn flux(sol: &FieldSolution, i: usize, weights: &[f64]) -> f64 {
    let c = sol.params.c_light();
    c * sol
        .e
        .row(i)
        .iter()
        .zip(weights)
        .map(|(e, w)| w * e.norm_sqr())
        .sum::<f64>()
}

/// Time-integrated intensity incident on the entrance face.
pub fn incident_flux(sol: &FieldSolution) -> f64 {
    flux(sol, 0, &sol.time.causal_weights())
}

/// `T = ∫|E(L,t)|²dt / ∫|E(0,t)|²dt`, both over `t ≥ 0`.
pub fn transmission(sol: &FieldSolution) -> Result<f64> {
    let w = sol.time.causal_weights();
    let incident = flux(sol, 0, &w);
    if !(incident > 0.0 && incident.is_finite()) {
        return Err(Error::InvalidSignal(format!(
            "incident intensity is {incident}; cannot normalise transmission"
        )));
    }
    Ok(flux(sol, sol.n_z() - 1, &w) / incident)
}

/// `I_p(z) = ∫_{t≥0} |P(z,t)|² dt` on the solution's spatial grid.
pub fn intensity_profile(sol: &FieldSolution) -> Vec<f64> {
    let w = sol.time.causal_weights();
    sol.p
        .rows()
        .into_iter()
        .map(|row| row.iter().zip(&w).map(|(p, w)| w * p.norm_sqr()).sum())
        .collect()
}

/// `γ ∫dz I_p(z)`: probability that the photon was scattered.
pub fn scattering_probability(sol: &FieldSolution) -> f64 {
    let ip = intensity_profile(sol);
    sol.params.gamma()
        * sol
            .spatial_weights()
            .iter()
            .zip(&ip)
            .map(|(w, i)| w * i)
            .sum::<f64>()
}

/// Photon norm still inside the medium at the end of the time window.
pub fn residual_in_medium(sol: &FieldSolution) -> f64 {
    let last = sol.n_t() - 1;
    sol.spatial_weights()
        .iter()
        .enumerate()
        .map(|(i, w)| {
            w * (sol.e[[i, last]].norm_sqr() + sol.p[[i, last]].norm_sqr() + sol.s[[i, last]].norm_sqr())
        })
        .sum()
}

/// Photon bookkeeping for one component, normalised to the incident flux.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conservation {
    pub transmitted: f64,
    pub scattered: f64,
    pub residual: f64,
}

impl Conservation {
    /// `|T + scattered + residual - 1|`.
    pub fn defect(&self) -> f64 {
        (self.transmitted + self.scattered + self.residual - 1.0).abs()
    }
}

pub fn conservation_report(sol: &FieldSolution) -> Result<Conservation> {
    let incident = incident_flux(sol);
    let transmitted = transmission(sol)?;
    Ok(Conservation {
        transmitted,
        scattered: scattering_probability(sol) / incident,
        residual: residual_in_medium(sol) / incident,
    })
}

/// `A_jk = γ ∫dz ∫dt P_k*(z,t) P_j(z,t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMatrix {
    a: DMatrix<Complex64>,
}

impl OverlapMatrix {
    pub fn from_matrix(a: DMatrix<Complex64>) -> Result<Self> {
        if !a.is_square() || a.nrows() == 0 {
            return Err(invalid("overlap", "matrix must be square and non-empty"));
        }
        Ok(Self { a })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.a
    }
    pub fn dim(&self) -> usize {
        self.a.nrows()
    }
    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.a[(j, k)]
    }
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.a[(j, j)].re).collect()
    }

    /// Frobenius norm of `A - A†`.
    pub fn hermiticity_error(&self) -> f64 {
        (&self.a - self.a.adjoint()).norm()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_hermitian_eigenvalue(&self.a)
    }

    /// Largest `|A_jk|² - A_jj A_kk`; non-positive when Cauchy–Schwarz holds.
    pub fn cauchy_schwarz_excess(&self) -> f64 {
        let n = self.dim();
        let mut worst = f64::NEG_INFINITY;
        for j in 0..n {
            for k in 0..n {
                let lhs = self.a[(j, k)].norm_sqr();
                worst = worst.max(lhs - self.a[(j, j)].re * self.a[(k, k)].re);
            }
        }
        worst
    }

    /// `|A_jk| / √(A_jj A_kk)`.
    pub fn normalised(&self, j: usize, k: usize) -> f64 {
        let d = (self.a[(j, j)].re * self.a[(k, k)].re).sqrt();
        if d > 0.0 {
            self.a[(j, k)].norm() / d
        } else {
            0.0
        }
    }
}

fn min_hermitian_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    sym.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Overlaps of every pair of components. Components with the same gate
/// position are recognised and computed once.
pub fn overlap_matrix(sols: &[FieldSolution]) -> Result<OverlapMatrix> {
    let first = sols
        .first()
        .ok_or_else(|| invalid("solutions", "at least one component required"))?;
    for (j, s) in sols.iter().enumerate().skip(1) {
        if !first.shares_grid(s) {
            return Err(Error::GridMismatch(format!("component {j} differs from component 0")));
        }
    }
    let zw = first.spatial_weights();
    let tw = first.time.causal_weights();
    let gamma = first.params.gamma();

    let weighted: Vec<Vec<Complex64>> = sols
        .par_iter()
        .map(|s| {
            let mut v = Vec::with_capacity(s.n_z() * s.n_t());
            for (i, row) in s.p.rows().into_iter().enumerate() {
                for (p, w) in row.iter().zip(&tw) {
                    v.push(p * (zw[i] * w).sqrt());
                }
            }
            v
        })
        .collect();

    let n = sols.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (j..n).map(move |k| (j, k))).collect();
    let values: Vec<Complex64> = pairs
        .par_iter()
        .map(|&(j, k)| {
            let (pj, pk) = (&weighted[j], &weighted[k]);
            let dot: Complex64 = pj.iter().zip(pk).map(|(a, b)| a * b.conj()).sum();
            dot * gamma
        })
        .collect();

    let mut a = DMatrix::zeros(n, n);
    for (&(j, k), v) in pairs.iter().zip(values) {
        if j == k {
            a[(j, j)] = Complex64::new(v.re, 0.0);
        } else {
            a[(j, k)] = v;
            a[(k, j)] = v.conj();
        }
    }
    OverlapMatrix::from_matrix(a)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fidelity {
    pub value: f64,
    /// Imaginary part discarded from `⟨ψ|ρ_f|ψ⟩`.
    pub imaginary_residue: f64,
}

fn check_dims(a: &OverlapMatrix, spinwave: &SpinwaveState) -> Result<()> {
    if a.dim() != spinwave.len() {
        return Err(invalid(
            "spinwave",
            format!("{} components but overlap matrix is {}x{}", spinwave.len(), a.dim(), a.dim()),
        ));
    }
    Ok(())
}

/// `F = ⟨ψ|ρ_f|ψ⟩ = Σ_jk |w_j|²|w_k|² A_jk`; `(1/N²) Σ A_jk` for a uniform
/// spinwave.
pub fn fidelity(a: &OverlapMatrix, spinwave: &SpinwaveState) -> Result<Fidelity> {
    check_dims(a, spinwave)?;
    let rho = density_matrix(a, spinwave);
    let psi = DVector::from_column_slice(spinwave.weights());
    let f = (psi.adjoint() * rho * &psi)[(0, 0)];
    Ok(Fidelity {
        value: f.re,
        imaginary_residue: f.im.abs(),
    })
}

fn density_matrix(a: &OverlapMatrix, spinwave: &SpinwaveState) -> DMatrix<Complex64> {
    let w = spinwave.weights();
    DMatrix::from_fn(a.dim(), a.dim(), |j, k| w[j] * w[k].conj() * a.get(j, k))
}

/// Unnormalised post-scattering state of the gate spinwave.
#[derive(Debug, Clone, PartialEq)]
pub struct FinalState {
    pub rho: DMatrix<Complex64>,
    /// `Tr ρ_f`: the total scattering probability.
    pub trace: f64,
    /// `1 - Tr ρ_f`: probability the photon was not scattered.
    pub trace_deficit: f64,
    /// `Tr ρ²` of the trace-normalised state, in `[1/N, 1]`.
    pub purity: f64,
    /// `Tr ρ_f²` without normalisation.
    pub raw_purity: f64,
    pub min_eigenvalue: f64,
}

/// `ρ_f = Σ_jk w_j w_k* A_jk |Z_j⟩⟨Z_k|`, reducing to
/// `(1/N) Σ A_jk e^{ik(Z_j - Z_k)}` for the uniform spinwave.
pub fn final_density_matrix(a: &OverlapMatrix, spinwave: &SpinwaveState) -> Result<FinalState> {
    check_dims(a, spinwave)?;
    let rho = density_matrix(a, spinwave);
    let trace = rho.trace().re;
    let raw_purity = (&rho * &rho).trace().re;
    let purity = if trace > 0.0 { raw_purity / (trace * trace) } else { 0.0 };
    let min_eigenvalue = min_hermitian_eigenvalue(&rho);
    Ok(FinalState {
        rho,
        trace,
        trace_deficit: 1.0 - trace,
        purity,
        raw_purity,
        min_eigenvalue,
    })
}

/// All observables of one spinwave scattering run.
#[derive(Debug, Clone)]
pub struct SwitchReport {
    /// `Σ_j |w_j|² T_j`.
    pub transmission: f64,
    pub component_transmissions: Vec<f64>,
    pub scattering_probabilities: Vec<f64>,
    pub fidelity: Fidelity,
    pub final_state: FinalState,
    pub overlap: OverlapMatrix,
    pub z: Vec<f64>,
    /// Weight-averaged `Σ_j |w_j|² I_p,j(z)`.
    pub intensity: Vec<f64>,
    /// Largest conservation defect over the components.
    pub conservation_defect: f64,
    pub residual_in_medium: f64,
    pub solver: SolverKind,
    pub n_z: usize,
    pub n_t: usize,
}

impl SwitchReport {
    pub fn from_solutions(sols: &[FieldSolution], spinwave: &SpinwaveState) -> Result<Self> {
        if sols.len() != spinwave.len() {
            return Err(invalid("solutions", "one solution per spinwave component required"));
        }
        let overlap = overlap_matrix(sols)?;
        let fidelity = fidelity(&overlap, spinwave)?;
        let final_state = final_density_matrix(&overlap, spinwave)?;
        let cons: Vec<Conservation> = sols.iter().map(conservation_report).collect::<Result<_>>()?;
        let probs: Vec<f64> = spinwave.weights().iter().map(|w| w.norm_sqr()).collect();

        let mut intensity = vec![0.0; sols[0].n_z()];
        for (s, p) in sols.iter().zip(&probs) {
            for (acc, v) in intensity.iter_mut().zip(intensity_profile(s)) {
                *acc += p * v;
            }
        }
        Ok(Self {
            transmission: cons.iter().zip(&probs).map(|(c, p)| p * c.transmitted).sum(),
            component_transmissions: cons.iter().map(|c| c.transmitted).collect(),
            scattering_probabilities: cons.iter().map(|c| c.scattered).collect(),
            fidelity,
            final_state,
            overlap,
            z: sols[0].z.clone(),
            intensity,
            conservation_defect: cons.iter().map(Conservation::defect).fold(0.0, f64::max),
            residual_in_medium: cons.iter().map(|c| c.residual).fold(0.0, f64::max),
            solver: sols[0].solver,
            n_z: sols[0].n_z(),
            n_t: sols[0].n_t(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random_overlap(n: usize, seed: &[f64]) -> OverlapMatrix {
        // Gram matrix of random vectors is Hermitian PSD by construction.
        let m = DMatrix::from_fn(n, 3, |i, j| {
            let k = 2 * (i * 3 + j);
            Complex64::new(seed[k % seed.len()], seed[(k + 1) % seed.len()])
        });
        let g = &m * m.adjoint() * Complex64::new(0.1, 0.0);
        OverlapMatrix::from_matrix(g).unwrap()
    }

    fn spinwave(n: usize) -> SpinwaveState {
        SpinwaveState::cell_centred(n, 20.0, 0.37).unwrap()
    }

    #[test]
    fn identical_components_give_single_overlap() {
        let a = OverlapMatrix::from_matrix(DMatrix::from_element(3, 3, Complex64::new(0.8, 0.0))).unwrap();
        let f = fidelity(&a, &spinwave(3)).unwrap();
        assert!((f.value - 0.8).abs() < 1e-14);
        let one = OverlapMatrix::from_matrix(DMatrix::from_element(1, 1, Complex64::new(0.3, 0.0))).unwrap();
        assert!((fidelity(&one, &spinwave(1)).unwrap().value - 0.3).abs() < 1e-15);
    }

    #[test]
    fn pure_and_maximally_mixed_limits() {
        let ones = OverlapMatrix::from_matrix(DMatrix::from_element(4, 4, Complex64::new(1.0, 0.0))).unwrap();
        let fs = final_density_matrix(&ones, &spinwave(4)).unwrap();
        assert!((fs.purity - 1.0).abs() < 1e-12);
        assert!((fs.raw_purity - 1.0).abs() < 1e-12);

        let diag = OverlapMatrix::from_matrix(DMatrix::identity(4, 4)).unwrap();
        let fs = final_density_matrix(&diag, &spinwave(4)).unwrap();
        assert!((fs.purity - 0.25).abs() < 1e-12);
        assert!(fs.trace_deficit.abs() < 1e-12);
    }

    #[test]
    fn uniform_fidelity_is_mean_of_overlaps() {
        let seed = [0.3, -1.2, 0.8, 0.5, 2.0, -0.7, 0.1, 0.9, -0.4];
        let a = random_overlap(5, &seed);
        let mean: Complex64 = a.matrix().iter().sum::<Complex64>() / 25.0;
        let f = fidelity(&a, &spinwave(5)).unwrap();
        assert!((f.value - mean.re).abs() < 1e-14);
        assert!(f.imaginary_residue < 1e-12);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let a = OverlapMatrix::from_matrix(DMatrix::identity(2, 2)).unwrap();
        assert!(fidelity(&a, &spinwave(3)).is_err());
        assert!(OverlapMatrix::from_matrix(DMatrix::zeros(2, 3)).is_err());
    }

    proptest! {
        #[test]
        fn gram_matrices_satisfy_overlap_invariants(
            seed in proptest::collection::vec(-2.0f64..2.0, 30),
            n in 1usize..7,
            phase in -7.0f64..7.0,
        ) {
            let a = random_overlap(n, &seed);
            prop_assert!(a.hermiticity_error() < 1e-12);
            prop_assert!(a.min_eigenvalue() > -1e-10);
            prop_assert!(a.cauchy_schwarz_excess() <= 1e-10);

            let sw = spinwave(n);
            let f = fidelity(&a, &sw).unwrap();
            let g = fidelity(&a, &sw.with_global_phase(phase)).unwrap();
            prop_assert!((f.value - g.value).abs() < 1e-12);

            let fs = final_density_matrix(&a, &sw).unwrap();
            let psi = DVector::from_column_slice(sw.weights());
            let direct = (psi.adjoint() * &fs.rho * &psi)[(0, 0)].re;
            prop_assert!((direct - f.value).abs() < 1e-12);
            if fs.trace > 1e-9 {
                prop_assert!(fs.purity >= 1.0 / n as f64 - 1e-9);
                prop_assert!(fs.purity <= 1.0 + 1e-9);
            }
        }
    }
}
