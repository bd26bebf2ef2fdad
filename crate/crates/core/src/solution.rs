use ndarray::Array2;
use num_complex::Complex64;

use crate::grid::TimeGrid;
use crate::physics::MediumParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Spectral,
    TimeDomain,
}

/// Space-time fields of one spinwave component.
///
/// Arrays are indexed `[z, t]` with `t` the retarded time `t - z/c`. The
/// last spatial sample is the exit face `z = L`, the first the entrance.
#[derive(Debug, Clone)]
pub struct FieldSolution {
    pub z: Vec<f64>,
    pub time: TimeGrid,
    pub e: Array2<Complex64>,
    pub p: Array2<Complex64>,
    pub s: Array2<Complex64>,
    pub params: MediumParams,
    pub gate_position: f64,
    pub component: usize,
    pub solver: SolverKind,
}

impl FieldSolution {
    pub fn n_z(&self) -> usize {
        self.z.len()
    }

    pub fn n_t(&self) -> usize {
        self.time.n
    }

    pub fn is_finite(&self) -> bool {
        [&self.e, &self.p, &self.s]
            .iter()
            .all(|a| a.iter().all(|v| v.is_finite()))
    }

    /// True when both solutions live on the same `(z, t)` samples.
    pub fn shares_grid(&self, other: &FieldSolution) -> bool {
        self.z.len() == other.z.len()
            && self
                .z
                .iter()
                .zip(&other.z)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0))
            && self.time.approx_eq(&other.time)
    }

    /// Keep every `m`-th time sample.
    pub fn decimate_time(&self, m: usize) -> FieldSolution {
        let m = m.max(1);
        let n = (self.n_t() - 1) / m + 1;
        let pick = |a: &Array2<Complex64>| Array2::from_shape_fn((self.n_z(), n), |(i, k)| a[[i, k * m]]);
        FieldSolution {
            time: TimeGrid {
                start: self.time.start,
                step: self.time.step * m as f64,
                n,
            },
            e: pick(&self.e),
            p: pick(&self.p),
            s: pick(&self.s),
            ..self.clone()
        }
    }

    pub(crate) fn spatial_weights(&self) -> Vec<f64> {
        let n = self.z.len();
        let mut w = vec![0.0; n];
        for i in 0..n.saturating_sub(1) {
            let h = self.z[i + 1] - self.z[i];
            w[i] += 0.5 * h;
            w[i + 1] += 0.5 * h;
        }
        w
    }
}
