//! Single-photon propagation through a one-dimensional Rydberg-EIT medium
//! holding a stored gate spinwave.
//!
//! Each spinwave component (one candidate gate-atom position) is propagated
//! independently by the exact [`spectral`] solver, or by the brute-force
//! time-domain [`oracle`]. The [`observables`] module turns the resulting
//! polarisation fields into transmission, the scattering overlap matrix and
//! the post-scattering spinwave fidelity and purity. [`analytic`] holds the
//! closed-form strong-blockade, narrow-band results.

pub mod analytic;
pub mod error;
pub mod grid;
pub mod observables;
pub mod oracle;
pub mod physics;
pub mod report;
pub mod solution;
pub mod special;
pub mod spectral;
pub mod susceptibility;
pub mod units;
pub mod validation;

pub use error::{Error, Result};
pub use grid::{FrequencyGrid, SpatialGrid, TimeGrid};
pub use physics::{blockade_radius, optical_depth, MediumParams, PulseSpec, SpinwaveState};
pub use solution::{FieldSolution, SolverKind};
pub use spectral::{SolveOptions, SpectralGrids};
pub use susceptibility::{GatePotential, InteractionModel, Potential};
pub use units::UnitSystem;
