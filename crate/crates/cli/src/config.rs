//! TOML run configuration.
//!
//! ```toml
//! scenario = "single"          # single | sweep | figure
//! solver = "spectral"          # spectral | oracle | analytic | all
//!
//! [medium]
//! gamma = "5.7 MHz"            # cyclic; becomes the unit of frequency
//! omega_c = "2 gamma"
//! g = "1000 gamma"             # collective coupling
//! length = "20 um"
//! c6 = "4.2e6 GHz um^6"        # or blockade_radius = "0.5 L", not both
//! interaction = "vdw"          # vdw | two-level | no-gate
//! # speed_of_light = "299792458 m/s"
//!
//! [pulse]
//! tau = "5 /gamma"             # or "140 ns"
//! # z0 = "-100 um"             # default: five pulse lengths before the medium
//!
//! [spinwave]
//! sites = 16                   # cell-centred; or positions = ["0 um", "L"]
//! wavenumber = "0 /um"
//! # weights = [[0.7071, 0.0], [0.0, 0.7071]]   # re, im; default uniform
//!
//! [grids]                      # optional; automatic when omitted
//! # n_omega = 1024
//! # omega_max = "64 gamma"
//! # n_z = 257
//!
//! [oracle]
//! refine = 2                   # time steps per spectral sample
//!
//! [sweep]                      # scenario = "sweep" only
//! axis = "Rb"                  # tau | g | Rb | L
//! values = ["0.4 L", "0.7 L", "1 L"]
//!
//! [output]
//! dir = "out"
//! plots = false                # also write SVG plots
//! heatmap_stride = 4           # keep every n-th z and t sample
//! figure = "fig3"              # scenario = "figure" only
//! ```
//!
//! Unknown keys are rejected with the offending line.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rydberg_switch::{
    FrequencyGrid, InteractionModel, MediumParams, PulseSpec, SpatialGrid, SpectralGrids,
    SpinwaveState, UnitSystem,
};
use serde::Deserialize;

use crate::error::CliError;
use crate::quantity::{Duration, Frequency, Length, Speed, Units, Wavenumber, C6};

pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    #[default]
    Single,
    Sweep,
    Figure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SolverChoice {
    #[default]
    Spectral,
    Oracle,
    Analytic,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FigureKind {
    Fig2a,
    Fig2b,
    Fig3,
    Fig4a,
    Fig4b,
}

impl FigureKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Fig2a => "fig2a",
            Self::Fig2b => "fig2b",
            Self::Fig3 => "fig3",
            Self::Fig4a => "fig4a",
            Self::Fig4b => "fig4b",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interaction {
    #[default]
    Vdw,
    TwoLevel,
    NoGate,
}

impl From<Interaction> for InteractionModel {
    fn from(i: Interaction) -> Self {
        match i {
            Interaction::Vdw => InteractionModel::VanDerWaals,
            Interaction::TwoLevel => InteractionModel::TwoLevel,
            Interaction::NoGate => InteractionModel::NoGate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum SweepAxis {
    #[serde(rename = "tau")]
    Tau,
    #[serde(rename = "g")]
    G,
    #[serde(rename = "Rb")]
    Rb,
    #[serde(rename = "L")]
    L,
}

impl SweepAxis {
    /// Column header of the axis, in internal units.
    pub fn header(self) -> &'static str {
        match self {
            Self::Tau => "tau [gamma^-1]",
            Self::G => "g [gamma]",
            Self::Rb => "Rb [um]",
            Self::L => "L [um]",
        }
    }
}

fn default_gamma() -> Frequency {
    "5.7 MHz".parse().unwrap()
}
fn default_omega_c() -> Frequency {
    "2 gamma".parse().unwrap()
}
fn default_g() -> Frequency {
    "1000 gamma".parse().unwrap()
}
fn default_length() -> Length {
    "20 um".parse().unwrap()
}
fn default_tau() -> Duration {
    "5 /gamma".parse().unwrap()
}
fn default_refine() -> usize {
    2
}
fn default_stride() -> usize {
    4
}
fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumSection {
    #[serde(default = "default_gamma")]
    pub gamma: Frequency,
    #[serde(default = "default_omega_c")]
    pub omega_c: Frequency,
    #[serde(default = "default_g")]
    pub g: Frequency,
    #[serde(default = "default_length")]
    pub length: Length,
    pub c6: Option<C6>,
    pub blockade_radius: Option<Length>,
    pub speed_of_light: Option<Speed>,
    #[serde(default)]
    pub interaction: Interaction,
}

impl Default for MediumSection {
    fn default() -> Self {
        Self {
            gamma: default_gamma(),
            omega_c: default_omega_c(),
            g: default_g(),
            length: default_length(),
            c6: None,
            blockade_radius: None,
            speed_of_light: None,
            interaction: Interaction::default(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSection {
    #[serde(default = "default_tau")]
    pub tau: Duration,
    pub z0: Option<Length>,
}

impl Default for PulseSection {
    fn default() -> Self {
        Self { tau: default_tau(), z0: None }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinwaveSection {
    pub sites: Option<usize>,
    pub positions: Option<Vec<Length>>,
    pub wavenumber: Option<Wavenumber>,
    pub weights: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n_omega: Option<usize>,
    pub omega_max: Option<Frequency>,
    pub n_z: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    #[serde(default = "default_refine")]
    pub refine: usize,
}

impl Default for OracleSection {
    fn default() -> Self {
        Self { refine: default_refine() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis: SweepAxis,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default)]
    pub plots: bool,
    #[serde(default = "default_stride")]
    pub heatmap_stride: usize,
    pub figure: Option<FigureKind>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            plots: false,
            heatmap_stride: default_stride(),
            figure: None,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub scenario: ScenarioKind,
    #[serde(default)]
    pub solver: SolverChoice,
    #[serde(default)]
    pub medium: MediumSection,
    #[serde(default)]
    pub pulse: PulseSection,
    #[serde(default)]
    pub spinwave: SpinwaveSection,
    #[serde(default)]
    pub grids: GridSection,
    #[serde(default)]
    pub oracle: OracleSection,
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub output: OutputSection,
}

/// Everything a solver needs, in internal units.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub params: MediumParams,
    pub pulse: PulseSpec,
    pub spinwave: SpinwaveState,
    pub model: InteractionModel,
    pub grids: SpectralGrids,
    pub refine: usize,
}

fn bad(key: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{key}: {reason}"))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn default_config() -> Self {
        Self::parse(DEFAULT_CONFIG).expect("shipped config parses")
    }

    /// Replaces the swept quantity by `value` (a unit-suffixed string).
    pub fn with_axis(&self, axis: SweepAxis, value: &str) -> Result<Self, CliError> {
        let mut cfg = self.clone();
        let key = match axis {
            SweepAxis::Tau => "pulse.tau",
            SweepAxis::G => "medium.g",
            SweepAxis::Rb => "medium.blockade_radius",
            SweepAxis::L => "medium.length",
        };
        let parse_err = |e: String| bad(key, e);
        match axis {
            SweepAxis::Tau => cfg.pulse.tau = value.parse().map_err(parse_err)?,
            SweepAxis::G => cfg.medium.g = value.parse().map_err(parse_err)?,
            SweepAxis::Rb => {
                cfg.medium.blockade_radius = Some(value.parse().map_err(parse_err)?);
                cfg.medium.c6 = None;
            }
            SweepAxis::L => cfg.medium.length = value.parse().map_err(parse_err)?,
        }
        Ok(cfg)
    }

    pub fn units(&self) -> Result<Units, CliError> {
        let gamma_si = self.medium.gamma.si().map_err(|e| bad("medium.gamma", e))?;
        let system = UnitSystem::new(gamma_si).map_err(|e| bad("medium.gamma", e))?;
        let length = self.medium.length.absolute().map_err(|e| bad("medium.length", e))?;
        Ok(Units { system, length })
    }

    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let u = self.units()?;
        let m = &self.medium;
        let c = match &m.speed_of_light {
            Some(s) => s.internal(&u),
            None => u.system.speed_of_light(),
        };
        let default_c6 = "4.2e6 GHz um^6".parse::<C6>().unwrap();
        let c6 = match (&m.c6, &m.blockade_radius) {
            (Some(_), Some(_)) => return Err(bad("medium", "set c6 or blockade_radius, not both")),
            (Some(c6), None) => c6.internal(&u),
            _ => default_c6.internal(&u),
        };
        let mut params = MediumParams::new(1.0, m.omega_c.internal(&u), m.g.internal(&u), u.length, c6, c)
            .map_err(|e| bad("medium", e))?;
        if let Some(rb) = &m.blockade_radius {
            params = params
                .with_blockade_radius(rb.internal(&u))
                .map_err(|e| bad("medium.blockade_radius", e))?;
        }

        let tau = self.pulse.tau.internal(&u);
        let pulse = match &self.pulse.z0 {
            Some(z0) => PulseSpec::new(tau, z0.internal(&u), c),
            None => PulseSpec::with_default_offset(tau, c),
        }
        .map_err(|e| bad("pulse", e))?;

        let sw = &self.spinwave;
        let k = sw.wavenumber.as_ref().map_or(0.0, Wavenumber::internal);
        let positions = match (&sw.sites, &sw.positions) {
            (Some(_), Some(_)) => return Err(bad("spinwave", "set sites or positions, not both")),
            (Some(0), None) => return Err(bad("spinwave.sites", "at least one site required")),
            (Some(n), None) => SpinwaveState::cell_centred(*n, u.length, 0.0)
                .map_err(|e| bad("spinwave", e))?
                .positions()
                .to_vec(),
            (None, Some(p)) => p.iter().map(|z| z.internal(&u)).collect(),
            (None, None) => SpinwaveState::cell_centred(rydberg_switch::validation::DEFAULT_SITES, u.length, 0.0)
                .map_err(|e| bad("spinwave", e))?
                .positions()
                .to_vec(),
        };
        let spinwave = match &sw.weights {
            None => SpinwaveState::uniform(positions, k, u.length),
            Some(w) => {
                let w = w.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
                SpinwaveState::with_weights(positions, k, w, u.length)
            }
        }
        .map_err(|e| bad("spinwave", e))?;

        let g = &self.grids;
        let freq = match (g.n_omega, &g.omega_max) {
            (None, None) => FrequencyGrid::auto(&params, &pulse),
            (Some(n), Some(w)) => FrequencyGrid::new(n, w.internal(&u)).map_err(|e| bad("grids", e))?,
            _ => return Err(bad("grids", "set both n_omega and omega_max, or neither")),
        };
        let space = match g.n_z {
            None => SpatialGrid::auto(&params),
            Some(n) => SpatialGrid::new(n, u.length).map_err(|e| bad("grids.n_z", e))?,
        };
        let grids = SpectralGrids { freq, space };
        grids.validate(&params, &pulse).map_err(|e| bad("grids", e))?;

        if self.oracle.refine == 0 {
            return Err(bad("oracle.refine", "must be >= 1"));
        }
        Ok(Resolved {
            params,
            pulse,
            spinwave,
            model: m.interaction.into(),
            grids,
            refine: self.oracle.refine,
        })
    }
}
