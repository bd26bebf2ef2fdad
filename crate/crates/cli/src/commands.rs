//! `run`, `sweep`, `figure` and `validate`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use rydberg_switch::analytic::{
    analytic_fidelity, analytic_polarization, analytic_transmission, intensity_profile_with,
    PolarizationForm, RegimeGuard,
};
use rydberg_switch::observables::SwitchReport;
use rydberg_switch::oracle::{integrate_maxwell_bloch, OracleConfig};
use rydberg_switch::report::{num, write_exit_field_csv, write_heatmap_csv, write_intensity_csv, write_report};
use rydberg_switch::spectral::solve_all_components;
use rydberg_switch::validation::{Suite, CHECKS};
use rydberg_switch::{FieldSolution, GatePotential, SolveOptions, TimeGrid};

use crate::config::{FigureKind, Resolved, RunConfig, ScenarioKind, SolverChoice, SweepAxis, SweepSection};
use crate::error::CliError;
use crate::plot::{line_plot, Series};

/// Command-line overrides applied on top of the configuration.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub solver: Option<SolverChoice>,
    pub plots: bool,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(out) = &self.out {
            cfg.output.dir = out.clone();
        }
        if let Some(s) = self.solver {
            cfg.solver = s;
        }
        cfg.output.plots |= self.plots;
    }
}

struct Out {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Out {
    fn new(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(CliError::io(format!("creating {}", dir.display())))?;
        Ok(Self {
            dir: dir.to_owned(),
            written: Vec::new(),
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.written.push(p.clone());
        p
    }

    fn write(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    ) -> Result<(), CliError> {
        let path = self.path(name);
        let ctx = || format!("writing {}", path.display());
        let file = File::create(&path).map_err(CliError::io(ctx()))?;
        let mut w = BufWriter::new(file);
        body(&mut w).and_then(|_| w.flush()).map_err(CliError::io(ctx()))
    }
}

fn warn_regime(guard: &RegimeGuard) {
    for w in &guard.warnings {
        warn!("analytic regime: {w}");
    }
}

fn regime_text(guard: &RegimeGuard) -> String {
    if guard.warnings.is_empty() {
        "none".into()
    } else {
        guard
            .warnings
            .iter()
            .map(|w| w.to_string().replace(',', ";"))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

pub fn solve_spectral(r: &Resolved) -> Result<Vec<FieldSolution>, CliError> {
    Ok(solve_all_components(
        &r.params,
        &r.spinwave,
        r.model,
        &r.pulse,
        &r.grids,
        &SolveOptions::default(),
    )?)
}

/// Time-domain integration on the spectral time grid refined `r.refine`
/// times, returned on the spectral grid.
pub fn solve_oracle(r: &Resolved) -> Result<Vec<FieldSolution>, CliError> {
    let base = r.grids.freq.time_grid();
    let time = TimeGrid {
        start: base.start,
        step: base.step / r.refine as f64,
        n: (base.n - 1) * r.refine + 1,
    };
    let cfg = OracleConfig::new(r.grids.space.len(), time);
    let mut unique: Vec<f64> = r.spinwave.positions().to_vec();
    unique.sort_by(f64::total_cmp);
    unique.dedup();
    let solved: Vec<(f64, FieldSolution)> = unique
        .par_iter()
        .map(|&z| {
            let pot = GatePotential::new(&r.params, z, r.model);
            let sol = integrate_maxwell_bloch(&r.params, &pot, &r.pulse, &cfg)?;
            Ok((z, sol.decimate_time(r.refine)))
        })
        .collect::<Result<_, rydberg_switch::Error>>()?;
    Ok(r
        .spinwave
        .positions()
        .iter()
        .enumerate()
        .map(|(j, z)| {
            let mut s = solved.iter().find(|(zz, _)| zz == z).expect("solved").1.clone();
            s.component = j;
            s
        })
        .collect())
}

/// Closed-form strong-blockade results on the numeric grids.
#[derive(Debug, Clone)]
pub struct AnalyticOutcome {
    pub transmission: f64,
    pub transmission_simplified: f64,
    pub fidelity: f64,
    pub guard: RegimeGuard,
    pub z: Vec<f64>,
    pub intensity: Vec<f64>,
}

impl AnalyticOutcome {
    pub fn compute(r: &Resolved) -> Result<Self, CliError> {
        let t = analytic_transmission(&r.params, &r.pulse);
        let z = r.grids.space.points();
        let intensity = intensity_profile_with(&r.grids.freq.time_grid(), &z, |z, t| {
            analytic_polarization(&r.params, &r.pulse, PolarizationForm::Auto, z, t)
        })?;
        Ok(Self {
            transmission: t.value(),
            transmission_simplified: t.simplified,
            fidelity: analytic_fidelity(&r.params, &r.pulse),
            guard: t.guard,
            z,
            intensity,
        })
    }

    fn write(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "solver = analytic")?;
        writeln!(w, "transmission [1] = {}", num(self.transmission))?;
        writeln!(w, "transmission_simplified [1] = {}", num(self.transmission_simplified))?;
        writeln!(w, "fidelity [1] = {}", num(self.fidelity))?;
        writeln!(w, "in_regime = {}", self.guard.in_regime())?;
        writeln!(w, "regime_warnings = {}", regime_text(&self.guard))?;
        writeln!(w)?;
        writeln!(w, "[intensity]")?;
        write_intensity_csv(w, &self.z, &self.intensity)
    }
}

fn scenario_lines(r: &Resolved) -> Vec<(String, String)> {
    let rb = r
        .params
        .blockade_radius()
        .map(num)
        .unwrap_or_else(|_| "undefined".into());
    vec![
        ("gamma_tau [1]".into(), num(r.pulse.tau() * r.params.gamma())),
        ("g [gamma]".into(), num(r.params.g())),
        ("length [um]".into(), num(r.params.length())),
        ("blockade_radius [um]".into(), rb),
        ("optical_depth [1]".into(), num(r.params.optical_depth())),
        (
            "regime_warnings".into(),
            regime_text(&RegimeGuard::check(&r.params, &r.pulse)),
        ),
    ]
}

/// Numeric reports of one solver.
struct Numeric {
    name: &'static str,
    sols: Vec<FieldSolution>,
    report: SwitchReport,
}

fn write_numeric(out: &mut Out, n: &Numeric, r: &Resolved, stride: usize) -> Result<(), CliError> {
    let extra = scenario_lines(r);
    out.write(&format!("report_{}.txt", n.name), |w| write_report(w, &n.report, &extra))?;
    out.write(&format!("intensity_{}.csv", n.name), |w| {
        write_intensity_csv(w, &n.report.z, &n.report.intensity)
    })?;
    for s in &n.sols {
        out.write(&format!("heatmap_{}_{}.csv", n.name, s.component), |w| {
            write_heatmap_csv(w, s, stride)
        })?;
        out.write(&format!("exit_field_{}_{}.csv", n.name, s.component), |w| {
            write_exit_field_csv(w, s)
        })?;
    }
    Ok(())
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn write_deltas(
    w: &mut impl Write,
    spectral: &SwitchReport,
    oracle: &SwitchReport,
    analytic: &AnalyticOutcome,
) -> std::io::Result<()> {
    let da = (spectral.overlap.matrix() - oracle.overlap.matrix())
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    let peak = spectral.intensity.iter().copied().fold(0.0, f64::max);
    let lines = [
        ("transmission_oracle_minus_spectral [1]", oracle.transmission - spectral.transmission),
        ("fidelity_oracle_minus_spectral [1]", oracle.fidelity.value - spectral.fidelity.value),
        ("purity_oracle_minus_spectral [1]", oracle.final_state.purity - spectral.final_state.purity),
        ("overlap_max_abs_diff_oracle_spectral [1]", da),
        (
            "intensity_max_rel_diff_oracle_spectral [1]",
            max_abs_diff(&oracle.intensity, &spectral.intensity) / peak,
        ),
        ("transmission_analytic_minus_spectral [1]", analytic.transmission - spectral.transmission),
        ("fidelity_analytic_minus_spectral [1]", analytic.fidelity - spectral.fidelity.value),
        (
            "intensity_max_rel_diff_analytic_spectral [1]",
            max_abs_diff(&analytic.intensity, &spectral.intensity) / peak,
        ),
    ];
    for (k, v) in lines {
        writeln!(w, "{k} = {}", num(v))?;
    }
    Ok(())
}

/// Dispatches on `scenario`; returns the files written.
pub fn run(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    match cfg.scenario {
        ScenarioKind::Single => run_single(cfg),
        ScenarioKind::Sweep => sweep(cfg),
        ScenarioKind::Figure => {
            let which = cfg
                .output
                .figure
                .ok_or_else(|| CliError::Config("scenario = \"figure\" needs output.figure".into()))?;
            figure(which, cfg)
        }
    }
}

pub fn run_single(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let r = cfg.resolve()?;
    warn_regime(&RegimeGuard::check(&r.params, &r.pulse));
    let mut out = Out::new(&cfg.output.dir)?;
    let want = |s: SolverChoice| cfg.solver == s || cfg.solver == SolverChoice::All;

    let mut numeric = Vec::new();
    if want(SolverChoice::Spectral) {
        info!("spectral solve: {} components", r.spinwave.len());
        let sols = solve_spectral(&r)?;
        let report = SwitchReport::from_solutions(&sols, &r.spinwave)?;
        numeric.push(Numeric { name: "spectral", sols, report });
    }
    if want(SolverChoice::Oracle) {
        info!("time-domain solve: {} components, refine {}", r.spinwave.len(), r.refine);
        let sols = solve_oracle(&r)?;
        let report = SwitchReport::from_solutions(&sols, &r.spinwave)?;
        numeric.push(Numeric { name: "oracle", sols, report });
    }
    for n in &numeric {
        write_numeric(&mut out, n, &r, cfg.output.heatmap_stride)?;
    }
    let analytic = if want(SolverChoice::Analytic) {
        let a = AnalyticOutcome::compute(&r)?;
        out.write("report_analytic.txt", |w| a.write(w))?;
        Some(a)
    } else {
        None
    };
    if let ([s, o], Some(a)) = (numeric.as_slice(), &analytic) {
        out.write("deltas.txt", |w| write_deltas(w, &s.report, &o.report, a))?;
    }

    if cfg.output.plots {
        let mut series: Vec<Series> = numeric
            .iter()
            .map(|n| Series::new(n.name, n.report.z.iter().copied().zip(n.report.intensity.iter().copied())))
            .collect();
        if let Some(a) = &analytic {
            series.push(Series::new("analytic", a.z.iter().copied().zip(a.intensity.iter().copied())));
        }
        let path = out.path("intensity.svg");
        line_plot(&path, "Scattering intensity", "z [um]", "I_p [1/(gamma um)]", &series)?;
    }
    Ok(out.written)
}

/// One line of a sweep table.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: String,
    pub t_numeric: Option<f64>,
    pub t_analytic: Option<f64>,
    pub f_numeric: Option<f64>,
    pub f_analytic: Option<f64>,
    pub purity: Option<f64>,
    pub conservation: Option<f64>,
    pub status: String,
}

impl SweepRow {
    fn skipped(raw: &str, err: &CliError) -> Self {
        warn!("sweep value `{raw}` skipped: {err}");
        Self {
            axis_value: raw.replace(',', ";"),
            t_numeric: None,
            t_analytic: None,
            f_numeric: None,
            f_analytic: None,
            purity: None,
            conservation: None,
            status: format!("skipped: {}", err.to_string().replace(['\n', ','], " ")),
        }
    }

    /// Axis value in internal units, if the point was computed.
    pub fn axis(&self) -> Option<f64> {
        self.axis_value.parse().ok().filter(|_| !self.status.starts_with("skipped"))
    }
}

fn axis_value(axis: SweepAxis, r: &Resolved) -> f64 {
    match axis {
        SweepAxis::Tau => r.pulse.tau(),
        SweepAxis::G => r.params.g(),
        SweepAxis::Rb => r.params.blockade_radius().unwrap_or(f64::NAN),
        SweepAxis::L => r.params.length(),
    }
}

fn sweep_point(cfg: &RunConfig, axis: SweepAxis, raw: &str) -> Result<SweepRow, CliError> {
    let r = cfg.with_axis(axis, raw)?.resolve()?;
    let guard = RegimeGuard::check(&r.params, &r.pulse);
    let in_regime = guard.in_regime();
    let report = match cfg.solver {
        SolverChoice::Analytic => None,
        SolverChoice::Oracle => Some(SwitchReport::from_solutions(&solve_oracle(&r)?, &r.spinwave)?),
        SolverChoice::Spectral | SolverChoice::All => {
            Some(SwitchReport::from_solutions(&solve_spectral(&r)?, &r.spinwave)?)
        }
    };
    let status = if in_regime {
        "ok".to_owned()
    } else {
        format!("ok; analytic out of regime: {}", regime_text(&guard))
    };
    Ok(SweepRow {
        axis_value: num(axis_value(axis, &r)),
        t_numeric: report.as_ref().map(|r| r.transmission),
        t_analytic: in_regime.then(|| analytic_transmission(&r.params, &r.pulse).value()),
        f_numeric: report.as_ref().map(|r| r.fidelity.value),
        f_analytic: in_regime.then(|| analytic_fidelity(&r.params, &r.pulse)),
        purity: report.as_ref().map(|r| r.final_state.purity),
        conservation: report.as_ref().map(|r| r.conservation_defect),
        status,
    })
}

/// All points of a sweep, in input order. Points run on the rayon pool.
pub fn sweep_rows(cfg: &RunConfig, sweep: &SweepSection) -> Vec<SweepRow> {
    sweep
        .values
        .par_iter()
        .map(|raw| sweep_point(cfg, sweep.axis, raw).unwrap_or_else(|e| SweepRow::skipped(raw, &e)))
        .collect()
}

pub fn write_sweep_csv(w: &mut impl Write, axis: SweepAxis, rows: &[SweepRow]) -> std::io::Result<()> {
    writeln!(
        w,
        "{},T_numeric [1],T_analytic [1],F_numeric [1],F_analytic [1],purity [1],conservation_defect [1],status",
        axis.header()
    )?;
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.axis_value,
            opt(r.t_numeric),
            opt(r.t_analytic),
            opt(r.f_numeric),
            opt(r.f_analytic),
            opt(r.purity),
            opt(r.conservation),
            r.status
        )?;
    }
    Ok(())
}

fn sweep_to(out: &mut Out, cfg: &RunConfig, sweep: &SweepSection, stem: &str) -> Result<Vec<SweepRow>, CliError> {
    let rows = sweep_rows(cfg, sweep);
    out.write(&format!("{stem}.csv"), |w| write_sweep_csv(w, sweep.axis, &rows))?;
    if cfg.output.plots {
        let pick = |f: fn(&SweepRow) -> Option<f64>| {
            rows.iter().filter_map(move |r| Some((r.axis()?, f(r)?))).collect::<Vec<_>>()
        };
        let series = [
            Series::new("T numeric", pick(|r| r.t_numeric)),
            Series::new("T analytic", pick(|r| r.t_analytic)),
            Series::new("F numeric", pick(|r| r.f_numeric)),
            Series::new("F analytic", pick(|r| r.f_analytic)),
        ];
        let path = out.path(&format!("{stem}.svg"));
        line_plot(&path, stem, sweep.axis.header(), "[1]", &series)?;
    }
    Ok(rows)
}

pub fn sweep(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("sweep needs a [sweep] section with axis and values".into()))?;
    if sweep.values.is_empty() {
        return Err(CliError::Config("sweep.values: at least one value required".into()));
    }
    let mut out = Out::new(&cfg.output.dir)?;
    sweep_to(&mut out, cfg, sweep, "sweep")?;
    Ok(out.written)
}

fn strings(values: &[f64], unit: &str) -> Vec<String> {
    values.iter().map(|v| format!("{v} {unit}")).collect()
}

/// Reproduces one of the reference figures starting from `base`.
pub fn figure(which: FigureKind, base: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let mut out = Out::new(&base.output.dir)?;
    let mut base = base.clone();
    if base.solver == SolverChoice::All {
        base.solver = SolverChoice::Spectral;
    }
    let name = which.name();
    match which {
        FigureKind::Fig2a => {
            let sweep = SweepSection {
                axis: SweepAxis::Tau,
                values: strings(&[0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 7.0, 10.0, 15.0], "/gamma"),
            };
            for g in [500, 1000] {
                let cfg = base.with_axis(SweepAxis::G, &format!("{g} gamma"))?;
                sweep_to(&mut out, &cfg, &sweep, &format!("{name}_g{g}"))?;
            }
        }
        FigureKind::Fig2b => {
            let sweep = SweepSection {
                axis: SweepAxis::G,
                values: strings(&[100.0, 200.0, 300.0, 400.0, 500.0, 600.0, 700.0, 800.0, 900.0, 1000.0], "gamma"),
            };
            for (tag, rb) in [("rb_L", "1 L"), ("rb_half_L", "0.5 L")] {
                let cfg = base.with_axis(SweepAxis::Rb, rb)?;
                sweep_to(&mut out, &cfg, &sweep, &format!("{name}_{tag}"))?;
            }
        }
        FigureKind::Fig3 => {
            let mut cfg = base.with_axis(SweepAxis::Rb, "0.5 L")?;
            cfg = cfg.with_axis(SweepAxis::G, "1000 gamma")?;
            cfg.spinwave.sites = None;
            cfg.spinwave.weights = None;
            cfg.spinwave.positions = Some(vec!["0 um".parse().unwrap(), "1 L".parse().unwrap()]);
            let r = cfg.resolve()?;
            let sols = if cfg.solver == SolverChoice::Oracle {
                solve_oracle(&r)?
            } else {
                solve_spectral(&r)?
            };
            let report = SwitchReport::from_solutions(&sols, &r.spinwave)?;
            out.write(&format!("{name}_report.txt"), |w| write_report(w, &report, &scenario_lines(&r)))?;
            for (s, tag) in sols.iter().zip(["z0", "zL"]) {
                out.write(&format!("{name}_heatmap_{tag}.csv"), |w| {
                    write_heatmap_csv(w, s, cfg.output.heatmap_stride)
                })?;
            }
            let profiles: Vec<Vec<f64>> = sols.iter().map(rydberg_switch::observables::intensity_profile).collect();
            out.write(&format!("{name}_intensity.csv"), |w| {
                writeln!(w, "z [um],I_p_gate_at_0 [gamma^-1 um^-1],I_p_gate_at_L [gamma^-1 um^-1]")?;
                for (i, z) in sols[0].z.iter().enumerate() {
                    writeln!(w, "{},{},{}", num(*z), num(profiles[0][i]), num(profiles[1][i]))?;
                }
                Ok(())
            })?;
            if cfg.output.plots {
                let series: Vec<Series> = profiles
                    .iter()
                    .zip(["gate at 0", "gate at L"])
                    .map(|(p, l)| Series::new(l, sols[0].z.iter().copied().zip(p.iter().copied())))
                    .collect();
                let path = out.path(&format!("{name}_intensity.svg"));
                line_plot(&path, "Scattering intensity, R_b = L/2", "z [um]", "I_p [1/(gamma um)]", &series)?;
            }
        }
        FigureKind::Fig4a => {
            let sweep = SweepSection {
                axis: SweepAxis::Rb,
                values: strings(&[0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0], "L"),
            };
            let cfg = base.with_axis(SweepAxis::G, "1000 gamma")?;
            sweep_to(&mut out, &cfg, &sweep, name)?;
        }
        FigureKind::Fig4b => {
            let cfg = base.with_axis(SweepAxis::Rb, "1 L")?;
            let mut columns: Vec<(String, Vec<f64>)> = Vec::new();
            let mut z = Vec::new();
            for g in [1000, 512] {
                let r = cfg.with_axis(SweepAxis::G, &format!("{g} gamma"))?.resolve()?;
                let sols = if cfg.solver == SolverChoice::Oracle {
                    solve_oracle(&r)?
                } else {
                    solve_spectral(&r)?
                };
                let report = SwitchReport::from_solutions(&sols, &r.spinwave)?;
                let a = AnalyticOutcome::compute(&r)?;
                warn_regime(&a.guard);
                z = report.z.clone();
                columns.push((format!("I_p_numeric_g{g} [gamma^-1 um^-1]"), report.intensity));
                columns.push((format!("I_p_analytic_g{g} [gamma^-1 um^-1]"), a.intensity));
            }
            out.write(&format!("{name}.csv"), |w| {
                let header: Vec<&str> = columns.iter().map(|(h, _)| h.as_str()).collect();
                writeln!(w, "z [um],{}", header.join(","))?;
                for (i, zi) in z.iter().enumerate() {
                    let cells: Vec<String> = columns.iter().map(|(_, c)| num(c[i])).collect();
                    writeln!(w, "{},{}", num(*zi), cells.join(","))?;
                }
                Ok(())
            })?;
            if cfg.output.plots {
                let series: Vec<Series> = columns
                    .iter()
                    .map(|(h, c)| Series::new(h.split(' ').next().unwrap_or(h), z.iter().copied().zip(c.iter().copied())))
                    .collect();
                let path = out.path(&format!("{name}.svg"));
                line_plot(&path, "Scattering intensity, R_b = L", "z [um]", "I_p [1/(gamma um)]", &series)?;
            }
        }
    }
    Ok(out.written)
}

/// Runs the acceptance checks (all when `only` is empty), printing one line
/// per check.
pub fn validate(only: &[u32], mut print: impl FnMut(&str)) -> Result<(), CliError> {
    if let Some(bad) = only.iter().find(|id| !CHECKS.iter().any(|(i, _)| i == *id)) {
        return Err(CliError::Usage(format!("no acceptance check with id {bad}")));
    }
    let ids: Vec<u32> = if only.is_empty() {
        CHECKS.iter().map(|(i, _)| *i).collect()
    } else {
        only.to_vec()
    };
    let mut suite = Suite::new(SolveOptions::default());
    let mut failed = 0;
    for id in ids {
        let r = suite.run(id);
        print(&r.to_string());
        failed += usize::from(!r.passed);
    }
    if failed > 0 {
        Err(CliError::ChecksFailed(failed))
    } else {
        Ok(())
    }
}
