use rydberg_switch::observables::{conservation_report, transmission};
use rydberg_switch::oracle::{integrate_maxwell_bloch, OracleConfig};
use rydberg_switch::spectral::solve_component;
use rydberg_switch::{
    FieldSolution, GatePotential, InteractionModel, MediumParams, PulseSpec, SolveOptions, SpectralGrids,
};

struct Case {
    params: MediumParams,
    pulse: PulseSpec,
    pot: GatePotential,
}

impl Case {
    fn new(g: f64, gamma_tau: f64, rb: f64, z_gate: f64, model: InteractionModel) -> Self {
        let params = MediumParams::rubidium_defaults()
            .with_g(g)
            .unwrap()
            .with_blockade_radius(rb)
            .unwrap();
        let pulse = PulseSpec::with_default_offset(gamma_tau, params.c_light()).unwrap();
        let pot = GatePotential::new(&params, z_gate, model);
        Self { params, pulse, pot }
    }

    fn spectral(&self) -> FieldSolution {
        let grids = SpectralGrids::auto(&self.params, &self.pulse);
        solve_component(&self.params, &self.pot, &self.pulse, &grids, &SolveOptions::default()).unwrap()
    }

    fn oracle(&self, reference: &FieldSolution, refine: usize) -> FieldSolution {
        let cfg = OracleConfig::matching(reference, refine).unwrap();
        integrate_maxwell_bloch(&self.params, &self.pot, &self.pulse, &cfg)
            .unwrap()
            .decimate_time(refine)
    }
}

fn relative_l2(a: &FieldSolution, b: &FieldSolution) -> f64 {
    let d: f64 = a.p.iter().zip(b.p.iter()).map(|(x, y)| (x - y).norm_sqr()).sum();
    let n: f64 = b.p.iter().map(|y| y.norm_sqr()).sum();
    (d / n).sqrt()
}

#[test]
fn agrees_with_spectral_in_two_level_mode() {
    let case = Case::new(200.0, 5.0, 20.0, 10.0, InteractionModel::TwoLevel);
    let spec = case.spectral();
    let orc = case.oracle(&spec, 4);
    assert!(orc.shares_grid(&spec));
    let (ts, to) = (transmission(&spec).unwrap(), transmission(&orc).unwrap());
    assert!((ts - to).abs() / ts < 1e-2);
    assert!(relative_l2(&orc, &spec) < 2e-2);
}

#[test]
fn error_falls_at_second_order() {
    let case = Case::new(200.0, 5.0, 20.0, 10.0, InteractionModel::TwoLevel);
    let spec = case.spectral();
    let errs: Vec<f64> = [1, 2, 4].iter().map(|&m| relative_l2(&case.oracle(&spec, m), &spec)).collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!(ratio > 3.0 && ratio < 5.0, "errors {errs:?}");
    }
}

#[test]
fn agrees_with_spectral_around_a_vdw_gate() {
    let case = Case::new(300.0, 5.0, 10.0, 20.0, InteractionModel::VanDerWaals);
    let spec = case.spectral();
    let orc = case.oracle(&spec, 4);
    let (ts, to) = (transmission(&spec).unwrap(), transmission(&orc).unwrap());
    assert!((ts - to).abs() / ts < 1e-2, "spectral {ts} oracle {to}");
    assert!(relative_l2(&orc, &spec) < 2e-2);
    let ds: f64 = spec.s.iter().zip(orc.s.iter()).map(|(x, y)| (x - y).norm_sqr()).sum();
    let ns: f64 = spec.s.iter().map(|y| y.norm_sqr()).sum();
    assert!((ds / ns).sqrt() < 2e-2);
}

#[test]
fn eit_transparency_in_both_solvers() {
    let case = Case::new(200.0, 10.0, 20.0, 0.0, InteractionModel::NoGate);
    let spec = case.spectral();
    let orc = case.oracle(&spec, 2);
    assert!(transmission(&spec).unwrap() > 0.99);
    assert!(transmission(&orc).unwrap() > 0.99);
}

#[test]
fn oracle_conserves_probability() {
    let case = Case::new(600.0, 5.0, 12.0, 4.0, InteractionModel::VanDerWaals);
    let spec = case.spectral();
    let coarse = conservation_report(&case.oracle(&spec, 1)).unwrap().defect();
    let fine = conservation_report(&case.oracle(&spec, 4)).unwrap().defect();
    assert!(coarse < 1e-2);
    assert!(fine < coarse);
    assert!(conservation_report(&spec).unwrap().defect() < 1e-3);
}
