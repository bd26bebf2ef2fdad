//! Plain-text serialisation of results.
//!
//! A report is a key–value summary followed by CSV blocks, each introduced
//! by a `[name]` line. Every column header carries its unit; numbers use a
//! fixed exponent format so identical runs produce identical bytes.

use std::io::{self, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::observables::SwitchReport;
use crate::solution::FieldSolution;

pub fn num(x: f64) -> String {
    format!("{x:.9e}")
}

fn solver_name(r: &SwitchReport) -> &'static str {
    match r.solver {
        crate::solution::SolverKind::Spectral => "spectral",
        crate::solution::SolverKind::TimeDomain => "oracle",
    }
}

/// Summary lines plus the `intensity`, `overlap` and `density_matrix` blocks.
/// `extra` lines are written after the built-in keys.
pub fn write_report(w: &mut impl Write, r: &SwitchReport, extra: &[(String, String)]) -> io::Result<()> {
    writeln!(w, "solver = {}", solver_name(r))?;
    writeln!(w, "n_z = {}", r.n_z)?;
    writeln!(w, "n_t = {}", r.n_t)?;
    writeln!(w, "components = {}", r.overlap.dim())?;
    writeln!(w, "transmission [1] = {}", num(r.transmission))?;
    writeln!(w, "fidelity [1] = {}", num(r.fidelity.value))?;
    writeln!(w, "fidelity_imag_residue [1] = {}", num(r.fidelity.imaginary_residue))?;
    writeln!(w, "purity [1] = {}", num(r.final_state.purity))?;
    writeln!(w, "rho_trace [1] = {}", num(r.final_state.trace))?;
    writeln!(w, "rho_trace_deficit [1] = {}", num(r.final_state.trace_deficit))?;
    writeln!(w, "conservation_defect [1] = {}", num(r.conservation_defect))?;
    writeln!(w, "residual_in_medium [1] = {}", num(r.residual_in_medium))?;
    let list = |v: &[f64]| v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(",");
    writeln!(w, "component_transmission [1] = {}", list(&r.component_transmissions))?;
    writeln!(w, "component_scattering [1] = {}", list(&r.scattering_probabilities))?;
    for (k, v) in extra {
        writeln!(w, "{k} = {v}")?;
    }
    writeln!(w)?;
    writeln!(w, "[intensity]")?;
    write_intensity_csv(w, &r.z, &r.intensity)?;
    writeln!(w)?;
    writeln!(w, "[overlap]")?;
    write_matrix_csv(w, r.overlap.matrix())?;
    writeln!(w)?;
    writeln!(w, "[density_matrix]")?;
    write_matrix_csv(w, &r.final_state.rho)
}

pub fn write_intensity_csv(w: &mut impl Write, z: &[f64], ip: &[f64]) -> io::Result<()> {
    writeln!(w, "z [um],I_p [gamma^-1 um^-1]")?;
    for (z, i) in z.iter().zip(ip) {
        writeln!(w, "{},{}", num(*z), num(*i))?;
    }
    Ok(())
}

/// Row-major: one line per row, each entry as a `re,im` pair.
pub fn write_matrix_csv(w: &mut impl Write, m: &DMatrix<Complex64>) -> io::Result<()> {
    let header: Vec<String> = (0..m.ncols())
        .flat_map(|k| [format!("re_{k} [1]"), format!("im_{k} [1]")])
        .collect();
    writeln!(w, "row,{}", header.join(","))?;
    for j in 0..m.nrows() {
        let cells: Vec<String> = (0..m.ncols())
            .flat_map(|k| [num(m[(j, k)].re), num(m[(j, k)].im)])
            .collect();
        writeln!(w, "{j},{}", cells.join(","))?;
    }
    Ok(())
}

/// `|P(z,t)|²` in long format, keeping every `stride`-th sample with `t >= 0`.
pub fn write_heatmap_csv(w: &mut impl Write, sol: &FieldSolution, stride: usize) -> io::Result<()> {
    let stride = stride.max(1);
    writeln!(w, "z [um],t [gamma^-1],|P|^2 [um^-1]")?;
    for (i, z) in sol.z.iter().enumerate().step_by(stride) {
        for k in (0..sol.n_t()).step_by(stride) {
            let t = sol.time.time(k);
            if t < 0.0 {
                continue;
            }
            writeln!(w, "{},{},{}", num(*z), num(t), num(sol.p[[i, k]].norm_sqr()))?;
        }
    }
    Ok(())
}

/// The transmitted field at the exit face over `t >= 0`.
pub fn write_exit_field_csv(w: &mut impl Write, sol: &FieldSolution) -> io::Result<()> {
    let last = sol.n_z() - 1;
    writeln!(w, "t [gamma^-1],re_E [um^-1/2],im_E [um^-1/2],|E|^2 [um^-1]")?;
    for k in 0..sol.n_t() {
        let t = sol.time.time(k);
        if t < 0.0 {
            continue;
        }
        let e = sol.e[[last, k]];
        writeln!(w, "{},{},{},{}", num(t), num(e.re), num(e.im), num(e.norm_sqr()))?;
    }
    Ok(())
}
