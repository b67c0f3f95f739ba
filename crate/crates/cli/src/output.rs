use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use tritronquee::{ChebGrid, DomainKind, Side, SolveReport, SolveState, C64};

use crate::config::{Format, RunConfig};
use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Seventeen significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn sample_points(x_min: f64, x_max: f64, m: usize) -> Vec<f64> {
    let h = (x_max - x_min) / (m - 1) as f64;
    (0..m).map(|k| if k + 1 == m { x_max } else { x_min + h * k as f64 }).collect()
}

pub fn solution_csv(state: &SolveState, xs: &[f64]) -> Result<String, CliError> {
    let mut out = String::from("x,re_omega,im_omega,re_domega_dx,im_domega_dx\n");
    for &x in xs {
        let (w, d) = state.evaluate(x)?;
        writeln!(out, "{},{},{},{},{}", num(x), num(w.re), num(w.im), num(d.re), num(d.im)).unwrap();
    }
    Ok(out)
}

pub fn coeffs_csv(abs: &[f64]) -> String {
    let mut out = String::from("n,abs_c\n");
    for (n, c) in abs.iter().enumerate() {
        writeln!(out, "{n},{}", num(*c)).unwrap();
    }
    out
}

/// Remainder `v` at the nodes of both end domains.
pub fn end_domains_csv(state: &SolveState) -> Result<String, CliError> {
    let mut out = String::from("domain,node,l,re_s,im_s,re_v,im_v\n");
    let disc = state.discretization();
    for (label, side) in [("I", Side::Left), ("III", Side::Right)] {
        let s = &disc.end_operator(side).s_values;
        let v = state.end_values(side);
        let grid = ChebGrid::new(s.len() - 1)?;
        for (j, ((l, s), v)) in grid.points().iter().zip(s).zip(v).enumerate() {
            let v: C64 = *v;
            writeln!(out, "{label},{j},{},{},{},{},{}", num(*l), num(s.re), num(s.im), num(v.re), num(v.im)).unwrap();
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct JunctionJson {
    x: f64,
    value_mismatch: f64,
    deriv_mismatch: f64,
}

#[derive(Serialize)]
struct SpectrumJson {
    label: String,
    kind: &'static str,
    degree: usize,
    saturation_index: usize,
    floor: f64,
    max_abs: f64,
    abs_coeffs: Vec<f64>,
}

#[derive(Serialize)]
struct ReportJson {
    converged: bool,
    iterations: usize,
    residual_history: Vec<f64>,
    final_residual: f64,
    damping_halvings: usize,
    junctions: Vec<JunctionJson>,
    coeff_spectra: Vec<SpectrumJson>,
    jacobian_condition: f64,
    refined_ode_residual: f64,
}

#[derive(Serialize)]
struct Document<'a> {
    schema_version: u32,
    solver_version: &'static str,
    config: &'a RunConfig,
    report: ReportJson,
}

fn kind_name(kind: DomainKind) -> &'static str {
    match kind {
        DomainKind::EndLeft => "end_left",
        DomainKind::Middle(_) => "middle",
        DomainKind::EndRight => "end_right",
    }
}

pub fn report_json(config: &RunConfig, report: &SolveReport) -> Result<String, CliError> {
    let doc = Document {
        schema_version: SCHEMA_VERSION,
        solver_version: env!("CARGO_PKG_VERSION"),
        config,
        report: ReportJson {
            converged: report.converged,
            iterations: report.iterations,
            residual_history: report.residual_history.clone(),
            final_residual: report.final_residual,
            damping_halvings: report.damping_halvings,
            junctions: report
                .junctions
                .iter()
                .map(|j| JunctionJson {
                    x: j.x,
                    value_mismatch: j.value_mismatch,
                    deriv_mismatch: j.deriv_mismatch,
                })
                .collect(),
            coeff_spectra: report
                .coeff_spectra
                .iter()
                .map(|s| SpectrumJson {
                    label: s.label.clone(),
                    kind: kind_name(s.kind),
                    degree: s.coeffs.degree(),
                    saturation_index: s.diagnostic.saturation_index,
                    floor: s.diagnostic.floor,
                    max_abs: s.coeffs.max_abs(),
                    abs_coeffs: s.coeffs.abs(),
                })
                .collect(),
            jacobian_condition: report.jacobian_condition,
            refined_ode_residual: report.refined_ode_residual,
        },
    };
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Writes every requested artifact of one solve into `dir`.
pub fn write_run(dir: &Path, config: &RunConfig, state: &SolveState, report: &SolveReport) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let o = &config.output;
    if o.wants(Format::Csv) {
        let xs = sample_points(o.x_min, o.x_max, o.samples);
        write(dir, "solution.csv", &solution_csv(state, &xs)?)?;
        for s in &report.coeff_spectra {
            write(dir, &format!("coeffs_domain_{}.csv", s.label), &coeffs_csv(&s.coeffs.abs()))?;
        }
        write(dir, "end_domains.csv", &end_domains_csv(state)?)?;
    }
    if o.wants(Format::Json) {
        write(dir, "report.json", &report_json(config, report)?)?;
    }
    Ok(())
}

pub struct SummaryRow {
    pub value: String,
    pub converged: bool,
    pub final_residual: f64,
    pub iterations: usize,
    pub floors: [f64; 3],
}

pub fn sweep_summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from("value,converged,final_residual,iterations,coeff_floor_I,coeff_floor_II,coeff_floor_III\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.value,
            r.converged,
            num(r.final_residual),
            r.iterations,
            num(r.floors[0]),
            num(r.floors[1]),
            num(r.floors[2])
        )
        .unwrap();
    }
    out
}

pub fn write_summary(dir: &Path, rows: &[SummaryRow]) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    write(dir, "sweep_summary.csv", &sweep_summary_csv(rows))
}
