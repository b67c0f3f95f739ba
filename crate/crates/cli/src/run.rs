use std::path::{Path, PathBuf};

use tritronquee::{newton_solve, DomainKind, SolveReport};

use crate::config::{RunConfig, SweepParam};
use crate::error::{CliError, EXIT_CONFIG, EXIT_NOT_CONVERGED, EXIT_OK};
use crate::output::{write_run, write_summary, SummaryRow};

pub const OUT_ENV: &str = "TRITRONQUEE_OUT";

/// `--out`, then `TRITRONQUEE_OUT`, then `output.directory`, then `out`.
pub fn output_dir(flag: Option<&Path>, config: &RunConfig) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os(OUT_ENV).filter(|p| !p.is_empty()) {
        return PathBuf::from(p);
    }
    config.output.directory.clone().unwrap_or_else(|| PathBuf::from("out"))
}

pub struct Outcome {
    pub report: SolveReport,
    pub code: i32,
}

/// Solves `config` and writes its artifacts into `dir`.
pub fn solve_into(config: &RunConfig, dir: &Path) -> Result<Outcome, CliError> {
    let r = config.resolve()?;
    let (state, report) = newton_solve(&r.line, &r.layout, &r.solver)?;
    let mut resolved = config.clone();
    resolved.output.directory = Some(dir.to_path_buf());
    write_run(dir, &resolved, &state, &report)?;
    let code = if report.converged { EXIT_OK } else { EXIT_NOT_CONVERGED };
    Ok(Outcome { report, code })
}

pub fn summary_line(label: &str, report: &SolveReport) -> String {
    let floors: Vec<String> = report
        .coeff_spectra
        .iter()
        .map(|s| format!("{}={:.2e}", s.label, s.diagnostic.floor))
        .collect();
    format!(
        "{label}: {} after {} iterations, residual {:.3e}, floors {}",
        if report.converged { "converged" } else { "NOT converged" },
        report.iterations,
        report.final_residual,
        floors.join(" ")
    )
}

pub fn solve(config_path: &Path, out: Option<&Path>, quiet: bool) -> i32 {
    let result = RunConfig::load(config_path).and_then(|cfg| {
        let dir = output_dir(out, &cfg);
        solve_into(&cfg, &dir).map(|o| (o, dir))
    });
    match result {
        Ok((o, dir)) => {
            if !quiet {
                println!("{} -> {}", summary_line("solve", &o.report), dir.display());
            }
            o.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn floors(report: &SolveReport) -> [f64; 3] {
    let mut f = [f64::NAN; 3];
    for s in &report.coeff_spectra {
        let slot = match s.kind {
            DomainKind::EndLeft => 0,
            DomainKind::Middle(_) => 1,
            DomainKind::EndRight => 2,
        };
        f[slot] = if f[slot].is_nan() { s.diagnostic.floor } else { f[slot].max(s.diagnostic.floor) };
    }
    f
}

pub fn sweep(config_path: &Path, param: SweepParam, values: &[String], out: Option<&Path>, quiet: bool) -> i32 {
    let base = match RunConfig::load(config_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let values: Vec<&str> = values.iter().map(|v| v.trim()).filter(|v| !v.is_empty()).collect();
    if values.is_empty() {
        eprintln!("error: sweep needs at least one value");
        return EXIT_CONFIG;
    }
    let root = output_dir(out, &base);
    let mut rows = Vec::with_capacity(values.len());
    let mut worst = EXIT_OK;
    for raw in values {
        let dir = root.join(format!("{}_{raw}", param.name()));
        let outcome = base.with_param(param, raw).and_then(|cfg| solve_into(&cfg, &dir));
        match outcome {
            Ok(o) => {
                if !quiet {
                    println!("{}", summary_line(&format!("{}={raw}", param.name()), &o.report));
                }
                rows.push(SummaryRow {
                    value: raw.to_string(),
                    converged: o.report.converged,
                    final_residual: o.report.final_residual,
                    iterations: o.report.iterations,
                    floors: floors(&o.report),
                });
                worst = worst.max(o.code);
            }
            Err(e) => {
                eprintln!("error: {}={raw}: {e}", param.name());
                rows.push(SummaryRow {
                    value: raw.to_string(),
                    converged: false,
                    final_residual: f64::NAN,
                    iterations: 0,
                    floors: [f64::NAN; 3],
                });
                worst = worst.max(e.exit_code());
            }
        }
    }
    if let Err(e) = write_summary(&root, &rows) {
        eprintln!("error: {e}");
        worst = worst.max(e.exit_code());
    }
    worst
}
