use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tritronquee::{DomainLayout, LineSpec, Sigma, SolverConfig, C64};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LineConfig {
    pub a_re: f64,
    pub a_im: f64,
    pub b_re: f64,
    pub b_im: f64,
    /// Sign of the leading term `σ√(z/3)`, either 1 or -1.
    pub sigma: i32,
}

impl Default for LineConfig {
    fn default() -> Self {
        LineConfig {
            a_re: 0.0,
            a_im: 1.0,
            b_re: 0.0,
            b_im: 0.0,
            sigma: -1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LayoutConfig {
    pub x_l: f64,
    pub x_r: f64,
    pub n_end_left: usize,
    pub n_middle: Vec<usize>,
    pub n_end_right: usize,
    pub middle_splits: Vec<f64>,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig {
            x_l: -10.0,
            x_r: 10.0,
            n_end_left: 20,
            n_middle: vec![256],
            n_end_right: 20,
            middle_splits: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub damping: bool,
    pub series_terms: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = SolverConfig::default();
        SolverSection {
            tolerance: d.tolerance,
            max_iterations: d.max_iterations,
            damping: d.damping,
            series_terms: d.series_terms,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub samples: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub directory: Option<PathBuf>,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            samples: 301,
            x_min: -15.0,
            x_max: 15.0,
            directory: None,
            formats: vec![Format::Csv, Format::Json],
        }
    }
}

impl OutputConfig {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub line: LineConfig,
    pub layout: LayoutConfig,
    pub solver: SolverSection,
    pub output: OutputConfig,
}

/// Core inputs built from a validated [`RunConfig`].
#[derive(Debug, Clone)]
pub struct Resolved {
    pub line: LineSpec,
    pub layout: DomainLayout,
    pub solver: SolverConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let o = &self.output;
        if o.samples < 2 {
            return Err(CliError::Config(format!("output.samples must be at least 2, got {}", o.samples)));
        }
        if !(o.x_min < o.x_max) || !o.x_min.is_finite() || !o.x_max.is_finite() {
            return Err(CliError::Config(format!(
                "output range needs finite x_min < x_max, got [{}, {}]",
                o.x_min, o.x_max
            )));
        }
        let sigma = Sigma::from_sign(self.line.sigma)
            .ok_or_else(|| CliError::Config(format!("line.sigma must be 1 or -1, got {}", self.line.sigma)))?;
        let l = &self.line;
        let line = LineSpec::new(C64::new(l.a_re, l.a_im), C64::new(l.b_re, l.b_im), sigma)?;
        let g = &self.layout;
        let layout = DomainLayout::new(
            g.x_l,
            g.x_r,
            g.n_end_left,
            g.n_middle.clone(),
            g.n_end_right,
            g.middle_splits.clone(),
        )?;
        line.check_layout(&layout)?;
        let s = &self.solver;
        let solver = SolverConfig {
            tolerance: s.tolerance,
            max_iterations: s.max_iterations,
            damping: s.damping,
            series_terms: s.series_terms,
            ..SolverConfig::default()
        };
        solver.validate()?;
        Ok(Resolved { line, layout, solver })
    }

    /// Copy of this configuration with one sweep parameter replaced.
    pub fn with_param(&self, param: SweepParam, raw: &str) -> Result<Self, CliError> {
        let mut out = self.clone();
        let bad = |what: &str| CliError::Config(format!("sweep value {raw:?} is not a valid {what}"));
        match param {
            SweepParam::NMiddle => {
                let n: usize = raw.trim().parse().map_err(|_| bad("degree"))?;
                out.layout.n_middle.iter_mut().for_each(|m| *m = n);
            }
            SweepParam::XL | SweepParam::XR | SweepParam::Tolerance => {
                let v: f64 = raw.trim().parse().map_err(|_| bad("number"))?;
                match param {
                    SweepParam::XL => out.layout.x_l = v,
                    SweepParam::XR => out.layout.x_r = v,
                    _ => out.solver.tolerance = v,
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepParam {
    #[value(name = "n_middle")]
    NMiddle,
    #[value(name = "x_l")]
    XL,
    #[value(name = "x_r")]
    XR,
    #[value(name = "tolerance")]
    Tolerance,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::NMiddle => "n_middle",
            SweepParam::XL => "x_l",
            SweepParam::XR => "x_r",
            SweepParam::Tolerance => "tolerance",
        }
    }
}
