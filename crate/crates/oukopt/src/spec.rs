//! Fully resolved description of one invocation.

use std::path::PathBuf;

use clap::ValueEnum;
use oukopt_core::mc::{CollapsePolicy, DReference, McConfig};
use oukopt_core::optim::logspace;
use oukopt_core::search::{DEFAULT_GRID_RESOLUTION, DEFAULT_LINE_RESOLUTION, DEFAULT_REFINE_TOL};
use oukopt_core::{Design1D, GridDesign2D, OuParams, SheetParams, Trend1D, Trend2D};
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    /// One-dimensional OU process.
    Process,
    /// OU sheet on a rectangular grid.
    Sheet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    ThreePoint,
    NinePoint,
    TwoPoint,
    FourPoint,
    Equidistant,
}

impl Family {
    pub fn is_grid(self) -> bool {
        matches!(self, Family::NinePoint | Family::FourPoint)
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::ThreePoint => "three-point",
            Family::NinePoint => "nine-point",
            Family::TwoPoint => "two-point",
            Family::FourPoint => "four-point",
            Family::Equidistant => "equidistant",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
pub enum CriterionArg {
    #[value(name = "D", alias = "d")]
    D,
    #[value(name = "K", alias = "k")]
    K,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum DoubleMode {
    Infill,
    Domain,
    InfillBoth,
    InfillOne,
    DomainBoth,
    DomainOne,
}

impl DoubleMode {
    pub fn is_grid(self) -> bool {
        !matches!(self, DoubleMode::Infill | DoubleMode::Domain)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SurfaceMode {
    Both,
    One,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Interval {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum DReferenceArg {
    Equidistant,
    Searched,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CollapseArg {
    Error,
    Merge,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DesignSpec {
    Line(Vec<f64>),
    Grid { s: Vec<f64>, t: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Final tolerance of golden-section and root refinements.
    pub refine: f64,
    pub line_resolution: usize,
    pub grid_resolution: usize,
    /// Convergence threshold for extrapolated K limits.
    pub limit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            refine: DEFAULT_REFINE_TOL,
            line_resolution: DEFAULT_LINE_RESOLUTION,
            grid_resolution: DEFAULT_GRID_RESOLUTION,
            limit: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McSpec {
    pub replicates: usize,
    pub seed: u64,
    pub sigma: f64,
    pub d_reference: DReferenceArg,
    pub on_collapse: CollapseArg,
}

impl McSpec {
    pub fn config(&self) -> McConfig {
        McConfig {
            replicates: self.replicates,
            seed: self.seed,
            sigma: self.sigma,
            trend_1d: Trend1D::new(1.0, 1.0),
            trend_2d: Trend2D::new(1.0, 1.0, 1.0),
            d_reference: match self.d_reference {
                DReferenceArg::Equidistant => DReference::Equidistant,
                DReferenceArg::Searched => DReference::Searched,
            },
            on_collapse: match self.on_collapse {
                CollapseArg::Error => CollapsePolicy::Error,
                CollapseArg::Merge => CollapsePolicy::Merge,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "command")]
pub enum Task {
    #[serde(rename = "fim")]
    Fim {
        model: Model,
        beta: f64,
        gamma: Option<f64>,
        design: DesignSpec,
    },
    #[serde(rename = "optimize")]
    Optimize {
        family: Family,
        criterion: CriterionArg,
        beta: f64,
        gamma: Option<f64>,
        n: Option<usize>,
    },
    #[serde(rename = "asymptotics limits")]
    Limits { betas: Vec<f64> },
    #[serde(rename = "asymptotics k-maximum")]
    KMaximum,
    #[serde(rename = "asymptotics double")]
    Double {
        mode: DoubleMode,
        beta: f64,
        gamma: Option<f64>,
        n: usize,
        m: Option<usize>,
    },
    #[serde(rename = "asymptotics surface")]
    Surface {
        mode: SurfaceMode,
        betas: Vec<f64>,
        gammas: Vec<f64>,
        n_sequence: Vec<usize>,
    },
    #[serde(rename = "asymptotics curves")]
    Curves { family: Family, betas: Vec<f64> },
    #[serde(rename = "simulate table1")]
    Table1 { mc: McSpec },
    #[serde(rename = "simulate curve")]
    Curve {
        interval: Interval,
        count: usize,
        mc: McSpec,
    },
    #[serde(rename = "simulate eff")]
    Eff {
        beta: f64,
        gamma: Option<f64>,
        mc: McSpec,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSpec {
    #[serde(flatten)]
    pub task: Task,
    pub format: Format,
    pub tolerances: Tolerances,
    /// Where the output goes; not part of the echoed spec since it does not
    /// change the results.
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

impl RunSpec {
    pub fn seed(&self) -> Option<u64> {
        match &self.task {
            Task::Table1 { mc } | Task::Curve { mc, .. } | Task::Eff { mc, .. } => Some(mc.seed),
            _ => None,
        }
    }

    /// File stem used when only an output directory is known.
    pub fn default_file_stem(&self) -> String {
        match &self.task {
            Task::Fim { .. } => "fim".into(),
            Task::Optimize { family, .. } => format!("optimize-{}", family.name()),
            Task::Limits { .. } => "asymptotics-limits".into(),
            Task::KMaximum => "asymptotics-k-maximum".into(),
            Task::Double { .. } => "asymptotics-double".into(),
            Task::Surface { .. } => "asymptotics-surface".into(),
            Task::Curves { family, .. } => format!("asymptotics-curves-{}", family.name()),
            Task::Table1 { .. } => "simulate-table1".into(),
            Task::Curve { .. } => "simulate-curve".into(),
            Task::Eff { .. } => "simulate-eff".into(),
        }
    }

    /// Header entries: tool version, resolved spec, seed and tolerances.
    pub fn metadata(&self) -> Vec<(&'static str, Value)> {
        vec![
            ("tool", Value::from(concat!("oukopt ", env!("CARGO_PKG_VERSION")))),
            ("spec", json(self)),
            ("seed", self.seed().map_or(Value::Null, Value::from)),
            ("tolerances", json(&self.tolerances)),
        ]
    }

    /// Checks every input that can be checked without computing anything.
    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        if !(t.refine > 0.0 && t.refine.is_finite() && t.limit > 0.0 && t.limit.is_finite()) {
            return invalid("tolerances must be positive and finite");
        }
        if t.line_resolution < 3 || t.grid_resolution < 3 {
            return invalid("scan resolutions must be at least 3");
        }
        match &self.task {
            Task::Fim {
                model,
                beta,
                gamma,
                design,
            } => match (model, design) {
                (Model::Process, DesignSpec::Line(pts)) => {
                    OuParams::with_beta(*beta)?;
                    Design1D::new(pts.clone())?;
                }
                (Model::Sheet, DesignSpec::Grid { s, t }) => {
                    sheet(*beta, *gamma)?;
                    GridDesign2D::new(Design1D::new(s.clone())?, Design1D::new(t.clone())?);
                }
                (Model::Process, _) => return invalid("a process needs a line design (--design)"),
                (Model::Sheet, _) => return invalid("a sheet needs a grid design (--grid)"),
            },
            Task::Optimize {
                family,
                criterion,
                beta,
                gamma,
                n,
            } => {
                if family.is_grid() {
                    sheet(*beta, *gamma)?;
                } else {
                    OuParams::with_beta(*beta)?;
                    if gamma.is_some() {
                        return invalid("--gamma only applies to grid families");
                    }
                }
                let k_only = matches!(family, Family::TwoPoint | Family::FourPoint | Family::Equidistant);
                if k_only && *criterion == CriterionArg::D {
                    return invalid("this family only supports the K criterion");
                }
                match (family, n) {
                    (Family::Equidistant, Some(n)) if *n < 2 => return invalid("--n must be at least 2"),
                    (Family::Equidistant, None) => return invalid("the equidistant family needs --n"),
                    (Family::Equidistant, _) | (_, None) => {}
                    (_, Some(_)) => return invalid("--n only applies to the equidistant family"),
                }
            }
            Task::Limits { betas } => {
                if betas.is_empty() {
                    return invalid("give at least one --beta or a --range");
                }
                for &b in betas {
                    OuParams::with_beta(b)?;
                }
            }
            Task::KMaximum => {}
            Task::Double {
                mode,
                beta,
                gamma,
                n,
                m,
            } => {
                if *n < 2 || m.is_some_and(|m| m < 2) {
                    return invalid("--n and --m must be at least 2");
                }
                if mode.is_grid() {
                    sheet(*beta, *gamma)?;
                } else {
                    OuParams::with_beta(*beta)?;
                    if gamma.is_some() || m.is_some() {
                        return invalid("--gamma and --m only apply to grid modes");
                    }
                }
            }
            Task::Surface {
                betas,
                gammas,
                n_sequence,
                ..
            } => {
                for &b in betas.iter().chain(gammas) {
                    OuParams::with_beta(b)?;
                }
                if n_sequence.len() < 2 || n_sequence.iter().any(|&n| n < 2) {
                    return invalid("--n-sequence needs at least two sizes, each at least 2");
                }
            }
            Task::Curves { family, betas } => {
                if *family == Family::Equidistant {
                    return invalid("curves are available for three-point, two-point, nine-point and four-point");
                }
                for &b in betas {
                    OuParams::with_beta(b)?;
                }
            }
            Task::Table1 { mc } => check_mc(mc)?,
            Task::Curve { count, mc, .. } => {
                check_mc(mc)?;
                if *count < 2 {
                    return invalid("--count must be at least 2");
                }
            }
            Task::Eff { beta, gamma, mc } => {
                check_mc(mc)?;
                match gamma {
                    Some(_) => {
                        sheet(*beta, *gamma)?;
                    }
                    None => {
                        OuParams::with_beta(*beta)?;
                    }
                }
            }
        }
        Ok(())
    }
}

fn json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

fn invalid<T>(msg: &str) -> Result<T> {
    Err(CliError::Validation(msg.into()))
}

pub(crate) fn sheet(beta: f64, gamma: Option<f64>) -> Result<SheetParams> {
    match gamma {
        Some(g) => Ok(SheetParams::with_rates(beta, g)?),
        None => invalid("a sheet needs --gamma"),
    }
}

fn check_mc(mc: &McSpec) -> Result<()> {
    if mc.replicates < 2 {
        return invalid("--reps must be at least 2");
    }
    OuParams::new(1.0, mc.sigma)?;
    Ok(())
}

/// A parsed list of reals; a newtype so clap treats it as one value.
#[derive(Debug, Clone, PartialEq)]
pub struct Points(pub Vec<f64>);

/// Comma-separated reals, e.g. `0,0.5,1`.
pub fn parse_points(s: &str) -> std::result::Result<Points, String> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<std::result::Result<_, _>>()
        .map(Points)
}

/// Two point lists joined by `x`, e.g. `0,0.5,1x0,1`.
pub fn parse_grid(s: &str) -> std::result::Result<(Points, Points), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("`{s}`: expected two point lists joined by `x`"))?;
    Ok((parse_points(a)?, parse_points(b)?))
}

/// `lo,hi,count`, expanded to log-spaced values.
pub fn parse_range(s: &str) -> std::result::Result<Points, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [lo, hi, count] = parts[..] else {
        return Err(format!("`{s}`: expected lo,hi,count"));
    };
    let lo: f64 = lo.parse().map_err(|e| format!("`{lo}`: {e}"))?;
    let hi: f64 = hi.parse().map_err(|e| format!("`{hi}`: {e}"))?;
    let count: usize = count.parse().map_err(|e| format!("`{count}`: {e}"))?;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || count < 2 {
        return Err(format!("`{s}`: need 0 < lo < hi and count >= 2"));
    }
    Ok(Points(logspace(lo, hi, count)))
}
