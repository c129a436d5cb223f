//! Argument parsing and the process entry point.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::{CliError, Result};
use crate::spec::*;
use crate::table::{render_csv, render_json, Table};

/// Environment variable naming the directory for output files when
/// `--output` is not given.
pub const OUTPUT_DIR_ENV: &str = "OUKOPT_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "oukopt", version, about = "Optimal sampling designs for OU-driven linear trends")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Output file; defaults to a file in $OUKOPT_OUTPUT_DIR, else stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, env = OUTPUT_DIR_ENV, hide_env_values = true)]
    output_dir: Option<PathBuf>,

    /// Print errors as a JSON object on stderr.
    #[arg(long, global = true)]
    error_json: bool,

    #[command(flatten)]
    tolerances: ToleranceArgs,
}

#[derive(Debug, Args)]
struct ToleranceArgs {
    /// Refinement tolerance for searches and roots.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Coarse scan size for line searches.
    #[arg(long, global = true)]
    line_resolution: Option<usize>,
    /// Coarse scan size per axis for grid searches.
    #[arg(long, global = true)]
    grid_resolution: Option<usize>,
    /// Convergence threshold for extrapolated K limits.
    #[arg(long, global = true)]
    limit_tol: Option<f64>,
}

impl ToleranceArgs {
    fn resolve(&self) -> Tolerances {
        let d = Tolerances::default();
        Tolerances {
            refine: self.tol.unwrap_or(d.refine),
            line_resolution: self.line_resolution.unwrap_or(d.line_resolution),
            grid_resolution: self.grid_resolution.unwrap_or(d.grid_resolution),
            limit: self.limit_tol.unwrap_or(d.limit),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Information matrix of one design.
    Fim {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        gamma: Option<f64>,
        /// Line design, e.g. `0,0.5,1`.
        #[arg(long, value_parser = parse_points, conflicts_with = "grid")]
        design: Option<Points>,
        /// Grid design, e.g. `0,0.5,1x0,1`.
        #[arg(long, value_parser = parse_grid)]
        grid: Option<(Points, Points)>,
    },
    /// Optimal designs within a family.
    Optimize {
        #[arg(value_enum)]
        family: Family,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, value_enum, default_value_t = CriterionArg::K)]
        criterion: CriterionArg,
        /// Number of points (equidistant family).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Doubling ratios, their limits and related sweeps.
    Asymptotics {
        #[command(subcommand)]
        command: AsymptoticsCommand,
    },
    /// Monte Carlo efficiency of K- against D-designs.
    Simulate {
        #[command(subcommand)]
        command: SimulateCommand,
    },
}

#[derive(Debug, Subcommand)]
enum AsymptoticsCommand {
    /// Closed-form limits of the domain doubling ratios.
    Limits {
        #[arg(long)]
        beta: Vec<f64>,
        /// Log-spaced sweep `lo,hi,count`.
        #[arg(long, value_parser = parse_range)]
        range: Option<Points>,
    },
    /// Location and value of the maximum of the K limit.
    KMaximum,
    /// Ratio of criteria after one doubling.
    Double {
        #[arg(long, value_enum)]
        mode: DoubleMode,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Extrapolated K doubling limit over a rate grid.
    Surface {
        #[arg(long, value_enum, default_value_t = SurfaceMode::Both)]
        mode: SurfaceMode,
        /// Log-spaced axis `lo,hi,count`, used for both rates.
        #[arg(long, value_parser = parse_range, default_value = "0.05,50,40")]
        axis: Points,
        #[arg(long, value_delimiter = ',', default_value = "25,50,100,200,400")]
        n_sequence: Vec<usize>,
    },
    /// K-optimal coordinates against the rate(s).
    Curves {
        #[arg(long, value_enum)]
        family: Family,
        /// Log-spaced rates `lo,hi,count`; grid families use it on both axes.
        #[arg(long, value_parser = parse_range, default_value = "0.01,100,81")]
        range: Points,
    },
}

#[derive(Debug, Args)]
struct McArgs {
    #[arg(long, default_value_t = 10_000)]
    reps: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 0.25)]
    sigma: f64,
    #[arg(long, value_enum, default_value_t = DReferenceArg::Equidistant)]
    d_reference: DReferenceArg,
    /// Policy for collapsed K-designs in `eff` (table cells always merge).
    #[arg(long, value_enum, default_value_t = CollapseArg::Error)]
    on_collapse: CollapseArg,
}

impl McArgs {
    fn resolve(&self) -> McSpec {
        McSpec {
            replicates: self.reps,
            seed: self.seed,
            sigma: self.sigma,
            d_reference: self.d_reference,
            on_collapse: self.on_collapse,
        }
    }
}

#[derive(Debug, Subcommand)]
enum SimulateCommand {
    /// Both 5x5 blocks of the grid efficiency table.
    Table1 {
        #[command(flatten)]
        mc: McArgs,
    },
    /// Line efficiency against β on a non-collapsing interval.
    Curve {
        #[arg(long, value_enum)]
        interval: Interval,
        #[arg(long, default_value_t = 30)]
        count: usize,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Efficiency at one parameter point (sheet when --gamma is given).
    Eff {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        gamma: Option<f64>,
        #[command(flatten)]
        mc: McArgs,
    },
}

impl Cli {
    /// Resolves defaults and the output location into a [`RunSpec`].
    pub fn into_spec(self) -> Result<RunSpec> {
        let task = match self.command {
            Command::Fim {
                model,
                beta,
                gamma,
                design,
                grid,
            } => {
                let design = match (design, grid) {
                    (Some(p), None) => DesignSpec::Line(p.0),
                    (None, Some((s, t))) => DesignSpec::Grid { s: s.0, t: t.0 },
                    _ => return Err(CliError::Validation("give exactly one of --design and --grid".into())),
                };
                Task::Fim {
                    model,
                    beta,
                    gamma,
                    design,
                }
            }
            Command::Optimize {
                family,
                beta,
                gamma,
                criterion,
                n,
            } => Task::Optimize {
                family,
                criterion,
                beta,
                gamma,
                n,
            },
            Command::Asymptotics { command } => match command {
                AsymptoticsCommand::Limits { mut beta, range } => {
                    beta.extend(range.map(|r| r.0).unwrap_or_default());
                    Task::Limits { betas: beta }
                }
                AsymptoticsCommand::KMaximum => Task::KMaximum,
                AsymptoticsCommand::Double {
                    mode,
                    beta,
                    gamma,
                    n,
                    m,
                } => Task::Double {
                    mode,
                    beta,
                    gamma,
                    n,
                    m,
                },
                AsymptoticsCommand::Surface { mode, axis, n_sequence } => Task::Surface {
                    mode,
                    betas: axis.0.clone(),
                    gammas: axis.0,
                    n_sequence,
                },
                AsymptoticsCommand::Curves { family, range } => Task::Curves { family, betas: range.0 },
            },
            Command::Simulate { command } => match command {
                SimulateCommand::Table1 { mc } => Task::Table1 { mc: mc.resolve() },
                SimulateCommand::Curve { interval, count, mc } => Task::Curve {
                    interval,
                    count,
                    mc: mc.resolve(),
                },
                SimulateCommand::Eff { beta, gamma, mc } => Task::Eff {
                    beta,
                    gamma,
                    mc: mc.resolve(),
                },
            },
        };
        let mut spec = RunSpec {
            task,
            format: self.format,
            tolerances: self.tolerances.resolve(),
            output: None,
        };
        spec.output = self
            .output
            .or_else(|| self.output_dir.map(|dir| dir.join(format!("{}.{}", spec.default_file_stem(), spec.format.extension()))));
        Ok(spec)
    }
}

/// Renders the table and writes it to the spec's output, or stdout.
pub fn write_output(spec: &RunSpec, table: &Table) -> Result<()> {
    let bytes = match spec.format {
        Format::Csv => render_csv(spec, table)?,
        Format::Json => render_json(spec, table)?,
    };
    match &spec.output {
        Some(path) => {
            let io = |source| CliError::Io {
                path: path.clone(),
                source,
            };
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(io)?;
            }
            std::fs::write(path, bytes).map_err(io)
        }
        None => std::io::stdout().write_all(&bytes).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

/// Parses, validates, runs and writes; returns the process exit code.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap reports help and version through the error path too
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let error_json = cli.error_json;
    let result = cli.into_spec().and_then(|spec| {
        let table = crate::run::execute(&spec)?;
        write_output(&spec, &table)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if error_json {
                eprintln!("{}", e.to_json());
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
