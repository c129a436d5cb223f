//! Executes a validated [`RunSpec`] and returns its result table.
//!
//! Sweeps run on the rayon pool; rows are collected in input order so the
//! output never depends on scheduling.

use oukopt_core::asymptotics::{
    doubling_ratio_1d, doubling_ratio_2d, k_limit_estimate, limit_d, limit_d_tilde, limit_k, limit_k_maximum,
    GridDoubling, KLimitMode, LineDoubling,
};
use oukopt_core::fim::{fim_1d, fim_2d, fim_entries_1d, fim_entries_2d};
use oukopt_core::mc::{curve_betas, efficiency_curve_row, run_efficiency_1d, run_efficiency_2d, table1_cell, CurveInterval, EffReport, TABLE1_LARGE, TABLE1_SMALL};
use oukopt_core::objectives::{k_objective_1d, k_objective_2d, r_objective_1d};
use oukopt_core::search::{
    equidistant_k_optimal_1d, four_point_grid_k_optimal, nine_point_restricted_2d, three_point_restricted_1d,
    two_point_k_optimal, Criterion, SearchResult,
};
use oukopt_core::{Design1D, Error, GridDesign2D, OuParams};
use rayon::prelude::*;

use crate::error::Result;
use crate::spec::{
    sheet, CriterionArg, DesignSpec, DoubleMode, Family, Interval, McSpec, Model, RunSpec, SurfaceMode, Task,
    Tolerances,
};
use crate::table::{Cell, Table};

pub fn execute(spec: &RunSpec) -> Result<Table> {
    spec.validate()?;
    let tol = &spec.tolerances;
    match &spec.task {
        Task::Fim {
            model,
            beta,
            gamma,
            design,
        } => fim_table(*model, *beta, *gamma, design),
        Task::Optimize {
            family,
            criterion,
            beta,
            gamma,
            n,
        } => {
            let mut table = Table::new(&OPTIMIZE_COLUMNS);
            for row in optimize(*family, *criterion, *beta, *gamma, *n, tol)? {
                table.push(row.cells(*family, *criterion));
            }
            Ok(table)
        }
        Task::Limits { betas } => {
            let mut table = Table::new(&["beta", "limit_d", "limit_k", "limit_d_tilde"]);
            for &b in betas {
                table.push(vec![b.into(), limit_d(b)?.into(), limit_k(b)?.into(), limit_d_tilde(b)?.into()]);
            }
            Ok(table)
        }
        Task::KMaximum => {
            let (at, value) = limit_k_maximum(tol.refine)?;
            let mut table = Table::new(&["beta", "limit_k"]);
            table.push(vec![at.into(), value.into()]);
            Ok(table)
        }
        Task::Double {
            mode,
            beta,
            gamma,
            n,
            m,
        } => double_table(*mode, *beta, *gamma, *n, *m),
        Task::Surface {
            mode,
            betas,
            gammas,
            n_sequence,
        } => surface_table(*mode, betas, gammas, n_sequence, tol.limit),
        Task::Curves { family, betas } => curves_table(*family, betas, tol),
        Task::Table1 { mc } => table1_table(mc),
        Task::Curve { interval, count, mc } => curve_table(*interval, *count, mc),
        Task::Eff { beta, gamma, mc } => eff_table(*beta, *gamma, mc),
    }
}

fn fim_table(model: Model, beta: f64, gamma: Option<f64>, design: &DesignSpec) -> Result<Table> {
    let mut table = Table::new(&["quantity", "value"]);
    let mut put = |name: &str, v: f64| table.push(vec![name.into(), v.into()]);
    match (model, design) {
        (Model::Process, DesignSpec::Line(pts)) => {
            let params = OuParams::with_beta(beta)?;
            let design = Design1D::new(pts.clone())?;
            let e = fim_entries_1d(&params, &design)?;
            put("L1", e.l1);
            put("L2", e.l2);
            put("L3", e.l3);
            let f = fim_1d(&params, &design)?.matrix();
            for (i, row) in f.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    put(&format!("F{i}{j}"), *v);
                }
            }
            put("det", e.det());
            put("K", k_objective_1d(&e)?);
            put("R", r_objective_1d(&e)?);
        }
        (Model::Sheet, DesignSpec::Grid { s, t }) => {
            let params = sheet(beta, gamma)?;
            let grid = GridDesign2D::new(Design1D::new(s.clone())?, Design1D::new(t.clone())?);
            let e = fim_entries_2d(&params, &grid)?;
            put("L1", e.s_axis.l1);
            put("L2", e.s_axis.l2);
            put("L3", e.s_axis.l3);
            put("M1", e.t_axis.l1);
            put("M2", e.t_axis.l2);
            put("M3", e.t_axis.l3);
            let f = fim_2d(&params, &grid)?;
            for (i, row) in f.matrix().iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    put(&format!("F{i}{j}"), *v);
                }
            }
            put("det", f.det());
            put("K", k_objective_2d(&f)?);
        }
        // ruled out by validation
        _ => unreachable!("model and design kinds disagree"),
    }
    Ok(table)
}

const OPTIMIZE_COLUMNS: [&str; 12] = [
    "family",
    "criterion",
    "beta",
    "gamma",
    "n",
    "d_opt",
    "delta_opt",
    "value",
    "status",
    "collapsed_d",
    "collapsed_delta",
    "converged",
];

/// One optimum (or, for equidistant designs, one local minimum).
#[derive(Debug, Clone, PartialEq)]
pub struct OptimumRow {
    pub beta: f64,
    pub gamma: Option<f64>,
    pub n: Option<usize>,
    pub argopt: Vec<f64>,
    pub value: f64,
    pub collapsed: Vec<bool>,
    pub converged: bool,
    /// Equidistant searches list every local minimum; only one is best.
    pub best: bool,
}

impl OptimumRow {
    fn from_result<const N: usize>(beta: f64, gamma: Option<f64>, r: SearchResult<N>) -> Self {
        Self {
            beta,
            gamma,
            n: None,
            argopt: r.argopt.to_vec(),
            value: r.value,
            collapsed: r.collapsed.to_vec(),
            converged: r.converged,
            best: true,
        }
    }

    pub fn status(&self) -> &'static str {
        if !self.best {
            "local"
        } else if self.collapsed.iter().any(|&c| c) {
            "collapsed"
        } else {
            "optimal"
        }
    }

    fn cells(&self, family: Family, criterion: CriterionArg) -> Vec<Cell> {
        vec![
            family.name().into(),
            criterion_name(criterion).into(),
            self.beta.into(),
            self.gamma.into(),
            self.n.into(),
            self.argopt[0].into(),
            self.argopt.get(1).copied().into(),
            self.value.into(),
            self.status().into(),
            self.collapsed[0].into(),
            self.collapsed.get(1).copied().into(),
            self.converged.into(),
        ]
    }
}

fn criterion_name(c: CriterionArg) -> &'static str {
    match c {
        CriterionArg::D => "D",
        CriterionArg::K => "K",
    }
}

pub fn optimize(
    family: Family,
    criterion: CriterionArg,
    beta: f64,
    gamma: Option<f64>,
    n: Option<usize>,
    tol: &Tolerances,
) -> Result<Vec<OptimumRow>> {
    let crit = match criterion {
        CriterionArg::D => Criterion::D,
        CriterionArg::K => Criterion::K,
    };
    let row = match family {
        Family::ThreePoint => {
            let r = three_point_restricted_1d(&OuParams::with_beta(beta)?, crit, tol.line_resolution, tol.refine)?;
            OptimumRow::from_result(beta, None, r)
        }
        Family::TwoPoint => OptimumRow::from_result(beta, None, two_point_k_optimal(&OuParams::with_beta(beta)?, tol.refine)?),
        Family::NinePoint => {
            let r = nine_point_restricted_2d(&sheet(beta, gamma)?, crit, tol.grid_resolution, tol.refine)?;
            OptimumRow::from_result(beta, gamma, r)
        }
        Family::FourPoint => OptimumRow::from_result(beta, gamma, four_point_grid_k_optimal(&sheet(beta, gamma)?, tol.refine)?),
        Family::Equidistant => {
            let n = n.unwrap_or(2);
            let r = equidistant_k_optimal_1d(&OuParams::with_beta(beta)?, n, tol.refine)?;
            let mut rows = vec![OptimumRow {
                n: Some(n),
                ..OptimumRow::from_result(beta, None, r.best)
            }];
            for &(step, k) in &r.local_minima {
                if step != r.best.argopt[0] {
                    rows.push(OptimumRow {
                        argopt: vec![step],
                        value: k,
                        best: false,
                        ..rows[0].clone()
                    });
                }
            }
            return Ok(rows);
        }
    };
    Ok(vec![row])
}

fn double_table(mode: DoubleMode, beta: f64, gamma: Option<f64>, n: usize, m: Option<usize>) -> Result<Table> {
    let report = if mode.is_grid() {
        let mode = match mode {
            DoubleMode::InfillBoth => GridDoubling::InfillBoth,
            DoubleMode::InfillOne => GridDoubling::InfillOne,
            DoubleMode::DomainBoth => GridDoubling::DomainBoth,
            _ => GridDoubling::DomainOne,
        };
        doubling_ratio_2d(&sheet(beta, gamma)?, n, m.unwrap_or(n), mode)?
    } else {
        let mode = if mode == DoubleMode::Infill {
            LineDoubling::Infill
        } else {
            LineDoubling::Domain
        };
        doubling_ratio_1d(&OuParams::with_beta(beta)?, n, mode)?
    };
    let mut table = Table::new(&["beta", "gamma", "n", "m", "ratio_d", "ratio_k", "limit_d", "limit_k"]);
    table.push(vec![
        beta.into(),
        gamma.into(),
        report.n.into(),
        report.m.into(),
        report.ratio_d.into(),
        report.ratio_k.into(),
        report.limit_d.into(),
        report.limit_k.into(),
    ]);
    Ok(table)
}

fn surface_table(mode: SurfaceMode, betas: &[f64], gammas: &[f64], n_sequence: &[usize], tol: f64) -> Result<Table> {
    let mode = match mode {
        SurfaceMode::Both => KLimitMode::Both,
        SurfaceMode::One => KLimitMode::One,
    };
    let cells: Vec<(f64, f64)> = betas.iter().flat_map(|&b| gammas.iter().map(move |&g| (b, g))).collect();
    let estimates = cells
        .par_iter()
        .map(|&(b, g)| Ok(k_limit_estimate(&sheet(b, Some(g))?, n_sequence, mode, tol)?))
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&["beta", "gamma", "estimate", "error", "converged"]);
    for e in estimates {
        table.push(vec![e.beta.into(), e.gamma.into(), e.estimate.into(), e.error.into(), e.converged.into()]);
    }
    Ok(table)
}

fn curves_table(family: Family, betas: &[f64], tol: &Tolerances) -> Result<Table> {
    let cells: Vec<(f64, Option<f64>)> = if family.is_grid() {
        betas.iter().flat_map(|&b| betas.iter().map(move |&g| (b, Some(g)))).collect()
    } else {
        betas.iter().map(|&b| (b, None)).collect()
    };
    let rows = cells
        .par_iter()
        .map(|&(b, g)| optimize(family, CriterionArg::K, b, g, None, tol))
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&OPTIMIZE_COLUMNS);
    for row in rows.into_iter().flatten() {
        table.push(row.cells(family, CriterionArg::K));
    }
    Ok(table)
}

fn report_cells(report: Option<&EffReport>) -> Vec<Cell> {
    let num = |f: fn(&EffReport) -> f64| Cell::from(report.map(f));
    let coord = |i: usize| Cell::from(report.and_then(|r| r.k_design.get(i).copied()));
    vec![
        num(|r| r.eff_percent),
        num(|r| r.mc_standard_error),
        num(|r| r.mse_k),
        num(|r| r.mse_d),
        coord(0),
        coord(1),
        Cell::from(report.and_then(|r| r.d_design.first().copied())),
        Cell::from(report.and_then(|r| r.d_design.get(1).copied())),
        match report {
            None => "collapsed".into(),
            Some(r) if r.collapsed => "collapsed-merged".into(),
            Some(_) => "ok".into(),
        },
    ]
}

const EFF_COLUMNS: [&str; 9] = ["eff", "se", "mse_k", "mse_d", "k_d", "k_delta", "d_d", "d_delta", "status"];

fn with_eff_columns(lead: &[&'static str]) -> Table {
    let mut cols = lead.to_vec();
    cols.extend_from_slice(&EFF_COLUMNS);
    Table::new(&cols)
}

fn table1_table(mc: &McSpec) -> Result<Table> {
    let config = mc.config();
    let cells: Vec<(&str, f64, f64)> = [("small", TABLE1_SMALL), ("large", TABLE1_LARGE)]
        .into_iter()
        .flat_map(|(name, block)| block.into_iter().flat_map(move |b| block.into_iter().map(move |g| (name, b, g))))
        .collect();
    let results = cells
        .par_iter()
        .map(|&(_, b, g)| Ok(table1_cell(b, g, &config)?))
        .collect::<Result<Vec<_>>>()?;
    let mut table = with_eff_columns(&["block", "beta", "gamma"]);
    for (&(name, b, g), cell) in cells.iter().zip(&results) {
        let mut row = vec![name.into(), b.into(), g.into()];
        row.extend(report_cells(Some(&cell.report)));
        table.push(row);
    }
    Ok(table)
}

fn curve_table(interval: Interval, count: usize, mc: &McSpec) -> Result<Table> {
    let interval = match interval {
        Interval::Lower => CurveInterval::Lower,
        Interval::Upper => CurveInterval::Upper,
    };
    let config = mc.config();
    let rows = curve_betas(interval, count)?
        .par_iter()
        .map(|&b| Ok(efficiency_curve_row(b, &config)?))
        .collect::<Result<Vec<_>>>()?;
    let mut table = with_eff_columns(&["beta"]);
    for r in rows {
        let mut row = vec![r.beta.into()];
        row.extend(report_cells(r.report.as_ref()));
        table.push(row);
    }
    Ok(table)
}

fn eff_table(beta: f64, gamma: Option<f64>, mc: &McSpec) -> Result<Table> {
    let config = mc.config();
    let report = match gamma {
        Some(_) => run_efficiency_2d(&sheet(beta, gamma)?, &config),
        None => run_efficiency_1d(&OuParams::with_beta(beta)?, &config),
    };
    // a collapsed K-design is a result, not a failure
    let report = match report {
        Ok(r) => Some(r),
        Err(Error::CollapsedDesign) => None,
        Err(e) => return Err(e.into()),
    };
    let mut table = with_eff_columns(&["beta", "gamma"]);
    let mut row = vec![beta.into(), gamma.into()];
    row.extend(report_cells(report.as_ref()));
    table.push(row);
    Ok(table)
}
