//! The convergence, sliver and conditioning studies.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::assembly::{assemble_system, LinearSystem, Params};
use crate::error::{invalid, Error, Result};
use crate::geometry::LevelSetDomain;
use crate::manufactured::ManufacturedSolution;
use crate::mesh::{build_structured_mesh, dilated_bbox, Rect};
use crate::postprocess::{compute_errors, eoc, ErrorReport};
use crate::solver::{condition_number, solve_direct};
use crate::spaces::{Discretization, FieldCoefficients};

use super::config::{ExperimentConfig, ExperimentKind, GeometrySpec};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "CUTSTOKES_THREADS";

pub const CONVERGENCE_HEADER: &str =
    "level,h,ndof,err_L2_u,err_H1_u,err_L2_p,err_L2_sigma,triple_norm";
pub const SLIVER_HEADER: &str =
    "epsilon,gamma_sigma,level,h,ndof,err_L2_u,err_H1_u,err_L2_p,err_L2_sigma,triple_norm";
pub const CONDITION_HEADER: &str = "epsilon,gamma_sigma,ndof,kappa2";

/// Formats a float with 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn level_set(spec: GeometrySpec) -> Result<LevelSetDomain<f64>> {
    match spec {
        GeometrySpec::Circle { center, radius } => LevelSetDomain::circle(center, radius),
        GeometrySpec::Box { min, max } => LevelSetDomain::axis_box(min, max),
    }
}

/// Domain of `config` on an `n` by `n` mesh of its background box.
pub fn embedded_discretization(config: &ExperimentConfig, n: usize) -> Result<Discretization<f64>> {
    let mesh = build_structured_mesh(n, n, config.mesh_box)?;
    Discretization::new(mesh, &level_set(config.geometry)?)
}

/// Box `domain` on an `n` by `n` mesh dilated so that the boundary cuts the
/// outer cell layer at relative height `epsilon`.
pub fn sliver_discretization(
    domain: Rect<f64>,
    epsilon: f64,
    n: usize,
) -> Result<Discretization<f64>> {
    let bbox = dilated_bbox(epsilon, n, domain)?;
    let mesh = build_structured_mesh(n, n, bbox)?;
    Discretization::new(mesh, &LevelSetDomain::axis_box(domain.min, domain.max)?)
}

/// Fixed `n` by `n` mesh of `background` with the domain shrunk by
/// `(1 - epsilon)` cell widths on every side.
pub fn shrunk_discretization(
    background: Rect<f64>,
    epsilon: f64,
    n: usize,
) -> Result<Discretization<f64>> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return invalid(format!("epsilon must lie in (0, 1], got {epsilon}"));
    }
    let mesh = build_structured_mesh(n, n, background)?;
    let dx = mesh.dx;
    let dy = mesh.dy;
    let shift = [(1.0 - epsilon) * dx, (1.0 - epsilon) * dy];
    let domain = LevelSetDomain::axis_box(
        [background.min[0] + shift[0], background.min[1] + shift[1]],
        [background.max[0] - shift[0], background.max[1] - shift[1]],
    )?;
    Discretization::new(mesh, &domain)
}

/// Assembled system, solution and errors of one manufactured-solution run.
pub struct CaseResult {
    pub disc: Discretization<f64>,
    pub system: LinearSystem<f64>,
    pub solution: FieldCoefficients<f64>,
    pub errors: ErrorReport<f64>,
}

/// Assembles and solves the manufactured problem and measures the errors.
pub fn solve_case(disc: Discretization<f64>, params: &Params<f64>) -> Result<CaseResult> {
    let exact = ManufacturedSolution::new(params.eta);
    let (system, report) = assemble_system(
        &disc,
        params,
        |x| exact.body_force(x),
        |x| exact.boundary_data(x),
    )?;
    if !report.compatible {
        log::warn!(
            "boundary flux {:e} on a boundary of length {}",
            report.flux,
            report.boundary_length
        );
    }
    let solve = solve_direct(&system)?;
    let solution = FieldCoefficients {
        values: solve.solution,
    };
    let errors = compute_errors(&disc, params, &solution, &exact)?;
    Ok(CaseResult {
        disc,
        system,
        solution,
        errors,
    })
}

fn error_columns(r: &ErrorReport<f64>) -> [f64; 5] {
    [r.l2_u, r.h1_u, r.l2_p, r.l2_sigma, r.triple]
}

/// Worker count from the environment, if set.
pub fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config {
                line: 0,
                message: format!("{THREADS_ENV} must be a positive integer, got {v:?}"),
            }),
        },
    }
}

/// Maps `f` over `items` on at most `threads` workers, keeping input order.
fn par_map<I: Sync, O: Send>(
    items: &[I],
    threads: Option<usize>,
    f: impl Fn(&I) -> Result<O> + Sync + Send,
) -> Result<Vec<O>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Internal(format!("cannot start worker pool: {e}")))?;
    pool.install(|| items.par_iter().map(&f).collect::<Vec<Result<O>>>())
        .into_iter()
        .collect()
}

/// Output of a study: CSV text and the system of the last run in sweep order.
pub struct StudyOutput {
    pub csv: String,
    pub last: Option<(Discretization<f64>, LinearSystem<f64>)>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    pub levels: Vec<usize>,
    pub rows: Vec<ErrorReport<f64>>,
    /// Pairwise slopes between the last two levels, per error column.
    pub eoc_last: [f64; 5],
    /// Least-squares slopes over all levels, per error column.
    pub eoc_fit: [f64; 5],
}

impl ConvergenceTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{CONVERGENCE_HEADER}");
        for (level, r) in self.levels.iter().zip(&self.rows) {
            let cols: Vec<String> = error_columns(r).iter().map(|&v| fmt_float(v)).collect();
            let _ = writeln!(
                out,
                "{level},{},{},{}",
                fmt_float(r.h),
                r.ndof,
                cols.join(",")
            );
        }
        for (name, slopes) in [("eoc_last", &self.eoc_last), ("eoc_fit", &self.eoc_fit)] {
            let cols: Vec<String> = slopes.iter().map(|&v| fmt_float(v)).collect();
            let _ = writeln!(out, "{name},,,{}", cols.join(","));
        }
        out
    }
}

fn slopes(h: &[f64], rows: &[[f64; 5]]) -> Result<([f64; 5], [f64; 5])> {
    let mut last = [0.0; 5];
    let mut fit = [0.0; 5];
    for c in 0..5 {
        let samples: Vec<(f64, f64)> = h.iter().zip(rows).map(|(&h, r)| (h, r[c])).collect();
        let e = eoc(&samples)?;
        last[c] = e.last();
        fit[c] = e.fit;
    }
    Ok((last, fit))
}

pub fn run_convergence(
    config: &ExperimentConfig,
    threads: Option<usize>,
) -> Result<(ConvergenceTable, StudyOutput)> {
    config.validate()?;
    if config.kind != ExperimentKind::Convergence {
        return invalid("not a convergence configuration");
    }
    let mut cases = par_map(&config.levels, threads, |&n| {
        let disc = embedded_discretization(config, n)?;
        let case = solve_case(disc, &config.params)?;
        log::info!(
            "level {n}: ndof {}, errors {:?}",
            case.errors.ndof,
            case.errors
        );
        Ok(case)
    })?;
    let rows: Vec<ErrorReport<f64>> = cases.iter().map(|c| c.errors).collect();
    let h: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let cols: Vec<[f64; 5]> = rows.iter().map(error_columns).collect();
    let (eoc_last, eoc_fit) = slopes(&h, &cols)?;
    let table = ConvergenceTable {
        levels: config.levels.clone(),
        rows,
        eoc_last,
        eoc_fit,
    };
    let last = cases.pop().map(|c| (c.disc, c.system));
    let csv = table.to_csv();
    Ok((table, StudyOutput { csv, last }))
}

#[derive(Debug, Clone)]
pub struct SliverRow {
    pub epsilon: f64,
    pub gamma_sigma: f64,
    pub level: usize,
    pub errors: ErrorReport<f64>,
}

#[derive(Debug, Clone)]
pub struct SliverTable {
    pub rows: Vec<SliverRow>,
}

impl SliverTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{SLIVER_HEADER}");
        for r in &self.rows {
            let cols: Vec<String> = error_columns(&r.errors)
                .iter()
                .map(|&v| fmt_float(v))
                .collect();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                fmt_float(r.epsilon),
                fmt_float(r.gamma_sigma),
                r.level,
                fmt_float(r.errors.h),
                r.errors.ndof,
                cols.join(",")
            );
        }
        out
    }

    /// Rows of one `(epsilon, gamma_sigma)` pair in level order.
    pub fn series(&self, epsilon: f64, gamma_sigma: f64) -> Vec<&SliverRow> {
        self.rows
            .iter()
            .filter(|r| r.epsilon == epsilon && r.gamma_sigma == gamma_sigma)
            .collect()
    }
}

fn box_domain(config: &ExperimentConfig) -> Result<Rect<f64>> {
    match config.geometry {
        GeometrySpec::Box { min, max } => Ok(Rect::new(min, max)),
        GeometrySpec::Circle { .. } => invalid("the sweep studies need a box domain"),
    }
}

pub fn run_sliver(
    config: &ExperimentConfig,
    threads: Option<usize>,
) -> Result<(SliverTable, StudyOutput)> {
    config.validate()?;
    if config.kind != ExperimentKind::Sliver {
        return invalid("not a sliver configuration");
    }
    let domain = box_domain(config)?;
    let mut cells = Vec::new();
    for &epsilon in &config.epsilons {
        for &gamma_sigma in &config.gamma_sigmas {
            for &level in &config.levels {
                cells.push((epsilon, gamma_sigma, level));
            }
        }
    }
    let mut cases = par_map(&cells, threads, |&(epsilon, gamma_sigma, level)| {
        let params = Params {
            gamma_sigma,
            ..config.params
        };
        let disc = sliver_discretization(domain, epsilon, level)?;
        let case = solve_case(disc, &params)?;
        log::info!(
            "sliver eps {epsilon} gamma_sigma {gamma_sigma} level {level}: {:?}",
            case.errors
        );
        Ok(case)
    })?;
    let rows = cells
        .iter()
        .zip(&cases)
        .map(|(&(epsilon, gamma_sigma, level), c)| SliverRow {
            epsilon,
            gamma_sigma,
            level,
            errors: c.errors,
        })
        .collect();
    let table = SliverTable { rows };
    let last = cases.pop().map(|c| (c.disc, c.system));
    let csv = table.to_csv();
    Ok((table, StudyOutput { csv, last }))
}

#[derive(Debug, Clone)]
pub struct ConditionRow {
    pub epsilon: f64,
    pub gamma_sigma: f64,
    pub ndof: usize,
    pub kappa2: f64,
}

#[derive(Debug, Clone)]
pub struct ConditionTable {
    pub rows: Vec<ConditionRow>,
}

impl ConditionTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{CONDITION_HEADER}");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                fmt_float(r.epsilon),
                fmt_float(r.gamma_sigma),
                r.ndof,
                fmt_float(r.kappa2)
            );
        }
        out
    }

    pub fn kappas(&self, gamma_sigma: f64) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.gamma_sigma == gamma_sigma)
            .map(|r| (r.epsilon, r.kappa2))
            .collect()
    }
}

pub fn run_condition(
    config: &ExperimentConfig,
    threads: Option<usize>,
) -> Result<(ConditionTable, StudyOutput)> {
    config.validate()?;
    if config.kind != ExperimentKind::Condition {
        return invalid("not a condition configuration");
    }
    let n = config.levels[0];
    let mut cells = Vec::new();
    for &gamma_sigma in &config.gamma_sigmas {
        for &epsilon in &config.epsilons {
            cells.push((epsilon, gamma_sigma));
        }
    }
    let mut results = par_map(&cells, threads, |&(epsilon, gamma_sigma)| {
        let params = Params {
            gamma_sigma,
            ..config.params
        };
        let disc = shrunk_discretization(config.mesh_box, epsilon, n)?;
        let exact = ManufacturedSolution::new(params.eta);
        let (system, _) = assemble_system(
            &disc,
            &params,
            |x| exact.body_force(x),
            |x| exact.boundary_data(x),
        )?;
        let kappa2 = condition_number(&system)?;
        log::info!("condition eps {epsilon} gamma_sigma {gamma_sigma}: {kappa2:e}");
        Ok((disc, system, kappa2))
    })?;
    let rows = cells
        .iter()
        .zip(&results)
        .map(|(&(epsilon, gamma_sigma), (_, s, k))| ConditionRow {
            epsilon,
            gamma_sigma,
            ndof: s.n,
            kappa2: *k,
        })
        .collect();
    let table = ConditionTable { rows };
    let last = results.pop().map(|(d, s, _)| (d, s));
    let csv = table.to_csv();
    Ok((table, StudyOutput { csv, last }))
}

/// Runs the study named in `config`.
pub fn run(config: &ExperimentConfig, threads: Option<usize>) -> Result<StudyOutput> {
    faer::set_global_parallelism(faer::Par::Seq);
    match config.kind {
        ExperimentKind::Convergence => run_convergence(config, threads).map(|r| r.1),
        ExperimentKind::Sliver => run_sliver(config, threads).map(|r| r.1),
        ExperimentKind::Condition => run_condition(config, threads).map(|r| r.1),
    }
}
