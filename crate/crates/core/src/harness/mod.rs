//! Configuration, study drivers and CSV output.

mod config;
mod experiments;

pub use config::{ExperimentConfig, ExperimentKind, GeometrySpec};
pub use experiments::{
    embedded_discretization, fmt_float, run, run_condition, run_convergence, run_sliver,
    shrunk_discretization, sliver_discretization, solve_case, thread_cap, CaseResult, ConditionRow,
    ConditionTable, ConvergenceTable, SliverRow, SliverTable, StudyOutput, CONDITION_HEADER,
    CONVERGENCE_HEADER, SLIVER_HEADER, THREADS_ENV,
};
