//! Integer linear models of the balancing problem, LP files, and solvers.

mod build;
mod extract;
mod lp;
mod model;
mod solver;
mod structure;

pub use build::{build_mcim, build_msy, solution_values};
pub(crate) use build::{build_reassignment, build_relocation, neighbourhood};
pub use extract::{extract_solution, ExtractError};
pub use lp::{export_lp, import_lp, sanitize_name, LpError};
pub use model::{Constraint, MilpModel, ModelError, Objective, ObjectiveSense, Sense, Symbol, VarId, VarKind, Variable};
pub use solver::{
    parse_solution_file, solve, write_solution_file, Backend, EmbeddedBackend, ExternalBackend, SolveError,
    SolveResult, SolveStatus, SOLVER_ENV, TOLERANCE,
};
pub use structure::{LineObjective, LineStructure};
