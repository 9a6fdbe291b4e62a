//! Assembly line balancing with hierarchical worker assignment.
//!
//! Tasks are assigned to stations along a line, each station staffed by one
//! worker. Worker types are ranked: type 1 can execute every task and is
//! the most expensive, higher types are cheaper, slower and restricted to
//! tasks whose qualification level allows them. The goal is a line that
//! respects precedences and the cycle time at minimum total worker cost.
//!
//! The crate provides:
//!
//! * [`instance`] and [`solution`]: data model, file formats, feasibility;
//! * [`preprocess`]: station-gap bounds, station windows, per-type caps,
//!   lifted times;
//! * [`milp`]: two exact formulations, LP export, an embedded branch and
//!   bound and an external-solver adapter;
//! * [`heuristics`]: a station-oriented constructive heuristic with a
//!   portfolio of priority rules;
//! * [`vnd`]: variable neighbourhood descent over two MILP neighbourhoods;
//! * [`generator`]: instance generation from SALBP-1 data;
//! * [`report`]: run records, CSV output and batch benchmarking;
//! * [`cli`]: the `albhw` command line.

pub mod cli;
pub mod closures;
pub mod generator;
pub mod heuristics;
pub mod instance;
pub mod milp;
pub mod preprocess;
pub mod report;
pub mod solution;
pub mod vnd;

pub use closures::{compute_closures, Closures};
pub use instance::{Cost, Instance, InstanceError, Time};
pub use solution::{check_feasibility, evaluate, Solution, Station, Violation};
