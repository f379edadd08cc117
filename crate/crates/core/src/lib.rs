//! Balanced periodic assignment of weekly tasks to interchangeable workers.
//!
//! A task repeats every week; a plan says which worker performs each
//! occurrence. A plan is feasible when no worker holds two overlapping
//! occurrences (and, when the instance lists allowed weekly schedules, every
//! worker's week is one of them), and balanced when in the long run every
//! worker performs every task equally often.
//!
//! ```
//! use roster_core::{solve, is_balanced, Instance};
//!
//! let inst = Instance::from_intervals(10, 2, &[(-3, 4), (5, 9)]);
//! let plan = solve(&inst).unwrap().expect("balanced plan exists");
//! assert_eq!(plan.period(), 2);
//! assert!(is_balanced(&inst, &plan));
//! ```

pub mod assignment;
pub mod augment;
pub mod coloring;
pub mod cover;
pub mod digraph;
pub mod error;
pub mod extended;
pub mod merge;
pub mod model;
pub mod oracle;
pub mod pebble;
pub mod pipeline;
pub mod render;

pub use assignment::{
    balance_profile, decomposition_from_week, induced_schedule, is_balanced, is_feasible, BalanceProfile, Conflict,
    PeriodicAssignment, PlanRow, WeekDecomposition,
};
pub use augment::{augment, AugmentedInstance};
pub use coloring::{build_interval_graph, color_first_week, decide_feasible, FirstWeekColoring, Slot, SlotKind};
pub use digraph::{LabelPermutation, LabeledDigraph, WeekLabel};
pub use error::{Result, RosterError};
pub use extended::{build_periodic_plan_extended, decide_balanced_extended, ExtendedDecision};
pub use merge::{closed_formula_plan, decide_balanced_basic, min_workers, BasicDecision};
pub use model::{Instance, Schedule, Task, TaskId, TimeGrid, WorkerId};
pub use pebble::ColoredGraph;
pub use pipeline::{decide, feasible, feasible_plan, solve, Decision};
