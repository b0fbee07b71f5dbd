//! Linear assignment and transportation machinery: Hungarian and
//! Jonker-Volgenant solvers, the bipartite GED cost matrix and its upper
//! bound, the Hausdorff lower bound, the EMD transportation problem and
//! the optimal-assignment kernel.

mod bipartite;
mod cost;
mod hed;
mod hungarian;
mod jv;
mod kernel;
mod transport;

pub use bipartite::{build_ged_cost_matrix, ged_bipartite, CostModel, LapSolver};
pub use cost::{Assignment, CostMatrix};
pub use hed::{ged_hed, hed_cost};
pub use hungarian::solve_lap_hungarian;
pub use jv::solve_lap_jv;
pub use kernel::assignment_kernel;
pub use transport::{solve_transportation, FlowMatrix, COST_RESOLUTION};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssignmentError {
    #[error("cost matrix is not square: {entries} entries for size {n}")]
    NotSquare { n: usize, entries: usize },
    #[error("cost matrix entry ({row}, {col}) is negative or not finite")]
    BadEntry { row: usize, col: usize },
    #[error("embedding dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("point sets must be non-empty")]
    Empty,
}
