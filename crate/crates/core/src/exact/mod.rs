//! Graph edit distance under unit costs: an exhaustive oracle, exact A*
//! search and the A*-Beamsearch upper bound.

mod bruteforce;
mod edit;
mod search;

pub use bruteforce::{ged_bruteforce, BRUTEFORCE_MAX_TOTAL_NODES};
pub use edit::{apply_edit_path, edit_path, mapping_cost, Bound, EditOp, GedResult, NodeMap};
pub use search::{ged_astar, ged_astar_with, ged_beam, AStarOptions, UNBOUNDED_WIDTH};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GedError {
    #[error("graphs too large for this solver: {n1} + {n2} nodes exceeds limit {limit}")]
    SizeGuard { n1: usize, n2: usize, limit: usize },
    #[error("search budget exhausted after {expanded} expansions")]
    BudgetExhausted { expanded: u64 },
}
