// SPDX-License-Identifier: Apache-2.0
//! Layer assignment: per-net tree DP, batching, and verification helpers.

mod batch;
mod cost;
mod dp;
mod oracle;
mod solution;

pub use batch::{assign_batch, BatchOutcome};
pub use cost::{CostCtx, CostWeights};
pub use dp::{assign_net, solve, trace_back, DpStats, DpTables};
pub use oracle::{
    config_cost, gap_bound, minimal_spans, oracle, solution_cost, OracleResult, ORACLE_MAX_LAYERS,
    ORACLE_MAX_NODES,
};
pub use solution::{
    commit, demand_from_solutions, load_solutions, parse_solutions, write_solutions, NetSolution,
    Via, Wire,
};
