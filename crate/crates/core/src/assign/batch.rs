// SPDX-License-Identifier: Apache-2.0
//! One batch of nets against a frozen demand snapshot.

use rayon::prelude::*;

use super::cost::CostCtx;
use super::dp::{assign_net, DpStats};
use super::solution::NetSolution;
use crate::design::NetId;
use crate::tree::LaTree;

#[derive(Debug, Clone)]
pub struct BatchOutcome {
    /// In the order of the batch's net list.
    pub solutions: Vec<NetSolution>,
    pub nodes: usize,
    /// DP tables of all nets in the batch together.
    pub state_bytes: usize,
    pub max_scratch_bytes: usize,
}

/// Assigns every net of the batch in parallel. `trees` is indexed by net id.
/// Results do not depend on thread count or scheduling.
pub fn assign_batch(trees: &[LaTree], nets: &[NetId], ctx: &CostCtx) -> BatchOutcome {
    let results: Vec<(NetSolution, DpStats)> = nets
        .par_iter()
        .map(|&n| assign_net(&trees[n], ctx))
        .collect();
    let mut out = BatchOutcome {
        solutions: Vec::with_capacity(results.len()),
        nodes: 0,
        state_bytes: 0,
        max_scratch_bytes: 0,
    };
    for (sol, st) in results {
        out.nodes += st.nodes;
        out.state_bytes += st.state_bytes;
        out.max_scratch_bytes = out.max_scratch_bytes.max(st.scratch_bytes);
        out.solutions.push(sol);
    }
    out
}
