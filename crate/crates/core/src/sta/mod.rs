// SPDX-License-Identifier: Apache-2.0
//! Static timing analysis on 2D or 3D parasitics.

mod critical;
mod graph;
mod nldm;
mod rc;

use rayon::prelude::*;

pub use critical::{critical_paths, criticality_counts, trace_path, worst_paths, TimingPath};
pub use graph::{propagate, ArcKind, Timing, TimingArc, TimingGraph};
pub use rc::{extract_rc_2d, extract_rc_3d, RcNode, RcTree};

use crate::assign::NetSolution;
use crate::design::{Design, NetId};
use crate::Result;

/// RC trees of every net from its 2D route.
pub fn rc_trees_2d(design: &Design) -> Result<Vec<RcTree>> {
    (0..design.num_nets())
        .into_par_iter()
        .map(|n| {
            extract_rc_2d(
                design.route(n),
                &design.netlist.nets[n],
                &design.netlist,
                &design.tech,
            )
        })
        .collect()
}

/// RC trees of every net from a layer assignment, indexed by net id.
pub fn rc_trees_3d(design: &Design, solutions: &[NetSolution]) -> Result<Vec<RcTree>> {
    solutions
        .par_iter()
        .enumerate()
        .map(|(n, s)| {
            debug_assert_eq!(s.net, n as NetId);
            extract_rc_3d(s, &design.netlist.nets[n], &design.netlist, &design.tech)
        })
        .collect()
}
