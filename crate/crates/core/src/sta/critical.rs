// SPDX-License-Identifier: Apache-2.0
//! Critical path extraction by backtracking from endpoints.

use super::graph::{ArcKind, Timing, TimingGraph};
use crate::design::{NetId, Netlist, PinId};

#[derive(Debug, Clone, PartialEq)]
pub struct TimingPath {
    pub endpoint: PinId,
    pub slack: f64,
    /// Source first.
    pub pins: Vec<PinId>,
    pub arcs: Vec<usize>,
    /// Nets crossed, in path order.
    pub nets: Vec<NetId>,
}

/// Follows the latest-arriving fanin from `endpoint` back to a source. Ties
/// go to the lowest pin id so results do not depend on arc order.
pub fn trace_path(
    graph: &TimingGraph,
    timing: &Timing,
    netlist: &Netlist,
    endpoint: PinId,
) -> TimingPath {
    let is_pi = {
        let mut v = vec![false; graph.num_pins()];
        for i in &netlist.inputs {
            v[i.pin] = true;
        }
        v
    };
    let mut pins = vec![endpoint];
    let mut arcs = Vec::new();
    let mut v = endpoint;
    while !is_pi[v] {
        let best = graph.fanin[v].iter().copied().max_by(|&a, &b| {
            let (ea, eb) = (&graph.arcs[a], &graph.arcs[b]);
            let ta = timing.arrival[ea.from] + timing.arc_delay[a];
            let tb = timing.arrival[eb.from] + timing.arc_delay[b];
            ta.total_cmp(&tb).then(eb.from.cmp(&ea.from))
        });
        let Some(a) = best else { break };
        arcs.push(a);
        v = graph.arcs[a].from;
        pins.push(v);
    }
    pins.reverse();
    arcs.reverse();
    let nets = arcs
        .iter()
        .filter_map(|&a| match graph.arcs[a].kind {
            ArcKind::Net(n) => Some(n),
            ArcKind::Cell(_) => None,
        })
        .collect();
    TimingPath {
        endpoint,
        slack: timing.slack[endpoint],
        pins,
        arcs,
        nets,
    }
}

/// Paths to every endpoint with slack below `alpha * WNS`. Empty when the
/// design meets timing.
pub fn critical_paths(
    graph: &TimingGraph,
    timing: &Timing,
    netlist: &Netlist,
    alpha: f64,
) -> Vec<TimingPath> {
    if timing.wns >= 0.0 {
        return Vec::new();
    }
    let threshold = alpha * timing.wns;
    let mut seen = vec![false; graph.num_pins()];
    timing
        .endpoints
        .iter()
        .filter(|&&p| timing.slack[p] < threshold && !std::mem::replace(&mut seen[p], true))
        .map(|&p| trace_path(graph, timing, netlist, p))
        .collect()
}

/// The `k` worst endpoints by slack, each with its path.
pub fn worst_paths(
    graph: &TimingGraph,
    timing: &Timing,
    netlist: &Netlist,
    k: usize,
) -> Vec<TimingPath> {
    let mut eps: Vec<PinId> = timing.endpoints.clone();
    eps.sort_unstable();
    eps.dedup();
    eps.retain(|&p| timing.slack[p].is_finite());
    eps.sort_by(|&a, &b| timing.slack[a].total_cmp(&timing.slack[b]).then(a.cmp(&b)));
    eps.truncate(k);
    eps.into_iter()
        .map(|p| trace_path(graph, timing, netlist, p))
        .collect()
}

/// Number of critical paths crossing each net.
pub fn criticality_counts(paths: &[TimingPath], num_nets: usize) -> Vec<usize> {
    let mut counts = vec![0; num_nets];
    for p in paths {
        for &n in &p.nets {
            counts[n] += 1;
        }
    }
    counts
}
