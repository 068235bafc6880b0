// SPDX-License-Identifier: Apache-2.0
//! Solution scoring: overflow, power proxy, timing and the combined score.

mod overflow;
mod score;

use std::collections::HashMap;
use std::fmt::Write as _;

pub use overflow::{edge_overflow, total_overflow, OverflowModel, OverflowReport};
pub use score::{quality_score, ScoreReport, ScoreWeights};

use crate::assign::{demand_from_solutions, NetSolution};
use crate::design::{
    unit_edges, DemandMap, Design, Direction, GridGraph, Netlist, Route2D, UnitEdge,
};
use crate::sta::{propagate, rc_trees_3d, RcTree, Timing, TimingGraph};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerParams {
    pub activity: f64,
    pub vdd: f64,
    /// Clock frequency in 1/ps; `None` means one over the clock period.
    pub f_clk: Option<f64>,
}

impl Default for PowerParams {
    fn default() -> Self {
        PowerParams {
            activity: 0.1,
            vdd: 1.1,
            f_clk: None,
        }
    }
}

/// `activity * C * vdd^2 * f` summed over nets, with `C` the total net capacitance.
pub fn power_proxy(rc: &[RcTree], netlist: &Netlist, p: &PowerParams) -> f64 {
    let f = p
        .f_clk
        .unwrap_or_else(|| netlist.clock_period.map_or(1.0, |t| 1.0 / t));
    let c: f64 = rc.iter().map(RcTree::total_cap).sum();
    p.activity * c * p.vdd * p.vdd * f
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProjectionDiff {
    /// Route edges not covered by exactly one wire.
    pub missing: Vec<UnitEdge>,
    /// Wire edges outside the route, or covered more than once.
    pub extra: Vec<UnitEdge>,
}

impl ProjectionDiff {
    pub fn is_match(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

/// Compares the planar edge multiset of a solution with its 2D route.
pub fn verify_projection(sol: &NetSolution, route: &Route2D) -> ProjectionDiff {
    let mut count: HashMap<UnitEdge, usize> = HashMap::new();
    let mut diff = ProjectionDiff::default();
    for w in &sol.wires {
        match unit_edges((w.x1, w.y1), (w.x2, w.y2)) {
            Some(es) => {
                for e in es {
                    *count.entry(e).or_default() += 1;
                }
            }
            None => diff.extra.push(UnitEdge {
                x: w.x1,
                y: w.y1,
                vertical: false,
            }),
        }
    }
    for &e in route.edges() {
        match count.remove(&e) {
            Some(1) => {}
            Some(_) => diff.extra.push(e),
            None => diff.missing.push(e),
        }
    }
    diff.extra.extend(count.into_keys());
    diff.extra.sort_unstable();
    diff
}

/// Demand minus capacity on one layer as CSV, one row per y.
pub fn heatmap_csv(grid: &GridGraph, demand: &DemandMap, layer: usize) -> Result<String> {
    if layer >= grid.num_layers() {
        return Err(Error::Invalid(format!("layer {layer} out of range")));
    }
    let (cols, rows) = match grid.direction(layer) {
        Direction::Horizontal => (grid.nx.saturating_sub(1), grid.ny),
        Direction::Vertical => (grid.nx, grid.ny.saturating_sub(1)),
    };
    let mut s = String::new();
    for y in 0..rows {
        for x in 0..cols {
            let e = grid.edge_index(x, y, layer).expect("edge in range");
            if x > 0 {
                s.push(',');
            }
            write!(s, "{}", demand.get(e) - grid.capacity(e)).unwrap();
        }
        s.push('\n');
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub overflow: OverflowModel,
    pub power: PowerParams,
    /// Planar demand charged per via stack level.
    pub delta_via: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            overflow: OverflowModel::default(),
            power: PowerParams::default(),
            delta_via: 0.25,
        }
    }
}

pub struct Evaluation {
    pub report: ScoreReport,
    pub timing: Timing,
    pub graph: TimingGraph,
    pub demand: DemandMap,
}

/// Scores a full 3D solution. Fails if any net's projection differs from its route.
pub fn evaluate(
    design: &Design,
    solutions: &[NetSolution],
    weights: Option<&ScoreWeights>,
    opts: &EvalOptions,
) -> Result<Evaluation> {
    if solutions.len() != design.num_nets() {
        return Err(Error::Invalid(format!(
            "solution covers {} nets, design has {}",
            solutions.len(),
            design.num_nets()
        )));
    }
    for (n, sol) in solutions.iter().enumerate() {
        let diff = verify_projection(sol, design.route(n));
        if !diff.is_match() {
            return Err(Error::Invalid(format!(
                "net {}: projection differs from route ({} missing, {} extra edges)",
                design.netlist.nets[n].name,
                diff.missing.len(),
                diff.extra.len()
            )));
        }
    }
    let demand = demand_from_solutions(solutions, &design.grid, opts.delta_via);
    let rc = rc_trees_3d(design, solutions)?;
    let graph = TimingGraph::build(&design.netlist)?;
    let timing = propagate(&graph, &design.netlist, &rc);
    let of = total_overflow(&design.grid, &demand, &design.tech, opts.overflow);
    let power = power_proxy(&rc, &design.netlist, &opts.power);
    let score = weights.map(|w| quality_score(timing.wns, timing.tns, power, of.total, w));
    Ok(Evaluation {
        report: ScoreReport {
            wns: timing.wns,
            tns: timing.tns,
            power,
            tof: of.total,
            per_layer_overflow: of.per_layer,
            violations: timing.num_violations(),
            endpoints: timing.endpoints.len(),
            score,
        },
        timing,
        graph,
        demand,
    })
}
