// SPDX-License-Identifier: Apache-2.0
//! Cost terms shared by the DP and the exhaustive oracle.

use serde::{Deserialize, Serialize};

use crate::design::{GridGraph, Tech};
use crate::eval::{edge_overflow, OverflowModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostWeights {
    /// Delay weight; multiplies every resistance-times-capacitance term.
    pub w_d: f64,
    /// Weight per fF of wire capacitance.
    pub w_cap: f64,
    /// Weight of marginal overflow.
    pub w_cong: f64,
    /// Planar demand one via level adds to each edge touching it.
    pub delta_via: f64,
    /// Fixed cost per via level.
    pub p_via: f64,
    /// Adds the upstream-resistance estimate when choosing between son layers.
    pub lookahead: bool,
}

impl Default for CostWeights {
    fn default() -> Self {
        CostWeights {
            w_d: 1.0,
            w_cap: 0.1,
            w_cong: 1.0,
            delta_via: 0.25,
            p_via: 0.01,
            lookahead: true,
        }
    }
}

/// Everything a net's assignment cost depends on. The demand slice is the
/// snapshot taken at the start of the batch.
#[derive(Clone, Copy)]
pub struct CostCtx<'a> {
    pub tech: &'a Tech,
    pub grid: &'a GridGraph,
    pub demand: &'a [f64],
    pub weights: CostWeights,
    pub model: OverflowModel,
}

impl CostCtx<'_> {
    fn marginal(&self, e: usize, layer: usize, extra: f64) -> f64 {
        let d = self.demand[e];
        let c = self.grid.capacity(e);
        let ofw = self.tech.layers[layer].ofw;
        edge_overflow(self.model, d + extra, c, ofw, self.tech)
            - edge_overflow(self.model, d, c, ofw, self.tech)
    }

    /// Weighted overflow increase from one more track on every edge of a run.
    pub fn wire_congestion(&self, a: (usize, usize), b: (usize, usize), layer: usize) -> f64 {
        let edges = self
            .grid
            .run_edges(a, b, layer)
            .expect("run follows layer direction");
        let sum: f64 = edges.iter().map(|&e| self.marginal(e, layer, 1.0)).sum();
        self.weights.w_cong * sum
    }

    /// Cost of a via level at `(x, y)` on layer `t`: the fixed penalty plus the
    /// mean overflow increase over the planar edges touching the GCell.
    pub fn via_cong(&self, x: usize, y: usize, t: usize) -> f64 {
        let mut sum = 0.0;
        let mut n = 0usize;
        for e in self.grid.incident_edges(x, y, t) {
            sum += self.marginal(e, t, self.weights.delta_via);
            n += 1;
        }
        let mean = if n == 0 { 0.0 } else { sum / n as f64 };
        self.weights.p_via + self.weights.w_cong * mean
    }

    /// Via cost of a stack spanning `b..=t`; zero when there is no stack.
    pub fn span_cost(&self, x: usize, y: usize, b: usize, t: usize) -> f64 {
        if t <= b {
            return 0.0;
        }
        (b..=t).map(|l| self.via_cong(x, y, l)).sum()
    }
}
