// SPDX-License-Identifier: Apache-2.0
//! Whole-tree cost evaluation and exhaustive search for small nets.
//!
//! Nothing here reuses DP state: costs are summed edge by edge from a full
//! layer assignment, with downstream capacitances recomputed from scratch.

use std::collections::HashMap;

use super::cost::CostCtx;
use super::solution::{NetSolution, Via, Wire};
use crate::design::{Direction, Point};
use crate::tree::LaTree;
use crate::{Error, Result};

pub const ORACLE_MAX_NODES: usize = 6;
pub const ORACLE_MAX_LAYERS: usize = 4;

/// Cost of a complete assignment. `layer[0]` is the root layer, `layer[j]`
/// the layer of the edge above node `j`; `spans[n]` is the via span at `n`.
pub fn config_cost(tree: &LaTree, ctx: &CostCtx, layer: &[usize], spans: &[(usize, usize)]) -> f64 {
    let tech = ctx.tech;
    let w = &ctx.weights;
    let n = tree.len();
    let mut dlc = vec![0.0; n];
    for u in (0..n).rev() {
        let node = &tree.nodes[u];
        let mut c: f64 = node.pins.iter().map(|p| p.cap).sum();
        for &j in &node.children {
            c += dlc[j] + tech.layers[layer[j]].c * tree.nodes[j].len as f64;
        }
        dlc[u] = c;
    }

    let mut total = 0.0;
    for (u, node) in tree.nodes.iter().enumerate() {
        let lu = layer[u];
        for p in &node.pins {
            total += w.w_d * tree.weight[u] * p.cap * tech.via_resistance(p.layer, lu);
        }
        total += ctx.span_cost(node.x, node.y, spans[u].0, spans[u].1);
        for &j in &node.children {
            let child = &tree.nodes[j];
            let s = layer[j];
            let len = child.len as f64;
            let wcap = tech.layers[s].c * len;
            let wd = w.w_d * tree.weight[j];
            total += wd * tech.layers[s].r * len * (wcap / 2.0 + dlc[j]);
            total += wd * tech.via_resistance(s, lu) * (dlc[j] + wcap);
            total += w.w_cap * wcap;
            total += ctx.wire_congestion(node.pos(), child.pos(), s);
        }
    }
    total
}

/// Smallest via span at each node covering its own layer, its pins and its sons.
pub fn minimal_spans(tree: &LaTree, layer: &[usize]) -> Vec<(usize, usize)> {
    tree.nodes
        .iter()
        .enumerate()
        .map(|(u, node)| {
            let ls = std::iter::once(layer[u])
                .chain(node.pins.iter().map(|p| p.layer))
                .chain(node.children.iter().map(|&j| layer[j]));
            ls.fold((usize::MAX, 0), |(b, t), l| (b.min(l), t.max(l)))
        })
        .collect()
}

/// Recovers per-edge layers and spans from a solution and prices it.
pub fn solution_cost(tree: &LaTree, ctx: &CostCtx, sol: &NetSolution) -> Result<f64> {
    let err = |m: &str| Error::Invalid(format!("net {}: {m}", sol.net));
    let key = |a: Point, b: Point| if a <= b { (a, b) } else { (b, a) };
    let wires: HashMap<(Point, Point), usize> = sol
        .wires
        .iter()
        .map(|w| (key((w.x1, w.y1), (w.x2, w.y2)), w.layer))
        .collect();
    let vias: HashMap<Point, (usize, usize)> = sol
        .vias
        .iter()
        .map(|v| ((v.x, v.y), (v.bottom, v.top)))
        .collect();

    let mut layer = vec![sol.root_layer; tree.len()];
    for (j, node) in tree.nodes.iter().enumerate().skip(1) {
        let p = &tree.nodes[node.parent.unwrap()];
        layer[j] = *wires
            .get(&key(p.pos(), node.pos()))
            .ok_or_else(|| err("tree edge without a wire"))?;
    }
    let need = minimal_spans(tree, &layer);
    let mut spans = Vec::with_capacity(tree.len());
    for (u, node) in tree.nodes.iter().enumerate() {
        let s = vias
            .get(&node.pos())
            .copied()
            .unwrap_or((layer[u], layer[u]));
        if s.0 > need[u].0 || s.1 < need[u].1 {
            return Err(err("via stack does not reach every layer at its node"));
        }
        spans.push(s);
    }
    Ok(config_cost(tree, ctx, &layer, &spans))
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub cost: f64,
    pub solution: NetSolution,
    /// Distinct per-edge layer assignments tried.
    pub wire_assignments: usize,
    /// Configurations priced, including the root layer choice.
    pub configs: usize,
}

/// Exhaustive minimum over every root layer and per-edge layer choice, with
/// minimal via spans. Limited to small trees.
pub fn oracle(tree: &LaTree, ctx: &CostCtx) -> Result<OracleResult> {
    let nl = ctx.tech.num_layers();
    let n = tree.len();
    if n > ORACLE_MAX_NODES || nl > ORACLE_MAX_LAYERS {
        return Err(Error::TooLarge(format!(
            "instance too large: {n} nodes, {nl} layers (limit {ORACLE_MAX_NODES} nodes, {ORACLE_MAX_LAYERS} layers)"
        )));
    }
    let options: Vec<Vec<usize>> = tree
        .nodes
        .iter()
        .enumerate()
        .map(|(u, node)| {
            if u == 0 {
                (0..nl).collect()
            } else {
                ctx.tech.layers_with(node.axis).collect()
            }
        })
        .collect();

    let mut idx = vec![0usize; n];
    let mut best: Option<(f64, Vec<usize>, Vec<(usize, usize)>)> = None;
    let mut configs = 0;
    loop {
        let layer: Vec<usize> = idx.iter().zip(&options).map(|(&i, o)| o[i]).collect();
        let spans = minimal_spans(tree, &layer);
        let cost = config_cost(tree, ctx, &layer, &spans);
        configs += 1;
        if best.as_ref().is_none_or(|b| cost < b.0) {
            best = Some((cost, layer, spans));
        }
        let mut k = 0;
        while k < n {
            idx[k] += 1;
            if idx[k] < options[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
    }

    let (cost, layer, spans) = best.expect("at least one configuration");
    let mut sol = NetSolution::empty(tree.net);
    sol.root_layer = layer[0];
    sol.cost = cost;
    for (u, node) in tree.nodes.iter().enumerate() {
        let (b, t) = spans[u];
        if t > b {
            sol.vias.push(Via {
                x: node.x,
                y: node.y,
                bottom: b,
                top: t,
            });
        }
        for &j in &node.children {
            let c = &tree.nodes[j];
            sol.wires.push(Wire {
                x1: node.x,
                y1: node.y,
                x2: c.x,
                y2: c.y,
                layer: layer[j],
            });
        }
    }
    Ok(OracleResult {
        cost,
        solution: sol,
        wire_assignments: configs / nl,
        configs,
    })
}

/// Upper bound on how far the DP cost can sit above the true optimum.
///
/// The DP keeps one candidate per (node, layer) and so cannot trade subtree
/// cost for a smaller downstream capacitance, and with look-ahead it ranks
/// sons and spans by a shifted cost. Each son edge `j` contributes its
/// worst-case sensitivity to downstream capacitance times the spread of that
/// capacitance, plus twice the largest possible look-ahead shift.
pub fn gap_bound(tree: &LaTree, ctx: &CostCtx) -> f64 {
    let tech = ctx.tech;
    let w = &ctx.weights;
    let nl = tech.num_layers();
    let spread = |dir: Direction| {
        let cs: Vec<f64> = tech.layers_with(dir).map(|l| tech.layers[l].c).collect();
        cs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - cs.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    let n = tree.len();
    let mut below = vec![0.0; n];
    let mut gap = vec![0.0; n];
    for u in (0..n).rev() {
        let node = &tree.nodes[u];
        for &j in &node.children {
            let child = &tree.nodes[j];
            let len = child.len as f64;
            let own = spread(child.axis) * len;
            below[u] += below[j] + own;

            let wd = w.w_d * tree.weight[j];
            let sens = tech
                .layers_with(child.axis)
                .flat_map(|s| (0..nl).map(move |l| (s, l)))
                .map(|(s, l)| tech.layers[s].r * len + tech.via_resistance(s, l))
                .fold(0.0, f64::max);
            let shift = if w.lookahead { wd * tree.ur[u] } else { 0.0 };
            gap[u] += gap[j] + wd * sens * below[j] + 2.0 * shift * (below[j] + own);
        }
    }
    gap[0]
}
