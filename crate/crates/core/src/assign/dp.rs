// SPDX-License-Identifier: Apache-2.0
//! Tree DP over (node, layer) states.
//!
//! `f[n, l]` is the best cost of the subtree below node `n` when the edge from
//! `n` to its parent sits on layer `l`. At the root `l` is a free choice. For
//! each state the DP tries every via span `[b, t]` at `n` that covers `l` and
//! the pins at `n`, picks the best layer inside the span for every son, and
//! keeps the span with the lowest look-ahead cost.

use super::cost::CostCtx;
use super::solution::{NetSolution, Via, Wire};
use crate::tree::LaTree;

#[derive(Debug, Clone)]
pub struct DpTables {
    layers: usize,
    f: Vec<f64>,
    fp: Vec<f64>,
    dlc: Vec<f64>,
    choice: Vec<(u8, u8)>,
    /// Layer of each non-root node's parent edge, indexed by the parent's layer.
    entry: Vec<u8>,
}

impl DpTables {
    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn f(&self, n: usize, l: usize) -> f64 {
        self.f[n * self.layers + l]
    }

    /// `f` plus the look-ahead term of the node's own parent edge.
    pub fn f_lookahead(&self, n: usize, l: usize) -> f64 {
        self.fp[n * self.layers + l]
    }

    /// Downstream capacitance of the chosen candidate, fF.
    pub fn dlc(&self, n: usize, l: usize) -> f64 {
        self.dlc[n * self.layers + l]
    }

    pub fn span(&self, n: usize, l: usize) -> (usize, usize) {
        let (b, t) = self.choice[n * self.layers + l];
        (b as usize, t as usize)
    }

    pub fn entry(&self, child: usize, parent_layer: usize) -> usize {
        self.entry[child * self.layers + parent_layer] as usize
    }

    pub fn state_bytes(&self) -> usize {
        self.f.len() * 8
            + self.fp.len() * 8
            + self.dlc.len() * 8
            + self.choice.len() * 2
            + self.entry.len()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DpStats {
    pub nodes: usize,
    pub layers: usize,
    /// Bytes of the per-(node, layer) tables kept until trace-back.
    pub state_bytes: usize,
    /// Largest per-node working set, freed before the next node.
    pub scratch_bytes: usize,
}

#[derive(Clone, Copy)]
struct Pick {
    layer: usize,
    cost: f64,
    lookahead: f64,
}

/// Fills the DP tables bottom-up. Returns the tables and the peak scratch size.
pub fn solve(tree: &LaTree, ctx: &CostCtx) -> (DpTables, usize) {
    let tech = ctx.tech;
    let w = &ctx.weights;
    let nl = tech.num_layers();
    let n = tree.len();
    let vr: Vec<f64> = (0..nl * nl)
        .map(|i| tech.via_resistance(i / nl, i % nl))
        .collect();
    let mut tab = DpTables {
        layers: nl,
        f: vec![f64::INFINITY; n * nl],
        fp: vec![f64::INFINITY; n * nl],
        dlc: vec![0.0; n * nl],
        choice: vec![(0, 0); n * nl],
        entry: vec![0; n * nl],
    };
    let mut scratch = 0;

    for u in (0..n).rev() {
        let node = &tree.nodes[u];
        let kids = &node.children;
        let k = kids.len();

        // Son terms that do not depend on the layer at `u`.
        let mut base = vec![f64::INFINITY; k * nl];
        let mut load = vec![0.0; k * nl];
        let mut dw = vec![0.0; k];
        let mut la = vec![0.0; k];
        for (i, &j) in kids.iter().enumerate() {
            let child = &tree.nodes[j];
            let len = child.len as f64;
            dw[i] = w.w_d * tree.weight[j];
            la[i] = if w.lookahead { dw[i] * tree.ur[u] } else { 0.0 };
            for s in 0..nl {
                if tech.direction(s) != child.axis {
                    continue;
                }
                let layer = &tech.layers[s];
                let wcap = layer.c * len;
                let d = tab.dlc[j * nl + s];
                base[i * nl + s] = tab.f[j * nl + s]
                    + dw[i] * layer.r * len * (wcap / 2.0 + d)
                    + w.w_cap * wcap
                    + ctx.wire_congestion(node.pos(), child.pos(), s);
                load[i * nl + s] = d + wcap;
            }
        }

        let vc: Vec<f64> = (0..nl).map(|t| ctx.via_cong(node.x, node.y, t)).collect();
        let mut span = vec![0.0; nl * nl];
        for b in 0..nl {
            let mut acc = 0.0;
            for t in b..nl {
                acc += vc[t];
                if t > b {
                    span[b * nl + t] = acc;
                }
            }
        }
        scratch = usize::max(
            scratch,
            (base.len() + load.len() + span.len() + 2 * k) * 8 + k * 48,
        );

        let pins = node.pin_span();
        let wn = w.w_d * tree.weight[u];
        let cap0: f64 = node.pins.iter().map(|p| p.cap).sum();
        let mut cur: Vec<Option<Pick>> = vec![None; k];
        let mut chosen = vec![0usize; k];

        for l in 0..nl {
            if u != 0 && tech.direction(l) != node.axis {
                continue;
            }
            let pin: f64 = node
                .pins
                .iter()
                .map(|p| wn * p.cap * vr[p.layer * nl + l])
                .sum();
            let (lo, hi) = match pins {
                Some((a, b)) => (a.min(l), b.max(l)),
                None => (l, l),
            };
            let consider = |cur: &mut Option<Pick>, i: usize, s: usize| {
                let b = base[i * nl + s];
                if b == f64::INFINITY {
                    return;
                }
                let ld = load[i * nl + s];
                let cost = b + dw[i] * vr[s * nl + l] * ld;
                let lookahead = cost + la[i] * ld;
                if cur.is_none_or(|p| lookahead < p.lookahead) {
                    *cur = Some(Pick {
                        layer: s,
                        cost,
                        lookahead,
                    });
                }
            };

            // (g', width, b, t, g)
            let mut best: Option<(f64, usize, usize, usize, f64)> = None;
            for b in 0..=lo {
                for (i, c) in cur.iter_mut().enumerate() {
                    *c = None;
                    for s in b..=hi {
                        consider(c, i, s);
                    }
                }
                for t in hi..nl {
                    if t > hi {
                        for (i, c) in cur.iter_mut().enumerate() {
                            consider(c, i, t);
                        }
                    }
                    if cur.iter().any(Option::is_none) {
                        continue;
                    }
                    let mut g = span[b * nl + t];
                    let mut gp = g;
                    for p in cur.iter().flatten() {
                        g += p.cost;
                        gp += p.lookahead;
                    }
                    let width = t - b;
                    let better = match best {
                        None => true,
                        Some((bgp, bw, bb, _, _)) => {
                            gp < bgp || (gp == bgp && (width, b) < (bw, bb))
                        }
                    };
                    if better {
                        best = Some((gp, width, b, t, g));
                        for (c, p) in chosen.iter_mut().zip(&cur) {
                            *c = p.unwrap().layer;
                        }
                    }
                }
            }

            let (_, _, b, t, g) = best.expect("full span always admits a legal son layer");
            let mut dlc = cap0;
            for (i, &s) in chosen.iter().enumerate() {
                dlc += load[i * nl + s];
                tab.entry[kids[i] * nl + l] = s as u8;
            }
            let f = pin + g;
            let idx = u * nl + l;
            tab.f[idx] = f;
            tab.dlc[idx] = dlc;
            tab.fp[idx] = if w.lookahead {
                f + wn * tree.ur[u] * dlc
            } else {
                f
            };
            tab.choice[idx] = (b as u8, t as u8);
        }
    }
    (tab, scratch)
}

/// Picks the cheapest root layer and walks the recorded choices top-down.
pub fn trace_back(tree: &LaTree, tab: &DpTables) -> NetSolution {
    let nl = tab.layers;
    let mut root = 0;
    for l in 1..nl {
        if tab.f(0, l) < tab.f(0, root) {
            root = l;
        }
    }
    let mut layer = vec![0; tree.len()];
    layer[0] = root;
    let mut sol = NetSolution::empty(tree.net);
    sol.root_layer = root;
    sol.cost = tab.f(0, root);
    for (u, node) in tree.nodes.iter().enumerate() {
        let l = layer[u];
        let (b, t) = tab.span(u, l);
        if t > b {
            sol.vias.push(Via {
                x: node.x,
                y: node.y,
                bottom: b,
                top: t,
            });
        }
        for &j in &node.children {
            let s = tab.entry(j, l);
            layer[j] = s;
            let c = &tree.nodes[j];
            sol.wires.push(Wire {
                x1: node.x,
                y1: node.y,
                x2: c.x,
                y2: c.y,
                layer: s,
            });
        }
    }
    sol
}

pub fn assign_net(tree: &LaTree, ctx: &CostCtx) -> (NetSolution, DpStats) {
    let (tab, scratch) = solve(tree, ctx);
    let stats = DpStats {
        nodes: tree.len(),
        layers: tab.layers,
        state_bytes: tab.state_bytes(),
        scratch_bytes: scratch,
    };
    (trace_back(tree, &tab), stats)
}
