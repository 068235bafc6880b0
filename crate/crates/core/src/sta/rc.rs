// SPDX-License-Identifier: Apache-2.0
//! π-model RC trees for routed nets and Elmore delay.
//!
//! Extraction first expands a route into unit pieces (one GCell of wire, or
//! one via cut), roots the resulting graph at the driver pin and then merges
//! series runs of the same wire or via stack. A run of length `len` on layer
//! `l` becomes one edge of resistance `r[l] * len` whose capacitance
//! `c[l] * len` is split evenly between its two end nodes.

use std::collections::HashMap;

use crate::assign::NetSolution;
use crate::design::{Net, Netlist, PinId, Route2D, Tech};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RcNode {
    pub parent: Option<usize>,
    /// Resistance of the edge to the parent, kΩ.
    pub res: f64,
    /// Lumped capacitance at this node, fF.
    pub cap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RcTree {
    /// Parents precede children; node 0 is the driver attachment.
    pub nodes: Vec<RcNode>,
    pub pins: Vec<(PinId, usize)>,
}

impl RcTree {
    pub fn total_cap(&self) -> f64 {
        self.nodes.iter().map(|n| n.cap).sum()
    }

    /// Capacitance of each node's subtree, itself included.
    pub fn downstream_caps(&self) -> Vec<f64> {
        let mut down: Vec<f64> = self.nodes.iter().map(|n| n.cap).collect();
        for i in (1..self.nodes.len()).rev() {
            let p = self.nodes[i].parent.expect("non-root node has a parent");
            down[p] += down[i];
        }
        down
    }

    /// Elmore delay from the root to every node, ps.
    pub fn elmore(&self) -> Vec<f64> {
        let down = self.downstream_caps();
        let mut delay = vec![0.0; self.nodes.len()];
        for i in 1..self.nodes.len() {
            let n = &self.nodes[i];
            delay[i] = delay[n.parent.unwrap()] + n.res * down[i];
        }
        delay
    }

    pub fn pin_delays(&self) -> Vec<(PinId, f64)> {
        let d = self.elmore();
        self.pins.iter().map(|&(p, n)| (p, d[n])).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Piece {
    Wire { layer: usize, vertical: bool },
    Via,
}

#[derive(Default)]
struct Builder {
    ids: HashMap<(usize, usize, usize), usize>,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize, f64, f64, Piece)>,
    pin_at: Vec<(PinId, usize, f64)>,
}

impl Builder {
    fn point(&mut self, p: (usize, usize, usize)) -> usize {
        let n = self.ids.len();
        let id = *self.ids.entry(p).or_insert(n);
        if id == self.adj.len() {
            self.adj.push(Vec::new());
        }
        id
    }

    fn edge(
        &mut self,
        a: (usize, usize, usize),
        b: (usize, usize, usize),
        res: f64,
        cap: f64,
        kind: Piece,
    ) {
        let (u, v) = (self.point(a), self.point(b));
        let e = self.edges.len();
        self.edges.push((u, v, res, cap, kind));
        self.adj[u].push(e);
        self.adj[v].push(e);
    }

    fn pin(&mut self, pin: PinId, at: (usize, usize, usize), cap: f64) {
        let id = self.point(at);
        self.pin_at.push((pin, id, cap));
    }

    fn build(self, root: usize, net: &str) -> Result<RcTree> {
        let n = self.adj.len();
        let mut parent_edge: Vec<Option<usize>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut order = vec![root];
        seen[root] = true;
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &e in &self.adj[u] {
                if Some(e) == parent_edge[u] {
                    continue;
                }
                let (a, b, ..) = self.edges[e];
                let v = if a == u { b } else { a };
                if seen[v] {
                    return Err(Error::RouteCycle {
                        net: net.to_string(),
                    });
                }
                seen[v] = true;
                parent_edge[v] = Some(e);
                order.push(v);
            }
        }
        if order.len() != n {
            return Err(Error::Disconnected {
                net: net.to_string(),
            });
        }

        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &v in &order[1..] {
            let (a, b, ..) = self.edges[parent_edge[v].unwrap()];
            children[if a == v { b } else { a }].push(v);
        }
        let mut has_pin = vec![false; n];
        for &(_, at, _) in &self.pin_at {
            has_pin[at] = true;
        }

        let mut remap = vec![usize::MAX; n];
        let mut nodes = vec![RcNode {
            parent: None,
            res: 0.0,
            cap: 0.0,
        }];
        let mut wire_cap = vec![0.0];
        remap[root] = 0;
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            for &c in &children[u] {
                let (.., mut res, mut cap, kind) = self.edges[parent_edge[c].unwrap()];
                let mut cur = c;
                while !has_pin[cur] && children[cur].len() == 1 {
                    let next = children[cur][0];
                    let (.., r, k, nk) = self.edges[parent_edge[next].unwrap()];
                    if nk != kind {
                        break;
                    }
                    res += r;
                    cap += k;
                    cur = next;
                }
                remap[cur] = nodes.len();
                nodes.push(RcNode {
                    parent: Some(remap[u]),
                    res,
                    cap: 0.0,
                });
                wire_cap.push(cap);
                stack.push(cur);
            }
        }
        for i in 1..nodes.len() {
            let half = wire_cap[i] / 2.0;
            nodes[i].cap += half;
            let p = nodes[i].parent.unwrap();
            nodes[p].cap += half;
        }
        let mut pins = Vec::with_capacity(self.pin_at.len());
        for (pin, at, cap) in self.pin_at {
            nodes[remap[at]].cap += cap;
            pins.push((pin, remap[at]));
        }
        Ok(RcTree { nodes, pins })
    }
}

fn attach_pins(
    b: &mut Builder,
    net: &Net,
    netlist: &Netlist,
    layer_of: impl Fn(PinId) -> usize,
) -> usize {
    let d = &netlist.pins[net.driver];
    b.pin(net.driver, (d.x, d.y, layer_of(net.driver)), 0.0);
    let root = b.pin_at[0].1;
    for &s in &net.sinks {
        let p = &netlist.pins[s];
        b.pin(s, (p.x, p.y, layer_of(s)), p.cap);
    }
    root
}

/// RC tree of a 2D route using the average per-unit R and C of the technology.
pub fn extract_rc_2d(route: &Route2D, net: &Net, netlist: &Netlist, tech: &Tech) -> Result<RcTree> {
    let mut b = Builder::default();
    for e in route.edges() {
        let (p, q) = e.ends();
        b.edge(
            (p.0, p.1, 0),
            (q.0, q.1, 0),
            tech.r_avg,
            tech.c_avg,
            Piece::Wire {
                layer: 0,
                vertical: e.vertical,
            },
        );
    }
    let root = attach_pins(&mut b, net, netlist, |_| 0);
    b.build(root, &net.name)
}

/// RC tree of a 3D solution with per-layer wire parasitics and via resistances.
pub fn extract_rc_3d(
    sol: &NetSolution,
    net: &Net,
    netlist: &Netlist,
    tech: &Tech,
) -> Result<RcTree> {
    let mut b = Builder::default();
    for w in &sol.wires {
        let layer = &tech.layers[w.layer];
        let pieces = crate::design::unit_edges((w.x1, w.y1), (w.x2, w.y2))
            .ok_or_else(|| Error::Invalid(format!("net {}: bent wire", net.name)))?;
        for e in pieces {
            let (p, q) = e.ends();
            b.edge(
                (p.0, p.1, w.layer),
                (q.0, q.1, w.layer),
                layer.r,
                layer.c,
                Piece::Wire {
                    layer: w.layer,
                    vertical: e.vertical,
                },
            );
        }
    }
    for v in &sol.vias {
        for l in v.bottom..v.top {
            b.edge(
                (v.x, v.y, l),
                (v.x, v.y, l + 1),
                tech.via_r[l],
                0.0,
                Piece::Via,
            );
        }
    }
    let root = attach_pins(&mut b, net, netlist, |p| netlist.pins[p].layer);
    b.build(root, &net.name)
}
