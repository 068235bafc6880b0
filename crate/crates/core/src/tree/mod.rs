// SPDX-License-Identifier: Apache-2.0
//! Per-net layer-assignment tree.
//!
//! Nodes sit at pins, Steiner points and bends, so every parent–child edge is
//! a straight run that gets exactly one layer. Layer changes happen only at
//! nodes, through the via stack placed there.

mod weights;

use std::collections::HashMap;
use std::fmt::Write as _;

pub use weights::{edge_weights, pin_weight, upstream_resistance, PinWeightForm, PinWeightParams};

use crate::design::{Direction, NetId, Netlist, PinId, Point, Route2D};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PinAttach {
    pub pin: PinId,
    pub layer: usize,
    pub cap: f64,
    pub driver: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    pub x: usize,
    pub y: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub pins: Vec<PinAttach>,
    pub level: usize,
    /// Length of the edge to the parent in GCells; 0 at the root.
    pub len: usize,
    /// Axis of the edge to the parent; meaningless at the root.
    pub axis: Direction,
}

impl TreeNode {
    pub fn pos(&self) -> Point {
        (self.x, self.y)
    }

    /// Lowest and highest pin layer at this node (`nl`, `nh`).
    pub fn pin_span(&self) -> Option<(usize, usize)> {
        let lo = self.pins.iter().map(|p| p.layer).min()?;
        let hi = self.pins.iter().map(|p| p.layer).max()?;
        Some((lo, hi))
    }

    pub fn sink_pins(&self) -> impl Iterator<Item = &PinAttach> {
        self.pins.iter().filter(|p| !p.driver)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaTree {
    pub net: NetId,
    /// Breadth-first order: node 0 is the root and parents precede children.
    pub nodes: Vec<TreeNode>,
    pub levels: Vec<Vec<usize>>,
    /// Weight of the edge from each node to its parent. At the root this is
    /// the largest sink weight of the whole net.
    pub weight: Vec<f64>,
    /// Estimated upstream resistance from the driver to each node, kΩ.
    pub ur: Vec<f64>,
}

const DIRS: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

fn step(p: Point, d: (isize, isize)) -> Point {
    ((p.0 as isize + d.0) as usize, (p.1 as isize + d.1) as usize)
}

impl LaTree {
    /// Builds the tree of `net` rooted at its driver pin.
    pub fn build(route: &Route2D, netlist: &Netlist, net: NetId) -> Result<LaTree> {
        let n = &netlist.nets[net];
        let name = || n.name.clone();

        // neighbour mask per cell, bit i set when DIRS[i] leads to a routed cell
        let mut adj: HashMap<Point, u8> = HashMap::new();
        for e in route.edges() {
            let (a, b) = e.ends();
            let (fwd, back) = if e.vertical { (2, 3) } else { (0, 1) };
            *adj.entry(a).or_default() |= 1 << fwd;
            *adj.entry(b).or_default() |= 1 << back;
        }
        let mut pins_at: HashMap<Point, Vec<PinAttach>> = HashMap::new();
        for p in n.pins() {
            let pin = &netlist.pins[p];
            pins_at.entry((pin.x, pin.y)).or_default().push(PinAttach {
                pin: p,
                layer: pin.layer,
                cap: pin.cap,
                driver: p == n.driver,
            });
        }
        let is_node = |p: Point| -> bool {
            if pins_at.contains_key(&p) {
                return true;
            }
            let m = adj.get(&p).copied().unwrap_or(0);
            // straight pass-through cells are the only non-nodes
            !(m == 0b0011 || m == 0b1100)
        };

        let drv = &netlist.pins[n.driver];
        let root = (drv.x, drv.y);
        if !adj.is_empty() && !adj.contains_key(&root) {
            return Err(Error::Disconnected { net: name() });
        }
        let mut nodes = vec![TreeNode {
            x: root.0,
            y: root.1,
            parent: None,
            children: Vec::new(),
            pins: pins_at.get(&root).cloned().unwrap_or_default(),
            level: 0,
            len: 0,
            axis: Direction::Horizontal,
        }];
        let mut head = 0;
        while head < nodes.len() {
            let p = nodes[head].pos();
            let mask = adj.get(&p).copied().unwrap_or(0);
            let back = nodes[head].parent.map(|par| {
                let q = nodes[par].pos();
                let d = (
                    (q.0 as isize - p.0 as isize).signum(),
                    (q.1 as isize - p.1 as isize).signum(),
                );
                DIRS.iter().position(|&x| x == d).unwrap()
            });
            for (i, &d) in DIRS.iter().enumerate() {
                if mask & (1 << i) == 0 || Some(i) == back {
                    continue;
                }
                let mut q = step(p, d);
                let mut len = 1;
                while !is_node(q) {
                    q = step(q, d);
                    len += 1;
                }
                if nodes.len() > route.edges().len() + 1 {
                    return Err(Error::RouteCycle { net: name() });
                }
                let id = nodes.len();
                let level = nodes[head].level + 1;
                nodes.push(TreeNode {
                    x: q.0,
                    y: q.1,
                    parent: Some(head),
                    children: Vec::new(),
                    pins: pins_at.get(&q).cloned().unwrap_or_default(),
                    level,
                    len,
                    axis: if d.1 == 0 {
                        Direction::Horizontal
                    } else {
                        Direction::Vertical
                    },
                });
                nodes[head].children.push(id);
            }
            head += 1;
        }

        let attached: usize = nodes.iter().map(|n| n.pins.len()).sum();
        if attached != n.sinks.len() + 1 {
            return Err(Error::Disconnected { net: name() });
        }
        let depth = nodes.iter().map(|n| n.level).max().unwrap_or(0);
        let mut levels = vec![Vec::new(); depth + 1];
        for (i, node) in nodes.iter().enumerate() {
            levels[node.level].push(i);
        }
        let count = nodes.len();
        Ok(LaTree {
            net,
            nodes,
            levels,
            weight: vec![0.0; count],
            ur: vec![0.0; count],
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn wirelength(&self) -> usize {
        self.nodes.iter().map(|n| n.len).sum()
    }

    /// Indented text rendering for debugging.
    pub fn dump(&self, netlist: &Netlist) -> String {
        let mut s = String::new();
        writeln!(
            s,
            "tree {} nodes={} levels={}",
            netlist.nets[self.net].name,
            self.len(),
            self.levels.len()
        )
        .unwrap();
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            let n = &self.nodes[i];
            let pins: Vec<String> = n
                .pins
                .iter()
                .map(|p| format!("{}@{}", netlist.pins[p.pin].name, p.layer))
                .collect();
            writeln!(
                s,
                "{:indent$}n{} ({}, {}) len={} w={:.4} ur={:.4} [{}]",
                "",
                i,
                n.x,
                n.y,
                n.len,
                self.weight[i],
                self.ur[i],
                pins.join(" "),
                indent = 2 * n.level
            )
            .unwrap();
            stack.extend(n.children.iter().rev());
        }
        s
    }
}
