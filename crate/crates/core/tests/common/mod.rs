// SPDX-License-Identifier: Apache-2.0
#![allow(dead_code)]

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use layassign::assign::{CostCtx, CostWeights};
use layassign::design::{
    Design, Direction, GridGraph, Layer, Net, Netlist, Pin, Point, Route2D, RouteSet, Segment, Tech,
};
use layassign::eval::OverflowModel;
use layassign::sta::{RcNode, RcTree};
use layassign::tree::{edge_weights, upstream_resistance, LaTree};

/// One small net on its own grid, with random electricals and demand.
pub struct Instance {
    pub tech: Tech,
    pub grid: GridGraph,
    pub netlist: Netlist,
    pub tree: LaTree,
    pub demand: Vec<f64>,
    pub weights: CostWeights,
    pub model: OverflowModel,
}

impl Instance {
    pub fn ctx(&self) -> CostCtx<'_> {
        CostCtx {
            tech: &self.tech,
            grid: &self.grid,
            demand: &self.demand,
            weights: self.weights,
            model: self.model,
        }
    }
}

pub fn random_tech(rng: &mut impl Rng, layers: usize) -> Tech {
    let first = if rng.gen_bool(0.5) {
        Direction::Horizontal
    } else {
        Direction::Vertical
    };
    let other = if first == Direction::Horizontal {
        Direction::Vertical
    } else {
        Direction::Horizontal
    };
    let ls = (0..layers)
        .map(|l| Layer {
            direction: if l % 2 == 0 { first } else { other },
            r: rng.gen_range(0.01..0.5),
            c: rng.gen_range(0.05..0.4),
            ofw: rng.gen_range(0.5..2.0),
        })
        .collect();
    let via = (0..layers - 1).map(|_| rng.gen_range(0.001..0.1)).collect();
    Tech::new(ls, via).unwrap()
}

/// Walks an L-shaped path from `from` and stops at the first tree GCell.
pub fn l_walk(
    from: Point,
    to: Point,
    x_first: bool,
    tree: &mut HashSet<Point>,
    segs: &mut Vec<Segment>,
) {
    let mut p = from;
    while !tree.contains(&p) {
        let q = if (x_first && p.0 != to.0) || p.1 == to.1 {
            (if p.0 < to.0 { p.0 + 1 } else { p.0 - 1 }, p.1)
        } else {
            (p.0, if p.1 < to.1 { p.1 + 1 } else { p.1 - 1 })
        };
        tree.insert(p);
        segs.push(Segment { a: p, b: q });
        p = q;
    }
}

/// A random net whose tree has between 2 and `max_nodes` nodes.
pub fn random_instance(seed: u64, max_nodes: usize, layers: usize, w_d: f64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (nx, ny) = (7usize, 7usize);
    loop {
        let tech = random_tech(&mut rng, layers);
        let caps: Vec<f64> = (0..layers)
            .map(|_| rng.gen_range(0.0..6.0f64).floor())
            .collect();
        let grid = GridGraph::new(nx, ny, &tech, caps).unwrap();

        let sinks = rng.gen_range(1..=3);
        let mut nl = Netlist::default();
        let mut pos = Vec::new();
        for i in 0..=sinks {
            let p = (rng.gen_range(0..nx), rng.gen_range(0..ny));
            pos.push(p);
            nl.add_pin(Pin {
                name: format!("p{i}"),
                x: p.0,
                y: p.1,
                layer: rng.gen_range(0..layers),
                cap: rng.gen_range(0.1..5.0),
                drive: Some(rng.gen_range(0.2..3.0)),
            })
            .unwrap();
        }
        nl.add_net(Net {
            name: "n".into(),
            driver: 0,
            sinks: (1..=sinks).collect(),
        })
        .unwrap();

        let mut on_tree: HashSet<Point> = HashSet::from([pos[0]]);
        let mut segs = Vec::new();
        for &s in &pos[1..] {
            l_walk(s, pos[0], rng.gen_bool(0.5), &mut on_tree, &mut segs);
        }
        let route = Route2D::new("n", segs).unwrap();
        let Ok(mut tree) = LaTree::build(&route, &nl, 0) else {
            continue;
        };
        if tree.len() < 2 || tree.len() > max_nodes {
            continue;
        }
        let pw: Vec<f64> = (0..nl.pins.len())
            .map(|_| rng.gen_range(0.01..1.0))
            .collect();
        edge_weights(&mut tree, |p| pw[p]);
        upstream_resistance(&mut tree, tech.r_avg, nl.pins[0].drive.unwrap());

        let demand = grid
            .capacities()
            .iter()
            .map(|&c| (c + rng.gen_range(-3.0..3.0)).max(0.0).floor())
            .collect();
        let weights = CostWeights {
            w_d,
            w_cap: rng.gen_range(0.0..0.5),
            w_cong: rng.gen_range(0.0..2.0),
            delta_via: rng.gen_range(0.0..0.5),
            p_via: rng.gen_range(0.0..0.05),
            lookahead: true,
        };
        let model = if rng.gen_bool(0.8) {
            OverflowModel::Exponential
        } else {
            OverflowModel::Legacy
        };
        return Instance {
            tech,
            grid,
            netlist: nl,
            tree,
            demand,
            weights,
            model,
        };
    }
}

pub fn random_rc(seed: u64, max_nodes: usize) -> RcTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_nodes);
    let nodes = (0..n)
        .map(|i| RcNode {
            parent: (i > 0).then(|| rng.gen_range(0..i)),
            res: if i > 0 { rng.gen_range(0.0..2.0) } else { 0.0 },
            cap: rng.gen_range(0.0..10.0),
        })
        .collect();
    RcTree {
        nodes,
        pins: vec![],
    }
}

pub const TECH2: &str = "layers 2\nlayer 0 H 0.01 0.2 1\nlayer 1 V 0.01 0.2 1\nvia 0 0.5\n";

pub fn design(tech: &str, nx: usize, ny: usize, netlist: &str, routes: &str) -> Design {
    let t = Tech::parse(tech).unwrap();
    let g = GridGraph::new(nx, ny, &t, vec![4.0; t.num_layers()]).unwrap();
    let nl = Netlist::parse(netlist).unwrap();
    let rs = RouteSet::parse(routes, &g).unwrap();
    Design::new(t, g, nl, rs).unwrap()
}

/// Three PIs, two POs. The worst path to `po1` crosses n2, n4, n6 and the
/// worst path to `po2` crosses n2, n5, n7; n1 and n3 are side inputs.
pub const TWO_PO_NETLIST: &str = "\
pin pa 0 0 0
pin pb 0 4 0
pin pc 0 8 0
pin g2a 4 4 0 1
pin g2b 4 3 0 1
pin g2z 5 4 0
pin g3a 4 6 0 1
pin g3z 5 6 0
pin g4a 9 4 0 1
pin g4z 10 4 0
pin g5a 9 6 0 1
pin g5b 9 7 0 1
pin g5z 10 6 0
pin po1 14 4 0 2
pin po2 14 6 0 2
arc g2a g2z delaytable rows 1 cols 1 0 0 40 slewtable rows 1 cols 1 0 0 5
arc g2b g2z delaytable rows 1 cols 1 0 0 40 slewtable rows 1 cols 1 0 0 5
arc g3a g3z delaytable rows 1 cols 1 0 0 40 slewtable rows 1 cols 1 0 0 5
arc g4a g4z delaytable rows 1 cols 1 0 0 40 slewtable rows 1 cols 1 0 0 5
arc g5a g5z delaytable rows 1 cols 1 0 0 40 slewtable rows 1 cols 1 0 0 5
arc g5b g5z delaytable rows 1 cols 1 0 0 40 slewtable rows 1 cols 1 0 0 5
net n1 pa g2b
net n2 pb g2a g3a
net n3 pc g5b
net n4 g2z g4a
net n5 g3z g5a
net n6 g4z po1
net n7 g5z po2
pi pa 0 1
pi pb 30 1
pi pc 10 1
po po1 100
po po2 100
";

pub const TWO_PO_ROUTES: &str = "\
net n1
seg 0 0 0 3
seg 0 3 4 3
net n2
seg 0 4 4 4
seg 4 4 4 6
net n3
seg 0 8 0 7
seg 0 7 9 7
net n4
seg 5 4 9 4
net n5
seg 5 6 9 6
net n6
seg 10 4 14 4
net n7
seg 10 6 14 6
";

pub fn two_po() -> Design {
    design(TECH2, 16, 10, TWO_PO_NETLIST, TWO_PO_ROUTES)
}

/// Driver at (0,2), a Steiner point at (3,2), sinks at (3,0) and (6,5);
/// the route bends at (6,2).
pub const BEND_NETLIST: &str = "pin d 0 2 0\npin s5 3 0 0 1\npin s7 6 5 0 1\nnet net2 d s5 s7\nclock 100\npo s5\npo s7\npi d 0 1\n";
pub const BEND_ROUTES: &str = "net net2\nseg 0 2 6 2\nseg 3 2 3 0\nseg 6 2 6 5\n";
