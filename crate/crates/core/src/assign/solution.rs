// SPDX-License-Identifier: Apache-2.0
//! 3D solutions: layered wires and via stacks, their text format and the
//! routing demand they put on the grid.

use std::fmt::Write as _;
use std::path::Path;

use crate::design::{lines, read_file, DemandMap, GridGraph, NetId, Netlist, Tokens};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Wire {
    pub x1: usize,
    pub y1: usize,
    pub x2: usize,
    pub y2: usize,
    pub layer: usize,
}

/// Stack of vias at one GCell connecting `bottom` through `top`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Via {
    pub x: usize,
    pub y: usize,
    pub bottom: usize,
    pub top: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetSolution {
    pub net: NetId,
    pub wires: Vec<Wire>,
    pub vias: Vec<Via>,
    /// Layer picked for the root by the DP. Not stored in files.
    pub root_layer: usize,
    /// DP cost of the solution. Not stored in files.
    pub cost: f64,
}

impl NetSolution {
    pub fn empty(net: NetId) -> NetSolution {
        NetSolution {
            net,
            wires: Vec::new(),
            vias: Vec::new(),
            root_layer: 0,
            cost: 0.0,
        }
    }

    /// Calls `f(edge, amount)` for every unit of demand the solution uses.
    /// Wires take one track per GCell edge; each via stack level charges
    /// `delta_via` to every planar edge touching the stack on that layer.
    pub fn for_each_demand(&self, grid: &GridGraph, delta_via: f64, mut f: impl FnMut(usize, f64)) {
        for w in &self.wires {
            for e in grid
                .run_edges((w.x1, w.y1), (w.x2, w.y2), w.layer)
                .expect("wire follows its layer direction")
            {
                f(e, 1.0);
            }
        }
        if delta_via > 0.0 {
            for v in &self.vias {
                for l in v.bottom..=v.top {
                    for e in grid.incident_edges(v.x, v.y, l) {
                        f(e, delta_via);
                    }
                }
            }
        }
    }
}

pub fn commit(demand: &mut DemandMap, sol: &NetSolution, grid: &GridGraph, delta_via: f64) {
    sol.for_each_demand(grid, delta_via, |e, a| demand.add(e, a));
}

/// Demand of a complete solution rebuilt from scratch, nets in order.
pub fn demand_from_solutions(sols: &[NetSolution], grid: &GridGraph, delta_via: f64) -> DemandMap {
    let mut d = DemandMap::zeros(grid);
    for s in sols {
        commit(&mut d, s, grid, delta_via);
    }
    d
}

pub fn write_solutions(sols: &[NetSolution], netlist: &Netlist) -> String {
    let mut s = String::new();
    for sol in sols {
        writeln!(s, "net {}", netlist.nets[sol.net].name).unwrap();
        for w in &sol.wires {
            writeln!(s, "wire {} {} {} {} {}", w.x1, w.y1, w.x2, w.y2, w.layer).unwrap();
        }
        for v in &sol.vias {
            writeln!(s, "via {} {} {} {}", v.x, v.y, v.bottom, v.top).unwrap();
        }
    }
    s
}

pub fn load_solutions(
    path: &Path,
    netlist: &Netlist,
    grid: &GridGraph,
) -> Result<Vec<NetSolution>> {
    parse_solutions(&read_file(path)?, netlist, grid)
}

/// Parses a solution file into one entry per netlist net, in net order.
pub fn parse_solutions(
    text: &str,
    netlist: &Netlist,
    grid: &GridGraph,
) -> Result<Vec<NetSolution>> {
    let mut sols: Vec<Option<NetSolution>> = vec![None; netlist.nets.len()];
    let mut cur: Option<NetId> = None;
    for (line, toks) in lines(text) {
        let mut t = Tokens::new(line, &toks);
        match t.word("keyword")? {
            "net" => {
                let name = t.word("net id")?;
                t.end()?;
                let id = netlist
                    .net_id(name)
                    .or_else(|| {
                        name.parse()
                            .ok()
                            .filter(|&i: &usize| i < netlist.nets.len())
                    })
                    .ok_or_else(|| Error::parse(line, format!("unknown net '{name}'")))?;
                if sols[id].is_some() {
                    return Err(Error::parse(line, format!("net '{name}' repeated")));
                }
                sols[id] = Some(NetSolution::empty(id));
                cur = Some(id);
            }
            kw @ ("wire" | "via") => {
                let id = cur.ok_or_else(|| Error::parse(line, format!("'{kw}' before 'net'")))?;
                let sol = sols[id].as_mut().unwrap();
                if kw == "wire" {
                    let w = Wire {
                        x1: t.num("x1")?,
                        y1: t.num("y1")?,
                        x2: t.num("x2")?,
                        y2: t.num("y2")?,
                        layer: t.num("layer")?,
                    };
                    t.end()?;
                    let ok = (w.x1, w.y1) != (w.x2, w.y2)
                        && w.layer < grid.num_layers()
                        && grid
                            .run_edges((w.x1, w.y1), (w.x2, w.y2), w.layer)
                            .is_some();
                    if !ok {
                        return Err(Error::parse(
                            line,
                            "wire off grid or against layer direction",
                        ));
                    }
                    sol.wires.push(w);
                } else {
                    let v = Via {
                        x: t.num("x")?,
                        y: t.num("y")?,
                        bottom: t.num("bottom layer")?,
                        top: t.num("top layer")?,
                    };
                    t.end()?;
                    if !grid.contains(v.x, v.y) || v.bottom >= v.top || v.top >= grid.num_layers() {
                        return Err(Error::parse(line, "bad via"));
                    }
                    sol.vias.push(v);
                }
            }
            k => return Err(Error::parse(line, format!("unknown keyword '{k}'"))),
        }
    }
    sols.into_iter()
        .enumerate()
        .map(|(i, s)| {
            s.ok_or_else(|| {
                Error::Invalid(format!(
                    "net {} missing from solution",
                    netlist.nets[i].name
                ))
            })
        })
        .collect()
}
