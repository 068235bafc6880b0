// SPDX-License-Identifier: Apache-2.0

use std::collections::VecDeque;
use std::fmt;

use super::{GridGraph, Netlist, RouteSet, Tech};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}", self.message)
    }
}

/// Cross-checks the four inputs. An empty report means the design is runnable.
pub fn validate_design(
    tech: &Tech,
    grid: &GridGraph,
    netlist: &Netlist,
    routes: &RouteSet,
) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut err = |m: String| {
        out.push(Diagnostic {
            severity: Severity::Error,
            message: m,
        })
    };

    if grid.num_layers() != tech.num_layers() {
        err(format!(
            "grid has {} layers, tech has {}",
            grid.num_layers(),
            tech.num_layers()
        ));
    }
    for p in &netlist.pins {
        if !grid.contains(p.x, p.y) {
            err(format!("pin {} at ({}, {}) outside grid", p.name, p.x, p.y));
        }
        if p.layer >= tech.num_layers() {
            err(format!(
                "pin {} on layer {} >= L = {}",
                p.name,
                p.layer,
                tech.num_layers()
            ));
        }
    }

    let mut owner: Vec<Option<usize>> = vec![None; netlist.pins.len()];
    for (id, net) in netlist.nets.iter().enumerate() {
        for p in net.pins() {
            if let Some(prev) = owner[p] {
                err(format!(
                    "pin {} belongs to nets {} and {}",
                    netlist.pins[p].name, netlist.nets[prev].name, net.name
                ));
            }
            owner[p] = Some(id);
        }
        let Some(route) = routes.get(&net.name) else {
            err(format!("net {} has no route", net.name));
            continue;
        };
        if !route.within(grid) {
            err(format!("net {} route leaves the grid", net.name));
        }
        if route.segments.is_empty() {
            let first = &netlist.pins[net.driver];
            if net
                .pins()
                .any(|p| (netlist.pins[p].x, netlist.pins[p].y) != (first.x, first.y))
            {
                err(format!(
                    "net {} has no segments but spans several GCells",
                    net.name
                ));
            }
        } else {
            for p in net.pins() {
                let pin = &netlist.pins[p];
                if !route.touches((pin.x, pin.y)) {
                    err(format!("net {} route misses pin {}", net.name, pin.name));
                }
            }
        }
    }
    for r in &routes.routes {
        if netlist.net_id(&r.net).is_none() {
            err(format!("route for unknown net {}", r.net));
        }
    }
    for po in &netlist.outputs {
        if netlist.required(po).is_none() {
            err(format!(
                "primary output {} has no required time and no clock",
                netlist.pins[po.pin].name
            ));
        }
    }
    if let Some(p) = timing_cycle(netlist) {
        err(format!(
            "timing graph has a cycle through pin {}",
            netlist.pins[p].name
        ));
    }

    for net in &netlist.nets {
        if net.sinks.is_empty() {
            out.push(Diagnostic {
                severity: Severity::Warning,
                message: format!("net {} has no sinks", net.name),
            });
        }
    }
    out
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(|d| d.severity == Severity::Error)
}

/// A pin on a cycle of the pin graph, if any.
fn timing_cycle(netlist: &Netlist) -> Option<usize> {
    let n = netlist.pins.len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for a in &netlist.arcs {
        succ[a.from].push(a.to);
    }
    for net in &netlist.nets {
        succ[net.driver].extend(&net.sinks);
    }
    let mut indeg = vec![0usize; n];
    for s in succ.iter().flatten() {
        indeg[*s] += 1;
    }
    let mut q: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut seen = 0;
    while let Some(u) = q.pop_front() {
        seen += 1;
        for &v in &succ[u] {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                q.push_back(v);
            }
        }
    }
    (seen < n).then(|| (0..n).find(|&i| indeg[i] > 0).unwrap())
}
