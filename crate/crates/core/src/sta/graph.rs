// SPDX-License-Identifier: Apache-2.0
//! Pin-level timing graph and arrival/required propagation.
//!
//! Vertices are pins. Cell arcs take their delay and output slew from NLDM
//! tables indexed by input slew and the total capacitance of the net the arc
//! drives; net arcs take the Elmore delay to the sink and pass the slew
//! through. Both passes walk topological levels, evaluating every pin of a
//! level in parallel.

use rayon::prelude::*;

use super::rc::RcTree;
use crate::design::{NetId, Netlist, PinId};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcKind {
    /// Index into `Netlist::arcs`.
    Cell(usize),
    Net(NetId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimingArc {
    pub from: PinId,
    pub to: PinId,
    pub kind: ArcKind,
}

#[derive(Debug, Clone)]
pub struct TimingGraph {
    pub arcs: Vec<TimingArc>,
    pub fanin: Vec<Vec<usize>>,
    pub fanout: Vec<Vec<usize>>,
    /// Pins grouped by longest distance from a source.
    pub levels: Vec<Vec<PinId>>,
    driven_net: Vec<Option<NetId>>,
}

impl TimingGraph {
    pub fn build(netlist: &Netlist) -> Result<TimingGraph> {
        let n = netlist.pins.len();
        let mut arcs = Vec::with_capacity(netlist.arcs.len() + netlist.pins.len());
        for (i, a) in netlist.arcs.iter().enumerate() {
            arcs.push(TimingArc {
                from: a.from,
                to: a.to,
                kind: ArcKind::Cell(i),
            });
        }
        for (id, net) in netlist.nets.iter().enumerate() {
            for &s in &net.sinks {
                arcs.push(TimingArc {
                    from: net.driver,
                    to: s,
                    kind: ArcKind::Net(id),
                });
            }
        }
        let mut fanin = vec![Vec::new(); n];
        let mut fanout = vec![Vec::new(); n];
        for (i, a) in arcs.iter().enumerate() {
            fanout[a.from].push(i);
            fanin[a.to].push(i);
        }

        let mut indeg: Vec<usize> = fanin.iter().map(Vec::len).collect();
        let mut levels = Vec::new();
        let mut frontier: Vec<PinId> = (0..n).filter(|&p| indeg[p] == 0).collect();
        let mut placed = 0;
        while !frontier.is_empty() {
            placed += frontier.len();
            let mut next = Vec::new();
            for &u in &frontier {
                for &a in &fanout[u] {
                    let v = arcs[a].to;
                    indeg[v] -= 1;
                    if indeg[v] == 0 {
                        next.push(v);
                    }
                }
            }
            next.sort_unstable();
            levels.push(frontier);
            frontier = next;
        }
        if placed != n {
            let p = (0..n).find(|&p| indeg[p] > 0).unwrap();
            return Err(Error::TimingCycle(netlist.pins[p].name.clone()));
        }

        let mut driven_net = vec![None; n];
        for (id, net) in netlist.nets.iter().enumerate() {
            driven_net[net.driver] = Some(id);
        }
        Ok(TimingGraph {
            arcs,
            fanin,
            fanout,
            levels,
            driven_net,
        })
    }

    pub fn num_pins(&self) -> usize {
        self.fanin.len()
    }

    pub fn driven_net(&self, pin: PinId) -> Option<NetId> {
        self.driven_net[pin]
    }
}

/// Result of one full analysis. Unconstrained pins have infinite required
/// time and slack.
#[derive(Debug, Clone)]
pub struct Timing {
    pub arrival: Vec<f64>,
    pub slew: Vec<f64>,
    pub required: Vec<f64>,
    pub slack: Vec<f64>,
    pub arc_delay: Vec<f64>,
    /// Worst endpoint slack, clipped at zero.
    pub wns: f64,
    /// Sum of negative endpoint slacks.
    pub tns: f64,
    pub endpoints: Vec<PinId>,
}

impl Timing {
    pub fn endpoint_slacks(&self) -> Vec<(PinId, f64)> {
        self.endpoints.iter().map(|&p| (p, self.slack[p])).collect()
    }

    pub fn num_violations(&self) -> usize {
        self.endpoints
            .iter()
            .filter(|&&p| self.slack[p] < 0.0)
            .count()
    }
}

const MIN_PAR: usize = 512;

/// Runs a full forward and backward pass. `rc` holds one tree per net.
pub fn propagate(graph: &TimingGraph, netlist: &Netlist, rc: &[RcTree]) -> Timing {
    let n = graph.num_pins();
    let load: Vec<f64> = rc.par_iter().map(RcTree::total_cap).collect();
    let elmore: Vec<Vec<(PinId, f64)>> = rc.par_iter().map(RcTree::pin_delays).collect();
    let net_delay = |net: NetId, sink: PinId| {
        elmore[net]
            .iter()
            .find(|(p, _)| *p == sink)
            .map(|(_, d)| *d)
            .expect("every sink has an RC node")
    };

    let mut pi: Vec<Option<(f64, f64)>> = vec![None; n];
    for i in &netlist.inputs {
        pi[i.pin] = Some((i.arrival, i.slew));
    }

    let mut arrival = vec![0.0; n];
    let mut slew = vec![0.0; n];
    let mut arc_delay = vec![0.0; graph.arcs.len()];
    for level in &graph.levels {
        let out: Vec<(f64, f64, Vec<(usize, f64)>)> = level
            .par_iter()
            .with_min_len(MIN_PAR)
            .map(|&v| {
                let mut arr = f64::NEG_INFINITY;
                let mut sl: f64 = 0.0;
                let mut delays = Vec::with_capacity(graph.fanin[v].len());
                for &a in &graph.fanin[v] {
                    let arc = &graph.arcs[a];
                    let (d, s) = match arc.kind {
                        ArcKind::Cell(i) => {
                            let c = &netlist.arcs[i];
                            let l = graph.driven_net[arc.to].map_or(0.0, |net| load[net]);
                            let s_in = slew[arc.from];
                            (c.delay.lookup(s_in, l), c.slew.lookup(s_in, l))
                        }
                        ArcKind::Net(net) => (net_delay(net, v), slew[arc.from]),
                    };
                    arr = arr.max(arrival[arc.from] + d);
                    sl = sl.max(s);
                    delays.push((a, d));
                }
                match pi[v] {
                    Some((a, s)) => (a, s, delays),
                    None if delays.is_empty() => (0.0, 0.0, delays),
                    None => (arr, sl, delays),
                }
            })
            .collect();
        for (&v, (a, s, delays)) in level.iter().zip(out) {
            arrival[v] = a;
            slew[v] = s;
            for (arc, d) in delays {
                arc_delay[arc] = d;
            }
        }
    }

    let mut po_req = vec![f64::INFINITY; n];
    let mut endpoints = Vec::with_capacity(netlist.outputs.len());
    for po in &netlist.outputs {
        if let Some(r) = netlist.required(po) {
            po_req[po.pin] = po_req[po.pin].min(r);
        }
        endpoints.push(po.pin);
    }
    let mut required = po_req.clone();
    for level in graph.levels.iter().rev() {
        let out: Vec<f64> = level
            .par_iter()
            .with_min_len(MIN_PAR)
            .map(|&u| {
                graph.fanout[u]
                    .iter()
                    .map(|&a| required[graph.arcs[a].to] - arc_delay[a])
                    .fold(po_req[u], f64::min)
            })
            .collect();
        for (&u, r) in level.iter().zip(out) {
            required[u] = r;
        }
    }

    let slack: Vec<f64> = required.iter().zip(&arrival).map(|(r, a)| r - a).collect();
    let mut wns: f64 = 0.0;
    let mut tns = 0.0;
    for &p in &endpoints {
        wns = wns.min(slack[p]);
        tns += slack[p].min(0.0);
    }
    Timing {
        arrival,
        slew,
        required,
        slack,
        arc_delay,
        wns,
        tns,
        endpoints,
    }
}
