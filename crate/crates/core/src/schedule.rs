// SPDX-License-Identifier: Apache-2.0
//! Net ordering and batching.
//!
//! Nets crossed by many critical paths go first, then nets whose slack is
//! close to the worst, then everything else in a congestion-friendly order.
//! Each class is split into buckets and each bucket into batches; nets in a
//! batch are assigned together against one demand snapshot.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::design::{Design, NetId, Netlist};
use crate::sta::Timing;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NetClass {
    Critical,
    SemiCritical,
    NonCritical,
}

impl NetClass {
    pub fn name(self) -> &'static str {
        match self {
            NetClass::Critical => "critical",
            NetClass::SemiCritical => "semi-critical",
            NetClass::NonCritical => "non-critical",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetCriticality {
    pub net: NetId,
    pub count: usize,
    /// Smallest finite pin slack of the net, or +inf.
    pub slack: f64,
    pub class: NetClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub index: usize,
    pub class: NetClass,
    pub nets: Vec<NetId>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleParams {
    /// Nets crossed by more than `th` critical paths are critical.
    pub th: usize,
    pub alpha: f64,
    pub batch_cap: usize,
    /// When false every net is ordered by the congestion key alone.
    pub ordering: bool,
}

impl Default for ScheduleParams {
    fn default() -> Self {
        ScheduleParams {
            th: 3,
            alpha: 0.7,
            batch_cap: 4096,
            ordering: true,
        }
    }
}

pub fn net_slacks(netlist: &Netlist, timing: &Timing) -> Vec<f64> {
    netlist
        .nets
        .iter()
        .map(|n| {
            n.pins()
                .map(|p| timing.slack[p])
                .filter(|s| s.is_finite())
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

pub fn classify(count: usize, slack: f64, wns: f64, th: usize, alpha: f64) -> NetClass {
    if count > th {
        NetClass::Critical
    } else if wns < 0.0 && slack < alpha * wns {
        NetClass::SemiCritical
    } else {
        NetClass::NonCritical
    }
}

/// Band of a critical net: 0 for the top count `c_max`, then `i` for counts in
/// `[c_max / 2^i, c_max / 2^(i-1))`.
pub fn critical_band(count: usize, c_max: usize) -> usize {
    if count >= c_max {
        return 0;
    }
    let mut i = 1;
    while (count as f64) < c_max as f64 / f64::powi(2.0, i as i32) {
        i += 1;
    }
    i
}

/// Lower edges of the slack-ratio bands, widening threefold each step and
/// stopping before `alpha`: 1, 0.99, 0.96, 0.87 for the default alpha.
pub fn slack_band_edges(alpha: f64) -> Vec<f64> {
    let mut edges = Vec::new();
    let mut steps = 0u64;
    let mut width = 1u64;
    loop {
        let edge = 1.0 - 0.01 * steps as f64;
        if edge <= alpha {
            break;
        }
        edges.push(edge);
        steps += width;
        width *= 3;
    }
    edges
}

/// Band of a semi-critical net by `slack / wns`: 0 at or beyond WNS, then one
/// band per interval between consecutive edges, the last reaching `alpha`.
pub fn slack_band(slack: f64, wns: f64, edges: &[f64]) -> usize {
    let ratio = slack / wns;
    edges.iter().filter(|&&e| ratio < e).count()
}

/// Ascending wirelength, then pin count, then id.
fn congestion_order(design: &Design, nets: &mut [NetId]) {
    let key = |n: NetId| {
        (
            design.route(n).wirelength(),
            design.netlist.nets[n].sinks.len() + 1,
            n,
        )
    };
    nets.sort_by_key(|&n| key(n));
}

pub fn criticality(
    counts: &[usize],
    slacks: &[f64],
    wns: f64,
    params: &ScheduleParams,
) -> Vec<NetCriticality> {
    counts
        .iter()
        .zip(slacks)
        .enumerate()
        .map(|(net, (&count, &slack))| NetCriticality {
            net,
            count,
            slack,
            class: classify(count, slack, wns, params.th, params.alpha),
        })
        .collect()
}

/// Orders all nets and splits them into batches.
pub fn make_batches(
    design: &Design,
    crit: &[NetCriticality],
    wns: f64,
    params: &ScheduleParams,
) -> Vec<Batch> {
    let cap = params.batch_cap.max(1);
    let mut buckets: Vec<(NetClass, Vec<NetId>)> = Vec::new();

    if params.ordering {
        let critical: Vec<&NetCriticality> = crit
            .iter()
            .filter(|c| c.class == NetClass::Critical)
            .collect();
        let c_max = critical.iter().map(|c| c.count).max().unwrap_or(0);
        let mut banded: Vec<(usize, usize, NetId)> = critical
            .iter()
            .map(|c| (critical_band(c.count, c_max), usize::MAX - c.count, c.net))
            .collect();
        banded.sort_unstable();
        push_bands(
            &mut buckets,
            NetClass::Critical,
            banded.into_iter().map(|(b, _, n)| (b, n)),
        );

        let edges = slack_band_edges(params.alpha);
        let mut semi: Vec<&NetCriticality> = crit
            .iter()
            .filter(|c| c.class == NetClass::SemiCritical)
            .collect();
        semi.sort_by(|a, b| a.slack.total_cmp(&b.slack).then(a.net.cmp(&b.net)));
        push_bands(
            &mut buckets,
            NetClass::SemiCritical,
            semi.iter()
                .map(|c| (slack_band(c.slack, wns, &edges), c.net)),
        );
    }

    let mut rest: Vec<NetId> = crit
        .iter()
        .filter(|c| !params.ordering || c.class == NetClass::NonCritical)
        .map(|c| c.net)
        .collect();
    congestion_order(design, &mut rest);
    if !rest.is_empty() {
        buckets.push((NetClass::NonCritical, rest));
    }

    let mut batches = Vec::new();
    for (class, nets) in buckets {
        for chunk in nets.chunks(cap) {
            batches.push(Batch {
                index: batches.len(),
                class,
                nets: chunk.to_vec(),
            });
        }
    }
    batches
}

fn push_bands(
    buckets: &mut Vec<(NetClass, Vec<NetId>)>,
    class: NetClass,
    sorted: impl Iterator<Item = (usize, NetId)>,
) {
    let mut current = None;
    for (band, net) in sorted {
        if current != Some(band) {
            buckets.push((class, Vec::new()));
            current = Some(band);
        }
        buckets.last_mut().unwrap().1.push(net);
    }
}

pub fn dump_batches(batches: &[Batch], netlist: &Netlist) -> String {
    let mut s = String::new();
    for b in batches {
        write!(s, "batch {} {} {}", b.index, b.class.name(), b.nets.len()).unwrap();
        for &n in &b.nets {
            write!(s, " {}", netlist.nets[n].name).unwrap();
        }
        s.push('\n');
    }
    s
}
