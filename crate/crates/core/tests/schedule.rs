// SPDX-License-Identifier: Apache-2.0

mod common;

use common::two_po;
use layassign::gen::{generate, GenSpec};
use layassign::pipeline::{plan, RunConfig};
use layassign::schedule::NetClass;
use layassign::sta::{critical_paths, criticality_counts, propagate, rc_trees_2d, TimingGraph};

#[test]
fn two_po_counts() {
    let d = two_po();
    let rc = rc_trees_2d(&d).unwrap();
    let g = TimingGraph::build(&d.netlist).unwrap();
    let t = propagate(&g, &d.netlist, &rc);
    assert!(t.wns < 0.0);
    let paths = critical_paths(&g, &t, &d.netlist, 0.7);
    assert_eq!(paths.len(), 2);
    let counts = criticality_counts(&paths, d.num_nets());
    let by_name = |n: &str| counts[d.netlist.net_id(n).unwrap()];
    assert_eq!(by_name("n2"), 2);
    for n in ["n4", "n5", "n6", "n7"] {
        assert_eq!(by_name(n), 1, "{n}");
    }
    assert_eq!(by_name("n1"), 0);
    assert_eq!(by_name("n3"), 0);
}

#[test]
fn two_po_shared_net_goes_first() {
    let d = two_po();
    let cfg = RunConfig {
        th: 1,
        ..Default::default()
    };
    let p = plan(&d, &cfg).unwrap();
    let n2 = d.netlist.net_id("n2").unwrap();
    assert_eq!(p.batches[0].class, NetClass::Critical);
    assert_eq!(p.batches[0].nets, vec![n2]);
}

#[test]
fn batches_partition_and_respect_class_order() {
    let d = generate(&GenSpec {
        nx: 32,
        ny: 32,
        layers: 4,
        nets: 600,
        seed: 9,
        ..Default::default()
    })
    .unwrap();
    for cfg in [
        RunConfig {
            th: 1,
            batch_cap: 17,
            ..Default::default()
        },
        RunConfig {
            ordering: false,
            batch_cap: 50,
            ..Default::default()
        },
    ] {
        let p = plan(&d, &cfg).unwrap();
        let mut seen = vec![0; d.num_nets()];
        let mut last_class = 0;
        for (i, b) in p.batches.iter().enumerate() {
            assert_eq!(b.index, i);
            assert!(!b.nets.is_empty() && b.nets.len() <= cfg.batch_cap);
            let rank = b.class as usize;
            assert!(rank >= last_class);
            last_class = rank;
            for &n in &b.nets {
                seen[n] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
    }
}
