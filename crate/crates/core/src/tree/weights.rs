// SPDX-License-Identifier: Apache-2.0
//! Sink-criticality weights and upstream-resistance estimates.

use super::LaTree;
use crate::design::PinId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PinWeightForm {
    /// `1 / (1 + exp(-k (slack/wns - b)))`
    Logistic,
    /// `1 / (1 + k (slack/wns - b))`, clamped into `[0, 1]`
    Rational,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinWeightParams {
    pub k: f64,
    pub b: f64,
    pub form: PinWeightForm,
    /// Weight of every pin when the design has no negative slack.
    pub floor: f64,
}

impl Default for PinWeightParams {
    fn default() -> Self {
        PinWeightParams {
            k: 10.0,
            b: 0.3,
            form: PinWeightForm::Logistic,
            floor: 0.05,
        }
    }
}

/// Criticality weight of a sink from its slack relative to the worst negative slack.
pub fn pin_weight(slack: f64, wns: f64, p: &PinWeightParams) -> f64 {
    if wns >= 0.0 {
        return p.floor;
    }
    let ratio = slack / wns;
    match p.form {
        PinWeightForm::Logistic => 1.0 / (1.0 + (-p.k * (ratio - p.b)).exp()),
        PinWeightForm::Rational => {
            let den = 1.0 + p.k * (ratio - p.b);
            if den <= 1.0 {
                1.0
            } else {
                1.0 / den
            }
        }
    }
}

/// Sets each edge weight to the largest sink weight in the subtree below it.
pub fn edge_weights(tree: &mut LaTree, sink_weight: impl Fn(PinId) -> f64) {
    let mut w = vec![0.0f64; tree.len()];
    for i in (0..tree.len()).rev() {
        let node = &tree.nodes[i];
        let own = node
            .sink_pins()
            .map(|p| sink_weight(p.pin))
            .fold(0.0, f64::max);
        let below = node.children.iter().map(|&c| w[c]).fold(0.0, f64::max);
        w[i] = own.max(below);
    }
    tree.weight = w;
}

/// `ur(root) = drive`, `ur(child) = ur(parent) + r_avg * len`.
pub fn upstream_resistance(tree: &mut LaTree, r_avg: f64, drive: f64) {
    let mut ur = vec![0.0; tree.len()];
    for i in 0..tree.len() {
        ur[i] = match tree.nodes[i].parent {
            None => drive,
            Some(p) => ur[p] + r_avg * tree.nodes[i].len as f64,
        };
    }
    tree.ur = ur;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::tests::fixture;
    use proptest::prelude::*;

    #[test]
    fn logistic_reference_points() {
        let p = PinWeightParams::default();
        // ratio 1: 1 / (1 + e^-7)
        let w1 = pin_weight(-50.0, -50.0, &p);
        assert!((w1 - 1.0 / (1.0 + (-7.0f64).exp())).abs() < 1e-15);
        assert!((w1 - 0.99909).abs() < 1e-5);
        assert!((pin_weight(-15.0, -50.0, &p) - 0.5).abs() < 1e-12);
        // ratio 0: 1 / (1 + e^3)
        let w0 = pin_weight(0.0, -50.0, &p);
        assert!((w0 - 0.0474259).abs() < 1e-6);
    }

    #[test]
    fn clean_design_uses_floor() {
        let p = PinWeightParams::default();
        assert_eq!(pin_weight(10.0, 0.0, &p), 0.05);
        assert_eq!(pin_weight(-1.0, 5.0, &p), 0.05);
    }

    #[test]
    fn rational_form_as_printed() {
        let p = PinWeightParams {
            form: PinWeightForm::Rational,
            ..Default::default()
        };
        // ratio 1: 1 / (1 + 10 * 0.7) = 0.125
        assert!((pin_weight(-2.0, -2.0, &p) - 0.125).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn weight_strictly_inside_unit_interval(slack in -1e3f64..1e3, wns in -1e3f64..-1e-3) {
            // moderate ratios keep exp() away from saturating to exactly 0 or 1
            prop_assume!((slack / wns).abs() < 3.0);
            let w = pin_weight(slack, wns, &PinWeightParams::default());
            prop_assert!(w > 0.0 && w < 1.0);
        }
    }

    fn two_sink() -> LaTree {
        // sink s1 at (6,2) via bend, sink s2 at (3,0)
        let (nl, rs) = fixture(
            "pin d 0 2 0\npin s2 3 0 0\npin s1 6 5 0\nnet n d s2 s1\n",
            "net n\nseg 0 2 6 2\nseg 3 2 3 0\nseg 6 2 6 5\n",
        );
        LaTree::build(&rs.routes[0], &nl, 0).unwrap()
    }

    #[test]
    fn edge_weight_is_subtree_max() {
        let mut t = two_sink();
        let p = PinWeightParams::default();
        // sink 1 slack -1, sink 2 slack -100, WNS -100
        let ws = [
            0.0,
            pin_weight(-100.0, -100.0, &p),
            pin_weight(-1.0, -100.0, &p),
        ];
        edge_weights(&mut t, |pin| ws[pin]);
        let s2 = t.nodes.iter().position(|n| n.pos() == (3, 0)).unwrap();
        let s1 = t.nodes.iter().position(|n| n.pos() == (6, 5)).unwrap();
        let bend = t.nodes.iter().position(|n| n.pos() == (6, 2)).unwrap();
        assert!(t.weight[s2] > t.weight[s1]);
        assert_eq!(t.weight[bend], t.weight[s1]);
        assert_eq!(t.weight[0], ws[1]);
        for i in 1..t.len() {
            assert!(t.weight[t.nodes[i].parent.unwrap()] >= t.weight[i]);
        }
    }

    #[test]
    fn upstream_resistance_accumulates() {
        let mut t = two_sink();
        upstream_resistance(&mut t, 0.02, 1.0);
        assert_eq!(t.ur[0], 1.0);
        let s2 = t.nodes.iter().position(|n| n.pos() == (3, 0)).unwrap();
        // root → (3,2) is 3 GCells, (3,2) → (3,0) is 2: 5 in total
        assert!((t.ur[s2] - 1.1).abs() < 1e-12);
        let bend = t.nodes.iter().position(|n| n.pos() == (6, 2)).unwrap();
        let s1 = t.nodes.iter().position(|n| n.pos() == (6, 5)).unwrap();
        assert!(t.ur[s1] > t.ur[bend] && t.ur[bend] > t.ur[0]);
    }
}
