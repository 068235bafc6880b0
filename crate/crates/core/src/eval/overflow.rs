// SPDX-License-Identifier: Apache-2.0
//! Per-edge overflow and its sum over the grid.

use serde::{Deserialize, Serialize};

use crate::design::{DemandMap, GridGraph, Tech};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OverflowModel {
    /// `ofw(l) * exp(s * (d - c))`, with `s` depending on whether `c > 0`.
    #[default]
    Exponential,
    /// `max(0, d - c)`.
    Legacy,
}

pub fn edge_overflow(model: OverflowModel, d: f64, c: f64, ofw: f64, tech: &Tech) -> f64 {
    match model {
        OverflowModel::Exponential => {
            let s = if c > 0.0 { tech.s_pos } else { tech.s_zero };
            ofw * (s * (d - c)).exp()
        }
        OverflowModel::Legacy => (d - c).max(0.0),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverflowReport {
    pub total: f64,
    pub per_layer: Vec<f64>,
}

/// Sums overflow layer by layer in edge order so the result does not depend
/// on how the work is split.
pub fn total_overflow(
    grid: &GridGraph,
    demand: &DemandMap,
    tech: &Tech,
    model: OverflowModel,
) -> OverflowReport {
    let per_layer: Vec<f64> = (0..grid.num_layers())
        .map(|l| {
            let ofw = tech.layers[l].ofw;
            grid.layer_range(l)
                .map(|e| edge_overflow(model, demand.get(e), grid.capacity(e), ofw, tech))
                .sum()
        })
        .collect();
    OverflowReport {
        total: per_layer.iter().sum(),
        per_layer,
    }
}
