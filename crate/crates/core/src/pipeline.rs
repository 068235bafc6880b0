// SPDX-License-Identifier: Apache-2.0
//! End-to-end assignment: 2D timing, net ordering, per-batch DP, commit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assign::{assign_batch, commit, CostCtx, CostWeights, NetSolution};
use crate::design::{DemandMap, Design};
use crate::eval::{evaluate, EvalOptions, Evaluation, OverflowModel, PowerParams, ScoreWeights};
use crate::schedule::{
    criticality, make_batches, net_slacks, Batch, NetCriticality, ScheduleParams,
};
use crate::sta::{
    critical_paths, criticality_counts, propagate, rc_trees_2d, Timing, TimingGraph, TimingPath,
};
use crate::tree::{
    edge_weights, pin_weight, upstream_resistance, LaTree, PinWeightForm, PinWeightParams,
};
use crate::{Error, Result};

/// Every tunable of a run. Missing fields in a config file take the defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub alpha: f64,
    pub th: usize,
    pub k: f64,
    pub b: f64,
    pub pin_weight_form: PinWeightForm,
    pub weight_floor: f64,
    pub w_d: f64,
    pub w_cap: f64,
    pub w_cong: f64,
    pub delta_via: f64,
    pub p_via: f64,
    pub batch_cap: usize,
    /// Recorded with the run; assignment itself draws no random numbers.
    pub seed: u64,
    pub threads: Option<usize>,
    pub overflow: OverflowModel,
    pub ordering: bool,
    pub lookahead: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let s = ScheduleParams::default();
        let p = PinWeightParams::default();
        let w = CostWeights::default();
        RunConfig {
            alpha: s.alpha,
            th: s.th,
            k: p.k,
            b: p.b,
            pin_weight_form: p.form,
            weight_floor: p.floor,
            w_d: w.w_d,
            w_cap: w.w_cap,
            w_cong: w.w_cong,
            delta_via: w.delta_via,
            p_via: w.p_via,
            batch_cap: s.batch_cap,
            seed: 0,
            threads: None,
            overflow: OverflowModel::default(),
            ordering: s.ordering,
            lookahead: w.lookahead,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("w_d", self.w_d),
            ("w_cap", self.w_cap),
            ("w_cong", self.w_cong),
            ("delta_via", self.delta_via),
            ("p_via", self.p_via),
            ("k", self.k),
        ];
        for (name, v) in nonneg {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Invalid(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Invalid(format!(
                "alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        if !self.b.is_finite() || !(0.0..=1.0).contains(&self.weight_floor) {
            return Err(Error::Invalid(
                "b must be finite and weight_floor in [0, 1]".into(),
            ));
        }
        if self.batch_cap == 0 {
            return Err(Error::Invalid("batch_cap must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Invalid("threads must be positive".into()));
        }
        Ok(())
    }

    pub fn cost_weights(&self) -> CostWeights {
        CostWeights {
            w_d: self.w_d,
            w_cap: self.w_cap,
            w_cong: self.w_cong,
            delta_via: self.delta_via,
            p_via: self.p_via,
            lookahead: self.lookahead,
        }
    }

    pub fn schedule_params(&self) -> ScheduleParams {
        ScheduleParams {
            th: self.th,
            alpha: self.alpha,
            batch_cap: self.batch_cap,
            ordering: self.ordering,
        }
    }

    pub fn pin_weight_params(&self) -> PinWeightParams {
        PinWeightParams {
            k: self.k,
            b: self.b,
            form: self.pin_weight_form,
            floor: self.weight_floor,
        }
    }

    pub fn eval_options(&self) -> EvalOptions {
        EvalOptions {
            overflow: self.overflow,
            power: PowerParams::default(),
            delta_via: self.delta_via,
        }
    }
}

/// Runs `f` on a dedicated pool when a thread count is given.
pub fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Everything decided before any layer is assigned.
pub struct Plan {
    pub graph: TimingGraph,
    pub timing: Timing,
    pub paths: Vec<TimingPath>,
    pub criticality: Vec<NetCriticality>,
    pub batches: Vec<Batch>,
    pub trees: Vec<LaTree>,
}

pub fn plan(design: &Design, cfg: &RunConfig) -> Result<Plan> {
    let rc = rc_trees_2d(design)?;
    let graph = TimingGraph::build(&design.netlist)?;
    let timing = propagate(&graph, &design.netlist, &rc);
    let paths = critical_paths(&graph, &timing, &design.netlist, cfg.alpha);
    let counts = criticality_counts(&paths, design.num_nets());
    let slacks = net_slacks(&design.netlist, &timing);
    let sched = cfg.schedule_params();
    let crit = criticality(&counts, &slacks, timing.wns, &sched);
    let batches = make_batches(design, &crit, timing.wns, &sched);
    log::info!(
        "2D timing: wns {:.3} tns {:.3}, {} critical paths, {} batches",
        timing.wns,
        timing.tns,
        paths.len(),
        batches.len()
    );

    let pw = cfg.pin_weight_params();
    let trees = (0..design.num_nets())
        .into_par_iter()
        .map(|n| {
            let mut t = LaTree::build(design.route(n), &design.netlist, n)?;
            edge_weights(&mut t, |p| pin_weight(timing.slack[p], timing.wns, &pw));
            let drive = design
                .netlist
                .drive_resistance(design.netlist.nets[n].driver);
            upstream_resistance(&mut t, design.tech.r_avg, drive);
            Ok(t)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Plan {
        graph,
        timing,
        paths,
        criticality: crit,
        batches,
        trees,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunStats {
    pub batches: usize,
    /// Largest combined DP table size of one batch.
    pub peak_batch_state_bytes: usize,
    /// Tree nodes times layers in that batch.
    pub peak_batch_node_layers: usize,
    pub max_scratch_bytes: usize,
}

pub struct AssignOutcome {
    pub plan: Plan,
    /// Indexed by net id.
    pub solutions: Vec<NetSolution>,
    pub demand: DemandMap,
    pub stats: RunStats,
}

/// Assigns every net batch by batch. Each batch reads the demand left by
/// the batches before it; its own demand is committed in net order.
pub fn run_assign(design: &Design, cfg: &RunConfig) -> Result<AssignOutcome> {
    cfg.validate()?;
    let plan = plan(design, cfg)?;
    let weights = cfg.cost_weights();
    let layers = design.tech.num_layers();
    let mut demand = DemandMap::zeros(&design.grid);
    let mut solutions: Vec<Option<NetSolution>> = vec![None; design.num_nets()];
    let mut stats = RunStats::default();
    for batch in &plan.batches {
        let out = {
            let ctx = CostCtx {
                tech: &design.tech,
                grid: &design.grid,
                demand: demand.values(),
                weights,
                model: cfg.overflow,
            };
            assign_batch(&plan.trees, &batch.nets, &ctx)
        };
        stats.batches += 1;
        log::debug!(
            "batch {} ({}, {} nets, {} nodes)",
            batch.index,
            batch.class.name(),
            batch.nets.len(),
            out.nodes
        );
        if out.state_bytes > stats.peak_batch_state_bytes {
            stats.peak_batch_state_bytes = out.state_bytes;
            stats.peak_batch_node_layers = out.nodes * layers;
        }
        stats.max_scratch_bytes = stats.max_scratch_bytes.max(out.max_scratch_bytes);
        for sol in out.solutions {
            commit(&mut demand, &sol, &design.grid, weights.delta_via);
            let net = sol.net;
            solutions[net] = Some(sol);
        }
    }
    let solutions = solutions
        .into_iter()
        .map(|s| s.expect("batches cover every net"))
        .collect();
    Ok(AssignOutcome {
        plan,
        solutions,
        demand,
        stats,
    })
}

/// Assigns and then scores the result with the 3D timing model.
pub fn assign_and_evaluate(
    design: &Design,
    cfg: &RunConfig,
    weights: Option<&ScoreWeights>,
) -> Result<(AssignOutcome, Evaluation)> {
    in_pool(cfg.threads, || {
        let out = run_assign(design, cfg)?;
        let ev = evaluate(design, &out.solutions, weights, &cfg.eval_options())?;
        Ok((out, ev))
    })?
}
