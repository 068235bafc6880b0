// SPDX-License-Identifier: Apache-2.0
//! `layassign` command-line tool.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use layassign::assign::{
    assign_net, load_solutions, oracle, write_solutions, CostCtx, NetSolution,
};
use layassign::design::{validate_design, DemandMap, Design, Severity};
use layassign::eval::{evaluate, heatmap_csv, OverflowModel, ScoreWeights};
use layassign::gen::{generate, write_design, GenSpec, FILE_NAMES};
use layassign::pipeline::{assign_and_evaluate, in_pool, plan, RunConfig};
use layassign::schedule::dump_batches;
use layassign::sta::{
    propagate, rc_trees_2d, rc_trees_3d, worst_paths, ArcKind, Timing, TimingGraph, TimingPath,
};
use layassign::tree::PinWeightForm;

#[derive(Parser)]
#[command(
    name = "layassign",
    version,
    about = "Timing-driven layer assignment for 2D global routes"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Assign layers to every net and print the score report.
    Assign(AssignArgs),
    /// Score an existing 3D solution.
    Evaluate(EvaluateArgs),
    /// Print the K worst paths, on the 2D estimate or a 3D solution.
    ReportTiming(ReportArgs),
    /// Write a synthetic design.
    Gen(GenArgs),
    /// Exhaustively solve one small net and compare with the DP.
    Oracle(OracleArgs),
    /// Print the net ordering and batches without assigning.
    DumpBatches(DumpArgs),
}

#[derive(Args, Clone)]
struct DesignArgs {
    /// Directory holding tech.txt, grid.txt, netlist.txt and routes.txt.
    #[arg(long, short = 'd')]
    design: Option<PathBuf>,
    #[arg(long)]
    tech: Option<PathBuf>,
    #[arg(long)]
    grid: Option<PathBuf>,
    #[arg(long)]
    netlist: Option<PathBuf>,
    #[arg(long)]
    routes: Option<PathBuf>,
}

impl DesignArgs {
    fn load(&self) -> Result<Design> {
        let pick = |explicit: &Option<PathBuf>, i: usize| -> Result<PathBuf> {
            match (explicit, &self.design) {
                (Some(p), _) => Ok(p.clone()),
                (None, Some(dir)) => Ok(dir.join(FILE_NAMES[i])),
                (None, None) => bail!(
                    "missing --design DIR or --{}",
                    FILE_NAMES[i].trim_end_matches(".txt")
                ),
            }
        };
        let paths = [
            pick(&self.tech, 0)?,
            pick(&self.grid, 1)?,
            pick(&self.netlist, 2)?,
            pick(&self.routes, 3)?,
        ];
        let design = Design::load(&paths[0], &paths[1], &paths[2], &paths[3])?;
        for d in validate_design(&design.tech, &design.grid, &design.netlist, &design.routes) {
            if d.severity == Severity::Warning {
                log::warn!("{}", d.message);
            }
        }
        log::info!(
            "loaded {} nets, {} pins, {}x{}x{} grid",
            design.num_nets(),
            design.netlist.pins.len(),
            design.grid.nx,
            design.grid.ny,
            design.tech.num_layers()
        );
        Ok(design)
    }
}

/// Run knobs. Anything given here overrides the config file.
#[derive(Args, Clone, Default)]
struct ConfigArgs {
    /// TOML file with any subset of the run settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Minimum critical-path count for a critical net.
    #[arg(long)]
    th: Option<usize>,
    /// Slack ratio that marks a path critical.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    /// Use the rational pin-weight form instead of the logistic one.
    #[arg(long)]
    rational_weight: bool,
    #[arg(long)]
    batch_cap: Option<usize>,
    #[arg(long = "wd")]
    w_d: Option<f64>,
    #[arg(long = "wcap")]
    w_cap: Option<f64>,
    #[arg(long = "wcong")]
    w_cong: Option<f64>,
    #[arg(long = "dvia")]
    delta_via: Option<f64>,
    #[arg(long = "pvia")]
    p_via: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = "LAYASSIGN_THREADS")]
    threads: Option<usize>,
    /// Price overflow as max(0, d - c).
    #[arg(long)]
    legacy_overflow: bool,
    /// Order nets by congestion only.
    #[arg(long)]
    no_ordering: bool,
    #[arg(long)]
    no_lookahead: bool,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading {}", p.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
            }
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { c.$f = v; } )* };
        }
        set!(th, alpha, k, b, batch_cap, w_d, w_cap, w_cong, delta_via, p_via, seed);
        if self.threads.is_some() {
            c.threads = self.threads;
        }
        if self.rational_weight {
            c.pin_weight_form = PinWeightForm::Rational;
        }
        if self.legacy_overflow {
            c.overflow = OverflowModel::Legacy;
        }
        if self.no_ordering {
            c.ordering = false;
        }
        if self.no_lookahead {
            c.lookahead = false;
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Args)]
struct AssignArgs {
    #[command(flatten)]
    design: DesignArgs,
    #[command(flatten)]
    config: ConfigArgs,
    /// Solution output file.
    #[arg(long, short = 'o')]
    out: PathBuf,
    /// Score weights file; without it the report omits the score.
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Write the batch listing here.
    #[arg(long)]
    dump_batches: Option<PathBuf>,
    /// Write the named net's assignment tree here, as `NET:FILE`.
    #[arg(long)]
    dump_tree: Option<String>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    design: DesignArgs,
    #[arg(long, short = 's')]
    solution: PathBuf,
    #[arg(long)]
    weights: Option<PathBuf>,
    #[arg(long)]
    legacy_overflow: bool,
    #[arg(long = "dvia")]
    delta_via: Option<f64>,
    /// Write one overflow CSV per layer into this directory.
    #[arg(long)]
    heatmap_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    design: DesignArgs,
    /// Time the 3D solution instead of the 2D estimate.
    #[arg(long, short = 's')]
    solution: Option<PathBuf>,
    #[arg(short = 'K', long = "paths", default_value_t = 10)]
    k: usize,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, short = 'o')]
    out: PathBuf,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long)]
    layers: Option<usize>,
    #[arg(long)]
    nets: Option<usize>,
    #[arg(long)]
    min_fanin: Option<usize>,
    #[arg(long)]
    max_fanin: Option<usize>,
    #[arg(long)]
    capacity: Option<f64>,
    #[arg(long)]
    top_capacity_ratio: Option<f64>,
    /// Target fraction of violating endpoints.
    #[arg(long)]
    violate: Option<f64>,
    /// Probability of extending the previous chain.
    #[arg(long)]
    chain: Option<f64>,
    #[arg(long)]
    locality: Option<usize>,
    #[arg(long)]
    max_pins_per_gcell: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

impl GenArgs {
    fn spec(&self) -> GenSpec {
        let mut s = GenSpec::default();
        macro_rules! set {
            ($($a:ident => $f:ident),*) => { $( if let Some(v) = self.$a { s.$f = v; } )* };
        }
        set!(nx => nx, ny => ny, layers => layers, nets => nets, capacity => capacity,
             top_capacity_ratio => top_capacity_ratio, violate => violate_fraction,
             chain => chain_fraction, locality => locality,
             max_pins_per_gcell => max_pins_per_gcell, seed => seed);
        if let Some(v) = self.min_fanin {
            s.fanin.0 = v;
        }
        if let Some(v) = self.max_fanin {
            s.fanin.1 = v;
        }
        s
    }
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    design: DesignArgs,
    #[command(flatten)]
    config: ConfigArgs,
    /// Net name, or a numeric id.
    #[arg(long)]
    net: String,
}

#[derive(Args)]
struct DumpArgs {
    #[command(flatten)]
    design: DesignArgs,
    #[command(flatten)]
    config: ConfigArgs,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Assign(a) => cmd_assign(a),
        Cmd::Evaluate(a) => cmd_evaluate(a),
        Cmd::ReportTiming(a) => cmd_report_timing(a),
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Oracle(a) => cmd_oracle(a),
        Cmd::DumpBatches(a) => cmd_dump_batches(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_weights(path: &Option<PathBuf>) -> Result<Option<ScoreWeights>> {
    path.as_deref()
        .map(ScoreWeights::load)
        .transpose()
        .map_err(Into::into)
}

fn net_by_name(design: &Design, name: &str) -> Result<usize> {
    if let Some(n) = design.netlist.net_id(name) {
        return Ok(n);
    }
    match name.parse::<usize>() {
        Ok(n) if n < design.num_nets() => Ok(n),
        _ => bail!("unknown net '{name}'"),
    }
}

fn cmd_assign(a: AssignArgs) -> Result<()> {
    let design = a.design.load()?;
    let cfg = a.config.resolve()?;
    let weights = load_weights(&a.weights)?;
    let start = std::time::Instant::now();
    let (out, ev) = assign_and_evaluate(&design, &cfg, weights.as_ref())?;
    log::info!(
        "assigned {} nets in {} batches, {:.2}s",
        design.num_nets(),
        out.stats.batches,
        start.elapsed().as_secs_f64()
    );
    write(&a.out, &write_solutions(&out.solutions, &design.netlist))?;
    if let Some(p) = &a.dump_batches {
        write(p, &dump_batches(&out.plan.batches, &design.netlist))?;
    }
    if let Some(spec) = &a.dump_tree {
        let (net, file) = spec
            .split_once(':')
            .context("--dump-tree expects NET:FILE")?;
        let n = net_by_name(&design, net)?;
        write(Path::new(file), &out.plan.trees[n].dump(&design.netlist))?;
    }
    print!("{}", ev.report.to_text());
    Ok(())
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<()> {
    let design = a.design.load()?;
    let sols = load_solutions(&a.solution, &design.netlist, &design.grid)?;
    let weights = load_weights(&a.weights)?;
    let mut opts = layassign::eval::EvalOptions::default();
    if a.legacy_overflow {
        opts.overflow = OverflowModel::Legacy;
    }
    if let Some(d) = a.delta_via {
        opts.delta_via = d;
    }
    let ev = evaluate(&design, &sols, weights.as_ref(), &opts)?;
    if let Some(dir) = &a.heatmap_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for l in 0..design.tech.num_layers() {
            let csv = heatmap_csv(&design.grid, &ev.demand, l)?;
            write(&dir.join(format!("layer{l}.csv")), &csv)?;
        }
    }
    print!("{}", ev.report.to_text());
    Ok(())
}

fn path_text(design: &Design, graph: &TimingGraph, timing: &Timing, path: &TimingPath) -> String {
    let nl = &design.netlist;
    let mut s = String::new();
    writeln!(
        s,
        "path to {} slack {:.4}",
        nl.pins[path.endpoint].name, path.slack
    )
    .unwrap();
    writeln!(
        s,
        "  {:<24} {:>12} {:>10} {:>10}  via",
        "pin", "arrival", "slew", "delay"
    )
    .unwrap();
    for (i, &p) in path.pins.iter().enumerate() {
        let (delay, via) = match i.checked_sub(1).map(|j| path.arcs[j]) {
            None => (0.0, String::from("start")),
            Some(a) => {
                let via = match graph.arcs[a].kind {
                    ArcKind::Cell(_) => "cell".to_string(),
                    ArcKind::Net(n) => format!("net {}", nl.nets[n].name),
                };
                (timing.arc_delay[a], via)
            }
        };
        writeln!(
            s,
            "  {:<24} {:>12.4} {:>10.4} {:>10.4}  {}",
            nl.pins[p].name, timing.arrival[p], timing.slew[p], delay, via
        )
        .unwrap();
    }
    s
}

fn cmd_report_timing(a: ReportArgs) -> Result<()> {
    let design = a.design.load()?;
    let rc = match &a.solution {
        Some(p) => rc_trees_3d(&design, &load_solutions(p, &design.netlist, &design.grid)?)?,
        None => rc_trees_2d(&design)?,
    };
    let graph = TimingGraph::build(&design.netlist)?;
    let timing = propagate(&graph, &design.netlist, &rc);
    println!(
        "wns {:.4} tns {:.4} violations {}/{}",
        timing.wns,
        timing.tns,
        timing.num_violations(),
        timing.endpoints.len()
    );
    for p in worst_paths(&graph, &timing, &design.netlist, a.k) {
        print!("{}", path_text(&design, &graph, &timing, &p));
    }
    Ok(())
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let spec = a.spec();
    let design = generate(&spec)?;
    write_design(&design, &a.out)?;
    log::info!(
        "wrote {} nets on {}x{}x{} to {}",
        design.num_nets(),
        spec.nx,
        spec.ny,
        spec.layers,
        a.out.display()
    );
    Ok(())
}

fn cmd_oracle(a: OracleArgs) -> Result<()> {
    let design = a.design.load()?;
    let cfg = a.config.resolve()?;
    let n = net_by_name(&design, &a.net)?;
    let p = in_pool(cfg.threads, || plan(&design, &cfg))??;
    let tree = &p.trees[n];
    let demand = DemandMap::zeros(&design.grid);
    let ctx = CostCtx {
        tech: &design.tech,
        grid: &design.grid,
        demand: demand.values(),
        weights: cfg.cost_weights(),
        model: cfg.overflow,
    };
    let best = oracle(tree, &ctx)?;
    let (dp, _) = assign_net(tree, &ctx);
    println!("net {} nodes {}", design.netlist.nets[n].name, tree.len());
    println!("wire assignments {}", best.wire_assignments);
    println!("configurations {}", best.configs);
    println!("oracle cost {:.12}", best.cost);
    println!("dp cost {:.12}", dp.cost);
    print_one(&design, &best.solution);
    Ok(())
}

fn print_one(design: &Design, sol: &NetSolution) {
    let n = design.num_nets();
    let mut all: Vec<NetSolution> = (0..n).map(NetSolution::empty).collect();
    all[sol.net] = sol.clone();
    let text = write_solutions(&all, &design.netlist);
    let name = &design.netlist.nets[sol.net].name;
    let mut on = false;
    for line in text.lines() {
        if line == name {
            on = true;
        }
        if on {
            println!("{line}");
            if line == ")" {
                break;
            }
        }
    }
}

fn cmd_dump_batches(a: DumpArgs) -> Result<()> {
    let design = a.design.load()?;
    let cfg = a.config.resolve()?;
    let p = in_pool(cfg.threads, || plan(&design, &cfg))??;
    print!("{}", dump_batches(&p.batches, &design.netlist));
    Ok(())
}
