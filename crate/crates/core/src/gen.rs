// SPDX-License-Identifier: Apache-2.0
//! Deterministic synthetic designs.
//!
//! Cells are placed near the nets that feed them and wired into a random
//! DAG; chains of recently created cells give long paths. Every net is routed
//! as a rectilinear tree by walking L-shaped paths from each sink until they
//! hit the part of the tree already built. The clock period is picked from a
//! 2D timing run so that a chosen fraction of endpoints fail.

use std::collections::HashSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::design::{
    CellArc, Design, Direction, GridGraph, Layer, Net, Netlist, NldmTable, Pin, Point,
    PrimaryInput, PrimaryOutput, Route2D, RouteSet, Segment, Tech,
};
use crate::sta::{propagate, rc_trees_2d, TimingGraph};
use crate::{Error, Result};

pub const FILE_NAMES: [&str; 4] = ["tech.txt", "grid.txt", "netlist.txt", "routes.txt"];

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub nx: usize,
    pub ny: usize,
    pub layers: usize,
    pub nets: usize,
    /// Inclusive range of inputs per cell.
    pub fanin: (usize, usize),
    /// Tracks per GCell edge on the lowest layer.
    pub capacity: f64,
    /// Capacity of the top layer as a fraction of the lowest; layers in
    /// between are interpolated linearly.
    pub top_capacity_ratio: f64,
    /// Fraction of endpoints that violate under the 2D estimate.
    pub violate_fraction: f64,
    /// Probability that a cell's first input is the previous cell's output.
    pub chain_fraction: f64,
    /// Max offset in GCells between a cell and its first driver.
    pub locality: usize,
    pub max_pins_per_gcell: usize,
    pub seed: u64,
}

impl Default for GenSpec {
    fn default() -> Self {
        GenSpec {
            nx: 64,
            ny: 64,
            layers: 6,
            nets: 2000,
            fanin: (1, 3),
            capacity: 10.0,
            top_capacity_ratio: 0.3,
            violate_fraction: 0.3,
            chain_fraction: 0.6,
            locality: 6,
            max_pins_per_gcell: 8,
            seed: 42,
        }
    }
}

impl GenSpec {
    fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Invalid(format!("gen: {m}")));
        if self.nx < 2 || self.ny < 2 {
            return bad("grid must be at least 2x2");
        }
        if self.layers < 2 {
            return bad("L >= 2 required");
        }
        if self.nets == 0 {
            return bad("at least one net required");
        }
        if self.fanin.0 == 0 || self.fanin.0 > self.fanin.1 {
            return bad("fanin range must be non-empty and start at 1 or more");
        }
        if !(0.0..=1.0).contains(&self.violate_fraction)
            || !(0.0..=1.0).contains(&self.chain_fraction)
        {
            return bad("fractions must lie in [0, 1]");
        }
        if self.capacity <= 0.0 || !(0.0..=1.0).contains(&self.top_capacity_ratio) {
            return bad("capacity must be positive and the top ratio in [0, 1]");
        }
        // inputs and an output per cell, one pin per PI, at most one PO per net
        let worst_pins = self.nets * (self.fanin.1 + 2);
        if worst_pins > self.nx * self.ny * self.max_pins_per_gcell {
            return bad(&format!(
                "up to {worst_pins} pins do not fit {}x{} GCells at {} pins each",
                self.nx, self.ny, self.max_pins_per_gcell
            ));
        }
        Ok(())
    }
}

fn tech(spec: &GenSpec) -> Result<Tech> {
    let layers = (0..spec.layers)
        .map(|l| Layer {
            direction: if l % 2 == 0 {
                Direction::Horizontal
            } else {
                Direction::Vertical
            },
            r: round6(0.12 * 0.6f64.powi(l as i32)),
            c: round6(0.22 * 0.93f64.powi(l as i32)),
            ofw: 1.0,
        })
        .collect();
    Tech::new(layers, vec![0.01; spec.layers - 1])
}

fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

fn grid(spec: &GenSpec, tech: &Tech) -> Result<GridGraph> {
    let top = spec.layers - 1;
    let caps = (0..spec.layers)
        .map(|l| {
            let f = 1.0 - (1.0 - spec.top_capacity_ratio) * l as f64 / top as f64;
            (spec.capacity * f).round().max(1.0)
        })
        .collect();
    GridGraph::new(spec.nx, spec.ny, tech, caps)
}

const SLEW_INDEX: [f64; 5] = [2.0, 10.0, 30.0, 80.0, 200.0];
const LOAD_INDEX: [f64; 5] = [0.5, 2.0, 8.0, 32.0, 128.0];

struct CellType {
    drive: f64,
    delay: NldmTable,
    slew: NldmTable,
}

fn cell_types() -> Vec<CellType> {
    let mut out = Vec::new();
    for (drive, d0) in [(0.5, 16.0), (1.0, 12.0), (2.0, 8.0)] {
        let mut delay = Vec::new();
        let mut slew = Vec::new();
        for s in SLEW_INDEX {
            for l in LOAD_INDEX {
                delay.push(round6(d0 + 0.15 * s + drive * l + 0.02 * (s * l).sqrt()));
                slew.push(round6(5.0 + 0.1 * s + 1.8 * drive * l));
            }
        }
        out.push(CellType {
            drive,
            delay: NldmTable::new(SLEW_INDEX.to_vec(), LOAD_INDEX.to_vec(), delay).unwrap(),
            slew: NldmTable::new(SLEW_INDEX.to_vec(), LOAD_INDEX.to_vec(), slew).unwrap(),
        });
    }
    out
}

fn pin(name: String, at: Point, cap: f64, drive: Option<f64>) -> Pin {
    Pin {
        name,
        x: at.0,
        y: at.1,
        layer: 0,
        cap,
        drive,
    }
}

fn near(rng: &mut ChaCha8Rng, at: Point, r: usize, spec: &GenSpec) -> Point {
    let r = r as isize;
    let off = |v: usize, n: usize, d: isize| (v as isize + d).clamp(0, n as isize - 1) as usize;
    let dx = rng.gen_range(-r..=r);
    let dy = rng.gen_range(-r..=r);
    (off(at.0, spec.nx, dx), off(at.1, spec.ny, dy))
}

fn dist(a: Point, b: Point) -> usize {
    a.0.abs_diff(b.0) + a.1.abs_diff(b.1)
}

fn netlist(spec: &GenSpec, rng: &mut ChaCha8Rng) -> Result<Netlist> {
    let types = cell_types();
    let mut nl = Netlist::default();
    let n_pi = (spec.nets / 10).max(1).min(spec.nets);
    let mut drivers: Vec<(usize, Point)> = Vec::with_capacity(spec.nets);
    let mut sinks: Vec<Vec<usize>> = vec![Vec::new(); spec.nets];

    for i in 0..n_pi {
        let at = (rng.gen_range(0..spec.nx), rng.gen_range(0..spec.ny));
        let p = nl.add_pin(pin(format!("pi{i}"), at, 0.0, None))?;
        nl.inputs.push(PrimaryInput {
            pin: p,
            arrival: round6(rng.gen_range(0.0..5.0)),
            slew: round6(rng.gen_range(10.0..30.0)),
        });
        drivers.push((p, at));
    }

    const WINDOW: usize = 200;
    const TRIES: usize = 6;
    for c in 0..spec.nets - n_pi {
        let avail = drivers.len();
        let first = if rng.gen_bool(spec.chain_fraction) {
            avail - 1
        } else {
            rng.gen_range(0..avail)
        };
        let at = near(rng, drivers[first].1, spec.locality, spec);
        let k = rng.gen_range(spec.fanin.0..=spec.fanin.1).min(avail);
        let mut inputs = vec![first];
        while inputs.len() < k {
            let lo = avail.saturating_sub(WINDOW);
            let pick = (0..TRIES)
                .map(|_| rng.gen_range(lo..avail))
                .filter(|n| !inputs.contains(n))
                .min_by_key(|&n| (dist(drivers[n].1, at), n));
            match pick {
                Some(n) => inputs.push(n),
                None if avail - lo <= inputs.len() => break,
                None => {}
            }
        }

        let ty = &types[rng.gen_range(0..types.len())];
        let out = nl.add_pin(pin(format!("c{c}_z"), at, 0.0, Some(ty.drive)))?;
        for (a, &src) in inputs.iter().enumerate() {
            let cap = round6(rng.gen_range(0.5..2.0));
            let ip = nl.add_pin(pin(format!("c{c}_a{a}"), at, cap, None))?;
            sinks[src].push(ip);
            nl.arcs.push(CellArc {
                from: ip,
                to: out,
                delay: ty.delay.clone(),
                slew: ty.slew.clone(),
            });
        }
        drivers.push((out, at));
    }

    let mut po = 0;
    for (i, &(drv, at)) in drivers.iter().enumerate() {
        if sinks[i].is_empty() {
            let p = nl.add_pin(pin(
                format!("po{po}"),
                near(rng, at, spec.locality, spec),
                2.0,
                None,
            ))?;
            nl.outputs.push(PrimaryOutput {
                pin: p,
                required: None,
            });
            sinks[i].push(p);
            po += 1;
        }
        nl.add_net(Net {
            name: format!("n{i}"),
            driver: drv,
            sinks: std::mem::take(&mut sinks[i]),
        })?;
    }
    Ok(nl)
}

/// Connects each sink, nearest first, by an L-shaped walk toward the closest
/// already-connected pin, stopping at the first GCell already on the tree.
fn route_net(net: &Net, nl: &Netlist, rng: &mut ChaCha8Rng) -> Result<Route2D> {
    let pos = |p: usize| (nl.pins[p].x, nl.pins[p].y);
    let root = pos(net.driver);
    let mut order: Vec<Point> = net.sinks.iter().map(|&s| pos(s)).collect();
    order.sort_by_key(|&p| (dist(p, root), p));
    order.dedup();

    let mut on_tree: HashSet<Point> = HashSet::from([root]);
    let mut connected = vec![root];
    let mut segments = Vec::new();
    for s in order {
        if on_tree.contains(&s) {
            connected.push(s);
            continue;
        }
        let target = *connected.iter().min_by_key(|&&c| dist(c, s)).unwrap();
        let corner = if rng.gen_bool(0.5) {
            (target.0, s.1)
        } else {
            (s.0, target.1)
        };
        let mut cur = s;
        on_tree.insert(s);
        'walk: for leg_end in [corner, target] {
            let start = cur;
            while cur != leg_end {
                cur = (step(cur.0, leg_end.0), step(cur.1, leg_end.1));
                if !on_tree.insert(cur) {
                    segments.push(Segment { a: start, b: cur });
                    break 'walk;
                }
            }
            if start != cur {
                segments.push(Segment { a: start, b: cur });
            }
        }
        connected.push(s);
    }
    Route2D::new(net.name.clone(), segments)
}

fn step(from: usize, to: usize) -> usize {
    match from.cmp(&to) {
        std::cmp::Ordering::Less => from + 1,
        std::cmp::Ordering::Greater => from - 1,
        std::cmp::Ordering::Equal => from,
    }
}

/// Builds a validated design from the spec. Same spec, same design.
pub fn generate(spec: &GenSpec) -> Result<Design> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let tech = tech(spec)?;
    let grid = grid(spec, &tech)?;
    let mut netlist = netlist(spec, &mut rng)?;
    // placeholder until arrivals are known
    netlist.clock_period = Some(1e12);
    let routes = netlist
        .nets
        .iter()
        .map(|n| route_net(n, &netlist, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let mut design = Design::new(tech, grid, netlist, RouteSet::new(routes)?)?;

    let rc = rc_trees_2d(&design)?;
    let graph = TimingGraph::build(&design.netlist)?;
    let timing = propagate(&graph, &design.netlist, &rc);
    let mut arrivals: Vec<f64> = design
        .netlist
        .outputs
        .iter()
        .map(|o| timing.arrival[o.pin])
        .collect();
    arrivals.sort_by(f64::total_cmp);
    design.netlist.clock_period = Some(clock_for(&arrivals, spec.violate_fraction));
    Ok(design)
}

/// Period with `fraction` of the sorted arrivals strictly above it.
fn clock_for(sorted: &[f64], fraction: f64) -> f64 {
    let n = sorted.len();
    let k = ((fraction * n as f64).round() as usize).min(n);
    let period = match k {
        0 => sorted.last().copied().unwrap_or(0.0) * 1.05 + 1.0,
        _ if k == n => sorted[0] * 0.95,
        _ => (sorted[n - k - 1] + sorted[n - k]) / 2.0,
    };
    round6(period)
}

pub fn write_design(design: &Design, dir: &Path) -> Result<()> {
    let io = |path: &Path, e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    };
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let texts = [
        design.tech.to_text(),
        design.grid.to_text(),
        design.netlist.to_text(),
        design.routes.to_text(),
    ];
    for (name, text) in FILE_NAMES.iter().zip(texts) {
        let p = dir.join(name);
        std::fs::write(&p, text).map_err(|e| io(&p, e))?;
    }
    Ok(())
}

pub fn load_design(dir: &Path) -> Result<Design> {
    let [t, g, n, r] = FILE_NAMES.map(|f| dir.join(f));
    Design::load(&t, &g, &n, &r)
}

/// Picks `k` distinct nets at random, for sampling checks on large designs.
pub fn sample_nets(num_nets: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ids: Vec<usize> = (0..num_nets).collect();
    ids.shuffle(&mut rng);
    ids.truncate(k);
    ids.sort_unstable();
    ids
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> GenSpec {
        GenSpec {
            nx: 24,
            ny: 24,
            layers: 4,
            nets: 150,
            seed: 7,
            ..Default::default()
        }
    }

    #[test]
    fn same_seed_same_files() {
        let a = generate(&small()).unwrap();
        let b = generate(&small()).unwrap();
        assert_eq!(a.netlist.to_text(), b.netlist.to_text());
        assert_eq!(a.routes.to_text(), b.routes.to_text());
        let c = generate(&GenSpec { seed: 8, ..small() }).unwrap();
        assert_ne!(a.routes.to_text(), c.routes.to_text());
    }

    #[test]
    fn net_count_and_violations() {
        let d = generate(&small()).unwrap();
        assert_eq!(d.routes.routes.len(), 150);
        assert_eq!(d.num_nets(), 150);
        let rc = rc_trees_2d(&d).unwrap();
        let g = TimingGraph::build(&d.netlist).unwrap();
        let t = propagate(&g, &d.netlist, &rc);
        let frac = t.num_violations() as f64 / t.endpoints.len() as f64;
        assert!((frac - 0.3).abs() < 0.1, "{frac}");
    }

    #[test]
    fn generated_files_reload_identically() {
        let d = generate(&small()).unwrap();
        let dir = std::env::temp_dir().join(format!("layassign-gen-{}", std::process::id()));
        write_design(&d, &dir).unwrap();
        let back = load_design(&dir).unwrap();
        std::fs::remove_dir_all(&dir).ok();
        assert_eq!(back.netlist.to_text(), d.netlist.to_text());
        assert_eq!(back.routes, d.routes);
        assert_eq!(back.tech, d.tech);
    }

    #[test]
    fn overfull_spec_is_rejected() {
        let spec = GenSpec {
            nx: 4,
            ny: 4,
            nets: 1000,
            ..Default::default()
        };
        assert!(generate(&spec).is_err());
    }

    #[test]
    fn clock_quantile() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(clock_for(&a, 0.5), 2.5);
        assert!(clock_for(&a, 0.0) > 4.0);
        assert!(clock_for(&a, 1.0) < 1.0);
    }
}
