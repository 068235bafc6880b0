// SPDX-License-Identifier: Apache-2.0
//! GCell grid graph with per-edge capacities, and the matching demand map.
//!
//! Planar edges live only along their layer's preferred direction. An edge
//! is named by its lower-coordinate endpoint: `(x, y, l)` on a horizontal
//! layer joins `(x, y)`–`(x + 1, y)`, on a vertical layer `(x, y)`–`(x, y + 1)`.

use std::fmt::Write as _;
use std::path::Path;

use super::parse::{lines, read_file, Tokens};
use super::tech::{Direction, Tech};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GridGraph {
    pub nx: usize,
    pub ny: usize,
    directions: Vec<Direction>,
    offsets: Vec<usize>,
    default_cap: Vec<f64>,
    capacity: Vec<f64>,
}

impl GridGraph {
    pub fn new(nx: usize, ny: usize, tech: &Tech, default_cap: Vec<f64>) -> Result<GridGraph> {
        if nx == 0 || ny == 0 {
            return Err(Error::Invalid("grid dimensions must be positive".into()));
        }
        if default_cap.len() != tech.num_layers() {
            return Err(Error::Invalid(
                "one default capacity per layer required".into(),
            ));
        }
        let directions: Vec<Direction> = tech.layers.iter().map(|l| l.direction).collect();
        let mut offsets = Vec::with_capacity(directions.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for &d in &directions {
            acc += match d {
                Direction::Horizontal => nx.saturating_sub(1) * ny,
                Direction::Vertical => nx * ny.saturating_sub(1),
            };
            offsets.push(acc);
        }
        let mut capacity = vec![0.0; acc];
        for (l, &c) in default_cap.iter().enumerate() {
            capacity[offsets[l]..offsets[l + 1]].fill(c);
        }
        Ok(GridGraph {
            nx,
            ny,
            directions,
            offsets,
            default_cap,
            capacity,
        })
    }

    pub fn num_layers(&self) -> usize {
        self.directions.len()
    }

    pub fn num_edges(&self) -> usize {
        self.capacity.len()
    }

    pub fn direction(&self, l: usize) -> Direction {
        self.directions[l]
    }

    pub fn layer_range(&self, l: usize) -> std::ops::Range<usize> {
        self.offsets[l]..self.offsets[l + 1]
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x < self.nx && y < self.ny
    }

    /// Index of the planar edge whose lower endpoint is `(x, y)` on layer `l`.
    pub fn edge_index(&self, x: usize, y: usize, l: usize) -> Option<usize> {
        if l >= self.directions.len() {
            return None;
        }
        let local = match self.directions[l] {
            Direction::Horizontal if x + 1 < self.nx && y < self.ny => y * (self.nx - 1) + x,
            Direction::Vertical if x < self.nx && y + 1 < self.ny => y * self.nx + x,
            _ => return None,
        };
        Some(self.offsets[l] + local)
    }

    /// Inverse of [`edge_index`](Self::edge_index): `(x, y, l)` of the lower endpoint.
    pub fn edge_coords(&self, idx: usize) -> (usize, usize, usize) {
        let l = self.offsets.partition_point(|&o| o <= idx) - 1;
        let local = idx - self.offsets[l];
        match self.directions[l] {
            Direction::Horizontal => (local % (self.nx - 1), local / (self.nx - 1), l),
            Direction::Vertical => (local % self.nx, local / self.nx, l),
        }
    }

    pub fn capacity(&self, idx: usize) -> f64 {
        self.capacity[idx]
    }

    pub fn capacities(&self) -> &[f64] {
        &self.capacity
    }

    pub fn set_capacity(&mut self, x: usize, y: usize, l: usize, c: f64) -> Result<()> {
        let idx = self
            .edge_index(x, y, l)
            .ok_or_else(|| Error::Invalid(format!("no edge at ({x}, {y}, {l})")))?;
        self.capacity[idx] = c;
        Ok(())
    }

    /// Edge indices along a straight run on layer `l` between two GCells.
    /// Returns `None` if the run is not along the layer's direction or leaves the grid.
    pub fn run_edges(&self, a: (usize, usize), b: (usize, usize), l: usize) -> Option<Vec<usize>> {
        let dir = *self.directions.get(l)?;
        if !self.contains(a.0, a.1) || !self.contains(b.0, b.1) {
            return None;
        }
        match dir {
            Direction::Horizontal if a.1 == b.1 => {
                let (lo, hi) = (a.0.min(b.0), a.0.max(b.0));
                (lo..hi).map(|x| self.edge_index(x, a.1, l)).collect()
            }
            Direction::Vertical if a.0 == b.0 => {
                let (lo, hi) = (a.1.min(b.1), a.1.max(b.1));
                (lo..hi).map(|y| self.edge_index(a.0, y, l)).collect()
            }
            _ => None,
        }
    }

    /// Planar edges on layer `l` incident to GCell `(x, y)`.
    pub fn incident_edges(&self, x: usize, y: usize, l: usize) -> impl Iterator<Item = usize> + '_ {
        let before = match self.directions[l] {
            Direction::Horizontal if x > 0 => self.edge_index(x - 1, y, l),
            Direction::Vertical if y > 0 => self.edge_index(x, y - 1, l),
            _ => None,
        };
        before.into_iter().chain(self.edge_index(x, y, l))
    }

    pub fn load(path: &Path, tech: &Tech) -> Result<GridGraph> {
        GridGraph::parse(&read_file(path)?, tech)
    }

    pub fn parse(text: &str, tech: &Tech) -> Result<GridGraph> {
        let mut grid: Option<GridGraph> = None;
        let mut defaults_seen = vec![false; tech.num_layers()];
        for (line, toks) in lines(text) {
            let mut t = Tokens::new(line, &toks);
            match t.word("keyword")? {
                "dims" => {
                    let nx: usize = t.num("X")?;
                    let ny: usize = t.num("Y")?;
                    let nl: usize = t.num("L")?;
                    t.end()?;
                    if nl != tech.num_layers() {
                        return Err(Error::parse(
                            line,
                            format!("grid has {nl} layers but tech has {}", tech.num_layers()),
                        ));
                    }
                    grid = Some(
                        GridGraph::new(nx, ny, tech, vec![0.0; nl])
                            .map_err(|e| Error::parse(line, e.to_string()))?,
                    );
                }
                "cap" => {
                    let g = grid
                        .as_mut()
                        .ok_or_else(|| Error::parse(line, "'cap' before 'dims'"))?;
                    let l: usize = t.num("layer")?;
                    let c = t.nonneg("capacity")?;
                    t.end()?;
                    if l >= g.num_layers() {
                        return Err(Error::parse(line, format!("layer {l} out of range")));
                    }
                    g.default_cap[l] = c;
                    let r = g.layer_range(l);
                    g.capacity[r].fill(c);
                    defaults_seen[l] = true;
                }
                "edge" => {
                    let g = grid
                        .as_mut()
                        .ok_or_else(|| Error::parse(line, "'edge' before 'dims'"))?;
                    let x: usize = t.num("x")?;
                    let y: usize = t.num("y")?;
                    let l: usize = t.num("layer")?;
                    let c = t.nonneg("capacity")?;
                    t.end()?;
                    g.set_capacity(x, y, l, c)
                        .map_err(|e| Error::parse(line, e.to_string()))?;
                }
                k => return Err(Error::parse(line, format!("unknown keyword '{k}'"))),
            }
        }
        let g = grid.ok_or_else(|| Error::parse(0, "missing 'dims'"))?;
        Ok(g)
    }

    /// Canonical form: per-layer defaults followed by overrides in index order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "dims {} {} {}", self.nx, self.ny, self.num_layers()).unwrap();
        for (l, c) in self.default_cap.iter().enumerate() {
            writeln!(s, "cap {l} {c}").unwrap();
        }
        for (idx, &c) in self.capacity.iter().enumerate() {
            let (x, y, l) = self.edge_coords(idx);
            if c != self.default_cap[l] {
                writeln!(s, "edge {x} {y} {l} {c}").unwrap();
            }
        }
        s
    }
}

/// Demand per planar GCell edge, indexed like [`GridGraph`] capacities.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandMap {
    demand: Vec<f64>,
}

impl DemandMap {
    pub fn zeros(grid: &GridGraph) -> DemandMap {
        DemandMap {
            demand: vec![0.0; grid.num_edges()],
        }
    }

    pub fn get(&self, idx: usize) -> f64 {
        self.demand[idx]
    }

    pub fn values(&self) -> &[f64] {
        &self.demand
    }

    pub fn add(&mut self, idx: usize, amount: f64) {
        self.demand[idx] += amount;
    }
}
