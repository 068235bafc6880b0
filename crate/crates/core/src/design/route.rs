// SPDX-License-Identifier: Apache-2.0
//! 2D GCell routes. Segments are stored as given and also expanded to a
//! deduplicated set of unit planar edges, which is what projection checks
//! and tree construction work on.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use super::grid::GridGraph;
use super::parse::{lines, read_file, Tokens};
use super::tech::Direction;
use crate::{Error, Result};

pub type Point = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

/// Unit planar edge from `(x, y)` to `(x + 1, y)` or `(x, y + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnitEdge {
    pub x: usize,
    pub y: usize,
    pub vertical: bool,
}

impl UnitEdge {
    pub fn ends(self) -> (Point, Point) {
        let far = if self.vertical {
            (self.x, self.y + 1)
        } else {
            (self.x + 1, self.y)
        };
        ((self.x, self.y), far)
    }

    pub fn axis(self) -> Direction {
        if self.vertical {
            Direction::Vertical
        } else {
            Direction::Horizontal
        }
    }
}

/// Unit edges covered by an axis-aligned run between two points.
pub fn unit_edges(a: Point, b: Point) -> Option<Vec<UnitEdge>> {
    if a.1 == b.1 {
        let (lo, hi) = (a.0.min(b.0), a.0.max(b.0));
        Some(
            (lo..hi)
                .map(|x| UnitEdge {
                    x,
                    y: a.1,
                    vertical: false,
                })
                .collect(),
        )
    } else if a.0 == b.0 {
        let (lo, hi) = (a.1.min(b.1), a.1.max(b.1));
        Some(
            (lo..hi)
                .map(|y| UnitEdge {
                    x: a.0,
                    y,
                    vertical: true,
                })
                .collect(),
        )
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Route2D {
    pub net: String,
    pub segments: Vec<Segment>,
    edges: Vec<UnitEdge>,
}

impl Route2D {
    /// Builds and checks a route: axis-aligned, cycle-free, connected.
    pub fn new(net: impl Into<String>, segments: Vec<Segment>) -> Result<Route2D> {
        let net = net.into();
        let mut set = BTreeSet::new();
        for s in &segments {
            let e = unit_edges(s.a, s.b).ok_or_else(|| {
                Error::Invalid(format!(
                    "net {net}: segment {:?}-{:?} is not axis-aligned",
                    s.a, s.b
                ))
            })?;
            set.extend(e);
        }
        let edges: Vec<UnitEdge> = set.into_iter().collect();

        let mut ids: HashMap<Point, usize> = HashMap::new();
        let id = |p: Point, ids: &mut HashMap<Point, usize>| {
            let n = ids.len();
            *ids.entry(p).or_insert(n)
        };
        for s in &segments {
            id(s.a, &mut ids);
            id(s.b, &mut ids);
        }
        let mut pairs = Vec::with_capacity(edges.len());
        for e in &edges {
            let (p, q) = e.ends();
            pairs.push((id(p, &mut ids), id(q, &mut ids)));
        }
        let mut uf = UnionFind::new(ids.len());
        for (p, q) in pairs {
            if !uf.union(p, q) {
                return Err(Error::RouteCycle { net });
            }
        }
        if uf.components > 1 {
            return Err(Error::Disconnected { net });
        }
        Ok(Route2D {
            net,
            segments,
            edges,
        })
    }

    /// Sorted, deduplicated unit edges.
    pub fn edges(&self) -> &[UnitEdge] {
        &self.edges
    }

    pub fn wirelength(&self) -> usize {
        self.edges.len()
    }

    pub fn touches(&self, p: Point) -> bool {
        self.segments.iter().any(|s| {
            let (lx, hx) = (s.a.0.min(s.b.0), s.a.0.max(s.b.0));
            let (ly, hy) = (s.a.1.min(s.b.1), s.a.1.max(s.b.1));
            (lx..=hx).contains(&p.0) && (ly..=hy).contains(&p.1)
        })
    }

    pub fn within(&self, grid: &GridGraph) -> bool {
        self.segments
            .iter()
            .all(|s| grid.contains(s.a.0, s.a.1) && grid.contains(s.b.0, s.b.1))
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
    pub(crate) components: usize,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            components: n,
        }
    }

    pub(crate) fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    /// False if already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        self.components -= 1;
        true
    }
}

/// All routes of a design, in file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RouteSet {
    pub routes: Vec<Route2D>,
    index: HashMap<String, usize>,
}

impl RouteSet {
    pub fn new(routes: Vec<Route2D>) -> Result<RouteSet> {
        let mut index = HashMap::new();
        for (i, r) in routes.iter().enumerate() {
            if index.insert(r.net.clone(), i).is_some() {
                return Err(Error::Invalid(format!("net {} routed twice", r.net)));
            }
        }
        Ok(RouteSet { routes, index })
    }

    pub fn get(&self, net: &str) -> Option<&Route2D> {
        self.index.get(net).map(|&i| &self.routes[i])
    }

    pub fn position(&self, net: &str) -> Option<usize> {
        self.index.get(net).copied()
    }

    pub fn load(path: &Path, grid: &GridGraph) -> Result<RouteSet> {
        RouteSet::parse(&read_file(path)?, grid)
    }

    pub fn parse(text: &str, grid: &GridGraph) -> Result<RouteSet> {
        let mut pending: Vec<(usize, String, Vec<Segment>)> = Vec::new();
        for (line, toks) in lines(text) {
            let mut t = Tokens::new(line, &toks);
            match t.word("keyword")? {
                "net" => {
                    let name = t.word("net id")?.to_string();
                    t.end()?;
                    pending.push((line, name, Vec::new()));
                }
                "seg" => {
                    let cur = pending
                        .last_mut()
                        .ok_or_else(|| Error::parse(line, "'seg' before 'net'"))?;
                    let a = (t.num("x1")?, t.num("y1")?);
                    let b = (t.num("x2")?, t.num("y2")?);
                    t.end()?;
                    if !grid.contains(a.0, a.1) || !grid.contains(b.0, b.1) {
                        return Err(Error::parse(line, "segment outside grid"));
                    }
                    if a.0 != b.0 && a.1 != b.1 {
                        return Err(Error::parse(line, "segment not axis-aligned"));
                    }
                    cur.2.push(Segment { a, b });
                }
                k => return Err(Error::parse(line, format!("unknown keyword '{k}'"))),
            }
        }
        let routes = pending
            .into_iter()
            .map(|(line, name, segs)| {
                Route2D::new(name, segs).map_err(|e| match e {
                    Error::Invalid(m) => Error::parse(line, m),
                    e => e,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        RouteSet::new(routes)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in &self.routes {
            writeln!(s, "net {}", r.net).unwrap();
            for g in &r.segments {
                writeln!(s, "seg {} {} {} {}", g.a.0, g.a.1, g.b.0, g.b.1).unwrap();
            }
        }
        s
    }
}
