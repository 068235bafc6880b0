// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;
use std::path::Path;

use super::parse::{lines, read_file, Tokens};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Horizontal,
    Vertical,
}

impl Direction {
    pub fn letter(self) -> char {
        match self {
            Direction::Horizontal => 'H',
            Direction::Vertical => 'V',
        }
    }
}

/// Per-layer electrical and congestion parameters. Units: kΩ and fF per GCell pitch.
/// Layer indices are stored as bytes in the assignment tables.
pub const MAX_LAYERS: usize = 255;

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub direction: Direction,
    pub r: f64,
    pub c: f64,
    pub ofw: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tech {
    pub layers: Vec<Layer>,
    /// `via_r[l]` is the resistance of one via between layer `l` and `l + 1`.
    pub via_r: Vec<f64>,
    pub r_avg: f64,
    pub c_avg: f64,
    /// Overflow exponent for edges with positive capacity.
    pub s_pos: f64,
    /// Overflow exponent for zero-capacity edges.
    pub s_zero: f64,
    avg_given: bool,
}

impl Tech {
    pub fn new(layers: Vec<Layer>, via_r: Vec<f64>) -> Result<Tech> {
        let mut t = Tech {
            layers,
            via_r,
            r_avg: 0.0,
            c_avg: 0.0,
            s_pos: 0.5,
            s_zero: 1.5,
            avg_given: false,
        };
        t.fill_averages();
        t.check()?;
        Ok(t)
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn direction(&self, l: usize) -> Direction {
        self.layers[l].direction
    }

    /// Summed via resistance of a stack between layers `a` and `b`.
    pub fn via_resistance(&self, a: usize, b: usize) -> f64 {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        self.via_r[lo..hi].iter().sum()
    }

    pub fn layers_with(&self, dir: Direction) -> impl Iterator<Item = usize> + '_ {
        self.layers
            .iter()
            .enumerate()
            .filter(move |(_, l)| l.direction == dir)
            .map(|(i, _)| i)
    }

    fn fill_averages(&mut self) {
        if !self.avg_given && !self.layers.is_empty() {
            let n = self.layers.len() as f64;
            self.r_avg = self.layers.iter().map(|l| l.r).sum::<f64>() / n;
            self.c_avg = self.layers.iter().map(|l| l.c).sum::<f64>() / n;
        }
    }

    fn check(&self) -> Result<()> {
        let n = self.layers.len();
        if n < 2 {
            return Err(Error::Invalid("L >= 2 required".into()));
        }
        if n > MAX_LAYERS {
            return Err(Error::Invalid(format!(
                "at most {MAX_LAYERS} layers supported"
            )));
        }
        if self.via_r.len() != n - 1 {
            return Err(Error::Invalid(format!(
                "expected {} via resistances, got {}",
                n - 1,
                self.via_r.len()
            )));
        }
        for dir in [Direction::Horizontal, Direction::Vertical] {
            if self.layers_with(dir).next().is_none() {
                return Err(Error::Invalid(format!(
                    "no {} layer",
                    if dir == Direction::Horizontal {
                        "horizontal"
                    } else {
                        "vertical"
                    }
                )));
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Tech> {
        Tech::parse(&read_file(path)?)
    }

    pub fn parse(text: &str) -> Result<Tech> {
        let mut count: Option<usize> = None;
        let mut layers: Vec<Option<Layer>> = Vec::new();
        let mut vias: Vec<Option<f64>> = Vec::new();
        let mut avg = None;
        let mut sexp = None;
        for (line, toks) in lines(text) {
            let mut t = Tokens::new(line, &toks);
            match t.word("keyword")? {
                "layers" => {
                    let n: usize = t.num("layer count")?;
                    if n < 2 {
                        return Err(Error::parse(line, "L >= 2 required"));
                    }
                    count = Some(n);
                    layers = vec![None; n];
                    vias = vec![None; n - 1];
                }
                "layer" => {
                    let n = count.ok_or_else(|| Error::parse(line, "'layer' before 'layers'"))?;
                    let idx: usize = t.num("layer index")?;
                    if idx >= n {
                        return Err(Error::parse(line, format!("layer {idx} out of range")));
                    }
                    let direction = match t.word("direction")? {
                        "H" | "h" => Direction::Horizontal,
                        "V" | "v" => Direction::Vertical,
                        d => return Err(Error::parse(line, format!("bad direction '{d}'"))),
                    };
                    let r = t.nonneg("r")?;
                    let c = t.nonneg("c")?;
                    let ofw = t.nonneg("ofw")?;
                    t.end()?;
                    if layers[idx].is_some() {
                        return Err(Error::parse(line, format!("layer {idx} defined twice")));
                    }
                    layers[idx] = Some(Layer {
                        direction,
                        r,
                        c,
                        ofw,
                    });
                }
                "via" => {
                    let n = count.ok_or_else(|| Error::parse(line, "'via' before 'layers'"))?;
                    let idx: usize = t.num("via index")?;
                    if idx + 1 >= n {
                        return Err(Error::parse(line, format!("via {idx} out of range")));
                    }
                    let vr = t.nonneg("via resistance")?;
                    t.end()?;
                    if vias[idx].is_some() {
                        return Err(Error::parse(line, format!("via {idx} defined twice")));
                    }
                    vias[idx] = Some(vr);
                }
                "avg" => {
                    avg = Some((t.nonneg("r_avg")?, t.nonneg("c_avg")?));
                    t.end()?;
                }
                "sexp" => {
                    sexp = Some((t.nonneg("s_pos")?, t.nonneg("s_zero")?));
                    t.end()?;
                }
                k => return Err(Error::parse(line, format!("unknown keyword '{k}'"))),
            }
        }
        let n = count.ok_or_else(|| Error::parse(0, "missing 'layers'"))?;
        let layers = layers
            .into_iter()
            .enumerate()
            .map(|(i, l)| l.ok_or_else(|| Error::Invalid(format!("layer {i} not defined"))))
            .collect::<Result<Vec<_>>>()?;
        let via_r = vias
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::Invalid(format!("via {i} not defined"))))
            .collect::<Result<Vec<_>>>()?;
        debug_assert_eq!(layers.len(), n);
        let mut tech = Tech::new(layers, via_r)?;
        if let Some((r, c)) = avg {
            tech.r_avg = r;
            tech.c_avg = c;
            tech.avg_given = true;
        }
        if let Some((sp, sz)) = sexp {
            tech.s_pos = sp;
            tech.s_zero = sz;
        }
        Ok(tech)
    }

    /// Canonical text form; re-parses to an identical value.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "layers {}", self.layers.len()).unwrap();
        for (i, l) in self.layers.iter().enumerate() {
            writeln!(
                s,
                "layer {} {} {} {} {}",
                i,
                l.direction.letter(),
                l.r,
                l.c,
                l.ofw
            )
            .unwrap();
        }
        for (i, v) in self.via_r.iter().enumerate() {
            writeln!(s, "via {i} {v}").unwrap();
        }
        if self.avg_given {
            writeln!(s, "avg {} {}", self.r_avg, self.c_avg).unwrap();
        }
        writeln!(s, "sexp {} {}", self.s_pos, self.s_zero).unwrap();
        s
    }
}
