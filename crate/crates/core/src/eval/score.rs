// SPDX-License-Identifier: Apache-2.0
//! Weighted quality score.

use std::fmt::Write as _;
use std::path::Path;

use crate::design::{lines, read_file, Tokens};
use crate::{Error, Result};

/// Per-design weights `w`, references `r` and endpoint count of the score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreWeights {
    pub w: [f64; 4],
    pub r: [f64; 3],
    pub n_end: f64,
}

impl ScoreWeights {
    pub fn load(path: &Path) -> Result<ScoreWeights> {
        ScoreWeights::parse(&read_file(path)?)
    }

    /// Accepts `[w] w1 w2 w3 w4`, `[r] r1 r2 r3` and `nend N`.
    pub fn parse(text: &str) -> Result<ScoreWeights> {
        let (mut w, mut r, mut n_end) = (None, None, None);
        for (line, toks) in lines(text) {
            let (key, rest) = match toks[0] {
                "w" | "r" | "nend" => (toks[0], &toks[1..]),
                _ if toks.len() == 4 => ("w", &toks[..]),
                _ if toks.len() == 3 => ("r", &toks[..]),
                other => return Err(Error::parse(line, format!("unexpected '{other}'"))),
            };
            let mut t = Tokens::new(line, rest);
            match key {
                "w" => {
                    let mut v = [0.0; 4];
                    for (i, x) in v.iter_mut().enumerate() {
                        *x = t.finite(&format!("w{}", i + 1))?;
                    }
                    w = Some(v);
                }
                "r" => {
                    let mut v = [0.0; 3];
                    for (i, x) in v.iter_mut().enumerate() {
                        *x = t.finite(&format!("r{}", i + 1))?;
                    }
                    r = Some(v);
                }
                _ => {
                    let n: f64 = t.finite("N_end")?;
                    if n <= 0.0 {
                        return Err(Error::parse(line, "N_end must be positive"));
                    }
                    n_end = Some(n);
                }
            }
            t.end()?;
        }
        Ok(ScoreWeights {
            w: w.ok_or_else(|| Error::Invalid("score weights: missing w line".into()))?,
            r: r.ok_or_else(|| Error::Invalid("score weights: missing r line".into()))?,
            n_end: n_end
                .ok_or_else(|| Error::Invalid("score weights: missing nend line".into()))?,
        })
    }
}

/// `w1 (wns - r1) + w2 (tns - r2) / N_end + w3 (power - r3) + w4 tof`.
pub fn quality_score(wns: f64, tns: f64, power: f64, tof: f64, sw: &ScoreWeights) -> f64 {
    sw.w[0] * (wns - sw.r[0])
        + sw.w[1] * (tns - sw.r[1]) / sw.n_end
        + sw.w[2] * (power - sw.r[2])
        + sw.w[3] * tof
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub wns: f64,
    pub tns: f64,
    pub power: f64,
    pub tof: f64,
    pub per_layer_overflow: Vec<f64>,
    pub violations: usize,
    pub endpoints: usize,
    pub score: Option<f64>,
}

impl ScoreReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "wns {:.6}", self.wns).unwrap();
        writeln!(s, "tns {:.6}", self.tns).unwrap();
        writeln!(s, "violations {} / {}", self.violations, self.endpoints).unwrap();
        writeln!(s, "power {:.9}", self.power).unwrap();
        writeln!(s, "tof {:.6}", self.tof).unwrap();
        for (l, v) in self.per_layer_overflow.iter().enumerate() {
            writeln!(s, "overflow {l} {v:.6}").unwrap();
        }
        if let Some(score) = self.score {
            writeln!(s, "score {score:.9}").unwrap();
        }
        s
    }
}
