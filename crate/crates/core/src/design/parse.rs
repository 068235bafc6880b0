// SPDX-License-Identifier: Apache-2.0
//! Shared tokenizer for the line-based input formats.

use std::path::Path;
use std::str::FromStr;

use crate::{Error, Result};

pub(crate) fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Non-empty lines with `#` comments stripped, as (1-based line number, tokens).
pub(crate) fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

pub(crate) struct Tokens<'a> {
    line: usize,
    toks: std::slice::Iter<'a, &'a str>,
}

impl<'a> Tokens<'a> {
    pub(crate) fn new(line: usize, toks: &'a [&'a str]) -> Self {
        Tokens {
            line,
            toks: toks.iter(),
        }
    }

    pub(crate) fn line(&self) -> usize {
        self.line
    }

    pub(crate) fn word(&mut self, what: &str) -> Result<&'a str> {
        self.toks
            .next()
            .copied()
            .ok_or_else(|| Error::parse(self.line, format!("missing {what}")))
    }

    pub(crate) fn peek(&self) -> Option<&'a str> {
        self.toks.clone().next().copied()
    }

    pub(crate) fn num<T: FromStr>(&mut self, what: &str) -> Result<T> {
        let w = self.word(what)?;
        w.parse()
            .map_err(|_| Error::parse(self.line, format!("bad {what} '{w}'")))
    }

    /// Finite non-negative real.
    pub(crate) fn nonneg(&mut self, what: &str) -> Result<f64> {
        let v: f64 = self.num(what)?;
        if !v.is_finite() || v < 0.0 {
            return Err(Error::parse(
                self.line,
                format!("{what} must be finite and >= 0, got {v}"),
            ));
        }
        Ok(v)
    }

    pub(crate) fn finite(&mut self, what: &str) -> Result<f64> {
        let v: f64 = self.num(what)?;
        if !v.is_finite() {
            return Err(Error::parse(self.line, format!("{what} must be finite")));
        }
        Ok(v)
    }

    pub(crate) fn end(&mut self) -> Result<()> {
        match self.toks.next() {
            None => Ok(()),
            Some(t) => Err(Error::parse(self.line, format!("unexpected token '{t}'"))),
        }
    }
}
