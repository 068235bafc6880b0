// SPDX-License-Identifier: Apache-2.0
//! Pins, cell timing arcs, nets and timing constraints.
//!
//! Cells are implicit: a cell is the set of arcs between its input and output
//! pins. Every pin occupies one GCell on one layer.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::parse::{lines, read_file, Tokens};
use crate::{Error, Result};

pub type PinId = usize;
pub type NetId = usize;

/// Drive resistance assumed for an output pin without a `drive` record (kΩ).
pub const DEFAULT_DRIVE: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Pin {
    pub name: String,
    pub x: usize,
    pub y: usize,
    pub layer: usize,
    /// Input capacitance, fF.
    pub cap: f64,
    /// Equivalent drive resistance when this pin drives a net, kΩ.
    pub drive: Option<f64>,
}

/// Two-dimensional NLDM table: rows follow input slew, columns follow load.
#[derive(Debug, Clone, PartialEq)]
pub struct NldmTable {
    pub slew_index: Vec<f64>,
    pub load_index: Vec<f64>,
    pub values: Vec<f64>,
}

impl NldmTable {
    pub fn new(slew_index: Vec<f64>, load_index: Vec<f64>, values: Vec<f64>) -> Result<NldmTable> {
        if slew_index.is_empty() || load_index.is_empty() {
            return Err(Error::Invalid("empty NLDM index".into()));
        }
        for idx in [&slew_index, &load_index] {
            if idx.windows(2).any(|w| !(w[0] < w[1])) || idx.iter().any(|v| !v.is_finite()) {
                return Err(Error::Invalid(
                    "NLDM index must be strictly ascending".into(),
                ));
            }
        }
        if values.len() != slew_index.len() * load_index.len()
            || values.iter().any(|v| !v.is_finite())
        {
            return Err(Error::Invalid(format!(
                "NLDM table needs {}x{} finite values, got {}",
                slew_index.len(),
                load_index.len(),
                values.len()
            )));
        }
        Ok(NldmTable {
            slew_index,
            load_index,
            values,
        })
    }

    pub fn constant(v: f64) -> NldmTable {
        NldmTable {
            slew_index: vec![0.0],
            load_index: vec![0.0],
            values: vec![v],
        }
    }

    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.load_index.len() + col]
    }

    fn write(&self, s: &mut String) {
        write!(
            s,
            "rows {} cols {}",
            self.slew_index.len(),
            self.load_index.len()
        )
        .unwrap();
        for v in self
            .slew_index
            .iter()
            .chain(&self.load_index)
            .chain(&self.values)
        {
            write!(s, " {v}").unwrap();
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellArc {
    pub from: PinId,
    pub to: PinId,
    pub delay: NldmTable,
    pub slew: NldmTable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Net {
    pub name: String,
    pub driver: PinId,
    pub sinks: Vec<PinId>,
}

impl Net {
    pub fn pins(&self) -> impl Iterator<Item = PinId> + '_ {
        std::iter::once(self.driver).chain(self.sinks.iter().copied())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimaryInput {
    pub pin: PinId,
    pub arrival: f64,
    pub slew: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimaryOutput {
    pub pin: PinId,
    /// Falls back to the clock period when absent.
    pub required: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Netlist {
    pub pins: Vec<Pin>,
    pub arcs: Vec<CellArc>,
    pub nets: Vec<Net>,
    pub clock_period: Option<f64>,
    pub inputs: Vec<PrimaryInput>,
    pub outputs: Vec<PrimaryOutput>,
    pin_index: HashMap<String, PinId>,
    net_index: HashMap<String, NetId>,
}

impl Netlist {
    pub fn pin_id(&self, name: &str) -> Option<PinId> {
        self.pin_index.get(name).copied()
    }

    pub fn net_id(&self, name: &str) -> Option<NetId> {
        self.net_index.get(name).copied()
    }

    pub fn add_pin(&mut self, pin: Pin) -> Result<PinId> {
        if self.pin_index.contains_key(&pin.name) {
            return Err(Error::Invalid(format!("duplicate pin '{}'", pin.name)));
        }
        let id = self.pins.len();
        self.pin_index.insert(pin.name.clone(), id);
        self.pins.push(pin);
        Ok(id)
    }

    pub fn add_net(&mut self, net: Net) -> Result<NetId> {
        if self.net_index.contains_key(&net.name) {
            return Err(Error::Invalid(format!("duplicate net '{}'", net.name)));
        }
        let id = self.nets.len();
        self.net_index.insert(net.name.clone(), id);
        self.nets.push(net);
        Ok(id)
    }

    pub fn drive_resistance(&self, pin: PinId) -> f64 {
        self.pins[pin].drive.unwrap_or(DEFAULT_DRIVE)
    }

    pub fn required(&self, po: &PrimaryOutput) -> Option<f64> {
        po.required.or(self.clock_period)
    }

    /// Net each pin belongs to, if any.
    pub fn net_of_pins(&self) -> Vec<Option<NetId>> {
        let mut owner = vec![None; self.pins.len()];
        for (id, net) in self.nets.iter().enumerate() {
            for p in net.pins() {
                owner[p] = Some(id);
            }
        }
        owner
    }

    pub fn load(path: &Path) -> Result<Netlist> {
        Netlist::parse(&read_file(path)?)
    }

    pub fn parse(text: &str) -> Result<Netlist> {
        let mut nl = Netlist::default();
        for (line, toks) in lines(text) {
            let mut t = Tokens::new(line, &toks);
            let at = |e: Error| match e {
                Error::Invalid(m) => Error::parse(line, m),
                e => e,
            };
            match t.word("keyword")? {
                "pin" => {
                    let name = t.word("pin id")?.to_string();
                    let x = t.num("x")?;
                    let y = t.num("y")?;
                    let layer = t.num("layer")?;
                    let cap = if t.peek().is_some() {
                        t.nonneg("cap")?
                    } else {
                        0.0
                    };
                    t.end()?;
                    nl.add_pin(Pin {
                        name,
                        x,
                        y,
                        layer,
                        cap,
                        drive: None,
                    })
                    .map_err(at)?;
                }
                "drive" => {
                    let p = pin_ref(&nl, &mut t)?;
                    let r = t.nonneg("drive resistance")?;
                    t.end()?;
                    nl.pins[p].drive = Some(r);
                }
                "arc" => {
                    let from = pin_ref(&nl, &mut t)?;
                    let to = pin_ref(&nl, &mut t)?;
                    let mut delay = None;
                    let mut slew = None;
                    while let Some(kind) = t.peek() {
                        t.word("table kind")?;
                        let table = parse_table(&mut t)?;
                        match kind {
                            "delaytable" => delay = Some(table),
                            "slewtable" => slew = Some(table),
                            k => return Err(Error::parse(line, format!("unknown table '{k}'"))),
                        }
                    }
                    let delay =
                        delay.ok_or_else(|| Error::parse(line, "arc without delaytable"))?;
                    let slew = slew.ok_or_else(|| Error::parse(line, "arc without slewtable"))?;
                    nl.arcs.push(CellArc {
                        from,
                        to,
                        delay,
                        slew,
                    });
                }
                "net" => {
                    let name = t.word("net id")?.to_string();
                    let driver = pin_ref(&nl, &mut t)?;
                    let mut sinks = Vec::new();
                    while t.peek().is_some() {
                        sinks.push(pin_ref(&nl, &mut t)?);
                    }
                    nl.add_net(Net {
                        name,
                        driver,
                        sinks,
                    })
                    .map_err(at)?;
                }
                "clock" => {
                    let p = t.finite("clock period")?;
                    if p <= 0.0 {
                        return Err(Error::parse(line, "clock period must be positive"));
                    }
                    t.end()?;
                    nl.clock_period = Some(p);
                }
                "pi" => {
                    let pin = pin_ref(&nl, &mut t)?;
                    let arrival = t.finite("arrival")?;
                    let slew = t.nonneg("slew")?;
                    t.end()?;
                    nl.inputs.push(PrimaryInput { pin, arrival, slew });
                }
                "po" => {
                    let pin = pin_ref(&nl, &mut t)?;
                    let required = if t.peek().is_some() {
                        Some(t.finite("required")?)
                    } else {
                        None
                    };
                    t.end()?;
                    nl.outputs.push(PrimaryOutput { pin, required });
                }
                k => return Err(Error::parse(line, format!("unknown keyword '{k}'"))),
            }
        }
        Ok(nl)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if let Some(p) = self.clock_period {
            writeln!(s, "clock {p}").unwrap();
        }
        for p in &self.pins {
            writeln!(s, "pin {} {} {} {} {}", p.name, p.x, p.y, p.layer, p.cap).unwrap();
        }
        for p in self.pins.iter().filter(|p| p.drive.is_some()) {
            writeln!(s, "drive {} {}", p.name, p.drive.unwrap()).unwrap();
        }
        for a in &self.arcs {
            write!(
                s,
                "arc {} {} delaytable ",
                self.pins[a.from].name, self.pins[a.to].name
            )
            .unwrap();
            a.delay.write(&mut s);
            s.push_str(" slewtable ");
            a.slew.write(&mut s);
            s.push('\n');
        }
        for n in &self.nets {
            write!(s, "net {} {}", n.name, self.pins[n.driver].name).unwrap();
            for &k in &n.sinks {
                write!(s, " {}", self.pins[k].name).unwrap();
            }
            s.push('\n');
        }
        for i in &self.inputs {
            writeln!(s, "pi {} {} {}", self.pins[i.pin].name, i.arrival, i.slew).unwrap();
        }
        for o in &self.outputs {
            match o.required {
                Some(r) => writeln!(s, "po {} {}", self.pins[o.pin].name, r).unwrap(),
                None => writeln!(s, "po {}", self.pins[o.pin].name).unwrap(),
            }
        }
        s
    }
}

fn pin_ref(nl: &Netlist, t: &mut Tokens<'_>) -> Result<PinId> {
    let name = t.word("pin reference")?;
    nl.pin_id(name)
        .ok_or_else(|| Error::parse(t.line(), format!("dangling pin reference '{name}'")))
}

/// `rows n cols m <n slew idx> <m load idx> <n*m values>`; `/` separators are ignored.
fn parse_table(t: &mut Tokens<'_>) -> Result<NldmTable> {
    let line = t.line();
    let next_num = |t: &mut Tokens<'_>, what: &str| -> Result<f64> {
        while t.peek() == Some("/") {
            t.word("/")?;
        }
        t.finite(what)
    };
    if t.word("'rows'")? != "rows" {
        return Err(Error::parse(line, "expected 'rows'"));
    }
    let n: usize = t.num("row count")?;
    if t.word("'cols'")? != "cols" {
        return Err(Error::parse(line, "expected 'cols'"));
    }
    let m: usize = t.num("column count")?;
    let slew = (0..n)
        .map(|_| next_num(t, "slew index"))
        .collect::<Result<Vec<_>>>()?;
    let load = (0..m)
        .map(|_| next_num(t, "load index"))
        .collect::<Result<Vec<_>>>()?;
    let vals = (0..n * m)
        .map(|_| next_num(t, "table value"))
        .collect::<Result<Vec<_>>>()?;
    NldmTable::new(slew, load, vals).map_err(|e| Error::parse(line, e.to_string()))
}
