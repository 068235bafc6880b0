// SPDX-License-Identifier: Apache-2.0
//! Input data model: technology, GCell grid, netlist and 2D routes.
//!
//! All formats are line-based text with `#` comments. Units are ps, fF and
//! kΩ, with one GCell pitch as the unit of length.

mod grid;
mod netlist;
mod parse;
mod route;
mod tech;
mod validate;

use std::path::Path;

pub use grid::{DemandMap, GridGraph};
pub use netlist::{
    CellArc, Net, NetId, Netlist, NldmTable, Pin, PinId, PrimaryInput, PrimaryOutput, DEFAULT_DRIVE,
};
pub use route::{unit_edges, Point, Route2D, RouteSet, Segment, UnitEdge};
pub use tech::{Direction, Layer, Tech, MAX_LAYERS};
pub use validate::{has_errors, validate_design, Diagnostic, Severity};

pub(crate) use parse::{lines, read_file, Tokens};

use crate::{Error, Result};

/// A loaded and validated design. Routes are aligned with `netlist.nets`.
#[derive(Debug, Clone)]
pub struct Design {
    pub tech: Tech,
    pub grid: GridGraph,
    pub netlist: Netlist,
    pub routes: RouteSet,
    net_route: Vec<usize>,
}

impl Design {
    /// Validates and bundles the inputs; fails on any error diagnostic.
    pub fn new(tech: Tech, grid: GridGraph, netlist: Netlist, routes: RouteSet) -> Result<Design> {
        let diags = validate_design(&tech, &grid, &netlist, &routes);
        if has_errors(&diags) {
            let msg: Vec<String> = diags
                .iter()
                .filter(|d| d.severity == Severity::Error)
                .map(|d| d.message.clone())
                .collect();
            return Err(Error::Invalid(msg.join("; ")));
        }
        let net_route = netlist
            .nets
            .iter()
            .map(|n| routes.position(&n.name).expect("validated"))
            .collect();
        Ok(Design {
            tech,
            grid,
            netlist,
            routes,
            net_route,
        })
    }

    pub fn load(tech: &Path, grid: &Path, netlist: &Path, routes: &Path) -> Result<Design> {
        let tech = Tech::load(tech)?;
        let grid = GridGraph::load(grid, &tech)?;
        let netlist = Netlist::load(netlist)?;
        let routes = RouteSet::load(routes, &grid)?;
        Design::new(tech, grid, netlist, routes)
    }

    pub fn route(&self, net: NetId) -> &Route2D {
        &self.routes.routes[self.net_route[net]]
    }

    pub fn num_nets(&self) -> usize {
        self.netlist.nets.len()
    }
}
