// SPDX-License-Identifier: Apache-2.0
//! Performance-driven layer assignment.
//!
//! Turns a 2D GCell-level global routing solution into a 3D one. Nets are
//! ordered and batched by their timing criticality, then each net's
//! layer-assignment tree is solved with a bottom-up dynamic program whose
//! candidate selection looks ahead at upstream resistance.
//!
//! The pipeline is: [`design`] (inputs) → [`sta`] (timing on the 2D estimate)
//! → [`schedule`] (ordering and batching) → [`tree`] (per-net trees and
//! weights) → [`assign`] (batched DP) → [`eval`] (scoring).

pub mod assign;
pub mod design;
mod error;
pub mod eval;
pub mod gen;
pub mod pipeline;
pub mod schedule;
pub mod sta;
pub mod tree;

pub use error::{Error, Result};
