// SPDX-License-Identifier: Apache-2.0
//! Bilinear NLDM table lookup. Inputs outside the index range are clamped to
//! the nearest edge rather than extrapolated.

use crate::design::NldmTable;

fn bracket(index: &[f64], v: f64) -> (usize, usize, f64) {
    let n = index.len();
    if n == 1 || v <= index[0] {
        return (0, 0, 0.0);
    }
    if v >= index[n - 1] {
        return (n - 1, n - 1, 0.0);
    }
    let hi = index.partition_point(|&x| x <= v).min(n - 1);
    let lo = hi - 1;
    (lo, hi, (v - index[lo]) / (index[hi] - index[lo]))
}

impl NldmTable {
    pub fn lookup(&self, slew: f64, load: f64) -> f64 {
        let (r0, r1, tr) = bracket(&self.slew_index, slew);
        let (c0, c1, tc) = bracket(&self.load_index, load);
        let top = self.at(r0, c0) * (1.0 - tc) + self.at(r0, c1) * tc;
        let bottom = self.at(r1, c0) * (1.0 - tc) + self.at(r1, c1) * tc;
        top * (1.0 - tr) + bottom * tr
    }
}
