//! Citation-count tables sweeping one quantity behind ψ.
//!
//! Journals: `i` (0) is scored, `o` (1) shares its publisher, `w` (2) and a
//! silent sibling (3) form the other publisher. Every journal has 100 papers.

use std::path::Path;

use crate::output::{cell, CsvOut};
use crate::selfcite::{JournalCounts, SolidarityOptions};
use crate::Result;

const I: u32 = 0;
const O: u32 = 1;
const W: u32 = 2;

/// Swept citation counts `0, 10, ..., 500`.
pub const DEFAULT_GRID: [f64; 51] = {
    let mut g = [0.0; 51];
    let mut k = 0;
    while k < 51 {
        g[k] = (10 * k) as f64;
        k += 1;
    }
    g
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// `i` cites `o` `x` times and `o` cites nobody: the publisher's own
    /// self-citation moves with the journal's.
    A,
    /// As `A`, but `o` cites `o` `1000 - x` times so publisher totals stay fixed.
    B,
    /// Only the citations `i` receives from `o` (`x`) vary.
    C,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::A, Scenario::B, Scenario::C];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::A => "a",
            Scenario::B => "b",
            Scenario::C => "c",
        }
    }
}

pub fn scenario_counts(scenario: Scenario, x: f64) -> JournalCounts {
    let mut c = JournalCounts::new(vec![Some(0), Some(0), Some(1), Some(1)], vec![100; 4]);
    match scenario {
        Scenario::A | Scenario::B => {
            c.set(I, O, x);
            c.set(I, I, 10.0);
            c.set(I, W, 50.0);
            c.set(W, I, 20.0);
            c.set(W, O, 30.0);
            if scenario == Scenario::B {
                c.set(O, I, 20.0);
                c.set(O, O, 1000.0 - x);
                c.set(O, W, 50.0);
            }
        }
        Scenario::C => {
            c.set(I, O, 20.0);
            c.set(I, I, 10.0);
            c.set(I, W, 50.0);
            c.set(W, I, 20.0);
            c.set(W, O, 30.0);
            c.set(O, O, 100.0);
            c.set(O, W, 80.0);
            c.set(O, I, x);
        }
    }
    c
}

/// ψ of journal `i` at sweep value `x`.
pub fn psi_scenario(scenario: Scenario, x: f64) -> Option<f64> {
    scenario_counts(scenario, x)
        .solidarity(I, SolidarityOptions::default())
        .ok()
        .map(|s| s.psi)
}

pub fn psi_scenarios(scenario: Scenario, grid: &[f64]) -> Vec<(f64, Option<f64>)> {
    grid.iter().map(|&x| (x, psi_scenario(scenario, x))).collect()
}

pub fn write_scenarios_csv(path: &Path, grid: &[f64]) -> Result<()> {
    let mut out = CsvOut::create(path, &["scenario", "x", "psi"])?;
    for s in Scenario::ALL {
        for (x, psi) in psi_scenarios(s, grid) {
            out.row([s.as_str().to_string(), x.to_string(), cell(psi)])?;
        }
    }
    out.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        // (a): psi = 3 (x + 10) / (x + 60) / 200
        for x in [0.0, 40.0, 500.0] {
            let want = 3.0 * (x + 10.0) / (x + 60.0) / 200.0;
            assert!((psi_scenario(Scenario::A, x).unwrap() - want).abs() < 1e-15);
        }
        // (c): psi = 0.375 (260 + x)(30 + x) / ((180 + x)(10 + x)) / 200
        for x in [0.0, 70.0, 500.0] {
            let want = 0.375 * (260.0 + x) * (30.0 + x) / ((180.0 + x) * (10.0 + x)) / 200.0;
            assert!((psi_scenario(Scenario::C, x).unwrap() - want).abs() < 1e-15);
        }
    }

    #[test]
    fn grid() {
        assert_eq!(DEFAULT_GRID[0], 0.0);
        assert_eq!(DEFAULT_GRID[50], 500.0);
    }
}
