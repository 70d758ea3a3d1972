//! Multi-test grids: every (direction, mode, distance) combination for one
//! corpus and shared-item type.

mod hypotheses;

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::association::{
    proximity_histogram, CountOptions, Direction, Mode, SharedType, DEFAULT_MAX_DISTANCE,
};
use crate::corpus::{Corpus, LanguagePair};
use crate::exact::{TestResult, DEFAULT_ALPHA};
use crate::switching::InsertionalPolicy;

pub use hypotheses::{
    evaluate_hypotheses, CellRef, DirectionalComparison, H1Report, H2Report, H3Report, H4Report,
    HypothesisReport, LineCheck, PairCheck, MONOTONE_TOLERANCE,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Free-form corpus reference (file name or source label).
    pub corpus: String,
    pub pair: LanguagePair,
    pub shared_type: SharedType,
    pub distances: Vec<u32>,
    pub modes: Vec<Mode>,
    pub directions: Vec<Direction>,
    pub insertional_policy: InsertionalPolicy,
    #[serde(default)]
    pub skip_neutral_items: bool,
    pub alpha: f64,
}

impl GridSpec {
    /// The default 3 × 2 × 6 grid.
    pub fn new(corpus: impl Into<String>, pair: LanguagePair, shared_type: SharedType) -> Self {
        GridSpec {
            corpus: corpus.into(),
            pair,
            shared_type,
            distances: (1..=DEFAULT_MAX_DISTANCE).collect(),
            modes: Mode::ALL.to_vec(),
            directions: Direction::ALL.to_vec(),
            insertional_policy: InsertionalPolicy::default(),
            skip_neutral_items: false,
            alpha: DEFAULT_ALPHA,
        }
    }

    pub fn test_count(&self) -> usize {
        self.distances.len() * self.modes.len() * self.directions.len()
    }

    pub fn check(&self) -> Result<(), String> {
        if self.distances.is_empty() || self.modes.is_empty() || self.directions.is_empty() {
            return Err("grid needs at least one distance, mode and direction".into());
        }
        if self.distances.contains(&0) {
            return Err("distances start at 1".into());
        }
        let mut sorted = self.distances.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted != self.distances {
            return Err("distances must be strictly increasing".into());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(format!("alpha {} outside (0, 1)", self.alpha));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        format!("{} {}", self.corpus, self.shared_type)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub direction: Direction,
    pub mode: Mode,
    pub distance: u32,
    #[serde(flatten)]
    pub result: TestResult,
    pub significant: bool,
}

/// RSP values of one (direction, mode) series, ordered by distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub name: String,
    pub direction: Direction,
    pub mode: Mode,
    pub distances: Vec<u32>,
    pub rsp: Vec<Option<f64>>,
    pub p_values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub spec: GridSpec,
    pub cells: Vec<GridCell>,
    pub lines: Vec<Line>,
    /// True when the corpus has no item of the requested shared type.
    pub degenerate: bool,
}

impl GridResult {
    pub fn from_cells(spec: GridSpec, cells: Vec<GridCell>) -> Self {
        let mut lines = Vec::new();
        for &direction in &spec.directions {
            for &mode in &spec.modes {
                let mut line = Line {
                    name: format!("{direction}/{mode}"),
                    direction,
                    mode,
                    distances: Vec::new(),
                    rsp: Vec::new(),
                    p_values: Vec::new(),
                };
                for &distance in &spec.distances {
                    if let Some(cell) = cells.iter().find(|c| {
                        c.direction == direction && c.mode == mode && c.distance == distance
                    }) {
                        line.distances.push(distance);
                        line.rsp.push(cell.result.rsp);
                        line.p_values.push(cell.result.p_value);
                    }
                }
                lines.push(line);
            }
        }
        let degenerate = cells.iter().all(|c| c.result.table.shared_total() == 0);
        GridResult {
            spec,
            cells,
            lines,
            degenerate,
        }
    }

    pub fn cell(&self, direction: Direction, mode: Mode, distance: u32) -> Option<&GridCell> {
        self.cells
            .iter()
            .find(|c| c.direction == direction && c.mode == mode && c.distance == distance)
    }

    pub fn is_complete(&self) -> bool {
        self.cells.len() == self.spec.test_count()
            && self.spec.directions.iter().all(|&dir| {
                self.spec.modes.iter().all(|&mode| {
                    self.spec
                        .distances
                        .iter()
                        .all(|&d| self.cell(dir, mode, d).is_some())
                })
            })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("grid serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// One row per cell: direction, mode, distance, a, b, c, d, shared_rate,
    /// nonshared_rate, rsp, p, significant.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record([
            "direction",
            "mode",
            "distance",
            "a",
            "b",
            "c",
            "d",
            "shared_rate",
            "nonshared_rate",
            "rsp",
            "p",
            "significant",
        ])?;
        let rate = |r: Option<f64>| r.map_or_else(|| "NA".to_string(), |v| format!("{v:.6}"));
        for cell in &self.cells {
            let t = &cell.result.table;
            writer.write_record([
                cell.direction.to_string(),
                cell.mode.to_string(),
                cell.distance.to_string(),
                t.a.to_string(),
                t.b.to_string(),
                t.c.to_string(),
                t.d.to_string(),
                rate(cell.result.shared_rate),
                rate(cell.result.nonshared_rate),
                format_rsp(cell.result.rsp),
                format_p(cell.result.p_value),
                cell.significant.to_string(),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// Three decimals, `NA` when undefined.
pub fn format_rsp(rsp: Option<f64>) -> String {
    rsp.map_or_else(|| "NA".to_string(), |v| format!("{v:.3}"))
}

/// Scientific notation with two significant digits, e.g. `2.2e-30`.
pub fn format_p(p: f64) -> String {
    format!("{p:.1e}")
}

/// Runs every test of `spec` over `corpus`. Work is spread over the current
/// rayon pool; the result does not depend on the pool size.
pub fn run_grid(corpus: &Corpus, spec: &GridSpec) -> GridResult {
    let max_distance = spec
        .distances
        .iter()
        .copied()
        .max()
        .unwrap_or(DEFAULT_MAX_DISTANCE);
    let options = CountOptions {
        shared_type: spec.shared_type,
        insertional_policy: spec.insertional_policy,
        skip_neutral_items: spec.skip_neutral_items,
    };
    let hist = proximity_histogram(corpus, &options, max_distance);

    let keys: Vec<(Direction, Mode, u32)> = spec
        .directions
        .iter()
        .flat_map(|&dir| {
            spec.modes
                .iter()
                .flat_map(move |&mode| spec.distances.iter().map(move |&d| (dir, mode, d)))
        })
        .collect();
    let cells: Vec<GridCell> = keys
        .par_iter()
        .map(|&(direction, mode, distance)| {
            let result = TestResult::from_table(hist.table(direction, mode, distance));
            GridCell {
                direction,
                mode,
                distance,
                significant: result.is_significant(spec.alpha),
                result,
            }
        })
        .collect();
    GridResult::from_cells(spec.clone(), cells)
}
