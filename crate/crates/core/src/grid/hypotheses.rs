//! Aggregate checks over a set of grids.
//!
//! * h1 – how many tests are not significant at `alpha`;
//! * h2 – which lines fail to be non-increasing in distance;
//! * h3 – where a `precede` point lies below its `neighbor` counterpart;
//! * h4 – descriptive comparison of switches towards and away from the
//!   shared item's language of origin. No verdict is attached.

use serde::{Deserialize, Serialize};

use super::GridResult;
use crate::association::{Direction, Mode, SharedType};

/// Relative slack for the non-increasing check: `next <= prev * (1 + τ)`.
pub const MONOTONE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellRef {
    pub grid: usize,
    pub grid_label: String,
    pub direction: Direction,
    pub mode: Mode,
    pub distance: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H1Report {
    pub tests: usize,
    pub non_significant: usize,
    pub fraction: f64,
    pub cells: Vec<CellRef>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineCheck {
    pub grid: usize,
    pub grid_label: String,
    pub direction: Direction,
    pub mode: Mode,
    pub monotone: bool,
    /// Distances at which the RSP rises above the previous point.
    pub violations: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H2Report {
    pub lines: usize,
    pub monotone: usize,
    pub checks: Vec<LineCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCheck {
    pub grid: usize,
    pub grid_label: String,
    pub direction: Direction,
    pub distance: u32,
    pub precede_rsp: Option<f64>,
    pub neighbor_rsp: Option<f64>,
    /// `None` when either side is undefined.
    pub compliant: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H3Report {
    /// (direction, distance) pairs with both sides defined.
    pub pairs_compared: usize,
    /// All cells taking part in the comparison, both modes counted.
    pub points_total: usize,
    pub violations: usize,
    pub checks: Vec<PairCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionalComparison {
    pub grid: usize,
    pub grid_label: String,
    pub shared_type: SharedType,
    pub origin: String,
    pub mode: Mode,
    pub distance: u32,
    pub rsp_to_origin: Option<f64>,
    pub rsp_from_origin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H4Report {
    pub comparisons: Vec<DirectionalComparison>,
    pub to_origin_higher: usize,
    pub from_origin_higher: usize,
    pub ties: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub alpha: f64,
    pub grids: usize,
    pub h1: H1Report,
    pub h2: H2Report,
    pub h3: H3Report,
    pub h4: H4Report,
    /// Cells whose RSP is undefined; skipped by h2-h4.
    pub undefined_cells: Vec<CellRef>,
}

impl HypothesisReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn summary(&self) -> String {
        format!(
            "h1: {}/{} tests with p >= {}\nh2: {}/{} lines non-increasing\nh3: {} of {} precede/neighbor pairs ({} points) with precede below neighbor\nh4: to-origin higher {}, from-origin higher {}, ties {}\n",
            self.h1.non_significant,
            self.h1.tests,
            self.alpha,
            self.h2.monotone,
            self.h2.lines,
            self.h3.violations,
            self.h3.pairs_compared,
            self.h3.points_total,
            self.h4.to_origin_higher,
            self.h4.from_origin_higher,
            self.h4.ties,
        )
    }
}

fn cell_ref(
    grid: usize,
    g: &GridResult,
    direction: Direction,
    mode: Mode,
    distance: u32,
) -> CellRef {
    CellRef {
        grid,
        grid_label: g.spec.label(),
        direction,
        mode,
        distance,
    }
}

/// Non-increasing check over the defined segments of a line.
fn line_violations(distances: &[u32], rsp: &[Option<f64>]) -> Vec<u32> {
    let mut out = Vec::new();
    for i in 1..rsp.len() {
        if let (Some(prev), Some(next)) = (rsp[i - 1], rsp[i]) {
            if next > prev * (1.0 + MONOTONE_TOLERANCE) {
                out.push(distances[i]);
            }
        }
    }
    out
}

pub fn evaluate_hypotheses(grids: &[GridResult], alpha: f64) -> HypothesisReport {
    let mut h1 = H1Report {
        tests: 0,
        non_significant: 0,
        fraction: 0.0,
        cells: Vec::new(),
    };
    let mut h2 = H2Report {
        lines: 0,
        monotone: 0,
        checks: Vec::new(),
    };
    let mut h3 = H3Report {
        pairs_compared: 0,
        points_total: 0,
        violations: 0,
        checks: Vec::new(),
    };
    let mut h4 = H4Report {
        comparisons: Vec::new(),
        to_origin_higher: 0,
        from_origin_higher: 0,
        ties: 0,
    };
    let mut undefined_cells = Vec::new();

    for (gi, grid) in grids.iter().enumerate() {
        let label = grid.spec.label();
        for cell in &grid.cells {
            h1.tests += 1;
            if cell.result.p_value >= alpha {
                h1.non_significant += 1;
                h1.cells
                    .push(cell_ref(gi, grid, cell.direction, cell.mode, cell.distance));
            }
            if cell.result.rsp.is_none() {
                undefined_cells.push(cell_ref(gi, grid, cell.direction, cell.mode, cell.distance));
            }
        }

        for line in &grid.lines {
            let violations = line_violations(&line.distances, &line.rsp);
            h2.lines += 1;
            if violations.is_empty() {
                h2.monotone += 1;
            }
            h2.checks.push(LineCheck {
                grid: gi,
                grid_label: label.clone(),
                direction: line.direction,
                mode: line.mode,
                monotone: violations.is_empty(),
                violations,
            });
        }

        for &direction in &grid.spec.directions {
            for &distance in &grid.spec.distances {
                let precede = grid.cell(direction, Mode::Precede, distance);
                let neighbor = grid.cell(direction, Mode::Neighbor, distance);
                let (Some(precede), Some(neighbor)) = (precede, neighbor) else {
                    continue;
                };
                let compliant = match (precede.result.rsp, neighbor.result.rsp) {
                    (Some(p), Some(n)) => Some(p >= n),
                    _ => None,
                };
                if let Some(ok) = compliant {
                    h3.pairs_compared += 1;
                    h3.points_total += 2;
                    if !ok {
                        h3.violations += 1;
                    }
                }
                h3.checks.push(PairCheck {
                    grid: gi,
                    grid_label: label.clone(),
                    direction,
                    distance,
                    precede_rsp: precede.result.rsp,
                    neighbor_rsp: neighbor.result.rsp,
                    compliant,
                });
            }
        }

        let (origin, to_origin, from_origin) = match grid.spec.shared_type {
            SharedType::SharedL1 => (grid.spec.pair.l1, Direction::L2ToL1, Direction::L1ToL2),
            SharedType::SharedL2 => (grid.spec.pair.l2, Direction::L1ToL2, Direction::L2ToL1),
            SharedType::SharedOther | SharedType::AllShared => continue,
        };
        for &mode in &grid.spec.modes {
            for &distance in &grid.spec.distances {
                let to = grid.cell(to_origin, mode, distance);
                let from = grid.cell(from_origin, mode, distance);
                let (Some(to), Some(from)) = (to, from) else {
                    continue;
                };
                let (rsp_to, rsp_from) = (to.result.rsp, from.result.rsp);
                if let (Some(t), Some(f)) = (rsp_to, rsp_from) {
                    if t > f {
                        h4.to_origin_higher += 1;
                    } else if f > t {
                        h4.from_origin_higher += 1;
                    } else {
                        h4.ties += 1;
                    }
                }
                h4.comparisons.push(DirectionalComparison {
                    grid: gi,
                    grid_label: label.clone(),
                    shared_type: grid.spec.shared_type,
                    origin: origin.to_string(),
                    mode,
                    distance,
                    rsp_to_origin: rsp_to,
                    rsp_from_origin: rsp_from,
                });
            }
        }
    }

    h1.fraction = if h1.tests == 0 {
        0.0
    } else {
        h1.non_significant as f64 / h1.tests as f64
    };

    HypothesisReport {
        alpha,
        grids: grids.len(),
        h1,
        h2,
        h3,
        h4,
        undefined_cells,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segments_break_at_undefined_points() {
        let d = [1, 2, 3, 4, 5, 6];
        // rise across the gap is not a violation
        let rsp = [Some(3.0), Some(2.0), None, Some(2.5), Some(2.5), Some(1.0)];
        assert!(line_violations(&d, &rsp).is_empty());
        let rsp = [Some(3.0), Some(2.0), Some(2.1), None, Some(1.0), Some(1.5)];
        assert_eq!(line_violations(&d, &rsp), vec![3, 6]);
    }

    #[test]
    fn tolerance_absorbs_rounding() {
        let d = [1, 2];
        assert!(line_violations(&d, &[Some(1.0), Some(1.0 + 1e-12)]).is_empty());
        assert_eq!(line_violations(&d, &[Some(1.0), Some(1.0 + 1e-6)]), vec![2]);
    }
}
