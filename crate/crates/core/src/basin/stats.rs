//! Aggregate performance statistics of a sampled basin grid.

use std::fmt::Write as _;

use super::rate::estimate_rate;
use super::sample::BasinGrid;

pub const STATS_CSV_HEADER: &str = "avg_iterations,avg_step_size,pct_convergent,avg_rate";

/// Averages over the "convergent" cells: converged *and* at the oracle's
/// solution. Cells whose oracle failed are excluded from the percentage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerformanceTable {
    pub avg_iterations: f64,
    pub avg_step_size: f64,
    pub pct_convergent: f64,
    /// Mean fitted order; NaN when no cell has enough usable errors.
    pub avg_rate: f64,
    pub total: usize,
    pub convergent: usize,
    /// Converged to some known solution, right or wrong.
    pub converged_any: usize,
    pub incorrect_zero: usize,
    pub oracle_undefined: usize,
}

impl PerformanceTable {
    /// Fraction of oracle-defined cells that converged to the wrong solution.
    pub fn incorrect_fraction(&self) -> f64 {
        let defined = self.total - self.oracle_undefined;
        if defined == 0 {
            0.0
        } else {
            self.incorrect_zero as f64 / defined as f64
        }
    }

    pub fn csv(&self) -> String {
        format!(
            "{STATS_CSV_HEADER}\n{:.6},{:.6},{:.6},{:.6}\n",
            self.avg_iterations, self.avg_step_size, self.pct_convergent, self.avg_rate
        )
    }
}

fn mean(sum: f64, count: usize) -> f64 {
    if count == 0 {
        f64::NAN
    } else {
        sum / count as f64
    }
}

pub fn aggregate(grid: &BasinGrid) -> PerformanceTable {
    let mut iter_sum = 0.0;
    let (mut step_sum, mut step_count) = (0.0, 0usize);
    let (mut rate_sum, mut rate_count) = (0.0, 0usize);
    let mut table = PerformanceTable {
        avg_iterations: f64::NAN,
        avg_step_size: f64::NAN,
        pct_convergent: 0.0,
        avg_rate: f64::NAN,
        total: grid.cells.len(),
        convergent: 0,
        converged_any: 0,
        incorrect_zero: 0,
        oracle_undefined: 0,
    };
    for cell in &grid.cells {
        if cell.oracle.is_none() {
            table.oracle_undefined += 1;
        }
        if cell.converged() {
            table.converged_any += 1;
        }
        if cell.incorrect_zero() {
            table.incorrect_zero += 1;
        }
        if !cell.correct {
            continue;
        }
        table.convergent += 1;
        iter_sum += cell.iterations as f64;
        step_sum += cell.steps.iter().sum::<f64>();
        step_count += cell.steps.len();
        if let Ok((rho, _)) = estimate_rate(&cell.errors) {
            rate_sum += rho;
            rate_count += 1;
        }
    }
    let defined = table.total - table.oracle_undefined;
    if defined > 0 {
        table.pct_convergent = 100.0 * table.convergent as f64 / defined as f64;
    }
    table.avg_iterations = mean(iter_sum, table.convergent);
    table.avg_step_size = mean(step_sum, step_count);
    table.avg_rate = mean(rate_sum, rate_count);
    table
}

/// Side-by-side block with one column per configuration.
pub fn format_table(columns: &[(String, PerformanceTable)]) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:<28}", "");
    for (name, _) in columns {
        let _ = write!(out, "{name:>16}");
    }
    out.push('\n');
    type Cell = fn(&PerformanceTable) -> String;
    let rows: [(&str, Cell); 4] = [
        ("Average nr. of iterations", |t| format!("{:.1}", t.avg_iterations)),
        ("Average step size", |t| format!("{:.3}", t.avg_step_size)),
        ("% of convergent iterations", |t| format!("{:.1}%", t.pct_convergent)),
        ("Average rate", |t| format!("{:.2}", t.avg_rate)),
    ];
    for (label, cell) in rows {
        let _ = write!(out, "{label:<28}");
        for (_, t) in columns {
            let _ = write!(out, "{:>16}", cell(t));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basin::sample::{CellRecord, SamplingPlan};
    use crate::benchmark::{OracleConfig, Rect};
    use crate::solver::{Mode, SolveStatus, SolverConfig};

    fn cell(correct: bool, iterations: usize) -> CellRecord {
        CellRecord {
            label: correct.then_some(0),
            status: if correct { SolveStatus::Converged } else { SolveStatus::MaxIters },
            iterations,
            final_step: 1.0,
            steps: vec![1.0; iterations + 1],
            oracle: Some(0),
            correct,
            errors: if correct { vec![0.5, 0.25, 0.0625, 0.00390625] } else { vec![] },
        }
    }

    fn grid(cells: Vec<CellRecord>) -> BasinGrid {
        BasinGrid {
            problem_id: "test".into(),
            labels: vec!["a".into()],
            plan: SamplingPlan {
                rect: Rect::new(0.0, 1.0, 0.0, 1.0),
                nx: cells.len(),
                ny: 1,
                solver: SolverConfig::new(Mode::Classical),
                oracle: OracleConfig::default(),
            },
            markers: vec![],
            cells,
        }
    }

    #[test]
    fn identical_cells() {
        let t = aggregate(&grid(vec![cell(true, 3); 4]));
        assert_eq!(t.avg_iterations, 3.0);
        assert_eq!(t.pct_convergent, 100.0);
        assert_eq!(t.avg_step_size, 1.0);
        assert!((t.avg_rate - 2.0).abs() < 1e-12);
    }

    #[test]
    fn half_divergent() {
        let t = aggregate(&grid(vec![cell(true, 2), cell(false, 100), cell(true, 2), cell(false, 100)]));
        assert_eq!(t.pct_convergent, 50.0);
        assert_eq!(t.avg_iterations, 2.0);
    }

    #[test]
    fn oracle_failures_leave_the_denominator() {
        let mut undefined = cell(false, 5);
        undefined.oracle = None;
        let t = aggregate(&grid(vec![cell(true, 1), undefined]));
        assert_eq!(t.pct_convergent, 100.0);
        assert_eq!(t.oracle_undefined, 1);
    }

    #[test]
    fn csv_layout() {
        let t = aggregate(&grid(vec![cell(true, 3)]));
        let csv = t.csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(STATS_CSV_HEADER));
        assert_eq!(lines.next(), Some("3.000000,1.000000,100.000000,2.000000"));
    }
}
