use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{BenchReport, Method};
use crate::Result;

/// One line of the summary table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub dataset_size: usize,
    pub method: Method,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub n_actions_mean: f64,
    pub n_actions_sd: f64,
}

pub fn summary_rows(report: &BenchReport) -> Vec<SummaryRow> {
    report
        .results
        .iter()
        .map(|r| SummaryRow {
            dataset_size: r.dataset_size,
            method: r.method,
            trials: r.trials,
            successes: r.successes,
            success_rate: r.success_rate,
            n_actions_mean: r.n_actions_mean,
            n_actions_sd: r.n_actions_sd,
        })
        .collect()
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| crate::Error::io("<summary>", e))?;
    Ok(())
}

pub fn read_summary_csv<R: Read>(input: R) -> Result<Vec<SummaryRow>> {
    let mut r = csv::Reader::from_reader(input);
    let rows = r.deserialize().collect::<std::result::Result<Vec<SummaryRow>, _>>()?;
    Ok(rows)
}

fn format_rate(rate: f64) -> String {
    if rate.fract() == 0.0 {
        format!("{rate:.0}")
    } else {
        format!("{rate:.1}")
    }
}

/// Aligned text table, one block per dataset size:
///
/// ```text
/// 5-point model (test MSE 135.95)
/// Method          Success [%]  Actions
/// MCTS                     64  1.20(0.41)
/// ```
pub fn format_table(report: &BenchReport) -> String {
    let mut out = String::new();
    for (i, model) in report.models.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "{}-point model (test MSE {:.2})", model.dataset_size, model.test_mse);
        let _ = writeln!(out, "{:<15} {:>11}  Actions", "Method", "Success [%]");
        for r in report.results.iter().filter(|r| r.dataset_size == model.dataset_size) {
            let _ = writeln!(
                out,
                "{:<15} {:>11}  {:.2}({:.2})",
                r.method.name(),
                format_rate(r.success_rate),
                r.n_actions_mean,
                r.n_actions_sd
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{run_bench, BenchConfig, Execution};
    use crate::mcts::{Budget, SearchConfig};

    fn report() -> BenchReport {
        let cfg = BenchConfig {
            trials: 2,
            test_size: 10,
            search: SearchConfig { budget: Budget::Iterations(100), ..Default::default() },
            ..Default::default()
        };
        run_bench(&cfg, Execution::Sequential).unwrap().report
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let rows = summary_rows(&report());
        assert_eq!(rows.len(), 12);
        let mut buf = Vec::new();
        write_summary_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("dataset_size,method,trials,successes,success_rate,n_actions_mean,n_actions_sd\n"));
        assert_eq!(read_summary_csv(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn table_layout() {
        let r = report();
        let table = format_table(&r);
        assert_eq!(table.matches("-point model").count(), 4);
        let mcts = table.lines().find(|l| l.starts_with("MCTS ")).unwrap();
        let res = r.result(40, Method::Mcts).unwrap();
        assert!(mcts.ends_with(&format!("{:.2}({:.2})", res.n_actions_mean, res.n_actions_sd)));
    }

    #[test]
    fn rates_print_without_spurious_decimals() {
        assert_eq!(format_rate(80.0), "80");
        assert_eq!(format_rate(100.0 / 3.0), "33.3");
    }
}
