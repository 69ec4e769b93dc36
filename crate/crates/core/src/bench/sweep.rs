use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{run_bench, summary_rows, BenchConfig, BenchReport, Execution, Method};
use crate::{Error, Result};

/// Search parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    /// Expansion sigmoid steepness.
    H,
    /// Selection softmax temperature.
    Tau,
    /// Inflation factor.
    W,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::H => "h",
            SweepParam::Tau => "tau",
            SweepParam::W => "w",
        }
    }

    pub fn apply(self, config: &mut BenchConfig, value: f64) {
        match self {
            SweepParam::H => config.search.steepness = value,
            SweepParam::Tau => config.search.tau = value,
            SweepParam::W => config.search.inflation_w = value,
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "h" => Ok(SweepParam::H),
            "tau" => Ok(SweepParam::Tau),
            "w" => Ok(SweepParam::W),
            _ => Err(Error::InvalidArgument(format!("unknown sweep parameter {s:?}; expected h, tau or w"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub report: BenchReport,
}

/// Runs the benchmark once per value of `param`.
pub fn run_sweep(config: &BenchConfig, param: SweepParam, values: &[f64], exec: Execution) -> Result<Vec<SweepPoint>> {
    if values.is_empty() {
        return Err(Error::Config("a sweep needs at least one value".into()));
    }
    values
        .iter()
        .map(|&value| {
            let mut cfg = config.clone();
            param.apply(&mut cfg, value);
            Ok(SweepPoint { value, report: run_bench(&cfg, exec)?.report })
        })
        .collect()
}

#[derive(Serialize)]
struct SweepRow {
    value: f64,
    dataset_size: usize,
    method: Method,
    success_rate: f64,
    n_actions_mean: f64,
    n_actions_sd: f64,
}

/// Success rate against parameter value; the first column is named after
/// the parameter.
pub fn write_sweep_csv<W: Write>(param: SweepParam, points: &[SweepPoint], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record([param.name(), "dataset_size", "method", "success_rate", "n_actions_mean", "n_actions_sd"])?;
    for p in points {
        for r in summary_rows(&p.report) {
            w.serialize(SweepRow {
                value: p.value,
                dataset_size: r.dataset_size,
                method: r.method,
                success_rate: r.success_rate,
                n_actions_mean: r.n_actions_mean,
                n_actions_sd: r.n_actions_sd,
            })?;
        }
    }
    w.flush().map_err(|e| Error::io("<sweep>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcts::{Budget, SearchConfig};

    fn cfg() -> BenchConfig {
        BenchConfig {
            trials: 2,
            dataset_sizes: vec![5],
            test_size: 10,
            methods: vec![Method::UaMcts1],
            search: SearchConfig { budget: Budget::Iterations(100), ..Default::default() },
            ..Default::default()
        }
    }

    #[test]
    fn single_value_matches_plain_bench() {
        let mut base = cfg();
        let points = run_sweep(&base, SweepParam::Tau, &[0.3], Execution::Sequential).unwrap();
        base.search.tau = 0.3;
        let direct = run_bench(&base, Execution::Sequential).unwrap().report;
        assert_eq!(points[0].report, direct);
    }

    #[test]
    fn zero_steepness_runs() {
        let points = run_sweep(&cfg(), SweepParam::H, &[0.0], Execution::Sequential).unwrap();
        assert_eq!(points[0].report.results[0].trials, 2);
    }

    #[test]
    fn csv_names_the_parameter() {
        let points = run_sweep(&cfg(), SweepParam::W, &[1.0, 2.0], Execution::Sequential).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(SweepParam::W, &points, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "w,dataset_size,method,success_rate,n_actions_mean,n_actions_sd");
        assert!(lines.next().unwrap().starts_with("1.0,5,UA-MCTS-1,"));
        assert!(lines.next().unwrap().starts_with("2.0,5,UA-MCTS-1,"));
    }

    #[test]
    fn empty_sweep_is_an_error() {
        assert!(run_sweep(&cfg(), SweepParam::H, &[], Execution::Sequential).is_err());
    }
}
