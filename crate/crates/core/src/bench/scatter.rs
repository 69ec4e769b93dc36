use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::gp::{Feature, GpModel};
use crate::pouring::{ActionGrid, EpisodeTrace};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScatterKind {
    /// Background grid point at the reference level.
    Grid,
    /// Executed action, evaluated at the level it was planned from.
    Action,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatterRow {
    pub alpha: f64,
    pub duration: f64,
    pub gp_std: f64,
    pub kind: ScatterKind,
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
}

/// GP standard deviation over a `resolution × resolution` grid spanning the
/// action box at `level`, followed by one row per executed action.
pub fn variance_scatter<'t>(
    model: &GpModel,
    grid: &ActionGrid,
    level: f64,
    resolution: usize,
    traces: impl IntoIterator<Item = &'t EpisodeTrace>,
) -> Result<Vec<ScatterRow>> {
    let mut rows = Vec::new();
    for alpha in linspace(grid.alpha_min, grid.alpha_max, resolution) {
        for duration in linspace(grid.duration_min, grid.duration_max, resolution) {
            let gp_std = model.predict(&Feature { level, alpha, duration })?.std();
            rows.push(ScatterRow { alpha, duration, gp_std, kind: ScatterKind::Grid });
        }
    }
    for trace in traces {
        for step in &trace.steps {
            let (alpha, duration) = (step.action.alpha, step.action.duration);
            let f = Feature { level: step.observed.clamp(0.0, 100.0), alpha, duration };
            let gp_std = model.predict(&f)?.std();
            rows.push(ScatterRow { alpha, duration, gp_std, kind: ScatterKind::Action });
        }
    }
    Ok(rows)
}

/// Mean `gp_std` over rows of one kind, `None` if there are none.
pub fn mean_std(rows: &[ScatterRow], kind: ScatterKind) -> Option<f64> {
    let v: Vec<f64> = rows.iter().filter(|r| r.kind == kind).map(|r| r.gp_std).collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

pub fn write_scatter_csv<W: Write>(rows: &[ScatterRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| crate::Error::io("<scatter>", e))?;
    Ok(())
}

pub fn read_scatter_csv<R: Read>(input: R) -> Result<Vec<ScatterRow>> {
    let mut r = csv::Reader::from_reader(input);
    let rows = r.deserialize().collect::<std::result::Result<Vec<ScatterRow>, _>>()?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::KernelParams;
    use crate::pouring::{gen_dataset, GroundTruth};
    use crate::rng::stream;

    fn model() -> GpModel {
        let gt = GroundTruth::default();
        let data = gen_dataset(&gt, &ActionGrid::default(), 8, &mut stream(3, "scatter", &[])).unwrap();
        GpModel::fit(&data, &KernelParams::default()).unwrap()
    }

    #[test]
    fn grid_only_without_traces() {
        let m = model();
        let rows = variance_scatter(&m, &ActionGrid::default(), 0.0, 5, []).unwrap();
        assert_eq!(rows.len(), 25);
        assert!(rows.iter().all(|r| r.kind == ScatterKind::Grid));
        assert_eq!(mean_std(&rows, ScatterKind::Action), None);
        assert_eq!((rows[0].alpha, rows[0].duration), (0.25, 0.1));
        assert_eq!((rows[24].alpha, rows[24].duration), (2.0, 1.0));
    }

    #[test]
    fn grid_values_match_prediction() {
        let m = model();
        let rows = variance_scatter(&m, &ActionGrid::default(), 30.0, 4, []).unwrap();
        for r in rows {
            let p = m.predict(&Feature { level: 30.0, alpha: r.alpha, duration: r.duration }).unwrap();
            assert!((p.std() - r.gp_std).abs() <= 1e-12);
        }
    }

    #[test]
    fn csv_header_and_round_trip() {
        let m = model();
        let rows = variance_scatter(&m, &ActionGrid::default(), 0.0, 3, []).unwrap();
        let mut buf = Vec::new();
        write_scatter_csv(&rows, &mut buf).unwrap();
        assert!(buf.starts_with(b"alpha,duration,gp_std,kind\n"));
        assert!(String::from_utf8_lossy(&buf).lines().nth(1).unwrap().ends_with(",grid"));
        assert_eq!(read_scatter_csv(buf.as_slice()).unwrap(), rows);
    }
}
