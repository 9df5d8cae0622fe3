use std::collections::BTreeMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{ExperimentRecord, GridConfig, Method};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 14] = [
    "dataset",
    "method",
    "c",
    "log2_c",
    "k",
    "fold",
    "status",
    "accuracy",
    "degenerate",
    "lambda_used",
    "dual_objective",
    "solver_evaluations",
    "fold_plan",
    "wall_time",
];

/// `results.csv` → `results.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

#[derive(Serialize)]
struct Sidecar<'a> {
    library: &'static str,
    version: &'static str,
    records: usize,
    datasets: Vec<&'a str>,
    fold_plans: Vec<&'a str>,
    config: Option<&'a GridConfig>,
}

/// Writes one CSV row per record and a JSON sidecar with the run
/// configuration next to it.
pub fn emit_results(records: &[ExperimentRecord], path: &Path, config: Option<&GridConfig>) -> Result<()> {
    if records.is_empty() {
        return Err(Error::invalid("no records to write"));
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;

    let mut datasets: Vec<&str> = records.iter().map(|r| r.dataset.as_str()).collect();
    datasets.dedup();
    let mut fold_plans: Vec<&str> = records.iter().map(|r| r.fold_plan.as_str()).collect();
    fold_plans.sort_unstable();
    fold_plans.dedup();
    let sidecar = Sidecar {
        library: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        records: records.len(),
        datasets,
        fold_plans,
        config,
    };
    let side = sidecar_path(path);
    let file = File::create(&side).map_err(|e| Error::io(&side, e))?;
    serde_json::to_writer_pretty(file, &sidecar)?;
    Ok(())
}

pub fn read_results(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    if header != CSV_HEADER {
        return Err(Error::Parse {
            line: 1,
            msg: format!("unexpected header {}", header.join(",")),
        });
    }
    reader
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

/// Fold-aggregated view of one `(dataset, method, k, C)` cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CellSummary {
    pub dataset: String,
    pub method: Method,
    pub k: u32,
    pub c: f64,
    pub folds: usize,
    pub degenerate_folds: usize,
    /// Mean test accuracy; absent unless every fold produced one.
    pub mean_accuracy: Option<f64>,
}

impl CellSummary {
    pub fn is_degenerate(&self) -> bool {
        self.degenerate_folds > 0
    }
}

/// Groups records by cell, ordered by `(dataset, method, k, C)`.
pub fn summarize(records: &[ExperimentRecord]) -> Vec<CellSummary> {
    let mut cells: BTreeMap<(String, Method, u32, u64), Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in records {
        // positive C orders the same as its bit pattern
        cells
            .entry((r.dataset.clone(), r.method, r.k, r.c.to_bits()))
            .or_default()
            .push(r);
    }
    cells
        .into_iter()
        .map(|((dataset, method, k, c), rs)| {
            let accs: Vec<f64> = rs.iter().filter_map(|r| r.accuracy).collect();
            let mean_accuracy = (accs.len() == rs.len()).then(|| accs.iter().sum::<f64>() / accs.len() as f64);
            CellSummary {
                dataset,
                method,
                k,
                c: f64::from_bits(c),
                folds: rs.len(),
                degenerate_folds: rs.iter().filter(|r| r.degenerate).count(),
                mean_accuracy,
            }
        })
        .collect()
}
