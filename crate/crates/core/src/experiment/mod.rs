//! Cross-validated grid over `(C, k)` comparing the QUBO trainer with the
//! SMO baseline on shared folds.

mod plot;
mod results;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use plot::{emit_plot, render_svg};
pub use results::{emit_results, read_results, sidecar_path, summarize, CellSummary, CSV_HEADER};

use crate::baseline::{dual_objective, smo_train, SmoConfig};
use crate::data::{make_folds, FoldPlan, SvmDataset};
use crate::encoding::{make_encoding, train_with_stats, QuboSolver, TrainConfig};
use crate::error::{Error, Result};
use crate::tabu::TabuConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    QuboSvm,
    Baseline,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    /// The accepted QUBO solution was all zeros.
    Degenerate,
    /// λ doublings ran out before `αᵀy = 0` held.
    Infeasible,
    Failed,
}

/// One `(dataset, method, C, k, fold)` result. `k` is 0 for the baseline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub dataset: String,
    pub method: Method,
    pub c: f64,
    pub log2_c: f64,
    pub k: u32,
    pub fold: usize,
    pub status: CellStatus,
    pub accuracy: Option<f64>,
    pub degenerate: bool,
    pub lambda_used: Option<f64>,
    pub dual_objective: Option<f64>,
    pub solver_evaluations: u64,
    pub fold_plan: String,
    pub wall_time: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub c_values: Vec<f64>,
    pub k_values: Vec<u32>,
    pub n_folds: usize,
    pub seed: u64,
    pub solver: TabuConfig,
    /// Independent tabu runs per QUBO solve.
    pub runs: usize,
    pub lambda0: f64,
    pub max_doublings: u32,
    pub smo: SmoConfig,
    pub include_baseline: bool,
}

/// `{2⁻⁶, 2⁻⁵, …, 2⁴}`.
pub fn default_c_grid() -> Vec<f64> {
    (-6..=4).map(|e| 2f64.powi(e)).collect()
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            c_values: default_c_grid(),
            k_values: vec![1, 2, 3],
            n_folds: 5,
            seed: 0,
            solver: TabuConfig {
                restarts: 5,
                iterations_per_restart: Some(20_000),
                ..TabuConfig::default()
            },
            runs: 20,
            lambda0: 1.0,
            max_doublings: 32,
            smo: SmoConfig::default(),
            include_baseline: true,
        }
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<()> {
        if self.c_values.is_empty() || self.k_values.is_empty() {
            return Err(Error::invalid("the C and k grids must be nonempty"));
        }
        if let Some(c) = self.c_values.iter().find(|c| !(**c > 0.0 && c.is_finite())) {
            return Err(Error::invalid(format!("C values must be positive, got {c}")));
        }
        if self.k_values.contains(&0) {
            return Err(Error::invalid("k values must be at least 1"));
        }
        if self.runs == 0 {
            return Err(Error::invalid("runs must be at least 1"));
        }
        self.solver.resolve(1).map(|_| ())
    }
}

/// Per-cell seed, independent of the order in which cells execute.
fn cell_seed(base: u64, parts: &[u64]) -> u64 {
    // splitmix64 finaliser over the mixed parts
    let mut x = base;
    for &p in parts {
        x = x.wrapping_add(p.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        x ^= x >> 31;
    }
    x
}

#[derive(Clone, Copy, Debug)]
struct Cell {
    method: Method,
    c_index: usize,
    k: u32,
    fold: usize,
}

/// Runs every `(method, C, k, fold)` cell on one shared fold plan. Cells run
/// in parallel; the result is sorted by `(dataset, method, C, k, fold)`.
pub fn run_grid(data: &SvmDataset, cfg: &GridConfig) -> Result<Vec<ExperimentRecord>> {
    cfg.validate()?;
    let plan = make_folds(data, cfg.n_folds, cfg.seed)?;
    let splits: Vec<(SvmDataset, SvmDataset)> = (0..cfg.n_folds)
        .map(|f| {
            Ok((
                data.subset(&plan.train_indices(f), &format!("fold {f} train"))?,
                data.subset(&plan.test_indices(f), &format!("fold {f} test"))?,
            ))
        })
        .collect::<Result<_>>()?;

    let mut cells = Vec::new();
    for (c_index, _) in cfg.c_values.iter().enumerate() {
        for fold in 0..cfg.n_folds {
            for &k in &cfg.k_values {
                cells.push(Cell { method: Method::QuboSvm, c_index, k, fold });
            }
            if cfg.include_baseline {
                cells.push(Cell { method: Method::Baseline, c_index, k: 0, fold });
            }
        }
    }

    let digest = plan.digest();
    let mut records: Vec<ExperimentRecord> = cells
        .par_iter()
        .map(|cell| run_cell(data.name(), cfg, &plan, &digest, &splits, *cell))
        .collect();
    records.sort_by(|a, b| {
        (a.dataset.as_str(), a.method, a.c, a.k, a.fold)
            .partial_cmp(&(b.dataset.as_str(), b.method, b.c, b.k, b.fold))
            .expect("grid values are finite")
    });
    Ok(records)
}

fn run_cell(
    dataset: &str,
    cfg: &GridConfig,
    plan: &FoldPlan,
    digest: &str,
    splits: &[(SvmDataset, SvmDataset)],
    cell: Cell,
) -> ExperimentRecord {
    let start = Instant::now();
    let c = cfg.c_values[cell.c_index];
    let (train_set, test_set) = &splits[cell.fold];
    let seed = cell_seed(
        plan.rng_seed,
        &[cell.method as u64, cell.c_index as u64, u64::from(cell.k), cell.fold as u64],
    );
    let mut record = ExperimentRecord {
        dataset: dataset.to_string(),
        method: cell.method,
        c,
        log2_c: c.log2(),
        k: cell.k,
        fold: cell.fold,
        status: CellStatus::Ok,
        accuracy: None,
        degenerate: false,
        lambda_used: None,
        dual_objective: None,
        solver_evaluations: 0,
        fold_plan: digest.to_string(),
        wall_time: 0.0,
    };

    let outcome = match cell.method {
        Method::QuboSvm => {
            let train_cfg = TrainConfig {
                solver: QuboSolver::Tabu {
                    config: cfg.solver.clone().with_seed(seed),
                    runs: cfg.runs,
                },
                lambda0: cfg.lambda0,
                max_doublings: cfg.max_doublings,
            };
            make_encoding(cell.k, c)
                .and_then(|enc| train_with_stats(train_set, &enc, &train_cfg))
                .map(|(model, stats)| {
                    record.solver_evaluations = stats.evaluations;
                    model
                })
        }
        Method::Baseline => {
            let smo = SmoConfig {
                rng_seed: seed,
                trace: false,
                ..cfg.smo.clone()
            };
            smo_train(train_set, c, &smo).map(|fit| {
                record.solver_evaluations = fit.iterations as u64;
                fit.model
            })
        }
    };

    match outcome {
        Ok(model) => {
            record.lambda_used = model.lambda_used;
            record.dual_objective = dual_objective(train_set, &model.alpha).ok();
            if model.degenerate {
                record.status = CellStatus::Degenerate;
                record.degenerate = true;
            } else {
                match model.accuracy(test_set) {
                    Ok(acc) => record.accuracy = Some(acc),
                    Err(_) => record.status = CellStatus::Failed,
                }
            }
        }
        Err(Error::ConstraintUnsatisfied { lambda, .. }) => {
            record.status = CellStatus::Infeasible;
            record.lambda_used = Some(lambda);
        }
        Err(_) => record.status = CellStatus::Failed,
    }
    record.wall_time = start.elapsed().as_secs_f64();
    record
}
