//! Full-precision dual solver used as the classical baseline.
//!
//! Sequential minimal optimisation on
//!
//! ```text
//! max  1ᵀα − ½ αᵀ(yyᵀ ⊙ K)α   s.t.  0 ≤ αᵢ ≤ C,  αᵀy = 0
//! ```
//!
//! Each step picks the maximal violating pair: the first index maximises the
//! KKT violation over the "up" set, the second the gap `|Eᵢ − Eⱼ|` over the
//! "low" set. The pair is then optimised analytically and clipped to the box.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::SvmDataset;
use crate::error::{Error, Result};
use crate::model::TrainedModel;

const TAU: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoConfig {
    /// Stop once the maximal KKT violation drops below this.
    pub tolerance: f64,
    /// Sweep budget; one sweep is `N` pair updates. `None` means `10·N`.
    pub max_passes: Option<usize>,
    pub rng_seed: u64,
    /// Record the dual objective after every update.
    #[serde(default)]
    pub trace: bool,
}

impl Default for SmoConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-3,
            max_passes: None,
            rng_seed: 0,
            trace: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmoFit {
    pub model: TrainedModel,
    pub converged: bool,
    pub iterations: usize,
    /// Maximal KKT violation at the returned iterate.
    pub violation: f64,
    /// Dual objective after every update, when tracing.
    pub objective_trace: Vec<f64>,
}

/// `1ᵀα − ½ αᵀ(yyᵀ ⊙ K)α` with the linear kernel.
pub fn dual_objective(data: &SvmDataset, alpha: &[f64]) -> Result<f64> {
    if alpha.len() != data.n() {
        return Err(Error::DimensionMismatch {
            expected: data.n(),
            actual: alpha.len(),
        });
    }
    let n = data.n();
    let k = data.gram();
    let mut quad = 0.0;
    for i in 0..n {
        if alpha[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            quad += alpha[i] * alpha[j] * data.label(i) * data.label(j) * k[i * n + j];
        }
    }
    Ok(alpha.iter().sum::<f64>() - 0.5 * quad)
}

pub fn smo_train(data: &SvmDataset, c: f64, cfg: &SmoConfig) -> Result<SmoFit> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid(format!("C must be positive and finite, got {c}")));
    }
    if !(cfg.tolerance > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let n = data.n();
    let y: Vec<f64> = (0..n).map(|i| data.label(i)).collect();
    let k = data.gram();
    let q = |i: usize, j: usize| y[i] * y[j] * k[i * n + j];
    let max_iter = cfg.max_passes.unwrap_or(10 * n).max(1) * n;

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.rng_seed));

    let mut alpha = vec![0.0; n];
    // Gradient of ½αᵀQα − 1ᵀα.
    let mut grad = vec![-1.0; n];
    let objective = |alpha: &[f64], grad: &[f64]| -> f64 {
        // 1ᵀα − ½αᵀQα = ½1ᵀα − ½αᵀ(Qα − 1)
        0.5 * alpha.iter().zip(grad).map(|(a, g)| a - a * g).sum::<f64>()
    };
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut violation;

    loop {
        let (mut i, mut up_max) = (usize::MAX, f64::NEG_INFINITY);
        let (mut j, mut low_min) = (usize::MAX, f64::INFINITY);
        for &t in &order {
            let v = -y[t] * grad[t];
            let in_up = (y[t] > 0.0 && alpha[t] < c) || (y[t] < 0.0 && alpha[t] > 0.0);
            let in_low = (y[t] > 0.0 && alpha[t] > 0.0) || (y[t] < 0.0 && alpha[t] < c);
            if in_up && v > up_max {
                up_max = v;
                i = t;
            }
            if in_low && v < low_min {
                low_min = v;
                j = t;
            }
        }
        violation = up_max - low_min;
        if i == usize::MAX || j == usize::MAX || violation < cfg.tolerance {
            break;
        }
        if iterations >= max_iter {
            break;
        }
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let quad = (q(i, i) + q(j, j) + 2.0 * q(i, j)).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else {
                if alpha[i] < 0.0 {
                    alpha[i] = 0.0;
                    alpha[j] = -diff;
                }
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = c + diff;
                }
            }
        } else {
            let quad = (q(i, i) + q(j, j) - 2.0 * q(i, j)).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = sum;
                }
                if alpha[i] < 0.0 {
                    alpha[i] = 0.0;
                    alpha[j] = sum;
                }
            }
        }

        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += q(t, i) * di + q(t, j) * dj;
        }
        if cfg.trace {
            trace.push(objective(&alpha, &grad));
        }
    }

    let converged = violation < cfg.tolerance;
    let model = TrainedModel::from_alpha(data, alpha, c, None)?;
    Ok(SmoFit {
        model,
        converged,
        iterations,
        violation,
        objective_trace: trace,
    })
}
