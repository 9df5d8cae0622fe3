//! Primal models recovered from dual weights, shared by the QUBO trainer and
//! the SMO baseline.

use serde::{Deserialize, Serialize};

use crate::data::{dot, SvmDataset};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub w: Vec<f64>,
    pub b: f64,
    pub alpha: Vec<f64>,
    pub support_mask: Vec<bool>,
    pub c: f64,
    /// Penalty weight of the accepted QUBO; `None` for the baseline.
    pub lambda_used: Option<f64>,
    /// All dual weights are zero, so there is no usable hyperplane.
    pub degenerate: bool,
}

impl TrainedModel {
    /// Builds the primal model `w = Σ αᵢ yᵢ xⁱ`, `b` from [`recover_bias`].
    pub fn from_alpha(data: &SvmDataset, alpha: Vec<f64>, c: f64, lambda_used: Option<f64>) -> Result<Self> {
        if alpha.len() != data.n() {
            return Err(Error::DimensionMismatch {
                expected: data.n(),
                actual: alpha.len(),
            });
        }
        let support_mask: Vec<bool> = alpha.iter().map(|&a| a > 0.0).collect();
        let degenerate = !support_mask.iter().any(|&s| s);
        let w = primal_weights(data, &alpha);
        let b = if degenerate {
            0.0
        } else {
            recover_bias(data, &w, &alpha, c)?
        };
        Ok(Self {
            w,
            b,
            alpha,
            support_mask,
            c,
            lambda_used,
            degenerate,
        })
    }

    /// Decision value `wᵀx − b`.
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        if self.degenerate {
            return Err(Error::NoSupportVectors);
        }
        if x.len() != self.w.len() {
            return Err(Error::DimensionMismatch {
                expected: self.w.len(),
                actual: x.len(),
            });
        }
        Ok(dot(&self.w, x) - self.b)
    }

    /// `sign(wᵀx − b)`; a score of exactly zero maps to +1.
    pub fn predict(&self, x: &[f64]) -> Result<i8> {
        Ok(if self.score(x)? >= 0.0 { 1 } else { -1 })
    }

    /// Fraction of rows of `data` whose prediction equals the label.
    pub fn accuracy(&self, data: &SvmDataset) -> Result<f64> {
        let mut hits = 0usize;
        for (i, row) in data.rows().enumerate() {
            if self.predict(row)? == data.labels()[i] {
                hits += 1;
            }
        }
        Ok(hits as f64 / data.n() as f64)
    }
}

/// `Σ αᵢ yᵢ xⁱ`.
pub fn primal_weights(data: &SvmDataset, alpha: &[f64]) -> Vec<f64> {
    let mut w = vec![0.0; data.d()];
    for (i, &a) in alpha.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        let coef = a * data.label(i);
        w.iter_mut().zip(data.row(i)).for_each(|(wj, xj)| *wj += coef * xj);
    }
    w
}

/// Mean of `wᵀxⁱ − yᵢ` over the support vectors with `0 < αᵢ < C`, or over
/// all support vectors when none lies strictly inside the box (always the
/// case with one bit per weight).
pub fn recover_bias(data: &SvmDataset, w: &[f64], alpha: &[f64], c: f64) -> Result<f64> {
    if alpha.len() != data.n() {
        return Err(Error::DimensionMismatch {
            expected: data.n(),
            actual: alpha.len(),
        });
    }
    if w.len() != data.d() {
        return Err(Error::DimensionMismatch {
            expected: data.d(),
            actual: w.len(),
        });
    }
    let mean_over = |keep: &dyn Fn(f64) -> bool| -> Option<f64> {
        let (sum, count) = alpha
            .iter()
            .enumerate()
            .filter(|(_, &a)| keep(a))
            .fold((0.0, 0usize), |(s, k), (i, _)| (s + dot(w, data.row(i)) - data.label(i), k + 1));
        (count > 0).then(|| sum / count as f64)
    };
    mean_over(&|a| a > 0.0 && a < c)
        .or_else(|| mean_over(&|a| a > 0.0))
        .ok_or(Error::NoSupportVectors)
}
