use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::SvmDataset;
use crate::error::{Error, Result};

/// Assignment of every data point to one cross-validation fold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub n_folds: usize,
    pub assignments: Vec<usize>,
    pub rng_seed: u64,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] != fold)
            .collect()
    }

    /// Short hex digest of the assignments, stored with every result so
    /// that shared splits can be checked after the fact.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.n_folds as u64).to_le_bytes());
        for &a in &self.assignments {
            h.update((a as u64).to_le_bytes());
        }
        h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Stratified split into `n_folds` folds. Each class is shuffled with a
/// generator keyed by `seed` and dealt round-robin, continuing where the
/// previous class stopped, so per-fold class counts differ by at most one.
pub fn make_folds(data: &SvmDataset, n_folds: usize, seed: u64) -> Result<FoldPlan> {
    let (pos, neg) = data.class_counts();
    if n_folds < 2 {
        return Err(Error::invalid("need at least two folds"));
    }
    if n_folds > pos.min(neg) {
        return Err(Error::invalid(format!(
            "{n_folds} folds exceed the smaller class size {}",
            pos.min(neg)
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignments = vec![0; data.n()];
    let mut offset = 0;
    for class in [1i8, -1] {
        let mut members: Vec<usize> = (0..data.n()).filter(|&i| data.labels()[i] == class).collect();
        members.shuffle(&mut rng);
        for (p, &i) in members.iter().enumerate() {
            assignments[i] = (offset + p) % n_folds;
        }
        offset += members.len();
    }
    Ok(FoldPlan {
        n_folds,
        assignments,
        rng_seed: seed,
    })
}
