//! k-bit QUBO encoding of the linear SVM dual.
//!
//! Every dual weight is written as `αᵢ = Σⱼ pⱼ z_{i,j}` with
//! `pⱼ = C·2^(j−1)/(2^k − 1)`, which samples `[0, C]` evenly in `2^k` steps.
//! The bits are laid out point by point, `z = (z_{1,1}, …, z_{1,k}, z_{2,1}, …)`,
//! and the minimised energy is
//!
//! ```text
//! E(z) = −1ᵀα + αᵀ(½(yyᵀ ⊙ K) + λyyᵀ)α,   α = Pz,  P = I_N ⊗ pᵀ
//! ```
//!
//! The equality constraint `αᵀy = 0` is only enforced through the `λ` penalty,
//! so [`train`] doubles `λ` until the solver's answer satisfies it exactly.

use serde::{Deserialize, Serialize};

use crate::data::SvmDataset;
use crate::error::{Error, Result};
use crate::model::TrainedModel;
use crate::qubo::{brute_force_solve, BinaryVector, QuboInstance, SolverReport};
use crate::tabu::{multistart_best, TabuConfig};

/// Largest supported bit depth; keeps scaled weights inside `i64`.
pub const MAX_BITS: u32 = 30;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecisionEncoding {
    k: u32,
    c: f64,
    p: Vec<f64>,
}

/// Precision vector for `k` bits per weight and box bound `c`.
pub fn make_encoding(k: u32, c: f64) -> Result<PrecisionEncoding> {
    if k == 0 || k > MAX_BITS {
        return Err(Error::invalid(format!("bits per weight must be in 1..={MAX_BITS}, got {k}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid(format!("C must be positive and finite, got {c}")));
    }
    let steps = f64::from((1u32 << k) - 1);
    let p = (0..k).map(|j| c * f64::from(1u32 << j) / steps).collect();
    Ok(PrecisionEncoding { k, c, p })
}

impl PrecisionEncoding {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    /// `2^k − 1`, the number of grid steps between 0 and C.
    pub fn steps(&self) -> i64 {
        (1i64 << self.k) - 1
    }

    /// Integer weight `vᵢ = Σⱼ 2^(j−1) z_{i,j}` of every point.
    pub fn scaled_weights(&self, z: &BinaryVector, n_points: usize) -> Result<Vec<i64>> {
        let k = self.k as usize;
        if z.len() != n_points * k {
            return Err(Error::DimensionMismatch {
                expected: n_points * k,
                actual: z.len(),
            });
        }
        Ok(z.as_slice()
            .chunks_exact(k)
            .map(|bits| {
                bits.iter()
                    .enumerate()
                    .map(|(j, &b)| i64::from(b) << j)
                    .sum()
            })
            .collect())
    }

    /// Bit pattern of a single scaled weight `v ∈ [0, 2^k − 1]`.
    pub fn bits_of(&self, v: i64) -> Result<Vec<u8>> {
        if !(0..=self.steps()).contains(&v) {
            return Err(Error::invalid(format!("weight {v} outside 0..={}", self.steps())));
        }
        Ok((0..self.k).map(|j| ((v >> j) & 1) as u8).collect())
    }
}

/// `α = Pz`. Computed from the integer weights, so all-zero and all-one bit
/// groups land exactly on 0 and C.
pub fn decode_alpha(enc: &PrecisionEncoding, z: &BinaryVector, n_points: usize) -> Result<Vec<f64>> {
    let steps = enc.steps() as f64;
    Ok(enc
        .scaled_weights(z, n_points)?
        .into_iter()
        .map(|v| enc.c * v as f64 / steps)
        .collect())
}

/// `Σᵢ yᵢ vᵢ` with `vᵢ` the integer weights; zero exactly when `αᵀy = 0`.
pub fn constraint_residual(data: &SvmDataset, enc: &PrecisionEncoding, z: &BinaryVector) -> Result<i64> {
    Ok(enc
        .scaled_weights(z, data.n())?
        .into_iter()
        .zip(data.labels())
        .map(|(v, &y)| v * i64::from(y))
        .sum())
}

/// A built QUBO together with what it was built from.
#[derive(Clone, Debug)]
pub struct QuboSvmProblem<'a> {
    pub data: &'a SvmDataset,
    pub encoding: PrecisionEncoding,
    pub lambda: f64,
    pub qubo: QuboInstance,
}

/// Builds the `N·k`-variable instance for penalty weight `lambda`.
pub fn build_qubo<'a>(data: &'a SvmDataset, enc: &PrecisionEncoding, lambda: f64) -> Result<QuboSvmProblem<'a>> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("lambda must be positive and finite, got {lambda}")));
    }
    let n = data.n();
    let k = enc.k as usize;
    let gram = data.gram();
    let p = &enc.p;
    // M = ½(yyᵀ ⊙ K) + λyyᵀ
    let m = |i: usize, l: usize| data.label(i) * data.label(l) * (0.5 * gram[i * n + l] + lambda);

    let size = n * k;
    let mut entries = Vec::with_capacity(size * (size + 1) / 2);
    for i in 0..n {
        for a in 0..k {
            let u = i * k + a;
            entries.push((u, u, -p[a] + p[a] * p[a] * m(i, i)));
            for b in (a + 1)..k {
                entries.push((u, i * k + b, 2.0 * p[a] * p[b] * m(i, i)));
            }
            for l in (i + 1)..n {
                let mil = 2.0 * m(i, l);
                for b in 0..k {
                    entries.push((u, l * k + b, mil * p[a] * p[b]));
                }
            }
        }
    }
    Ok(QuboSvmProblem {
        data,
        encoding: enc.clone(),
        lambda,
        qubo: QuboInstance::from_upper_entries(size, entries)?,
    })
}

/// How the QUBO at each λ step is solved.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum QuboSolver {
    /// Best of `runs` multistart tabu runs.
    Tabu { config: TabuConfig, runs: usize },
    /// Exhaustive enumeration; small instances only.
    Exact,
}

impl QuboSolver {
    pub fn solve(&self, q: &QuboInstance) -> Result<SolverReport> {
        match self {
            QuboSolver::Tabu { config, runs } => multistart_best(q, config, *runs),
            QuboSolver::Exact => brute_force_solve(q),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub solver: QuboSolver,
    pub lambda0: f64,
    pub max_doublings: u32,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            solver: QuboSolver::Tabu {
                config: TabuConfig::default(),
                runs: 1,
            },
            lambda0: 1.0,
            max_doublings: 32,
        }
    }
}

/// Bookkeeping from the λ loop.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainStats {
    /// QUBO solves performed, one per λ value tried.
    pub attempts: u32,
    pub evaluations: u64,
    pub final_energy: f64,
    pub truncated: bool,
}

/// Trains with the penalty loop: solve, check `αᵀy = 0` exactly, double λ on
/// violation. An all-zero answer is returned as a degenerate model.
pub fn train(data: &SvmDataset, enc: &PrecisionEncoding, cfg: &TrainConfig) -> Result<TrainedModel> {
    train_with_stats(data, enc, cfg).map(|(m, _)| m)
}

pub fn train_with_stats(
    data: &SvmDataset,
    enc: &PrecisionEncoding,
    cfg: &TrainConfig,
) -> Result<(TrainedModel, TrainStats)> {
    if !(cfg.lambda0 > 0.0 && cfg.lambda0.is_finite()) {
        return Err(Error::invalid(format!("lambda0 must be positive, got {}", cfg.lambda0)));
    }
    let mut stats = TrainStats::default();
    let mut lambda = cfg.lambda0;
    let mut residual = 0;
    for _ in 0..=cfg.max_doublings {
        let problem = build_qubo(data, enc, lambda)?;
        let report = cfg.solver.solve(&problem.qubo)?;
        stats.attempts += 1;
        stats.evaluations += report.evaluations;
        stats.final_energy = report.best_energy;
        stats.truncated |= report.truncated;
        residual = constraint_residual(data, enc, &report.best_assignment)?;
        if residual == 0 {
            let alpha = decode_alpha(enc, &report.best_assignment, data.n())?;
            let model = TrainedModel::from_alpha(data, alpha, enc.c, Some(lambda))?;
            return Ok((model, stats));
        }
        lambda *= 2.0;
    }
    Err(Error::ConstraintUnsatisfied {
        residual,
        lambda: lambda / 2.0,
        doublings: cfg.max_doublings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Direct dense evaluation of the energy from its definition.
    fn definition_energy(data: &SvmDataset, enc: &PrecisionEncoding, lambda: f64, z: &BinaryVector) -> f64 {
        let n = data.n();
        let k = enc.k() as usize;
        let alpha: Vec<f64> = (0..n)
            .map(|i| (0..k).map(|j| enc.p()[j] * f64::from(z.as_slice()[i * k + j])).sum())
            .collect();
        let mut quad = 0.0;
        for i in 0..n {
            for l in 0..n {
                let kil: f64 = data.row(i).iter().zip(data.row(l)).map(|(a, b)| a * b).sum();
                let yy = data.label(i) * data.label(l);
                quad += alpha[i] * alpha[l] * (0.5 * yy * kil + lambda * yy);
            }
        }
        -alpha.iter().sum::<f64>() + quad
    }

    fn random_dataset(rng: &mut ChaCha8Rng, n: usize, d: usize) -> SvmDataset {
        let rows = (0..n).map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
        let mut y: Vec<i8> = (0..n).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
        y[0] = 1;
        y[1] = -1;
        SvmDataset::new("random", rows, y, "").unwrap()
    }

    #[test]
    fn encoding_examples() {
        assert_eq!(make_encoding(1, 4.0).unwrap().p(), &[4.0]);
        assert_eq!(make_encoding(3, 7.0).unwrap().p(), &[1.0, 2.0, 4.0]);
        let e = make_encoding(2, 1.0).unwrap();
        assert_relative_eq!(e.p()[0], 1.0 / 3.0);
        assert_relative_eq!(e.p()[1], 2.0 / 3.0);
        assert!(make_encoding(0, 1.0).is_err());
        assert!(make_encoding(2, 0.0).is_err());
        assert!(make_encoding(2, -1.0).is_err());
        assert!(make_encoding(2, f64::NAN).is_err());
    }

    #[test]
    fn precision_vector_invariants() {
        for k in 1..=8 {
            for c in [2f64.powi(-6), 0.3, 1.0, 16.0] {
                let e = make_encoding(k, c).unwrap();
                let sum: f64 = e.p().iter().sum();
                assert!((sum - c).abs() <= 1e-12 * c);
                assert!(e.p().windows(2).all(|w| w[0] > 0.0 && w[0] < w[1]));
            }
        }
    }

    #[test]
    fn decode_examples() {
        let e = make_encoding(3, 7.0).unwrap();
        assert_eq!(decode_alpha(&e, &BinaryVector::zeros(6), 2).unwrap(), vec![0.0, 0.0]);
        assert_eq!(decode_alpha(&e, &BinaryVector::ones(6), 2).unwrap(), vec![7.0, 7.0]);
        let z = BinaryVector::from_bits(vec![1, 0, 1, 0, 1, 0]).unwrap();
        assert_eq!(decode_alpha(&e, &z, 2).unwrap(), vec![5.0, 2.0]);
        assert!(decode_alpha(&e, &BinaryVector::zeros(5), 2).is_err());

        let odd = make_encoding(3, 0.1).unwrap();
        assert_eq!(decode_alpha(&odd, &BinaryVector::ones(3), 1).unwrap(), vec![0.1]);
    }

    #[test]
    fn layout_round_trip() {
        let e = make_encoding(3, 2.5).unwrap();
        let wanted = [0i64, 7, 3, 5, 1];
        let bits: Vec<u8> = wanted.iter().flat_map(|&v| e.bits_of(v).unwrap()).collect();
        let z = BinaryVector::from_bits(bits).unwrap();
        assert_eq!(e.scaled_weights(&z, 5).unwrap(), wanted.to_vec());
        let alpha = decode_alpha(&e, &z, 5).unwrap();
        for (a, v) in alpha.iter().zip(wanted) {
            assert_eq!(*a, 2.5 * v as f64 / 7.0);
            assert!((0.0..=2.5).contains(a));
        }
        assert!(e.bits_of(8).is_err());
    }

    #[test]
    fn residual_examples() {
        let ds = SvmDataset::new("t", vec![vec![1.0], vec![-1.0]], vec![1, -1], "").unwrap();
        let e1 = make_encoding(1, 1.0).unwrap();
        assert_eq!(constraint_residual(&ds, &e1, &BinaryVector::zeros(2)).unwrap(), 0);
        assert_eq!(constraint_residual(&ds, &e1, &BinaryVector::ones(2)).unwrap(), 0);
        let e2 = make_encoding(2, 1.0).unwrap();
        let z = BinaryVector::from_bits(vec![1, 0, 0, 1]).unwrap();
        assert_eq!(constraint_residual(&ds, &e2, &z).unwrap(), -1);
        assert!(constraint_residual(&ds, &e2, &BinaryVector::zeros(3)).is_err());
    }

    #[test]
    fn two_point_energy_matches_definition() {
        let ds = SvmDataset::new("t", vec![vec![1.0], vec![-1.0]], vec![1, -1], "").unwrap();
        let e = make_encoding(1, 1.0).unwrap();
        let p = build_qubo(&ds, &e, 1.0).unwrap();
        let z = BinaryVector::ones(2);
        let got = p.qubo.energy(&z).unwrap();
        // α = (1, 1): −2 + ½·Σ yᵢyₗKᵢₗ + λ(αᵀy)² = −2 + ½·4 + 0
        assert_relative_eq!(got, 0.0, epsilon = 1e-12);
        assert_relative_eq!(got, definition_energy(&ds, &e, 1.0, &z), epsilon = 1e-12);
        assert_eq!(p.qubo.energy(&BinaryVector::zeros(2)).unwrap(), 0.0);
    }

    #[test]
    fn exhaustive_equivalence_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..6 {
            let n = rng.gen_range(2..=5);
            let k = rng.gen_range(1..=2);
            let ds = random_dataset(&mut rng, n, 3);
            let e = make_encoding(k, rng.gen_range(0.1..4.0)).unwrap();
            let lambda = rng.gen_range(0.5..8.0);
            let p = build_qubo(&ds, &e, lambda).unwrap();
            assert_eq!(p.qubo.n(), n * k as usize);
            for idx in 0..(1u64 << (n * k as usize)) {
                let z = BinaryVector::from_index(n * k as usize, idx);
                let got = p.qubo.energy(&z).unwrap();
                let want = definition_energy(&ds, &e, lambda, &z);
                assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0));
            }
        }
    }

    #[test]
    fn penalty_contribution_matches_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ds = random_dataset(&mut rng, 5, 2);
        let e = make_encoding(2, 1.5).unwrap();
        let low = build_qubo(&ds, &e, 1.0).unwrap();
        let high = build_qubo(&ds, &e, 3.0).unwrap();
        for idx in 0..(1u64 << 10) {
            let z = BinaryVector::from_index(10, idx);
            let r = constraint_residual(&ds, &e, &z).unwrap() as f64;
            let step = 1.5 / 3.0;
            // energy is affine in λ with slope (αᵀy)²
            let slope = (high.qubo.energy(&z).unwrap() - low.qubo.energy(&z).unwrap()) / 2.0;
            assert!((slope - step * step * r * r).abs() <= 1e-9 * (1.0 + slope.abs()));
        }
    }

    #[test]
    fn build_rejects_bad_lambda() {
        let ds = SvmDataset::new("t", vec![vec![1.0], vec![-1.0]], vec![1, -1], "").unwrap();
        let e = make_encoding(1, 1.0).unwrap();
        assert!(build_qubo(&ds, &e, 0.0).is_err());
        assert!(build_qubo(&ds, &e, f64::INFINITY).is_err());
    }

    fn toy() -> SvmDataset {
        SvmDataset::new(
            "toy",
            vec![vec![0.5, 0.5], vec![1.0, 1.0], vec![-0.5, -0.5], vec![-1.0, -1.0]],
            vec![1, 1, -1, -1],
            "",
        )
        .unwrap()
    }

    #[test]
    fn separable_toy_set_trains_exactly() {
        let ds = toy();
        let e = make_encoding(1, 1.0).unwrap();
        let cfg = TrainConfig {
            solver: QuboSolver::Exact,
            ..TrainConfig::default()
        };
        let (m, stats) = train_with_stats(&ds, &e, &cfg).unwrap();
        assert!(!m.degenerate);
        assert!(stats.attempts >= 1);
        assert_eq!(m.accuracy(&ds).unwrap(), 1.0);
        let dot: f64 = m.alpha.iter().zip(ds.labels()).map(|(a, &y)| a * f64::from(y)).sum();
        assert_eq!(dot, 0.0);

        // independent recomputation of w and b
        let mut w = [0.0; 2];
        let mut sv = Vec::new();
        for i in 0..4 {
            if m.alpha[i] > 0.0 {
                sv.push(i);
                for j in 0..2 {
                    w[j] += m.alpha[i] * ds.label(i) * ds.row(i)[j];
                }
            }
        }
        assert_eq!(m.w, w.to_vec());
        let b: f64 = sv
            .iter()
            .map(|&i| w[0] * ds.row(i)[0] + w[1] * ds.row(i)[1] - ds.label(i))
            .sum::<f64>()
            / sv.len() as f64;
        assert_relative_eq!(m.b, b, epsilon = 1e-12);
    }

    #[test]
    fn tabu_training_is_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let cfg = TrainConfig {
            solver: QuboSolver::Tabu {
                config: TabuConfig {
                    restarts: 3,
                    iterations_per_restart: Some(400),
                    ..TabuConfig::default()
                },
                runs: 2,
            },
            ..TrainConfig::default()
        };
        for _ in 0..5 {
            let ds = random_dataset(&mut rng, 12, 3);
            for k in 1..=3 {
                let e = make_encoding(k, 0.5).unwrap();
                let m = train(&ds, &e, &cfg).unwrap();
                let r: f64 = m.alpha.iter().zip(ds.labels()).map(|(a, &y)| a * f64::from(y)).sum();
                assert!(r.abs() < 1e-9);
                assert!(m.alpha.iter().all(|&a| (0.0..=0.5).contains(&a)));
                assert_eq!(m.support_mask, m.alpha.iter().map(|&a| a > 0.0).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn exhausted_doublings_report_residual() {
        // All features are zero, so only the linear reward and the penalty
        // remain; at λ = 0.01 selecting every point wins despite the imbalance.
        let ds = SvmDataset::new(
            "t",
            vec![vec![0.0], vec![0.0], vec![0.0]],
            vec![1, 1, -1],
            "",
        )
        .unwrap();
        let e = make_encoding(1, 1.0).unwrap();
        let cfg = TrainConfig {
            solver: QuboSolver::Exact,
            lambda0: 0.01,
            max_doublings: 0,
        };
        match train(&ds, &e, &cfg) {
            Err(Error::ConstraintUnsatisfied { residual, doublings, .. }) => {
                assert_ne!(residual, 0);
                assert_eq!(doublings, 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
