//! Multistart single-flip tabu search.
//!
//! Each restart walks from a start assignment by taking, at every iteration,
//! the best admissible single-bit flip. A flipped variable stays tabu for
//! `tabu_tenure` iterations unless flipping it would beat the incumbent of
//! the current run (aspiration). The first restart of every run starts from
//! the all-zero assignment, later ones from uniformly random assignments.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::{BinaryVector, QuboInstance, SolverReport};

const ITERATION_CAP: usize = 1_000_000;
const RESYNC_EVERY: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TabuConfig {
    pub restarts: usize,
    /// `None` picks `min(10·n·1000, 10⁶)`.
    pub iterations_per_restart: Option<usize>,
    /// `None` picks `max(10, n/10)`, clamped below the iteration count.
    pub tabu_tenure: Option<usize>,
    pub rng_seed: u64,
    /// Seconds, checked between iterations.
    pub time_limit: Option<f64>,
}

impl Default for TabuConfig {
    fn default() -> Self {
        Self {
            restarts: 20,
            iterations_per_restart: None,
            tabu_tenure: None,
            rng_seed: 0,
            time_limit: None,
        }
    }
}

impl TabuConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    /// Iteration budget and tenure for an `n`-variable instance.
    pub fn resolve(&self, n: usize) -> Result<(usize, usize)> {
        if self.restarts == 0 {
            return Err(Error::invalid("restarts must be at least 1"));
        }
        let iterations = self
            .iterations_per_restart
            .unwrap_or_else(|| (10 * n * 1000).min(ITERATION_CAP));
        if iterations == 0 {
            return Err(Error::invalid("iterations_per_restart must be at least 1"));
        }
        let tenure = match self.tabu_tenure {
            Some(0) => return Err(Error::invalid("tabu_tenure must be at least 1")),
            Some(t) if t >= iterations => {
                return Err(Error::invalid(format!(
                    "tabu_tenure {t} must be below iterations_per_restart {iterations}"
                )))
            }
            Some(t) => t,
            None => (n / 10).max(10).min(iterations.saturating_sub(1)).max(1),
        };
        if let Some(limit) = self.time_limit {
            if !(limit > 0.0) {
                return Err(Error::invalid("time_limit must be positive"));
            }
        }
        Ok((iterations, tenure))
    }
}

/// Per-iteration view handed to a trace observer.
#[derive(Clone, Copy, Debug)]
pub struct TabuStep {
    pub restart: usize,
    pub iteration: usize,
    pub current_energy: f64,
    pub best_energy: f64,
}

/// One run of `cfg.restarts` restarts, seeded from `cfg.rng_seed`.
pub fn tabu_solve(q: &QuboInstance, cfg: &TabuConfig) -> Result<SolverReport> {
    tabu_solve_traced(q, cfg, |_| {})
}

/// [`tabu_solve`] with an observer called after every iteration.
pub fn tabu_solve_traced<F>(q: &QuboInstance, cfg: &TabuConfig, observer: F) -> Result<SolverReport>
where
    F: FnMut(&TabuStep),
{
    let start = Instant::now();
    let mut report = run(q, cfg, 0, start, observer)?;
    report.wall_time = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Best of `runs` independent tabu runs. Run `r` draws from stream `r` of
/// the generator keyed by `cfg.rng_seed`, so `runs = 1` reproduces
/// [`tabu_solve`]. Ties go to the lowest run index.
pub fn multistart_best(q: &QuboInstance, cfg: &TabuConfig, runs: usize) -> Result<SolverReport> {
    if runs == 0 {
        return Err(Error::invalid("runs must be at least 1"));
    }
    cfg.resolve(q.n())?;
    let start = Instant::now();
    let reports: Vec<SolverReport> = (0..runs)
        .into_par_iter()
        .map(|r| run(q, cfg, r as u64, start, |_| {}))
        .collect::<Result<_>>()?;

    let evaluations = reports.iter().map(|r| r.evaluations).sum();
    let restarts_used = reports.iter().map(|r| r.restarts_used).sum();
    let truncated = reports.iter().any(|r| r.truncated);
    let mut best = reports
        .into_iter()
        .reduce(|a, b| if b.best_energy < a.best_energy { b } else { a })
        .expect("runs >= 1");
    best.evaluations = evaluations;
    best.restarts_used = restarts_used;
    best.truncated = truncated;
    best.wall_time = start.elapsed().as_secs_f64();
    Ok(best)
}

fn run<F>(q: &QuboInstance, cfg: &TabuConfig, stream: u64, start: Instant, mut observer: F) -> Result<SolverReport>
where
    F: FnMut(&TabuStep),
{
    let n = q.n();
    let (iterations, tenure) = cfg.resolve(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    rng.set_stream(stream);

    let coupling = q.coupling_matrix();
    let diag: Vec<f64> = (0..n).map(|i| q.upper(i, i)).collect();

    let mut bits = vec![0u8; n];
    // local[i] = U_ii + Σ_j U_ij z_j
    let mut local = vec![0.0; n];
    // +1 where the bit is 0, −1 where it is 1: the flip delta is sign·local.
    let mut sign = vec![1.0f64; n];
    let mut expires = vec![0usize; n];

    let mut best_bits = vec![0u8; n];
    let mut best_energy = 0.0;
    let mut evaluations: u64 = 1;
    let mut restarts_used = 0;
    let mut truncated = false;

    'restarts: for restart in 0..cfg.restarts {
        if restart > 0 {
            if let Some(limit) = cfg.time_limit {
                if start.elapsed().as_secs_f64() > limit {
                    truncated = true;
                    break;
                }
            }
            bits.iter_mut().for_each(|b| *b = rng.gen_range(0..=1));
            sign.iter_mut().zip(&bits).for_each(|(s, &b)| *s = if b == 0 { 1.0 } else { -1.0 });
        }
        restarts_used += 1;
        let mut energy = resync(q, &coupling, &diag, &bits, &mut local);
        evaluations += 1;
        expires.iter_mut().for_each(|e| *e = 0);
        if energy < best_energy {
            best_energy = energy;
            best_bits.copy_from_slice(&bits);
        }

        for it in 0..iterations {
            if it > 0 && it % RESYNC_EVERY == 0 {
                energy = resync(q, &coupling, &diag, &bits, &mut local);
                evaluations += 1;
                if let Some(limit) = cfg.time_limit {
                    if start.elapsed().as_secs_f64() > limit {
                        truncated = true;
                        break 'restarts;
                    }
                }
            }

            // Best admissible move: not tabu, or beating the run's best.
            let thresh = best_energy - energy;
            let (mut v, mut delta) = best_admissible(&sign, &local, &expires, it, thresh);
            if v == usize::MAX {
                // Everything is tabu: take the best tabu move.
                for i in 0..n {
                    let d = sign[i] * local[i];
                    if d < delta || v == usize::MAX {
                        delta = d;
                        v = i;
                    }
                }
            }
            evaluations += n as u64;

            let up = bits[v] == 0;
            bits[v] ^= 1;
            sign[v] = -sign[v];
            energy += delta;
            let row = &coupling[v * n..(v + 1) * n];
            if up {
                local.iter_mut().zip(row).for_each(|(f, c)| *f += c);
            } else {
                local.iter_mut().zip(row).for_each(|(f, c)| *f -= c);
            }
            expires[v] = it + 1 + tenure;

            if energy < best_energy {
                best_energy = energy;
                best_bits.copy_from_slice(&bits);
            }
            observer(&TabuStep {
                restart,
                iteration: it,
                current_energy: energy,
                best_energy,
            });
        }
    }

    let best_assignment = BinaryVector::from_bits(best_bits).expect("bits are 0/1");
    let best_energy = q.energy_bits(best_assignment.as_slice());
    Ok(SolverReport {
        best_assignment,
        best_energy,
        evaluations,
        restarts_used,
        wall_time: 0.0,
        truncated,
    })
}

/// Lowest-index minimum of the flip deltas over admissible moves, or
/// `(usize::MAX, ∞)` when none is admissible.
fn best_admissible(sign: &[f64], local: &[f64], expires: &[usize], it: usize, thresh: f64) -> (usize, f64) {
    let (mut v, mut delta) = (usize::MAX, f64::INFINITY);
    for (i, ((&s, &l), &e)) in sign.iter().zip(local).zip(expires).enumerate() {
        let d = s * l;
        let tabu = (e > it) & !(d < thresh);
        let key = if tabu { f64::INFINITY } else { d };
        if key < delta {
            delta = key;
            v = i;
        }
    }
    (v, delta)
}

fn resync(q: &QuboInstance, coupling: &[f64], diag: &[f64], bits: &[u8], local: &mut [f64]) -> f64 {
    let n = q.n();
    for (i, f) in local.iter_mut().enumerate() {
        let row = &coupling[i * n..(i + 1) * n];
        *f = diag[i]
            + row
                .iter()
                .zip(bits)
                .filter(|(_, &b)| b != 0)
                .map(|(c, _)| c)
                .sum::<f64>();
    }
    q.energy_bits(bits)
}
