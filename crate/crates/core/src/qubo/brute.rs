use std::time::Instant;

use super::{BinaryVector, QuboInstance, SolverReport};
use crate::error::{Error, Result};

/// Largest instance [`brute_force_solve`] will enumerate.
pub const BRUTE_FORCE_LIMIT: usize = 24;

// Energies and local fields are recomputed from scratch this often so the
// incremental walk cannot drift.
const RESYNC_MASK: u64 = (1 << 10) - 1;

/// Exact minimiser by enumeration of all `2ⁿ` assignments.
///
/// Among assignments of equal energy the lexicographically smallest bit
/// sequence wins, so the result is unique and reproducible.
pub fn brute_force_solve(q: &QuboInstance) -> Result<SolverReport> {
    let n = q.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let start = Instant::now();
    let coupling = q.coupling_matrix();
    let tol = 1e-9 * (1.0 + q.abs_sum());

    // Gray code walk. Counter bit b drives variable n−1−b, which makes the
    // numeric value of `state` order assignments lexicographically.
    let var_of = |b: u32| n - 1 - b as usize;
    let mut bits = vec![0u8; n];
    let mut field = vec![0.0; n];
    let mut energy = 0.0;
    let mut state: u64 = 0;

    let mut best = 0.0;
    // Assignments within `tol` of `best`, in enumeration order.
    let mut candidates: Vec<u64> = vec![0];
    let mut evaluations: u64 = 1;

    for t in 1..(1u64 << n) {
        let b = t.trailing_zeros();
        let v = var_of(b);
        let up = bits[v] == 0;
        let local = q.upper(v, v) + field[v];
        energy += if up { local } else { -local };
        bits[v] ^= 1;
        state ^= 1 << b;
        let row = &coupling[v * n..(v + 1) * n];
        if up {
            field.iter_mut().zip(row).for_each(|(f, c)| *f += c);
        } else {
            field.iter_mut().zip(row).for_each(|(f, c)| *f -= c);
        }
        evaluations += 1;

        if t & RESYNC_MASK == 0 {
            energy = q.energy_bits(&bits);
            resync_fields(n, &coupling, &bits, &mut field);
        }

        if energy < best - tol {
            best = energy;
            candidates.clear();
            candidates.push(state);
        } else if energy <= best + tol {
            best = best.min(energy);
            candidates.push(state);
            if candidates.len() > 256 {
                let keep = settle(q, &candidates);
                candidates.clear();
                candidates.push(keep);
            }
        }
    }

    let winner = settle(q, &candidates);
    let best_assignment = assignment_of(n, winner);
    let best_energy = q.energy_bits(best_assignment.as_slice());
    Ok(SolverReport {
        best_assignment,
        best_energy,
        evaluations,
        restarts_used: 1,
        wall_time: start.elapsed().as_secs_f64(),
        truncated: false,
    })
}

fn resync_fields(n: usize, coupling: &[f64], bits: &[u8], field: &mut [f64]) {
    for (i, f) in field.iter_mut().enumerate() {
        let row = &coupling[i * n..(i + 1) * n];
        *f = row
            .iter()
            .zip(bits)
            .filter(|(_, &b)| b != 0)
            .map(|(c, _)| c)
            .sum();
    }
}

fn assignment_of(n: usize, state: u64) -> BinaryVector {
    BinaryVector::from_bits((0..n).map(|v| ((state >> (n - 1 - v)) & 1) as u8).collect())
        .expect("bits are 0/1")
}

/// Exact-energy minimum over `states`, lowest state on ties.
fn settle(q: &QuboInstance, states: &[u64]) -> u64 {
    let n = q.n();
    let mut best: Option<(f64, u64)> = None;
    for &s in states {
        let e = q.energy_bits(assignment_of(n, s).as_slice());
        best = match best {
            Some((be, bs)) if be < e || (be == e && bs < s) => Some((be, bs)),
            _ => Some((e, s)),
        };
    }
    best.expect("candidate list is never empty").1
}
