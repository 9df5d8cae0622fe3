use super::QuboInstance;
use crate::error::{Error, Result};

/// Spin-glass form `Σ h_i σ_i + Σ_{i<j} J_ij σ_i σ_j` over `σ ∈ {+1, −1}ⁿ`.
///
/// Produced from a QUBO instance with `σ_i = 1 − 2 z_i`; for every assignment
/// `energy(σ) + offset` equals the QUBO energy of the matching `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct IsingModel {
    pub h: Vec<f64>,
    /// Row-major `n×n`, entries with `i < j` only.
    pub j: Vec<f64>,
    pub offset: f64,
}

impl IsingModel {
    pub(super) fn from_qubo(q: &QuboInstance) -> Self {
        let n = q.n();
        let mut h = vec![0.0; n];
        let mut j = vec![0.0; n * n];
        let mut offset = 0.0;
        for i in 0..n {
            // z_i = (1 − σ_i)/2
            let d = q.upper(i, i);
            offset += 0.5 * d;
            h[i] -= 0.5 * d;
            for k in (i + 1)..n {
                // z_i z_k = (1 − σ_i − σ_k + σ_i σ_k)/4
                let u = q.upper(i, k);
                if u == 0.0 {
                    continue;
                }
                offset += 0.25 * u;
                h[i] -= 0.25 * u;
                h[k] -= 0.25 * u;
                j[i * n + k] += 0.25 * u;
            }
        }
        Self { h, j, offset }
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }

    /// Energy of a spin configuration, excluding `offset`.
    pub fn energy(&self, spins: &[i8]) -> Result<f64> {
        let n = self.n();
        if spins.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: spins.len(),
            });
        }
        if let Some(p) = spins.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::invalid(format!("spin {p} is {}, expected ±1", spins[p])));
        }
        let mut e = 0.0;
        for i in 0..n {
            let si = f64::from(spins[i]);
            e += self.h[i] * si;
            for k in (i + 1)..n {
                e += self.j[i * n + k] * si * f64::from(spins[k]);
            }
        }
        Ok(e)
    }

    /// Inverse conversion. Returns the QUBO instance together with the
    /// constant `c` such that `energy(σ) = qubo.energy(z) + c`.
    pub fn to_qubo(&self) -> Result<(QuboInstance, f64)> {
        let n = self.n();
        let mut entries = Vec::new();
        let mut constant: f64 = self.h.iter().sum();
        for i in 0..n {
            // σ_i = 1 − 2 z_i
            let mut diag = -2.0 * self.h[i];
            for k in 0..n {
                if k == i {
                    continue;
                }
                let (a, b) = if i < k { (i, k) } else { (k, i) };
                diag -= 2.0 * self.j[a * n + b];
            }
            entries.push((i, i, diag));
            for k in (i + 1)..n {
                let jik = self.j[i * n + k];
                constant += jik;
                entries.push((i, k, 4.0 * jik));
            }
        }
        Ok((QuboInstance::from_upper_entries(n, entries)?, constant))
    }
}

/// `σ_i = 1 − 2 z_i`.
pub fn spins_of(bits: &[u8]) -> Vec<i8> {
    bits.iter().map(|&b| 1 - 2 * b as i8).collect()
}
