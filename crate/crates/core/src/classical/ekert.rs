use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use crate::rng;

/// Alice's measurement directions in the x-y plane.
pub const ALICE_ANGLES: [f64; 3] = [0.0, PI / 4.0, PI / 2.0];
/// Bob's measurement directions.
pub const BOB_ANGLES: [f64; 3] = [PI / 4.0, PI / 2.0, 3.0 * PI / 4.0];
/// `(i, j, sign)` terms of `S = |E11 + E33 - E13 + E31|`, 0-based.
pub const CHSH_SETTINGS: [(usize, usize, f64); 4] =
    [(0, 0, 1.0), (2, 2, 1.0), (0, 2, -1.0), (2, 0, 1.0)];
/// Setting pairs with equal directions, used for the key.
pub const KEY_SETTINGS: [(usize, usize); 2] = [(1, 0), (2, 1)];

/// Singlet correlation `-cos(phi_A - phi_B)`.
pub fn singlet_correlation(phi_a: f64, phi_b: f64) -> f64 {
    -(phi_a - phi_b).cos()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EkertRun {
    pub n_pairs: usize,
    /// Rounds per `(alice, bob)` setting.
    pub counts: [[u64; 3]; 3],
    /// Sum of `a b` per setting.
    pub product_sums: [[i64; 3]; 3],
    /// Alice's key bits from equal-direction rounds.
    pub key_alice: Vec<u8>,
    /// Bob's key bits, already flipped to undo the anticorrelation.
    pub key_bob: Vec<u8>,
}

impl EkertRun {
    /// Estimated correlation for a setting pair.
    pub fn correlation(&self, i: usize, j: usize) -> Option<f64> {
        let n = self.counts[i][j];
        (n > 0).then(|| self.product_sums[i][j] as f64 / n as f64)
    }

    /// Estimated CHSH value.
    pub fn s_value(&self) -> Option<f64> {
        let mut s = 0.0;
        for (i, j, sign) in CHSH_SETTINGS {
            s += sign * self.correlation(i, j)?;
        }
        Some(s.abs())
    }

    /// Standard error of the CHSH estimate, propagating the binomial
    /// variance `(1 - E^2) / n` of each term.
    pub fn s_sigma(&self) -> Option<f64> {
        let mut var = 0.0;
        for (i, j, _) in CHSH_SETTINGS {
            let e = self.correlation(i, j)?;
            var += (1.0 - e * e) / self.counts[i][j] as f64;
        }
        Some(var.sqrt())
    }

    /// Standard error of the CHSH value computed at the exact singlet
    /// correlations.
    pub fn s_sigma_expected(&self) -> f64 {
        CHSH_SETTINGS
            .iter()
            .map(|&(i, j, _)| {
                let e = singlet_correlation(ALICE_ANGLES[i], BOB_ANGLES[j]);
                (1.0 - e * e) / self.counts[i][j].max(1) as f64
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Key positions where Alice and Bob disagree.
    pub fn key_mismatches(&self) -> usize {
        self.key_alice
            .iter()
            .zip(&self.key_bob)
            .filter(|(a, b)| a != b)
            .count()
    }
}

/// Simulates `n_pairs` singlets measured along random directions.
pub fn ekert91_run(n_pairs: usize, seed: u64) -> EkertRun {
    let mut rng = rng::stream(seed, 0);
    let mut counts = [[0u64; 3]; 3];
    let mut product_sums = [[0i64; 3]; 3];
    let mut key_alice = Vec::new();
    let mut key_bob = Vec::new();
    for _ in 0..n_pairs {
        let i = rng.random_range(0..3);
        let j = rng.random_range(0..3);
        let e = singlet_correlation(ALICE_ANGLES[i], BOB_ANGLES[j]);
        let a: i64 = if rng.random() { 1 } else { -1 };
        let same = rng.random_bool(((1.0 + e) / 2.0).clamp(0.0, 1.0));
        let b = if same { a } else { -a };
        counts[i][j] += 1;
        product_sums[i][j] += a * b;
        if KEY_SETTINGS.contains(&(i, j)) {
            key_alice.push((a > 0) as u8);
            key_bob.push((b < 0) as u8);
        }
    }
    EkertRun {
        n_pairs,
        counts,
        product_sums,
        key_alice,
        key_bob,
    }
}

/// Largest CHSH value over all 64 local deterministic assignments of
/// `±1` outcomes to the three settings of each side.
pub fn chsh_classical_max() -> f64 {
    let mut best = f64::NEG_INFINITY;
    for mask in 0u32..64 {
        let bit = |k: u32| if mask >> k & 1 == 1 { 1.0 } else { -1.0 };
        let a = [bit(0), bit(1), bit(2)];
        let b = [bit(3), bit(4), bit(5)];
        let s: f64 = CHSH_SETTINGS
            .iter()
            .map(|&(i, j, sign)| sign * a[i] * b[j])
            .sum();
        best = best.max(s.abs());
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_chsh_value() {
        let s: f64 = CHSH_SETTINGS
            .iter()
            .map(|&(i, j, sign)| sign * singlet_correlation(ALICE_ANGLES[i], BOB_ANGLES[j]))
            .sum();
        assert!((s.abs() - 2.0 * 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn equal_directions_anticorrelate() {
        for (i, j) in KEY_SETTINGS {
            assert_eq!(ALICE_ANGLES[i], BOB_ANGLES[j]);
            assert_eq!(singlet_correlation(ALICE_ANGLES[i], BOB_ANGLES[j]), -1.0);
        }
        let run = ekert91_run(20_000, 5);
        assert_eq!(run.key_mismatches(), 0);
        assert!(!run.key_alice.is_empty());
    }

    #[test]
    fn local_strategies_respect_bound() {
        assert_eq!(chsh_classical_max(), 2.0);
    }
}
