use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    fn random<R: Rng>(rng: &mut R) -> Self {
        if rng.random() {
            Basis::X
        } else {
            Basis::Z
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Z => "Z",
            Basis::X => "X",
        })
    }
}

use Basis::{X, Z};

/// Nine-round worked example.
pub const WORKED_ALICE_BITS: [u8; 9] = [0, 1, 1, 0, 0, 1, 1, 0, 0];
pub const WORKED_ALICE_BASES: [Basis; 9] = [Z, X, X, X, Z, X, Z, X, X];
pub const WORKED_BOB_BASES: [Basis; 9] = [X, Z, X, X, X, X, X, X, X];
pub const WORKED_BOB_BITS: [u8; 9] = [0, 0, 1, 0, 0, 1, 1, 0, 0];
/// 1-based rounds kept after sifting.
pub const WORKED_SIFTED_POSITIONS: [usize; 5] = [3, 4, 6, 8, 9];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bb84Config {
    pub eavesdrop: bool,
    /// Runs with a sifted error rate at or above this are aborted.
    pub threshold: f64,
}

impl Default for Bb84Config {
    fn default() -> Self {
        Self {
            eavesdrop: false,
            threshold: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bb84Run {
    pub alice_bits: Vec<u8>,
    pub alice_bases: Vec<Basis>,
    pub bob_bases: Vec<Basis>,
    pub bob_bits: Vec<u8>,
    /// 0-based rounds with matching bases.
    pub sifted: Vec<usize>,
    pub n_errors: usize,
    pub threshold: f64,
}

impl Bb84Run {
    pub fn n_rounds(&self) -> usize {
        self.alice_bits.len()
    }

    /// Error rate over all sifted rounds; `None` if nothing survived sifting.
    pub fn qber(&self) -> Option<f64> {
        (!self.sifted.is_empty()).then(|| self.n_errors as f64 / self.sifted.len() as f64)
    }

    /// Binomial standard error of the QBER around `p`.
    pub fn qber_sigma(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.sifted.len().max(1) as f64).sqrt()
    }

    /// True when the QBER is below the threshold.
    pub fn accepted(&self) -> bool {
        self.qber().is_some_and(|q| q < self.threshold)
    }

    /// Alice's sifted key.
    pub fn key(&self) -> Vec<u8> {
        self.sifted.iter().map(|&i| self.alice_bits[i]).collect()
    }

    /// Aligned table of the first `limit` rounds.
    pub fn transcript(&self, limit: usize) -> String {
        let n = self.n_rounds().min(limit);
        let rows: [(&str, Vec<String>); 5] = [
            ("Alice random bits", self.alice_bits[..n].iter().map(u8::to_string).collect()),
            ("Alice random bases", self.alice_bases[..n].iter().map(Basis::to_string).collect()),
            ("Bob random bases", self.bob_bases[..n].iter().map(Basis::to_string).collect()),
            ("Bob received bits", self.bob_bits[..n].iter().map(u8::to_string).collect()),
            (
                "sifted",
                (0..n)
                    .map(|i| if self.sifted.contains(&i) { "*".into() } else { ".".into() })
                    .collect(),
            ),
        ];
        let mut out = String::new();
        for (label, cells) in rows {
            out.push_str(&format!("{label:<20}|"));
            for c in cells {
                out.push_str(&format!(" {c}"));
            }
            out.push('\n');
        }
        out
    }
}

fn sift(alice_bases: &[Basis], bob_bases: &[Basis]) -> Vec<usize> {
    alice_bases
        .iter()
        .zip(bob_bases)
        .enumerate()
        .filter(|(_, (a, b))| a == b)
        .map(|(i, _)| i)
        .collect()
}

/// Sifts a recorded transcript.
pub fn bb84_from_table(
    alice_bits: &[u8],
    alice_bases: &[Basis],
    bob_bases: &[Basis],
    bob_bits: &[u8],
) -> Bb84Run {
    let sifted = sift(alice_bases, bob_bases);
    let n_errors = sifted.iter().filter(|&&i| alice_bits[i] != bob_bits[i]).count();
    Bb84Run {
        alice_bits: alice_bits.to_vec(),
        alice_bases: alice_bases.to_vec(),
        bob_bases: bob_bases.to_vec(),
        bob_bits: bob_bits.to_vec(),
        sifted,
        n_errors,
        threshold: Bb84Config::default().threshold,
    }
}

/// Outcome of measuring a bit prepared in `prep` in basis `meas`.
fn measure<R: Rng>(rng: &mut R, bit: u8, prep: Basis, meas: Basis) -> u8 {
    if prep == meas {
        bit
    } else {
        rng.random_range(0..2)
    }
}

/// Simulates `n_bits` rounds, optionally with an intercept-resend
/// eavesdropper who measures in a random basis and forwards her result.
pub fn bb84_run(n_bits: usize, config: Bb84Config, seed: u64) -> Bb84Run {
    let mut rng = rng::stream(seed, 0);
    let mut alice_bits = Vec::with_capacity(n_bits);
    let mut alice_bases = Vec::with_capacity(n_bits);
    let mut bob_bases = Vec::with_capacity(n_bits);
    let mut bob_bits = Vec::with_capacity(n_bits);
    for _ in 0..n_bits {
        let bit: u8 = rng.random_range(0..2);
        let basis = Basis::random(&mut rng);
        let (mut carried, mut carried_basis) = (bit, basis);
        if config.eavesdrop {
            let eve = Basis::random(&mut rng);
            carried = measure(&mut rng, bit, basis, eve);
            carried_basis = eve;
        }
        let bob = Basis::random(&mut rng);
        bob_bits.push(measure(&mut rng, carried, carried_basis, bob));
        alice_bits.push(bit);
        alice_bases.push(basis);
        bob_bases.push(bob);
    }
    let mut run = bb84_from_table(&alice_bits, &alice_bases, &bob_bases, &bob_bits);
    run.threshold = config.threshold;
    run
}

/// Exact sifted error rate under intercept-resend, by enumerating Alice's
/// bit and basis, Eve's basis and outcome, and Bob's outcome in Alice's
/// basis.
pub fn intercept_resend_qber() -> f64 {
    let outcome = |bit: u8, prep: Basis, meas: Basis| -> Vec<(u8, f64)> {
        if prep == meas {
            vec![(bit, 1.0)]
        } else {
            vec![(0, 0.5), (1, 0.5)]
        }
    };
    let mut err = 0.0;
    for bit in [0u8, 1] {
        for alice in [Z, X] {
            for eve in [Z, X] {
                for (e_bit, pe) in outcome(bit, alice, eve) {
                    for (b_bit, pb) in outcome(e_bit, eve, alice) {
                        if b_bit != bit {
                            err += 0.125 * pe * pb;
                        }
                    }
                }
            }
        }
    }
    err
}
