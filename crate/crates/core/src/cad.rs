//! Classical advantage distillation by repetition-code blocks.
//!
//! Alice announces `b_i = a_i xor b` for a random bit `b` over a block of
//! `M` raw bits; Bob accepts only if `c_i xor b_i` is the same for every `i`.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng;

/// Trials per independently seeded chunk.
const CHUNK: usize = 1 << 16;

fn check(epsilon: f64, m: u32) -> Result<()> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidInput(format!("error rate {epsilon} is not a probability")));
    }
    if epsilon >= 0.5 {
        return Err(Error::NoAdvantage(epsilon));
    }
    if m == 0 {
        return Err(Error::InvalidInput("block size M must be at least 1".into()));
    }
    Ok(())
}

/// Error rate of accepted bits, `eps^M / ((1-eps)^M + eps^M)`.
pub fn cad_error(epsilon: f64, m: u32) -> Result<f64> {
    check(epsilon, m)?;
    let r = (epsilon / (1.0 - epsilon)).powi(m as i32);
    Ok(r / (1.0 + r))
}

/// Probability that Bob accepts a block, `(1-eps)^M + eps^M`.
pub fn acceptance_probability(epsilon: f64, m: u32) -> Result<f64> {
    check(epsilon, m)?;
    Ok((1.0 - epsilon).powi(m as i32) + epsilon.powi(m as i32))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CadResult {
    pub epsilon_in: f64,
    pub block_size: u32,
    pub epsilon_out_formula: f64,
    /// `None` when no block was accepted.
    pub epsilon_out_simulated: Option<f64>,
    pub acceptance_rate: f64,
    pub n_trials: u64,
    pub n_accepted: u64,
    pub n_errors: u64,
}

impl CadResult {
    /// Binomial standard error of the simulated conditional error, taken at
    /// the formula value.
    pub fn error_sigma(&self) -> f64 {
        let p = self.epsilon_out_formula;
        (p * (1.0 - p) / self.n_accepted.max(1) as f64).sqrt()
    }

    /// Binomial standard error of the acceptance rate at its expected value.
    pub fn acceptance_sigma(&self) -> f64 {
        let p = (1.0 - self.epsilon_in).powi(self.block_size as i32)
            + self.epsilon_in.powi(self.block_size as i32);
        (p * (1.0 - p) / self.n_trials as f64).sqrt()
    }
}

/// Outcome of one block: `None` if rejected, else whether the accepted bit
/// is wrong.
fn run_block<R: Rng>(rng: &mut R, epsilon: f64, m: u32) -> Option<bool> {
    let b: bool = rng.random();
    let mut verdict: Option<bool> = None;
    for _ in 0..m {
        let alice: bool = rng.random();
        let bob = alice ^ rng.random_bool(epsilon);
        let public = alice ^ b;
        let guess = bob ^ public;
        match verdict {
            None => verdict = Some(guess),
            Some(g) if g != guess => return None,
            Some(_) => {}
        }
    }
    verdict.map(|g| g != b)
}

/// Bit-level simulation of `n_trials` blocks, parallel over seeded chunks.
pub fn simulate_cad(epsilon: f64, m: u32, n_trials: u64, seed: u64) -> Result<CadResult> {
    let formula = cad_error(epsilon, m)?;
    if n_trials == 0 {
        return Err(Error::InvalidInput("n_trials must be positive".into()));
    }
    let n_chunks = (n_trials as usize).div_ceil(CHUNK);
    let (accepted, errors) = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng::stream(seed, c as u64);
            let len = CHUNK.min(n_trials as usize - c * CHUNK);
            let (mut acc, mut err) = (0u64, 0u64);
            for _ in 0..len {
                if let Some(wrong) = run_block(&mut rng, epsilon, m) {
                    acc += 1;
                    err += wrong as u64;
                }
            }
            (acc, err)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(CadResult {
        epsilon_in: epsilon,
        block_size: m,
        epsilon_out_formula: formula,
        epsilon_out_simulated: (accepted > 0).then(|| errors as f64 / accepted as f64),
        acceptance_rate: accepted as f64 / n_trials as f64,
        n_trials,
        n_accepted: accepted,
        n_errors: errors,
    })
}
