//! Protocol efficiency: the probability per shared state of obtaining a
//! correct bit inside the acceptance window.
//!
//! Raw outcomes `(x0A, x0B)` range over the plane and the window constrains
//! `|x0B| - |x0A|`. The integrand is invariant under `(x0A, x0B) -> (-x0A, -x0B)`,
//! so the folded estimator integrates the `x0A > 0` half-plane and doubles.

pub mod quadrature;
mod sweep;

pub use sweep::{
    default_grid, format_sig, parse_grid_csv, sweep, sweep_with_threads, write_records_csv,
    write_skipped_csv, SkippedPoint, SweepOutput, SweepRecord, CSV_HEADER, SKIPPED_HEADER,
};

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
pub use crate::rng::derive_seed;
use crate::qkd::{accept_interval, error_rate, Attack, SecurityInterval, SymmetricStdState};

/// Bound on the probability mass outside `[-x_max, x_max]^2`.
pub const TAIL_MASS: f64 = 1e-6;

/// Joint position density `tr(rho |x0A, x0B><x0A, x0B|)`.
pub fn marginal_density(state: &SymmetricStdState, x0a: f64, x0b: f64) -> f64 {
    let l = state.det_x();
    let e = (2.0 * state.c_x * x0a * x0b - state.lambda * (x0a * x0a + x0b * x0b)) / l;
    e.exp() / (PI * l.sqrt())
}

/// Numerical settings shared by the estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureConfig {
    /// Truncation radius; `None` means `8 sqrt(lambda)`.
    pub x_max: Option<f64>,
    /// Nodes per axis.
    pub n_points: usize,
    pub mc_samples: usize,
    pub rng_seed: u64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            x_max: None,
            n_points: 256,
            mc_samples: 1_000_000,
            rng_seed: 0,
        }
    }
}

impl QuadratureConfig {
    /// Truncation radius for `state`, checked against [`TAIL_MASS`].
    ///
    /// Each position marginal has variance `lambda / 2`, so the mass beyond
    /// `x` on either axis is at most `2 exp(-x^2 / lambda)`.
    pub fn radius(&self, state: &SymmetricStdState) -> Result<f64> {
        let r = self.x_max.unwrap_or(8.0 * state.lambda.sqrt());
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidInput(format!("x_max must be positive, got {r}")));
        }
        let tail = 2.0 * (-r * r / state.lambda).exp();
        if tail >= TAIL_MASS {
            return Err(Error::InvalidInput(format!(
                "x_max = {r} leaves tail mass {tail:.2e} (need < {TAIL_MASS:.0e})"
            )));
        }
        if self.n_points == 0 {
            return Err(Error::InvalidInput("n_points must be positive".into()));
        }
        Ok(r)
    }
}

/// Window on `Δx0 = |x0B| - |x0A|` as multiples of `|x0A|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AcceptanceWindow {
    pub lo_factor: f64,
    pub hi_factor: f64,
}

impl AcceptanceWindow {
    /// Only `Δx0 = 0` accepted.
    pub fn point() -> Self {
        Self {
            lo_factor: 0.0,
            hi_factor: 0.0,
        }
    }

    pub fn from_interval(iv: &SecurityInterval) -> Self {
        Self {
            lo_factor: iv.lo_factor,
            hi_factor: iv.hi_factor,
        }
    }

    /// Multiplies both factors by `k`, keeping `|x0B| >= 0` meaningful.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            lo_factor: (self.lo_factor * k).max(-1.0),
            hi_factor: self.hi_factor * k,
        }
    }

    /// Open-interval test on raw outcomes.
    pub fn contains(&self, x0a: f64, x0b: f64) -> bool {
        let a = x0a.abs();
        let d = x0b.abs() - a;
        self.lo_factor * a < d && d < self.hi_factor * a
    }

    /// Accepted range of `|x0B|` for `|x0A| = a`, clipped to `[0, x_max]`.
    fn b_range(&self, a: f64, x_max: f64) -> (f64, f64) {
        let lo = (a * (1.0 + self.lo_factor)).max(0.0);
        let hi = if self.hi_factor.is_infinite() {
            x_max
        } else {
            (a * (1.0 + self.hi_factor)).min(x_max)
        };
        (lo, hi)
    }
}

/// What is averaged over accepted outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Weight {
    /// `1 - eps_AB`, giving the efficiency.
    CorrectBit,
    /// Constant 1, giving the acceptance probability.
    Acceptance,
}

/// One integral to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EfficiencyProblem {
    pub state: SymmetricStdState,
    pub window: AcceptanceWindow,
    pub weight: Weight,
}

impl EfficiencyProblem {
    /// Efficiency of `state` under the security window of `attack`.
    pub fn secure(state: &SymmetricStdState, attack: Attack) -> Result<Self> {
        let iv = accept_interval(state, attack)?;
        Ok(Self {
            state: *state,
            window: AcceptanceWindow::from_interval(&iv),
            weight: Weight::CorrectBit,
        })
    }

    fn weight_at(&self, a: f64, b: f64) -> f64 {
        match self.weight {
            Weight::CorrectBit => 1.0 - error_rate(&self.state, a, b),
            Weight::Acceptance => 1.0,
        }
    }
}

/// Value with an optional one-sigma statistical error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: Option<f64>,
}

/// A way of evaluating an [`EfficiencyProblem`].
pub trait EfficiencyEstimator: Send + Sync {
    fn name(&self) -> &'static str;
    fn estimate(&self, problem: &EfficiencyProblem, config: &QuadratureConfig, seed: u64)
        -> Result<Estimate>;
}

/// Folded deterministic quadrature over the `x0A > 0` half-plane.
pub struct FoldedQuadrature;
/// Same integral over all four sign quadrants without the fold.
pub struct UnfoldedQuadrature;
/// Sampling from the bivariate position marginal.
pub struct MonteCarlo;

fn half_plane(problem: &EfficiencyProblem, x_max: f64, n: usize, signs: &[(f64, f64)]) -> f64 {
    let state = &problem.state;
    quadrature::composite_nodes(0.0, x_max, n)
        .into_iter()
        .map(|(a, wa)| {
            let (lo, hi) = problem.window.b_range(a, x_max);
            let inner: f64 = quadrature::composite_nodes(lo, hi, n)
                .into_iter()
                .map(|(b, wb)| {
                    let m: f64 = signs
                        .iter()
                        .map(|&(sa, sb)| marginal_density(state, sa * a, sb * b))
                        .sum();
                    wb * problem.weight_at(a, b) * m
                })
                .sum();
            wa * inner
        })
        .sum()
}

impl EfficiencyEstimator for FoldedQuadrature {
    fn name(&self) -> &'static str {
        "quadrature"
    }

    fn estimate(&self, problem: &EfficiencyProblem, config: &QuadratureConfig, _seed: u64) -> Result<Estimate> {
        let x_max = config.radius(&problem.state)?;
        let v = 2.0 * half_plane(problem, x_max, config.n_points, &[(1.0, 1.0), (1.0, -1.0)]);
        Ok(Estimate {
            value: v.clamp(0.0, 1.0),
            std_error: None,
        })
    }
}

impl EfficiencyEstimator for UnfoldedQuadrature {
    fn name(&self) -> &'static str {
        "quadrature-unfolded"
    }

    fn estimate(&self, problem: &EfficiencyProblem, config: &QuadratureConfig, _seed: u64) -> Result<Estimate> {
        let x_max = config.radius(&problem.state)?;
        let mut v = 0.0;
        for signs in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            v += half_plane(problem, x_max, config.n_points, &[signs]);
        }
        Ok(Estimate {
            value: v.clamp(0.0, 1.0),
            std_error: None,
        })
    }
}

impl EfficiencyEstimator for MonteCarlo {
    fn name(&self) -> &'static str {
        "monte-carlo"
    }

    fn estimate(&self, problem: &EfficiencyProblem, config: &QuadratureConfig, seed: u64) -> Result<Estimate> {
        let n = config.mc_samples;
        if n < 2 {
            return Err(Error::InvalidInput("mc_samples must be at least 2".into()));
        }
        let state = &problem.state;
        // Cholesky factor of the position covariance (1/2)[[l, c], [c, l]]
        let sd = (0.5 * state.lambda).sqrt();
        let rho = state.c_x / state.lambda;
        let rho_c = (1.0 - rho * rho).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..n {
            let z1: f64 = StandardNormal.sample(&mut rng);
            let z2: f64 = StandardNormal.sample(&mut rng);
            let xa = sd * z1;
            let xb = sd * (rho * z1 + rho_c * z2);
            if problem.window.contains(xa, xb) {
                let v = problem.weight_at(xa, xb);
                sum += v;
                sum_sq += v * v;
            }
        }
        let nf = n as f64;
        let mean = sum / nf;
        let var = (sum_sq / nf - mean * mean).max(0.0) * nf / (nf - 1.0);
        Ok(Estimate {
            value: mean,
            std_error: Some((var / nf).sqrt()),
        })
    }
}

/// Name-indexed set of estimators.
pub struct EstimatorRegistry {
    estimators: BTreeMap<&'static str, Box<dyn EfficiencyEstimator>>,
}

impl EstimatorRegistry {
    pub fn with_builtins() -> Self {
        let mut r = Self {
            estimators: BTreeMap::new(),
        };
        r.register(Box::new(FoldedQuadrature));
        r.register(Box::new(UnfoldedQuadrature));
        r.register(Box::new(MonteCarlo));
        r
    }

    pub fn register(&mut self, e: Box<dyn EfficiencyEstimator>) {
        self.estimators.insert(e.name(), e);
    }

    pub fn get(&self, name: &str) -> Result<&dyn EfficiencyEstimator> {
        self.estimators
            .get(name)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::UnknownEstimator(name.into()))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.estimators.keys().copied()
    }

    pub fn global() -> &'static EstimatorRegistry {
        static REGISTRY: OnceLock<EstimatorRegistry> = OnceLock::new();
        REGISTRY.get_or_init(EstimatorRegistry::with_builtins)
    }
}

/// Efficiency by folded quadrature. Requires an NPPT state, and for
/// coherent attacks a state that satisfies the coherent constraint.
pub fn efficiency(state: &SymmetricStdState, attack: Attack, config: &QuadratureConfig) -> Result<f64> {
    let problem = EfficiencyProblem::secure(state, attack)?;
    Ok(FoldedQuadrature.estimate(&problem, config, config.rng_seed)?.value)
}
