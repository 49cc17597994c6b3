//! Alice/Bob/Eve analysis for symmetric two-mode states measured by
//! position homodyne detection.
//!
//! Outcomes are handled by magnitude: every function here takes `|x0A|` and
//! `|x0B|` and ignores the sign of what it is given.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::entanglement::StandardForm;
use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::linalg;

/// Relative tolerance for physicality and radicand checks.
pub const STATE_TOL: f64 = 1e-9;
/// `alpha` or `beta` this close to 1 is snapped to exactly 1.
pub const UNBOUNDED_TOL: f64 = 1e-12;
/// Width of the band around zero in which the direct and reduced security
/// tests are allowed to disagree.
pub const NEUTRAL_BAND: f64 = 1e-9;

/// Symmetric standard-form state `(lambda, c_x, c_p)`: x-coupling `+c_x`,
/// p-coupling `-c_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetricStdState {
    pub lambda: f64,
    pub c_x: f64,
    pub c_p: f64,
}

impl SymmetricStdState {
    /// Validates `lambda >= 1`, `c_x >= |c_p|`, `lambda > c_x` and
    /// `(lambda - c_x)(lambda + c_p) >= 1`.
    pub fn new(lambda: f64, c_x: f64, c_p: f64) -> Result<Self> {
        let s = Self { lambda, c_x, c_p };
        s.check()?;
        Ok(s)
    }

    /// Builds without validation.
    pub fn new_unchecked(lambda: f64, c_x: f64, c_p: f64) -> Self {
        Self { lambda, c_x, c_p }
    }

    /// Pure two-mode squeezed vacuum with squeezing `r >= 0`.
    pub fn tmsv(r: f64) -> Self {
        let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
        Self {
            lambda: c,
            c_x: s,
            c_p: s,
        }
    }

    pub fn check(&self) -> Result<()> {
        let Self { lambda, c_x, c_p } = *self;
        if !(lambda.is_finite() && c_x.is_finite() && c_p.is_finite()) {
            return Err(Error::InvalidInput("state parameters must be finite".into()));
        }
        let tol = STATE_TOL * lambda.abs().max(1.0);
        if lambda < 1.0 - tol {
            return Err(Error::UnphysicalInput(format!("lambda = {lambda} < 1")));
        }
        if c_x < c_p.abs() - tol {
            return Err(Error::UnphysicalInput(format!(
                "standard form needs c_x >= |c_p| (c_x = {c_x}, c_p = {c_p})"
            )));
        }
        if lambda <= c_x {
            return Err(Error::UnphysicalInput(format!(
                "lambda - c_x = {} must be positive",
                lambda - c_x
            )));
        }
        let pos = self.positivity();
        if pos < 1.0 - STATE_TOL * lambda * lambda {
            return Err(Error::UnphysicalInput(format!(
                "(lambda - c_x)(lambda + c_p) = {pos} < 1"
            )));
        }
        Ok(())
    }

    /// `(lambda - c_x)(lambda + c_p)`, at least 1 for physical states.
    pub fn positivity(&self) -> f64 {
        (self.lambda - self.c_x) * (self.lambda + self.c_p)
    }

    /// `(lambda - c_x)(lambda - c_p)`, below 1 exactly for NPPT states.
    pub fn nppt_product(&self) -> f64 {
        (self.lambda - self.c_x) * (self.lambda - self.c_p)
    }

    pub fn is_nppt(&self) -> bool {
        self.nppt_product() < 1.0
    }

    /// Closed-form logarithmic negativity in bits.
    pub fn log_negativity(&self) -> f64 {
        (-0.5 * self.nppt_product().log2()).max(0.0)
    }

    /// `1 / sqrt(det gamma)`.
    pub fn purity(&self) -> f64 {
        let l2 = self.lambda * self.lambda;
        1.0 / ((l2 - self.c_x * self.c_x) * (l2 - self.c_p * self.c_p)).sqrt()
    }

    /// `lambda^2 - c_x^2`.
    pub fn det_x(&self) -> f64 {
        (self.lambda - self.c_x) * (self.lambda + self.c_x)
    }

    /// `lambda - (lambda + c_x)(lambda - c_x)(lambda - c_p)`; positive when
    /// finite coherent attacks can be defeated.
    pub fn coherent_constraint(&self) -> f64 {
        self.lambda - self.det_x() * (self.lambda - self.c_p)
    }

    pub fn standard_form(&self) -> StandardForm {
        StandardForm {
            lambda_a: self.lambda,
            lambda_b: self.lambda,
            k_x: self.c_x,
            k_p: self.c_p,
        }
    }

    pub fn covariance(&self) -> DMatrix<f64> {
        self.standard_form().covariance()
    }

    pub fn gaussian_state(&self) -> GaussianState {
        GaussianState::centered(self.covariance()).expect("standard form is well shaped")
    }

    /// Coefficients of the reduced individual-attack condition
    /// `s P + u Q < 0` with `s = (x0A^2 + x0B^2)/2`, `u = |x0A||x0B|`.
    fn individual_coefficients(&self) -> (f64, f64) {
        let l = self.det_x();
        let p = self.lambda * (l - 1.0);
        let q = -self.c_x - self.c_p * l;
        (p, q)
    }

    fn coherent_coefficients(&self) -> (f64, f64) {
        let l = self.det_x();
        (self.lambda * (l - 1.0), -self.c_p * l)
    }

    fn coefficients(&self, attack: Attack) -> (f64, f64) {
        match attack {
            Attack::Individual => self.individual_coefficients(),
            Attack::FiniteCoherent => self.coherent_coefficients(),
        }
    }
}

/// Eavesdropping model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Attack {
    Individual,
    #[serde(rename = "coherent")]
    FiniteCoherent,
}

impl Attack {
    pub fn as_str(&self) -> &'static str {
        match self {
            Attack::Individual => "individual",
            Attack::FiniteCoherent => "coherent",
        }
    }

    /// Power of the overlap that `eps / (1 - eps)` must stay below.
    pub fn overlap_power(&self) -> i32 {
        match self {
            Attack::Individual => 1,
            Attack::FiniteCoherent => 2,
        }
    }
}

impl fmt::Display for Attack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Attack {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "individual" => Ok(Attack::Individual),
            "coherent" | "finite-coherent" | "finite_coherent" => Ok(Attack::FiniteCoherent),
            other => Err(Error::Parse(format!(
                "unknown attack `{other}` (expected individual or coherent)"
            ))),
        }
    }
}

/// Auxiliary quantities of the purified three-party state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EveAuxiliaries {
    pub a: f64,
    pub b: f64,
    pub x: f64,
    pub y: f64,
    pub a_coef: f64,
    pub b_coef: f64,
}

impl EveAuxiliaries {
    pub fn new(state: &SymmetricStdState) -> Result<Self> {
        let SymmetricStdState { lambda, c_x, c_p } = *state;
        let a = lambda * lambda - c_x * c_p - 1.0;
        let b = lambda * (c_x - c_p);
        let tol = STATE_TOL * lambda * lambda;
        let root = |v: f64, what: &str| -> Result<f64> {
            if v >= 0.0 {
                Ok(v.sqrt())
            } else if v >= -tol {
                Ok(0.0)
            } else {
                Err(Error::UnphysicalInput(format!("{what} = {v:.3e} < 0")))
            }
        };
        let sp = root(a + b, "a + b")?;
        let sm = root(a - b, "a - b")?;
        Ok(Self {
            a,
            b,
            x: 0.5 * (sp + sm),
            y: 0.5 * (sp - sm),
            a_coef: sp / (lambda + c_x),
            b_coef: sm / (lambda - c_x),
        })
    }
}

/// Pure four-mode covariance `[[gamma_AB, C], [C^T, theta gamma_AB theta]]`
/// with Eve holding modes 2 and 3.
pub fn purify_abe(state: &SymmetricStdState) -> Result<GaussianState> {
    let aux = EveAuxiliaries::new(state)?;
    let g = state.covariance();
    let theta = linalg::momentum_reflection(2);
    let (x, y) = (aux.x, aux.y);
    #[rustfmt::skip]
    let c = DMatrix::from_row_slice(4, 4, &[
        0.0, -x, 0.0, -y,
        -x, 0.0, -y, 0.0,
        0.0, -y, 0.0, -x,
        -y, 0.0, -x, 0.0,
    ]);
    let mut out = DMatrix::zeros(8, 8);
    out.view_mut((0, 0), (4, 4)).copy_from(&g);
    out.view_mut((0, 4), (4, 4)).copy_from(&c);
    out.view_mut((4, 0), (4, 4)).copy_from(&c.transpose());
    out.view_mut((4, 4), (4, 4)).copy_from(&(&theta * &g * &theta));
    GaussianState::centered(out)
}

/// Unnormalized coincidence weights for width-`sigma` position projectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoincidenceProbs {
    pub p_same: f64,
    pub p_diff: f64,
    pub k: f64,
}

pub fn coincidence_probs(
    state: &SymmetricStdState,
    sigma: f64,
    x0a: f64,
    x0b: f64,
) -> Result<CoincidenceProbs> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidInput(format!("sigma must be positive, got {sigma}")));
    }
    let SymmetricStdState { lambda, c_x, c_p } = *state;
    let s2 = sigma * sigma;
    let den = (lambda + s2).powi(2) - c_x * c_x;
    if den <= 0.0 {
        return Err(Error::SingularDenominator(den));
    }
    let k_den = den.sqrt() * ((lambda * s2 + 1.0).powi(2) - c_p * c_p * s2 * s2).sqrt();
    let k = 4.0 * s2 / k_den;
    let (ua, ub) = (x0a.abs(), x0b.abs());
    let quad = (lambda + s2) * (ua * ua + ub * ub);
    let cross = 2.0 * ua * ub * c_x;
    Ok(CoincidenceProbs {
        p_same: k * ((cross - quad) / den).exp(),
        p_diff: k * ((-cross - quad) / den).exp(),
        k,
    })
}

/// Resolution of the position measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum MeasurementModel {
    Finite { sigma: f64 },
    SharpLimit,
}

impl MeasurementModel {
    pub fn finite(sigma: f64) -> Result<Self> {
        if sigma > 0.0 && sigma.is_finite() {
            Ok(Self::Finite { sigma })
        } else {
            Err(Error::InvalidInput(format!("sigma must be positive, got {sigma}")))
        }
    }

    /// Probability that accepted bits disagree.
    pub fn error_probability(&self, state: &SymmetricStdState, x0a: f64, x0b: f64) -> Result<f64> {
        match *self {
            Self::SharpLimit => Ok(error_rate(state, x0a, x0b)),
            Self::Finite { sigma } => {
                let p = coincidence_probs(state, sigma, x0a, x0b)?;
                // p_same / p_diff directly, so a tiny common factor cannot underflow
                let den = (state.lambda + sigma * sigma).powi(2) - state.c_x * state.c_x;
                let log_ratio = 4.0 * state.c_x * x0a.abs() * x0b.abs() / den;
                debug_assert!(p.p_same >= p.p_diff);
                Ok(1.0 / (1.0 + log_ratio.exp()))
            }
        }
    }
}

/// `log(eps / (1 - eps)) = -4 c_x |x0A||x0B| / (lambda^2 - c_x^2)`.
pub fn log_error_odds(state: &SymmetricStdState, x0a: f64, x0b: f64) -> f64 {
    -4.0 * state.c_x * x0a.abs() * x0b.abs() / state.det_x()
}

/// Sharp-measurement bit error rate.
pub fn error_rate(state: &SymmetricStdState, x0a: f64, x0b: f64) -> f64 {
    1.0 / (1.0 + (-log_error_odds(state, x0a, x0b)).exp())
}

/// Eve's conditional pure states after Alice and Bob both find `+` or both
/// find `-`. Covariances are in mode-by-mode ordering on Eve's two modes.
#[derive(Debug, Clone, PartialEq)]
pub struct EveConditional {
    pub gamma: DMatrix<f64>,
    pub d_pp: DVector<f64>,
    pub d_mm: DVector<f64>,
}

impl EveConditional {
    pub fn state_pp(&self) -> GaussianState {
        GaussianState::new(self.d_pp.clone(), self.gamma.clone()).expect("valid shapes")
    }

    pub fn state_mm(&self) -> GaussianState {
        GaussianState::new(self.d_mm.clone(), self.gamma.clone()).expect("valid shapes")
    }
}

pub fn eve_conditional(state: &SymmetricStdState, x0a: f64, x0b: f64) -> Result<EveConditional> {
    let aux = EveAuxiliaries::new(state)?;
    let gx = DMatrix::from_row_slice(2, 2, &[state.lambda, state.c_x, state.c_x, state.lambda]);
    let gx_inv = linalg::spd_inverse(&gx)?;
    // (x1, x2, p1, p2) -> (x1, p1, x2, p2)
    let mut gamma = DMatrix::zeros(4, 4);
    for (i, &ri) in [0usize, 2].iter().enumerate() {
        for (j, &rj) in [0usize, 2].iter().enumerate() {
            gamma[(ri, rj)] = gx[(i, j)];
            gamma[(ri + 1, rj + 1)] = gx_inv[(i, j)];
        }
    }
    let (ua, ub) = (x0a.abs(), x0b.abs());
    let small = ub + ua;
    let big = ub - ua;
    let p1 = 0.5 * (aux.a_coef * small - aux.b_coef * big);
    let p2 = 0.5 * (aux.a_coef * small + aux.b_coef * big);
    let d_pp = DVector::from_vec(vec![0.0, -p1, 0.0, -p2]);
    let d_mm = -&d_pp;
    Ok(EveConditional { gamma, d_pp, d_mm })
}

/// Natural log of `|<e++|e-->|^2`.
pub fn log_eve_overlap_squared(state: &SymmetricStdState, x0a: f64, x0b: f64) -> f64 {
    let (ua, ub) = (x0a.abs(), x0b.abs());
    let l = state.det_x();
    let s = 0.5 * (ua * ua + ub * ub);
    let bracket = s * (l - 1.0) * state.lambda + ua * ub * (state.c_x - state.c_p * l);
    -4.0 / l * bracket
}

/// `|<e++|e-->|^2`.
pub fn eve_overlap_squared(state: &SymmetricStdState, x0a: f64, x0b: f64) -> f64 {
    log_eve_overlap_squared(state, x0a, x0b).exp()
}

/// `|<e++|e-->|`.
pub fn eve_overlap(state: &SymmetricStdState, x0a: f64, x0b: f64) -> f64 {
    (0.5 * log_eve_overlap_squared(state, x0a, x0b)).exp()
}

/// Left side of the reduced security condition; negative means secure.
pub fn security_margin(state: &SymmetricStdState, x0a: f64, x0b: f64, attack: Attack) -> f64 {
    let (p, q) = state.coefficients(attack);
    let (ua, ub) = (x0a.abs(), x0b.abs());
    0.5 * (ua * ua + ub * ub) * p + ua * ub * q
}

/// `log(eps/(1-eps)) - log(|<e++|e-->|^k)`; negative means secure.
pub fn direct_margin(state: &SymmetricStdState, x0a: f64, x0b: f64, attack: Attack) -> f64 {
    let k = attack.overlap_power() as f64;
    log_error_odds(state, x0a, x0b) - 0.5 * k * log_eve_overlap_squared(state, x0a, x0b)
}

/// Whether the outcome pair can yield a secret bit. Both the direct
/// comparison and the reduced polynomial condition are evaluated and must
/// agree outside a tiny neutral band.
pub fn security_check(
    state: &SymmetricStdState,
    x0a: f64,
    x0b: f64,
    attack: Attack,
) -> Result<bool> {
    let reduced = security_margin(state, x0a, x0b, attack);
    let direct = direct_margin(state, x0a, x0b, attack);
    let scale = 0.5 * (x0a * x0a + x0b * x0b) * state.lambda.powi(3);
    if (reduced < 0.0) != (direct < 0.0) && reduced.abs() > NEUTRAL_BAND * scale.max(1.0) {
        return Err(Error::InternalInconsistency(format!(
            "direct margin {direct:.6e} and reduced margin {reduced:.6e} disagree"
        )));
    }
    Ok(reduced < 0.0)
}

/// Printed closed form of the individual-attack parameter.
pub fn alpha(state: &SymmetricStdState) -> f64 {
    let SymmetricStdState { lambda, c_x, c_p } = *state;
    let a = (c_x - lambda) / (c_x + lambda)
        * ((1.0 - (lambda + c_x) * (lambda + c_p)) / (1.0 - (lambda - c_x) * (lambda - c_p)));
    snap_unit(a)
}

/// Finite-coherent-attack parameter `1 + 2 lambda (lambda^2 - c_x^2 - 1) / R`
/// with `R` the coherent constraint.
pub fn beta(state: &SymmetricStdState) -> Result<f64> {
    let r = state.coherent_constraint();
    if r <= 0.0 {
        return Err(Error::NotCoherentSecure(r));
    }
    let p = state.lambda * (state.det_x() - 1.0);
    Ok(snap_unit(1.0 + 2.0 * p / r))
}

fn snap_unit(v: f64) -> f64 {
    if (v - 1.0).abs() < UNBOUNDED_TOL {
        1.0
    } else {
        v
    }
}

/// Acceptance window for `Δx0 = |x0B| - |x0A|`, as multiples of `|x0A|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecurityInterval {
    pub lo_factor: f64,
    pub hi_factor: f64,
    pub param: f64,
    pub attack: Attack,
    pub unbounded: bool,
}

impl SecurityInterval {
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    fn from_param(param: f64, attack: Attack) -> Result<Self> {
        if !(param >= 1.0 - 1e-9) {
            return Err(Error::InternalInconsistency(format!(
                "interval parameter {param} below 1"
            )));
        }
        if param <= 1.0 {
            return Ok(Self {
                lo_factor: -1.0,
                hi_factor: f64::INFINITY,
                param: 1.0,
                attack,
                unbounded: true,
            });
        }
        let r = param.sqrt();
        Ok(Self {
            lo_factor: 2.0 / (-r - 1.0),
            hi_factor: 2.0 / (r - 1.0),
            param,
            attack,
            unbounded: false,
        })
    }

    /// `(lo, hi)` bounds on `Δx0` for Alice's outcome `x0a`.
    pub fn bounds(&self, x0a: f64) -> (f64, f64) {
        let a = x0a.abs();
        (self.lo_factor * a, self.hi_factor * a)
    }

    /// Open-interval membership of `|x0b| - |x0a|`.
    pub fn contains(&self, x0a: f64, x0b: f64) -> bool {
        let (lo, hi) = self.bounds(x0a);
        let delta = x0b.abs() - x0a.abs();
        lo < delta && delta < hi
    }

    /// Interval length `4 sqrt(p) / (p - 1) |x0A|`.
    pub fn length(&self, x0a: f64) -> f64 {
        if self.unbounded {
            f64::INFINITY
        } else {
            4.0 * self.param.sqrt() / (self.param - 1.0) * x0a.abs()
        }
    }
}

pub fn accept_interval(state: &SymmetricStdState, attack: Attack) -> Result<SecurityInterval> {
    if !state.is_nppt() {
        return Err(Error::NotNppt(format!(
            "(lambda - c_x)(lambda - c_p) = {} >= 1",
            state.nppt_product()
        )));
    }
    let param = match attack {
        Attack::Individual => alpha(state),
        Attack::FiniteCoherent => beta(state)?,
    };
    SecurityInterval::from_param(param, attack)
}
