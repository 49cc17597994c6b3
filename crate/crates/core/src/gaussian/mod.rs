//! N-mode Gaussian states described by a displacement vector and a
//! covariance matrix.
//!
//! Convention: `gamma_ii = 2 (Delta R_i)^2`, so the vacuum has `gamma = I`.
//! The Wigner function is
//! `W(z) = exp(-(z-d)^T gamma^{-1} (z-d)) / (pi^N sqrt(det gamma))`.

mod transform;

pub use transform::{
    make_transform, BeamSplitter, PhaseShift, SingleModeSqueezer, SymplecticTransform,
    TransformGenerator, TransformRegistry, Translation, TwoModeSqueezer,
};

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, PHYSICAL_TOL, SYMPLECTIC_TOL};

/// Gaussian state: displacement vector `d` and covariance matrix `gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    d: DVector<f64>,
    gamma: DMatrix<f64>,
}

/// Result of [`validate_state`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidityReport {
    pub is_physical: bool,
    pub min_eigenvalue: f64,
    pub symplectic_spectrum: Vec<f64>,
}

impl GaussianState {
    /// Builds a state after checking shapes and symmetry of `gamma`.
    /// Physicality is not enforced here; see [`GaussianState::physical`].
    pub fn new(d: DVector<f64>, gamma: DMatrix<f64>) -> Result<Self> {
        linalg::check_covariance_shape(&gamma, SYMPLECTIC_TOL)?;
        if d.len() != gamma.nrows() {
            return Err(Error::DimensionError(format!(
                "displacement has length {} but covariance is {}x{}",
                d.len(),
                gamma.nrows(),
                gamma.ncols()
            )));
        }
        if d.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite displacement".into()));
        }
        Ok(Self {
            d,
            gamma: linalg::symmetrize(&gamma),
        })
    }

    /// Like [`GaussianState::new`] but also requires `gamma + iJ >= 0`.
    pub fn physical(d: DVector<f64>, gamma: DMatrix<f64>) -> Result<Self> {
        let state = Self::new(d, gamma)?;
        let report = validate_state(&state.gamma, PHYSICAL_TOL)?;
        if !report.is_physical {
            return Err(Error::UnphysicalInput(format!(
                "gamma + iJ has eigenvalue {:.3e} < 0",
                report.min_eigenvalue
            )));
        }
        Ok(state)
    }

    /// Zero-mean state with covariance `gamma`.
    pub fn centered(gamma: DMatrix<f64>) -> Result<Self> {
        let n = gamma.nrows();
        Self::new(DVector::zeros(n), gamma)
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self {
            d: DVector::zeros(2 * n_modes),
            gamma: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    /// Single-mode thermal state with mean photon number `mean_photons`.
    pub fn thermal(mean_photons: f64) -> Self {
        Self {
            d: DVector::zeros(2),
            gamma: DMatrix::identity(2, 2) * (2.0 * mean_photons + 1.0),
        }
    }

    /// Single-mode coherent state centred at `(q0, p0)`.
    pub fn coherent(q0: f64, p0: f64) -> Self {
        Self {
            d: DVector::from_vec(vec![q0, p0]),
            gamma: DMatrix::identity(2, 2),
        }
    }

    /// Single-mode squeezed vacuum, `gamma = diag(e^{-2r}, e^{2r})`.
    pub fn squeezed(r: f64) -> Self {
        Self {
            d: DVector::zeros(2),
            gamma: DMatrix::from_diagonal(&DVector::from_vec(vec![
                (-2.0 * r).exp(),
                (2.0 * r).exp(),
            ])),
        }
    }

    /// Two-mode squeezed vacuum with squeezing `r`.
    pub fn two_mode_squeezed(r: f64) -> Self {
        let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
        #[rustfmt::skip]
        let gamma = DMatrix::from_row_slice(4, 4, &[
            c, 0.0, s, 0.0,
            0.0, c, 0.0, -s,
            s, 0.0, c, 0.0,
            0.0, -s, 0.0, c,
        ]);
        Self {
            d: DVector::zeros(4),
            gamma,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.d.len() / 2
    }

    pub fn displacement(&self) -> &DVector<f64> {
        &self.d
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    pub fn validate(&self, tol: f64) -> ValidityReport {
        // shape already checked at construction
        validity(&self.gamma, tol)
    }

    pub fn symplectic_spectrum(&self) -> Vec<f64> {
        linalg::symplectic_eigenvalues(&self.gamma)
    }

    /// Wigner function evaluated at `zeta`.
    pub fn wigner(&self, zeta: &[f64]) -> Result<f64> {
        Ok(self.wigner_function()?.eval(zeta))
    }

    /// Pre-factored Wigner function for repeated evaluation.
    pub fn wigner_function(&self) -> Result<WignerFunction> {
        let inv = linalg::spd_inverse(&self.gamma)?;
        let norm = 1.0 / (PI.powi(self.n_modes() as i32) * self.gamma.determinant().sqrt());
        Ok(WignerFunction {
            d: self.d.clone(),
            inv,
            norm,
        })
    }

    /// Characteristic function
    /// `chi(eta) = exp(i eta^T J d - eta^T J^T (gamma/4) J eta)`.
    pub fn characteristic(&self, eta: &[f64]) -> Result<Complex<f64>> {
        let n = self.d.len();
        if eta.len() != n {
            return Err(Error::DimensionError(format!(
                "point has length {} but state has dimension {n}",
                eta.len()
            )));
        }
        let eta = DVector::from_column_slice(eta);
        let j = linalg::symplectic_form(self.n_modes());
        let je = &j * &eta;
        let phase = eta.dot(&(&j * &self.d));
        let quad = je.dot(&(&self.gamma * &je)) / 4.0;
        Ok(Complex::from_polar((-quad).exp(), phase))
    }

    /// Purity `tr(rho^2) = 1 / sqrt(det gamma)`.
    pub fn purity(&self) -> f64 {
        1.0 / self.gamma.determinant().sqrt()
    }

    /// Applies a symplectic transform: `gamma' = S gamma S^T`, `d' = S d + s`.
    pub fn apply(&self, t: &SymplecticTransform) -> Result<GaussianState> {
        t.apply(self)
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &GaussianState) -> GaussianState {
        let d = DVector::from_iterator(
            self.d.len() + other.d.len(),
            self.d.iter().chain(other.d.iter()).copied(),
        );
        GaussianState {
            d,
            gamma: linalg::direct_sum(&self.gamma, &other.gamma),
        }
    }

    /// Reduced state on `keep_modes` (in the listed order).
    pub fn partial_trace(&self, keep_modes: &[usize]) -> Result<GaussianState> {
        let n = self.n_modes();
        if keep_modes.is_empty() {
            return Err(Error::DimensionError("no modes kept".into()));
        }
        let mut seen = vec![false; n];
        for &m in keep_modes {
            if m >= n || seen[m] {
                return Err(Error::DimensionError(format!(
                    "mode index {m} invalid for a {n}-mode state"
                )));
            }
            seen[m] = true;
        }
        let idx = linalg::mode_indices(keep_modes);
        let d = DVector::from_iterator(idx.len(), idx.iter().map(|&i| self.d[i]));
        Ok(GaussianState {
            d,
            gamma: linalg::select(&self.gamma, &idx, &idx),
        })
    }

    /// Serializes to `{"n_modes":N,"d":[...],"gamma":[[...],...]}` with
    /// every double printed to 17 significant digits.
    pub fn to_json(&self) -> String {
        let num = |v: f64| format!("{v:.16e}");
        let d: Vec<String> = self.d.iter().map(|&v| num(v)).collect();
        let rows: Vec<String> = (0..self.gamma.nrows())
            .map(|i| {
                let row: Vec<String> = self.gamma.row(i).iter().map(|&v| num(v)).collect();
                format!("[{}]", row.join(","))
            })
            .collect();
        format!(
            "{{\"n_modes\":{},\"d\":[{}],\"gamma\":[{}]}}",
            self.n_modes(),
            d.join(","),
            rows.join(",")
        )
    }

    pub fn from_json(text: &str) -> Result<GaussianState> {
        let doc: StateDocument =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        doc.try_into()
    }
}

/// Plain JSON form of a [`GaussianState`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateDocument {
    pub n_modes: usize,
    pub d: Vec<f64>,
    pub gamma: Vec<Vec<f64>>,
}

impl TryFrom<StateDocument> for GaussianState {
    type Error = Error;

    fn try_from(doc: StateDocument) -> Result<Self> {
        let dim = 2 * doc.n_modes;
        if doc.d.len() != dim || doc.gamma.len() != dim || doc.gamma.iter().any(|r| r.len() != dim)
        {
            return Err(Error::DimensionError(format!(
                "document does not describe a {}-mode state",
                doc.n_modes
            )));
        }
        let gamma = DMatrix::from_fn(dim, dim, |i, j| doc.gamma[i][j]);
        GaussianState::new(DVector::from_vec(doc.d), gamma)
    }
}

impl From<&GaussianState> for StateDocument {
    fn from(s: &GaussianState) -> Self {
        let dim = s.d.len();
        StateDocument {
            n_modes: s.n_modes(),
            d: s.d.iter().copied().collect(),
            gamma: (0..dim)
                .map(|i| s.gamma.row(i).iter().copied().collect())
                .collect(),
        }
    }
}

/// Wigner function with the covariance inverse cached.
#[derive(Debug, Clone)]
pub struct WignerFunction {
    d: DVector<f64>,
    inv: DMatrix<f64>,
    norm: f64,
}

impl WignerFunction {
    #[allow(clippy::needless_range_loop)]
    pub fn eval(&self, zeta: &[f64]) -> f64 {
        let n = self.d.len();
        debug_assert_eq!(zeta.len(), n);
        let mut q = 0.0;
        for i in 0..n {
            let di = zeta[i] - self.d[i];
            for j in 0..n {
                q += di * self.inv[(i, j)] * (zeta[j] - self.d[j]);
            }
        }
        self.norm * (-q).exp()
    }

    /// Value at the peak, `1 / (pi^N sqrt(det gamma))`.
    pub fn peak(&self) -> f64 {
        self.norm
    }
}

fn validity(gamma: &DMatrix<f64>, tol: f64) -> ValidityReport {
    let min_eigenvalue = linalg::min_eigenvalue_with_form(gamma);
    ValidityReport {
        is_physical: min_eigenvalue >= -tol,
        min_eigenvalue,
        symplectic_spectrum: linalg::symplectic_eigenvalues(gamma),
    }
}

/// Checks `gamma + iJ >= 0` and reports the symplectic spectrum.
pub fn validate_state(gamma: &DMatrix<f64>, tol: f64) -> Result<ValidityReport> {
    linalg::check_covariance_shape(gamma, SYMPLECTIC_TOL)?;
    Ok(validity(gamma, tol))
}

/// Symplectic eigenvalues of `gamma`, sorted descending.
pub fn symplectic_spectrum(gamma: &DMatrix<f64>) -> Result<Vec<f64>> {
    linalg::check_covariance_shape(gamma, SYMPLECTIC_TOL)?;
    Ok(linalg::symplectic_eigenvalues(gamma))
}

/// Hilbert–Schmidt overlap `tr(rho1 rho2)` of two Gaussian states:
/// `exp(-d^T (gamma1+gamma2)^{-1} d) / sqrt(det((gamma1+gamma2)/2))` with `d = d1 - d2`.
///
/// This is the fidelity when at least one state is pure.
pub fn fidelity_hs(a: &GaussianState, b: &GaussianState) -> Result<f64> {
    if a.d.len() != b.d.len() {
        return Err(Error::DimensionError(format!(
            "{}-mode vs {}-mode state",
            a.n_modes(),
            b.n_modes()
        )));
    }
    let sum = &a.gamma + &b.gamma;
    let inv = linalg::spd_inverse(&sum)?;
    let diff = &a.d - &b.d;
    let det_half = (&sum * 0.5).determinant();
    Ok((-diff.dot(&(&inv * &diff))).exp() / det_half.sqrt())
}
