//! Dense matrix helpers shared by the Gaussian-state modules.
//!
//! Phase-space vectors are ordered mode by mode, `(q1, p1, q2, p2, ...)`,
//! so the symplectic form is block diagonal in `[[0, 1], [-1, 0]]` blocks.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Default tolerance for symmetry and symplecticity checks.
pub const SYMPLECTIC_TOL: f64 = 1e-9;
/// Default tolerance for the physicality test `gamma + iJ >= 0`.
pub const PHYSICAL_TOL: f64 = 1e-8;
/// Covariance matrices above this condition number are treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// The symplectic form `J_N` for `n_modes` modes.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        j[(2 * k, 2 * k + 1)] = 1.0;
        j[(2 * k + 1, 2 * k)] = -1.0;
    }
    j
}

/// Momentum reflection `theta_N = diag(1, -1, 1, -1, ...)`.
pub fn momentum_reflection(n_modes: usize) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_fn(2 * n_modes, |i, _| {
        if i % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }))
}

/// Block-diagonal direct sum `a ⊕ b`.
pub fn direct_sum(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = DMatrix::zeros(ra + rb, ca + cb);
    out.view_mut((0, 0), (ra, ca)).copy_from(a);
    out.view_mut((ra, ca), (rb, cb)).copy_from(b);
    out
}

/// Largest absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Checks squareness, even dimension and symmetry to within `tol`
/// (relative to the largest entry).
pub fn check_covariance_shape(gamma: &DMatrix<f64>, tol: f64) -> Result<()> {
    let (r, c) = gamma.shape();
    if r != c {
        return Err(Error::MalformedMatrix(format!("{r}x{c} is not square")));
    }
    if r == 0 || r % 2 != 0 {
        return Err(Error::MalformedMatrix(format!(
            "dimension {r} is not a positive even number"
        )));
    }
    if gamma.iter().any(|v| !v.is_finite()) {
        return Err(Error::MalformedMatrix("non-finite entry".into()));
    }
    let asym = max_abs(&(gamma - gamma.transpose()));
    let scale = max_abs(gamma).max(1.0);
    if asym > tol * scale {
        return Err(Error::MalformedMatrix(format!(
            "not symmetric (max |g - g^T| = {asym:.3e})"
        )));
    }
    Ok(())
}

/// Symmetric part `(m + m^T) / 2`.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Eigen-decomposition of a symmetric positive-definite matrix, with the
/// condition-number guard applied.
fn spd_eigen(m: &DMatrix<f64>) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    let eig = SymmetricEigen::new(symmetrize(m));
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    if min <= 0.0 {
        return Err(Error::SingularCovariance {
            condition: f64::INFINITY,
        });
    }
    let condition = max / min;
    if condition > MAX_CONDITION {
        return Err(Error::SingularCovariance { condition });
    }
    Ok(eig)
}

/// Applies `f` to the spectrum of a symmetric positive-definite matrix.
fn spd_function(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> Result<DMatrix<f64>> {
    let eig = spd_eigen(m)?;
    let vals = eig.eigenvalues.map(f);
    let v = &eig.eigenvectors;
    Ok(v * DMatrix::from_diagonal(&vals) * v.transpose())
}

/// Inverse of a symmetric positive-definite matrix.
pub fn spd_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    spd_function(m, |x| 1.0 / x)
}

/// Principal square root of a symmetric positive-definite matrix.
pub fn spd_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    spd_function(m, f64::sqrt)
}

/// Inverse principal square root of a symmetric positive-definite matrix.
pub fn spd_inv_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    spd_function(m, |x| 1.0 / x.sqrt())
}

/// Principal square root of a symmetric positive-semidefinite matrix.
/// Eigenvalues in `[-clamp, 0)` are treated as roundoff and set to zero.
pub fn psd_sqrt(m: &DMatrix<f64>, clamp: f64) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(symmetrize(m));
    let scale = eig.eigenvalues.amax().max(1.0);
    let mut vals = eig.eigenvalues.clone();
    for v in vals.iter_mut() {
        if *v < 0.0 {
            if *v < -clamp * scale {
                return Err(Error::NumericalInstability(format!(
                    "matrix is not positive semidefinite (eigenvalue {v:.3e})"
                )));
            }
            *v = 0.0;
        }
        *v = v.sqrt();
    }
    let u = &eig.eigenvectors;
    Ok(u * DMatrix::from_diagonal(&vals) * u.transpose())
}

/// Smallest eigenvalue of the Hermitian matrix `gamma + iJ`.
///
/// Uses the real symmetric embedding `[[gamma, -J], [J, gamma]]`, whose
/// spectrum is that of `gamma + iJ` with every eigenvalue doubled.
pub fn min_eigenvalue_with_form(gamma: &DMatrix<f64>) -> f64 {
    let n = gamma.nrows();
    let j = symplectic_form(n / 2);
    let mut big = DMatrix::zeros(2 * n, 2 * n);
    big.view_mut((0, 0), (n, n)).copy_from(gamma);
    big.view_mut((n, n), (n, n)).copy_from(gamma);
    big.view_mut((0, n), (n, n)).copy_from(&(-&j));
    big.view_mut((n, 0), (n, n)).copy_from(&j);
    SymmetricEigen::new(symmetrize(&big)).eigenvalues.min()
}

/// Symplectic eigenvalues of `gamma`, sorted descending.
///
/// The eigenvalues of the real matrix `J gamma` come in pairs `±i mu`; the
/// magnitudes are sorted and each pair is averaged.
pub fn symplectic_eigenvalues(gamma: &DMatrix<f64>) -> Vec<f64> {
    let n = gamma.nrows() / 2;
    let jg = symplectic_form(n) * gamma;
    let mut mags: Vec<f64> = jg.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    mags.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

/// Extracts the sub-matrix with the given row/column indices.
pub fn select(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// Phase-space indices `(2k, 2k+1)` for each listed mode.
pub fn mode_indices(modes: &[usize]) -> Vec<usize> {
    modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect()
}
