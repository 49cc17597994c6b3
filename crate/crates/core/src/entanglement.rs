//! Bipartite Gaussian entanglement: invariants, standard form, partial
//! transposition, logarithmic negativity, entropy of entanglement and
//! purification.
//!
//! Bipartitions are `1 x (N-1)`: mode 0 is party A, the rest is party B.
//! All logarithms are base 2.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, PHYSICAL_TOL};

/// Margin below 1 that a partially transposed symplectic eigenvalue must
/// clear before a state counts as NPPT.
pub const NPPT_TOL: f64 = 1e-10;
/// Purity tolerance for operations that require a pure global state.
pub const PURITY_TOL: f64 = 1e-6;
/// Negative radicands down to `-RADICAND_TOL * scale` are treated as zero.
pub const RADICAND_TOL: f64 = 1e-9;

/// Which side of a two-mode bipartition to act on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    A,
    B,
}

/// Local symplectic invariants of a two-mode covariance matrix
/// `[[A, C], [C^T, B]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockInvariants {
    pub det_a: f64,
    pub det_b: f64,
    pub det_c: f64,
    pub det_gamma: f64,
}

/// `[[la, 0, kx, 0], [0, la, 0, -kp], [kx, 0, lb, 0], [0, -kp, 0, lb]]`
/// with `kx >= |kp|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StandardForm {
    pub lambda_a: f64,
    pub lambda_b: f64,
    pub k_x: f64,
    pub k_p: f64,
}

impl StandardForm {
    pub fn is_symmetric(&self, tol: f64) -> bool {
        (self.lambda_a - self.lambda_b).abs() <= tol
    }

    pub fn covariance(&self) -> DMatrix<f64> {
        let (la, lb, kx, kp) = (self.lambda_a, self.lambda_b, self.k_x, self.k_p);
        #[rustfmt::skip]
        let g = DMatrix::from_row_slice(4, 4, &[
            la, 0.0, kx, 0.0,
            0.0, la, 0.0, -kp,
            kx, 0.0, lb, 0.0,
            0.0, -kp, 0.0, lb,
        ]);
        g
    }

    pub fn invariants(&self) -> BlockInvariants {
        let (la, lb, kx, kp) = (self.lambda_a, self.lambda_b, self.k_x, self.k_p);
        BlockInvariants {
            det_a: la * la,
            det_b: lb * lb,
            det_c: -kx * kp,
            det_gamma: (la * lb - kx * kx) * (la * lb - kp * kp),
        }
    }
}

fn require_two_mode(gamma: &DMatrix<f64>) -> Result<()> {
    if gamma.shape() != (4, 4) {
        return Err(Error::DimensionError(format!(
            "expected a 4x4 two-mode covariance, got {}x{}",
            gamma.nrows(),
            gamma.ncols()
        )));
    }
    Ok(())
}

pub fn block_invariants(gamma: &DMatrix<f64>) -> Result<BlockInvariants> {
    require_two_mode(gamma)?;
    let a = gamma.view((0, 0), (2, 2));
    let b = gamma.view((2, 2), (2, 2));
    let c = gamma.view((0, 2), (2, 2));
    Ok(BlockInvariants {
        det_a: a.determinant(),
        det_b: b.determinant(),
        det_c: c.determinant(),
        det_gamma: gamma.determinant(),
    })
}

fn clamped_sqrt(x: f64, scale: f64, what: &str) -> Result<f64> {
    if x >= 0.0 {
        Ok(x.sqrt())
    } else if x >= -RADICAND_TOL * scale.max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::NumericalInstability(format!(
            "negative radicand {x:.3e} in {what}"
        )))
    }
}

/// Reduces a physical two-mode covariance to its standard-form parameters.
///
/// The couplings are the roots of `k^2 - alpha k + detC = 0`; the larger one
/// becomes `k_x` and the smaller, negated, becomes `k_p`.
pub fn to_standard_form(gamma: &DMatrix<f64>) -> Result<StandardForm> {
    require_two_mode(gamma)?;
    let report = crate::gaussian::validate_state(gamma, PHYSICAL_TOL)?;
    if !report.is_physical {
        return Err(Error::UnphysicalInput(format!(
            "gamma + iJ has eigenvalue {:.3e} < 0",
            report.min_eigenvalue
        )));
    }
    let inv = block_invariants(gamma)?;
    let lambda_a = clamped_sqrt(inv.det_a, 1.0, "det A")?;
    let lambda_b = clamped_sqrt(inv.det_b, 1.0, "det B")?;
    let ab = lambda_a * lambda_b;
    let num = (ab + inv.det_c).powi(2) - inv.det_gamma;
    let alpha = clamped_sqrt(num / ab, ab, "coupling sum")?;
    let disc = clamped_sqrt(alpha * alpha - 4.0 * inv.det_c, ab, "coupling discriminant")?;
    let r_hi = 0.5 * (alpha + disc);
    let r_lo = 0.5 * (alpha - disc);
    let sf = StandardForm {
        lambda_a,
        lambda_b,
        k_x: r_hi,
        k_p: -r_lo,
    };

    let back = sf.invariants();
    let scale = ab.max(1.0);
    let diffs = [
        (back.det_a - inv.det_a).abs(),
        (back.det_b - inv.det_b).abs(),
        (back.det_c - inv.det_c).abs(),
        (back.det_gamma - inv.det_gamma).abs() / scale,
    ];
    let worst = diffs.iter().fold(0.0_f64, |m, v| m.max(*v));
    if worst > 1e-8 * scale {
        return Err(Error::NumericalInstability(format!(
            "standard form does not reproduce the invariants (deviation {worst:.3e})"
        )));
    }
    Ok(sf)
}

/// `theta gamma theta` with the momentum of every listed mode reflected.
pub fn partial_transpose_modes(gamma: &DMatrix<f64>, modes: &[usize]) -> Result<DMatrix<f64>> {
    let n = gamma.nrows() / 2;
    let mut out = gamma.clone();
    for &m in modes {
        if m >= n {
            return Err(Error::DimensionError(format!(
                "mode index {m} invalid for a {n}-mode state"
            )));
        }
        let k = 2 * m + 1;
        for j in 0..gamma.ncols() {
            out[(k, j)] = -out[(k, j)];
        }
        for i in 0..gamma.nrows() {
            out[(i, k)] = -out[(i, k)];
        }
    }
    Ok(out)
}

/// Partial transpose of a two-mode covariance with respect to one party.
pub fn partial_transpose(gamma: &DMatrix<f64>, party: Party) -> Result<DMatrix<f64>> {
    require_two_mode(gamma)?;
    let mode = match party {
        Party::A => 0,
        Party::B => 1,
    };
    partial_transpose_modes(gamma, &[mode])
}

/// Symplectic spectrum of the state partially transposed on mode 0.
pub fn transposed_spectrum(gamma: &DMatrix<f64>) -> Result<Vec<f64>> {
    linalg::check_covariance_shape(gamma, linalg::SYMPLECTIC_TOL)?;
    let pt = partial_transpose_modes(gamma, &[0])?;
    Ok(linalg::symplectic_eigenvalues(&pt))
}

pub fn is_nppt(gamma: &DMatrix<f64>) -> Result<bool> {
    let mu = transposed_spectrum(gamma)?;
    Ok(mu.iter().any(|&m| m < 1.0 - NPPT_TOL))
}

/// `-sum log2 min(mu_i, 1)` over the partially transposed spectrum.
pub fn log_negativity(gamma: &DMatrix<f64>) -> Result<f64> {
    let mu = transposed_spectrum(gamma)?;
    Ok(mu.iter().map(|&m| -m.min(1.0).log2()).sum())
}

/// Entropy of a Gaussian state with the given symplectic spectrum, in bits.
pub fn von_neumann_entropy(spectrum: &[f64]) -> f64 {
    fn h(x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            x * x.log2()
        }
    }
    spectrum
        .iter()
        .map(|&m| h((m + 1.0) / 2.0) - h((m - 1.0).max(0.0) / 2.0))
        .sum()
}

/// Entropy of the reduced state of mode 0 for a pure global state.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn entropy_of_entanglement(gamma: &DMatrix<f64>) -> Result<f64> {
    linalg::check_covariance_shape(gamma, linalg::SYMPLECTIC_TOL)?;
    if gamma.nrows() < 4 {
        return Err(Error::DimensionError("need at least two modes".into()));
    }
    let purity = 1.0 / gamma.determinant().sqrt();
    if !((purity - 1.0).abs() <= PURITY_TOL) {
        return Err(Error::PurityError { purity });
    }
    let reduced = gamma.view((0, 0), (2, 2)).into_owned();
    Ok(von_neumann_entropy(&linalg::symplectic_eigenvalues(&reduced)))
}

/// `M = -(J gamma)^2 - I`, positive semidefinite for physical `gamma`.
pub fn purification_generator(gamma: &DMatrix<f64>) -> DMatrix<f64> {
    let n = gamma.nrows();
    let jg = linalg::symplectic_form(n / 2) * gamma;
    -(&jg * &jg) - DMatrix::identity(n, n)
}

/// Principal square root of [`purification_generator`].
///
/// `M` is similar to the symmetric matrix `g^{1/2} J^T g J g^{1/2} - I`
/// via `g^{1/2}`, so its root is taken there and mapped back.
pub fn purification_root(gamma: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    linalg::check_covariance_shape(gamma, linalg::SYMPLECTIC_TOL)?;
    let n = gamma.nrows();
    let j = linalg::symplectic_form(n / 2);
    let half = linalg::spd_sqrt(gamma)?;
    let inv_half = linalg::spd_inv_sqrt(gamma)?;
    let ms = &half * j.transpose() * gamma * &j * &half - DMatrix::identity(n, n);
    let root = linalg::psd_sqrt(&ms, RADICAND_TOL)?;
    Ok(inv_half * root * half)
}

/// Pure `2N`-mode covariance `[[gamma, C], [C^T, theta gamma theta]]` whose
/// first `N` modes reduce to `gamma`, with `C = J sqrt(M) theta`.
pub fn purify(gamma: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let report = crate::gaussian::validate_state(gamma, PHYSICAL_TOL)?;
    if !report.is_physical {
        return Err(Error::UnphysicalInput(format!(
            "gamma + iJ has eigenvalue {:.3e} < 0",
            report.min_eigenvalue
        )));
    }
    let n = gamma.nrows();
    let theta = linalg::momentum_reflection(n / 2);
    let c = linalg::symplectic_form(n / 2) * purification_root(gamma)? * &theta;
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(gamma);
    out.view_mut((0, n), (n, n)).copy_from(&c);
    out.view_mut((n, 0), (n, n)).copy_from(&c.transpose());
    out.view_mut((n, n), (n, n))
        .copy_from(&(&theta * gamma * &theta));
    Ok(out)
}
