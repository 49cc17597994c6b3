//! Helpers shared by the integration tests and the acceptance harness.
#![allow(dead_code)]

use gaussqkd_core::efficiency::quadrature::composite_nodes;
use gaussqkd_core::gaussian::{make_transform, GaussianState};
use gaussqkd_core::qkd::SymmetricStdState;
use nalgebra::DVector;
use rand::Rng;
use rayon::prelude::*;

/// Tensor-product Gauss-Legendre rule over a box, `n` nodes per axis.
pub fn cube(bounds: &[(f64, f64)], n: usize, f: impl Fn(&[f64]) -> f64 + Sync) -> f64 {
    let axes: Vec<Vec<(f64, f64)>> = bounds.iter().map(|&(a, b)| composite_nodes(a, b, n)).collect();
    let dim = axes.len();
    axes[0]
        .par_iter()
        .map(|&(x0, w0)| {
            let mut point = vec![0.0; dim];
            point[0] = x0;
            let mut idx = vec![0usize; dim];
            let mut acc = 0.0;
            if dim == 1 {
                return w0 * f(&point);
            }
            loop {
                let mut w = w0;
                for k in 1..dim {
                    let (x, wk) = axes[k][idx[k]];
                    point[k] = x;
                    w *= wk;
                }
                acc += w * f(&point);
                let mut k = dim - 1;
                loop {
                    idx[k] += 1;
                    if idx[k] < axes[k].len() {
                        break;
                    }
                    idx[k] = 0;
                    k -= 1;
                    if k == 0 {
                        return acc;
                    }
                }
            }
        })
        .sum()
}

/// Box of `k` standard deviations around the displacement, per axis.
pub fn wigner_box(s: &GaussianState, k: f64) -> Vec<(f64, f64)> {
    let g = s.covariance();
    (0..g.nrows())
        .map(|i| {
            let half = k * (0.5 * g[(i, i)]).sqrt();
            let d = s.displacement()[i];
            (d - half, d + half)
        })
        .collect()
}

/// Smallest box containing both.
pub fn union(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    a.iter().zip(b).map(|(x, y)| (x.0.min(y.0), x.1.max(y.1))).collect()
}

/// Thermal states of random occupation, displaced, then scrambled by
/// random squeezers, phase shifts and (for two modes) a beam splitter.
pub fn random_state<R: Rng>(rng: &mut R, n_modes: usize) -> GaussianState {
    let mut s = GaussianState::thermal(rng.random_range(0.0..1.5));
    for _ in 1..n_modes {
        s = s.tensor(&GaussianState::thermal(rng.random_range(0.0..1.5)));
    }
    let dim = 2 * n_modes;
    for m in 0..n_modes {
        let sq = make_transform("squeezer", &[rng.random_range(-0.6..0.6)]).unwrap();
        let ph = make_transform("phase_shift", &[rng.random_range(0.0..6.3)]).unwrap();
        let t = sq.then(&ph).unwrap().embed(n_modes, m).unwrap();
        s = s.apply(&t).unwrap();
    }
    if n_modes == 2 {
        let bs = make_transform("beam_splitter", &[rng.random_range(0.0..3.2)]).unwrap();
        s = s.apply(&bs).unwrap();
    }
    let d = DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0));
    GaussianState::new(d, s.covariance().clone()).unwrap()
}

/// Random physical symmetric standard-form state, by rejection.
pub fn random_symmetric<R: Rng>(rng: &mut R) -> SymmetricStdState {
    loop {
        let lambda = rng.random_range(1.0..4.0);
        let c_x = rng.random_range(0.0..lambda);
        let c_p = rng.random_range(-c_x..=c_x);
        if let Ok(s) = SymmetricStdState::new(lambda, c_x, c_p) {
            return s;
        }
    }
}

/// Random NPPT symmetric state, by rejection.
pub fn random_nppt<R: Rng>(rng: &mut R) -> SymmetricStdState {
    loop {
        let s = random_symmetric(rng);
        if s.is_nppt() && s.nppt_product() < 1.0 - 1e-6 {
            return s;
        }
    }
}

/// Real part of `(2 pi)^{-2N} ∫ chi(eta) exp(-i eta^T J zeta) d eta`.
pub fn wigner_from_characteristic(s: &GaussianState, zeta: &[f64], k: f64, n: usize) -> f64 {
    let n_modes = s.n_modes();
    let g = s.covariance();
    // chi decays like exp(-gamma_min |eta|^2 / 4); gamma_min >= 1 / gamma_max
    let gmax = g.symmetric_eigenvalues().max();
    let half = k * (2.0 * gmax).sqrt();
    let bounds = vec![(-half, half); 2 * n_modes];
    let val = cube(&bounds, n, |eta| {
        let chi = s.characteristic(eta).unwrap();
        // eta^T J zeta, J blocks [[0,1],[-1,0]]
        let mut phase = 0.0;
        for m in 0..n_modes {
            phase += eta[2 * m] * zeta[2 * m + 1] - eta[2 * m + 1] * zeta[2 * m];
        }
        (chi * nalgebra::Complex::from_polar(1.0, -phase)).re
    });
    val / (2.0 * std::f64::consts::PI).powi(2 * n_modes as i32)
}
