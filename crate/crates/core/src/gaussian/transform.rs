//! Affine symplectic maps and the named generator registry.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use super::GaussianState;
use crate::error::{Error, Result};
use crate::linalg::{self, SYMPLECTIC_TOL};

/// A phase-space map `z -> S z + s` with `S^T J S = J`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    s: DMatrix<f64>,
    shift: DVector<f64>,
}

impl SymplecticTransform {
    /// Checks that `s` is symplectic to within `SYMPLECTIC_TOL`.
    pub fn new(s: DMatrix<f64>, shift: DVector<f64>) -> Result<Self> {
        let (r, c) = s.shape();
        if r != c || r % 2 != 0 || r == 0 {
            return Err(Error::MalformedMatrix(format!(
                "{r}x{c} cannot be a symplectic matrix"
            )));
        }
        if shift.len() != r {
            return Err(Error::DimensionError(format!(
                "translation of length {} for a {r}x{r} map",
                shift.len()
            )));
        }
        let t = Self { s, shift };
        let err = t.symplectic_defect();
        if err > SYMPLECTIC_TOL * linalg::max_abs(&t.s).max(1.0).powi(2) {
            return Err(Error::MalformedMatrix(format!(
                "matrix is not symplectic (max |S^T J S - J| = {err:.3e})"
            )));
        }
        Ok(t)
    }

    pub fn linear(s: DMatrix<f64>) -> Result<Self> {
        let n = s.nrows();
        Self::new(s, DVector::zeros(n))
    }

    pub fn identity(n_modes: usize) -> Self {
        Self {
            s: DMatrix::identity(2 * n_modes, 2 * n_modes),
            shift: DVector::zeros(2 * n_modes),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.s.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn translation(&self) -> &DVector<f64> {
        &self.shift
    }

    /// `max |S^T J S - J|`.
    pub fn symplectic_defect(&self) -> f64 {
        let j = linalg::symplectic_form(self.n_modes());
        linalg::max_abs(&(self.s.transpose() * &j * &self.s - j))
    }

    pub fn apply(&self, state: &GaussianState) -> Result<GaussianState> {
        if state.n_modes() != self.n_modes() {
            return Err(Error::DimensionError(format!(
                "{}-mode transform applied to a {}-mode state",
                self.n_modes(),
                state.n_modes()
            )));
        }
        let gamma = &self.s * state.covariance() * self.s.transpose();
        let d = &self.s * state.displacement() + &self.shift;
        GaussianState::new(d, gamma)
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &SymplecticTransform) -> Result<SymplecticTransform> {
        if self.n_modes() != next.n_modes() {
            return Err(Error::DimensionError("composing maps of different size".into()));
        }
        Ok(SymplecticTransform {
            s: &next.s * &self.s,
            shift: &next.s * &self.shift + &next.shift,
        })
    }

    /// Local map `self ⊕ other` acting on disjoint mode groups.
    pub fn direct_sum(&self, other: &SymplecticTransform) -> SymplecticTransform {
        SymplecticTransform {
            s: linalg::direct_sum(&self.s, &other.s),
            shift: DVector::from_iterator(
                self.shift.len() + other.shift.len(),
                self.shift.iter().chain(other.shift.iter()).copied(),
            ),
        }
    }

    /// Places this map on modes `first_mode..first_mode + self.n_modes()` of an
    /// `n_modes` system, identity elsewhere.
    pub fn embed(&self, n_modes: usize, first_mode: usize) -> Result<SymplecticTransform> {
        let k = self.n_modes();
        if first_mode + k > n_modes {
            return Err(Error::DimensionError(format!(
                "cannot place a {k}-mode map at mode {first_mode} of {n_modes}"
            )));
        }
        let before = SymplecticTransform::identity(first_mode);
        let after = SymplecticTransform::identity(n_modes - first_mode - k);
        let mut out = self.clone();
        if first_mode > 0 {
            out = before.direct_sum(&out);
        }
        if n_modes - first_mode - k > 0 {
            out = out.direct_sum(&after);
        }
        Ok(out)
    }
}

/// A named family of symplectic maps, built from real parameters.
pub trait TransformGenerator: Send + Sync {
    fn name(&self) -> &'static str;
    fn param_names(&self) -> &'static [&'static str];
    fn build(&self, params: &[f64]) -> Result<SymplecticTransform>;
}

fn check_params(g: &dyn TransformGenerator, params: &[f64]) -> Result<()> {
    let want = g.param_names().len();
    if params.len() != want {
        return Err(Error::TransformParameters {
            kind: g.name().into(),
            reason: format!("expected {want} parameter(s), got {}", params.len()),
        });
    }
    if params.iter().any(|p| !p.is_finite()) {
        return Err(Error::TransformParameters {
            kind: g.name().into(),
            reason: "parameters must be finite".into(),
        });
    }
    Ok(())
}

/// Rotation `[[cos t, -sin t], [sin t, cos t]]`.
pub struct PhaseShift;
/// `diag(e^{-r}, e^{r})`.
pub struct SingleModeSqueezer;
/// Two-mode mixer with transmissivity `cos^2(t/2)`.
pub struct BeamSplitter;
pub struct TwoModeSqueezer;
/// Pure translation by `(q0, p0)`.
pub struct Translation;

impl TransformGenerator for PhaseShift {
    fn name(&self) -> &'static str {
        "phase_shift"
    }
    fn param_names(&self) -> &'static [&'static str] {
        &["theta"]
    }
    fn build(&self, params: &[f64]) -> Result<SymplecticTransform> {
        check_params(self, params)?;
        let (s, c) = params[0].sin_cos();
        SymplecticTransform::linear(DMatrix::from_row_slice(2, 2, &[c, -s, s, c]))
    }
}

impl TransformGenerator for SingleModeSqueezer {
    fn name(&self) -> &'static str {
        "squeezer"
    }
    fn param_names(&self) -> &'static [&'static str] {
        &["r"]
    }
    fn build(&self, params: &[f64]) -> Result<SymplecticTransform> {
        check_params(self, params)?;
        let r = params[0];
        SymplecticTransform::linear(DMatrix::from_row_slice(
            2,
            2,
            &[(-r).exp(), 0.0, 0.0, r.exp()],
        ))
    }
}

impl TransformGenerator for BeamSplitter {
    fn name(&self) -> &'static str {
        "beam_splitter"
    }
    fn param_names(&self) -> &'static [&'static str] {
        &["theta"]
    }
    fn build(&self, params: &[f64]) -> Result<SymplecticTransform> {
        check_params(self, params)?;
        let (s, c) = (params[0] / 2.0).sin_cos();
        #[rustfmt::skip]
        let m = DMatrix::from_row_slice(4, 4, &[
            c, 0.0, s, 0.0,
            0.0, c, 0.0, s,
            -s, 0.0, c, 0.0,
            0.0, -s, 0.0, c,
        ]);
        SymplecticTransform::linear(m)
    }
}

impl TransformGenerator for TwoModeSqueezer {
    fn name(&self) -> &'static str {
        "two_mode_squeezer"
    }
    fn param_names(&self) -> &'static [&'static str] {
        &["r"]
    }
    fn build(&self, params: &[f64]) -> Result<SymplecticTransform> {
        check_params(self, params)?;
        let (c, s) = (params[0].cosh(), params[0].sinh());
        #[rustfmt::skip]
        let m = DMatrix::from_row_slice(4, 4, &[
            c, 0.0, s, 0.0,
            0.0, c, 0.0, -s,
            s, 0.0, c, 0.0,
            0.0, -s, 0.0, c,
        ]);
        SymplecticTransform::linear(m)
    }
}

impl TransformGenerator for Translation {
    fn name(&self) -> &'static str {
        "translation"
    }
    fn param_names(&self) -> &'static [&'static str] {
        &["q0", "p0"]
    }
    fn build(&self, params: &[f64]) -> Result<SymplecticTransform> {
        check_params(self, params)?;
        SymplecticTransform::new(
            DMatrix::identity(2, 2),
            DVector::from_vec(vec![params[0], params[1]]),
        )
    }
}

/// Name-indexed set of [`TransformGenerator`]s.
pub struct TransformRegistry {
    generators: BTreeMap<&'static str, Box<dyn TransformGenerator>>,
}

impl TransformRegistry {
    pub fn empty() -> Self {
        Self {
            generators: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(PhaseShift));
        r.register(Box::new(SingleModeSqueezer));
        r.register(Box::new(BeamSplitter));
        r.register(Box::new(TwoModeSqueezer));
        r.register(Box::new(Translation));
        r
    }

    /// Adds a generator, replacing any previous one with the same name.
    pub fn register(&mut self, g: Box<dyn TransformGenerator>) {
        self.generators.insert(g.name(), g);
    }

    pub fn get(&self, kind: &str) -> Option<&dyn TransformGenerator> {
        self.generators.get(kind).map(|b| b.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.generators.keys().copied()
    }

    pub fn make(&self, kind: &str, params: &[f64]) -> Result<SymplecticTransform> {
        self.get(kind)
            .ok_or_else(|| Error::UnsupportedTransform(kind.into()))?
            .build(params)
    }

    pub fn global() -> &'static TransformRegistry {
        static REGISTRY: OnceLock<TransformRegistry> = OnceLock::new();
        REGISTRY.get_or_init(TransformRegistry::with_builtins)
    }
}

/// Builds a transform from the built-in registry.
pub fn make_transform(kind: &str, params: &[f64]) -> Result<SymplecticTransform> {
    TransformRegistry::global().make(kind, params)
}
