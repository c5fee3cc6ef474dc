use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Index layout of a density matrix.
///
/// `Sem(n)` is the ground state at index 0 followed by the single-excitation
/// states `|e_1⟩ … |e_n⟩`. `TwoQubit` is the product basis
/// `|gg⟩, |ge⟩, |eg⟩, |ee⟩` in that order (emitter 1 is the left factor).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Layout {
    Sem(usize),
    TwoQubit,
}

impl Layout {
    pub fn dim(&self) -> usize {
        match *self {
            Layout::Sem(n) => n + 1,
            Layout::TwoQubit => 4,
        }
    }

    /// Matrix index of `|e_n⟩` (n is 1-based).
    pub fn excited(&self, n: usize) -> usize {
        match *self {
            Layout::Sem(_) => n,
            Layout::TwoQubit => match n {
                1 => 2,
                2 => 1,
                _ => panic!("two-qubit layout has emitters 1 and 2 only"),
            },
        }
    }

    pub fn n_emitters(&self) -> usize {
        match *self {
            Layout::Sem(n) => n,
            Layout::TwoQubit => 2,
        }
    }

    /// Indices outside `{ground} ∪ single-excitation manifold`.
    fn forbidden(&self) -> &'static [usize] {
        match self {
            Layout::Sem(_) => &[],
            Layout::TwoQubit => &[3],
        }
    }
}

/// Complex Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(mat: DMatrix<C64>) -> Result<Self> {
        let rho = DensityMatrix::new_unchecked(mat)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Square shape is still enforced; physical checks are skipped.
    pub(crate) fn new_unchecked(mat: DMatrix<C64>) -> Result<Self> {
        if !mat.is_square() || mat.nrows() == 0 {
            return Err(Error::InvalidState(format!(
                "density matrix must be square and non-empty, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(DensityMatrix { mat })
    }

    pub fn from_pure(amplitudes: &[C64]) -> Result<Self> {
        let v = DVector::from_column_slice(amplitudes);
        let norm = v.norm();
        if !(norm > 0.0) {
            return Err(Error::InvalidState("state vector has zero norm".into()));
        }
        let v = v / C64::new(norm, 0.0);
        DensityMatrix::new(&v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.mat - self.mat.adjoint()).camax()
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (max deviation {herm:e})")));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min = self.min_eigenvalue();
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.mat + self.mat.adjoint()) * C64::new(0.5, 0.0);
        h.symmetric_eigenvalues().min()
    }

    /// Rejects weight on states outside ground plus single excitations.
    pub fn check_support(&self, layout: Layout) -> Result<()> {
        if self.dim() != layout.dim() {
            return Err(Error::InvalidState(format!("dimension {} does not match layout {:?}", self.dim(), layout)));
        }
        for &k in layout.forbidden() {
            let leak = self.mat.row(k).camax().max(self.mat.column(k).camax());
            if leak > HERMITIAN_TOL {
                return Err(Error::InvalidState(format!(
                    "state has weight {leak:e} outside the single-excitation manifold"
                )));
            }
        }
        Ok(())
    }

    /// Single-excitation block `ρ_nm`, n, m = 1..N, in site order.
    pub fn sem_block(&self, layout: Layout) -> Result<DMatrix<C64>> {
        self.check_support(layout)?;
        let n = layout.n_emitters();
        Ok(DMatrix::from_fn(n, n, |i, j| self.mat[(layout.excited(i + 1), layout.excited(j + 1))]))
    }

    /// Re-express a state between layouts; both must describe the same emitters.
    pub fn relayout(&self, from: Layout, to: Layout) -> Result<Self> {
        self.check_support(from)?;
        if from.n_emitters() != to.n_emitters() {
            return Err(Error::InvalidState("layouts describe different emitter counts".into()));
        }
        let n = from.n_emitters();
        let map_idx = |k: usize| -> usize {
            if k == 0 {
                0
            } else {
                (1..=n).find(|&e| from.excited(e) == k).map(|e| to.excited(e)).unwrap_or(k)
            }
        };
        let mut out = DMatrix::zeros(to.dim(), to.dim());
        let kept: Vec<usize> = (0..from.dim()).filter(|k| !from.forbidden().contains(k)).collect();
        for &i in &kept {
            for &j in &kept {
                out[(map_idx(i), map_idx(j))] = self.mat[(i, j)];
            }
        }
        DensityMatrix::new_unchecked(out)
    }
}

/// Named initial states of the emitter chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// Only emitter 1 excited.
    FirstExcited,
    /// Equal-phase superposition of all single excitations.
    Symmetric,
    /// Alternating-phase superposition of all single excitations.
    Antisymmetric,
    /// Explicit real amplitudes on `|e_1⟩ … |e_N⟩`, normalized on use.
    Amplitudes(Vec<f64>),
}

impl InitialState {
    pub fn amplitudes(&self, n: usize) -> Result<Vec<f64>> {
        let v: Vec<f64> = match self {
            InitialState::FirstExcited => (0..n).map(|k| if k == 0 { 1.0 } else { 0.0 }).collect(),
            InitialState::Symmetric => vec![1.0; n],
            InitialState::Antisymmetric => (0..n).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect(),
            InitialState::Amplitudes(a) => {
                if a.len() != n {
                    return Err(Error::InvalidState(format!("{} amplitudes given for {} emitters", a.len(), n)));
                }
                a.clone()
            }
        };
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState("initial amplitudes have zero norm".into()));
        }
        Ok(v.into_iter().map(|x| x / norm).collect())
    }

    pub fn density(&self, layout: Layout) -> Result<DensityMatrix> {
        let amps = self.amplitudes(layout.n_emitters())?;
        let mut psi = vec![C64::new(0.0, 0.0); layout.dim()];
        for (k, a) in amps.iter().enumerate() {
            psi[layout.excited(k + 1)] = C64::new(*a, 0.0);
        }
        DensityMatrix::from_pure(&psi)
    }
}
