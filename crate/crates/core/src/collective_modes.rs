//! Approximate joint diagonalization of the N-emitter chain.
//!
//! The coherent part (nearest-neighbour ω_col) is diagonalized exactly by the
//! sine transform M_nl; the dissipator is transformed with the same M and
//! only its diagonal is kept.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dynamics::density::{DensityMatrix, Layout};
use crate::export::{num, CsvTable};
use crate::optical_coupling::CouplingMatrices;
use crate::{Error, Result, C64};

/// M_nl = √(2/(N+1)) sin(π n l/(N+1)), rows n and columns l both 1-based.
pub fn transform_coefficients(n: usize) -> DMatrix<f64> {
    let scale = (2.0 / (n as f64 + 1.0)).sqrt();
    DMatrix::from_fn(n, n, |i, j| scale * (PI * ((i + 1) * (j + 1)) as f64 / (n as f64 + 1.0)).sin())
}

/// One Lorentzian emission channel. Frequencies are offsets from ω₀'.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollectiveMode {
    pub index: usize,
    pub omega_l: f64,
    pub omega_polaron_l: f64,
    pub gamma_l: f64,
    pub upsilon_l: f64,
    /// Γ_l = γ_l/2 + γ_pd
    pub big_gamma_l: f64,
    /// Ϝ_l = Υ_l/2 + γ_pd
    pub digamma_l: f64,
    pub rho_ll: f64,
}

/// Modes of a chain plus the full transformed matrices they were read from.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    pub modes: Vec<CollectiveMode>,
    /// Mᵀ γ M including the discarded off-diagonal part.
    pub gamma_modes: DMatrix<f64>,
    pub upsilon_modes: DMatrix<f64>,
    /// Single-excitation block of ρ(0) in the mode basis.
    pub coherences: DMatrix<C64>,
    pub gamma_pd: f64,
    pub c_inf: f64,
}

pub fn mode_spectrum(
    matrices: &CouplingMatrices,
    gamma_pd: f64,
    rho0: &DensityMatrix,
    layout: Layout,
) -> Result<ModeSet> {
    let n = matrices.n();
    if layout.n_emitters() != n {
        return Err(Error::InvalidState(format!("state describes {} emitters, chain has {}", layout.n_emitters(), n)));
    }
    if !(gamma_pd >= 0.0) {
        return Err(Error::Domain(format!("gamma_pd must be >= 0, got {gamma_pd}")));
    }
    let m = transform_coefficients(n);
    let gamma_modes = m.transpose() * &matrices.gamma_mat * &m;
    let upsilon_modes = m.transpose() * &matrices.upsilon_mat * &m;
    let mc = m.map(|x| C64::new(x, 0.0));
    let coherences = mc.transpose() * rho0.sem_block(layout)? * &mc;

    let floor = -1e-12 * matrices.gamma_mat[(0, 0)];
    let mut modes = Vec::with_capacity(n);
    for l in 0..n {
        let (g, u) = (gamma_modes[(l, l)], upsilon_modes[(l, l)]);
        if g < floor || u < floor {
            return Err(Error::Unphysical(format!(
                "mode {} has negative decay rate (gamma_l = {g:e}, upsilon_l = {u:e})",
                l + 1
            )));
        }
        let (g, u) = (g.max(0.0), u.max(0.0));
        let c = (PI * (l + 1) as f64 / (n as f64 + 1.0)).cos();
        modes.push(CollectiveMode {
            index: l + 1,
            omega_l: 2.0 * matrices.omega_col * c,
            omega_polaron_l: 2.0 * matrices.omega_col_polaron * c,
            gamma_l: g,
            upsilon_l: u,
            big_gamma_l: 0.5 * g + gamma_pd,
            digamma_l: 0.5 * u + gamma_pd,
            rho_ll: coherences[(l, l)].re,
        });
    }
    Ok(ModeSet { modes, gamma_modes, upsilon_modes, coherences, gamma_pd, c_inf: matrices.c_inf })
}

impl ModeSet {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["l", "omega_l", "gamma_l", "upsilon_l", "Gamma_l", "digamma_l", "rho_ll"]);
        for m in &self.modes {
            t.push(vec![
                m.index.to_string(),
                num(m.omega_l),
                num(m.gamma_l),
                num(m.upsilon_l),
                num(m.big_gamma_l),
                num(m.digamma_l),
                num(m.rho_ll),
            ]);
        }
        t
    }
}
