//! Dipole-dipole couplings of an H-aggregate chain (parallel dipoles,
//! orthogonal to the chain axis) in a bulk dielectric.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::units::{wavelength_to_omega, SPEED_OF_LIGHT_NM_PER_PS};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmitterChain {
    pub n_emitters: usize,
    /// Centre-to-centre spacing in nm.
    pub spacing: f64,
    /// Vacuum wavelength in nm.
    pub wavelength: f64,
    pub refractive_index: f64,
    /// Single-emitter decay rate in ps⁻¹.
    pub gamma: f64,
    /// Zero-separation override: every γ_nm = γ and the dipole shift is dropped.
    #[serde(default)]
    pub dicke_limit: bool,
}

impl EmitterChain {
    /// Bulk GaAs, λ = 940 nm, n = 3.5, γ = 850 MHz.
    pub fn gaas(n_emitters: usize, spacing: f64) -> Self {
        EmitterChain {
            n_emitters,
            spacing,
            wavelength: 940.0,
            refractive_index: 3.5,
            gamma: 8.5e-4,
            dicke_limit: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_emitters == 0 {
            return Err(Error::Domain("chain needs at least one emitter".into()));
        }
        if self.n_emitters > 1 && !self.dicke_limit && !(self.spacing > 0.0) {
            return Err(Error::Domain(format!("spacing must be > 0, got {}", self.spacing)));
        }
        if !(self.gamma > 0.0) {
            return Err(Error::Domain(format!("gamma must be > 0, got {}", self.gamma)));
        }
        if !(self.refractive_index >= 1.0) {
            return Err(Error::Domain(format!("refractive index must be >= 1, got {}", self.refractive_index)));
        }
        if !(self.wavelength > 0.0) {
            return Err(Error::Domain("wavelength must be > 0".into()));
        }
        Ok(())
    }

    /// Warn when emitters sit closer than the phonon correlation length
    /// L_P = c_s τ_P, below which independent phonon baths are not justified.
    pub fn check_phonon_correlation_length(&self, sound_speed: f64, polaron_time: f64) -> bool {
        let l_p = sound_speed * polaron_time;
        let ok = self.n_emitters < 2 || self.dicke_limit || self.spacing > l_p;
        if !ok {
            log::warn!(
                "spacing {:.3} nm is below the phonon correlation length {:.3} nm; \
                 independent-bath assumption is questionable",
                self.spacing,
                l_p
            );
        }
        ok
    }
}

/// Dimensionless separation ϑ = n (ω₀'/c) r, with ω₀' = ω₀ − polaron shift.
pub fn theta(separation: f64, chain: &EmitterChain, polaron_shift: f64) -> Result<f64> {
    if !(separation > 0.0) {
        return Err(Error::Domain(format!("separation must be > 0, got {separation}")));
    }
    let omega = wavelength_to_omega(chain.wavelength) - polaron_shift;
    Ok(chain.refractive_index * omega / SPEED_OF_LIGHT_NM_PER_PS * separation)
}

/// γ_col/γ = (3/2)(sin ϑ/ϑ + cos ϑ/ϑ² − sin ϑ/ϑ³), equal to 1 at ϑ = 0.
pub fn collective_decay(theta: f64) -> f64 {
    let t = theta.abs();
    if t < 1e-3 {
        // 1 − (2/5)ϑ² + (3/70)ϑ⁴ for the cancelling terms near zero
        let t2 = t * t;
        return 1.0 - 0.4 * t2 + 3.0 / 70.0 * t2 * t2;
    }
    let (s, c) = t.sin_cos();
    1.5 * (s / t + c / (t * t) - s / (t * t * t))
}

/// ω_col/γ = (3/4)(−cos ϑ/ϑ + sin ϑ/ϑ² + cos ϑ/ϑ³). Diverges as ϑ → 0.
pub fn collective_lamb_shift(theta: f64) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::Domain(format!("Lamb shift needs theta > 0, got {theta}")));
    }
    let (s, c) = theta.sin_cos();
    let t2 = theta * theta;
    Ok(0.75 * (-c / theta + s / t2 + c / (t2 * theta)))
}

/// Bare and phonon-renormalized couplings of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrices {
    /// γ_nm in ps⁻¹, all pairs.
    pub gamma_mat: DMatrix<f64>,
    /// Nearest-neighbour dipole-dipole shift ω_col in rad/ps.
    pub omega_col: f64,
    /// Υ_nm: γ on the diagonal, C∞ γ_nm off it.
    pub upsilon_mat: DMatrix<f64>,
    /// Ω_col = C∞ ω_col.
    pub omega_col_polaron: f64,
    pub c_inf: f64,
}

impl CouplingMatrices {
    pub fn n(&self) -> usize {
        self.gamma_mat.nrows()
    }

    /// Nearest-neighbour inter-emitter rate γ_col (0 for a single emitter).
    pub fn gamma_col(&self) -> f64 {
        if self.n() > 1 {
            self.gamma_mat[(0, 1)]
        } else {
            0.0
        }
    }

    pub fn upsilon_col(&self) -> f64 {
        if self.n() > 1 {
            self.upsilon_mat[(0, 1)]
        } else {
            0.0
        }
    }
}

pub fn build_matrices(chain: &EmitterChain, c_inf: f64, polaron_shift: f64) -> Result<CouplingMatrices> {
    chain.validate()?;
    if !(c_inf > 0.0 && c_inf <= 1.0) {
        return Err(Error::Domain(format!("c_inf must lie in (0, 1], got {c_inf}")));
    }
    let n = chain.n_emitters;
    let g = chain.gamma;
    let mut gamma_mat = DMatrix::from_element(n, n, g);
    let mut omega_col = 0.0;
    if !chain.dicke_limit && n > 1 {
        // Only |n − m| matters on a uniform chain.
        let ratios: Vec<f64> = (1..n)
            .map(|d| theta(d as f64 * chain.spacing, chain, polaron_shift).map(collective_decay))
            .collect::<Result<_>>()?;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    gamma_mat[(i, j)] = g * ratios[i.abs_diff(j) - 1];
                }
            }
        }
        omega_col = g * collective_lamb_shift(theta(chain.spacing, chain, polaron_shift)?)?;
    }
    let mut upsilon_mat = gamma_mat.scale(c_inf);
    upsilon_mat.fill_diagonal(g);
    Ok(CouplingMatrices { gamma_mat, omega_col, upsilon_mat, omega_col_polaron: c_inf * omega_col, c_inf })
}
