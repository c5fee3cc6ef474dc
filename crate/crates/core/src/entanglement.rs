//! Two-qubit concurrence and its decay under the concatenated and the
//! purely markovian phonon treatments.
//!
//! States use the `TwoQubit` layout `|gg⟩, |ge⟩, |eg⟩, |ee⟩`; σ_y is the
//! standard Pauli matrix on each factor.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::density::{DensityMatrix, InitialState, Layout, HERMITIAN_TOL};
use crate::dynamics::lindblad::{lindblad_evolve, IntegratorOptions, LindbladSpec};
use crate::dynamics::nonmarkovian::{nonmarkovian_map, nonmarkovian_state};
use crate::dynamics::Method;
use crate::export::{num, CsvTable};
use crate::optical_coupling::CouplingMatrices;
use crate::phonon_bath::{cutoff_from_dot_size, PhononBathParams, PhononContext, DEFAULT_POLARON_EPSILON};
use crate::quadrature::QuadratureSpec;
use crate::{Error, Result, C64};

/// Seam tolerance |C(τ_P)/C∞ − 1| for trajectories; keeps the seam value
/// within 10⁻⁶ of C∞².
pub const SEAM_EPSILON: f64 = 1e-7;

fn sigma_y_sigma_y() -> DMatrix<C64> {
    let mut m = DMatrix::zeros(4, 4);
    m[(0, 3)] = C64::new(-1.0, 0.0);
    m[(1, 2)] = C64::new(1.0, 0.0);
    m[(2, 1)] = C64::new(1.0, 0.0);
    m[(3, 0)] = C64::new(-1.0, 0.0);
    m
}

/// Spin-flipped state (σ_y⊗σ_y) ρ* (σ_y⊗σ_y).
pub fn spin_flip(rho: &DMatrix<C64>) -> DMatrix<C64> {
    let yy = sigma_y_sigma_y();
    &yy * rho.conjugate() * &yy
}

/// Wootters concurrence max(0, √α₁ − √α₂ − √α₃ − √α₄), with α_i the
/// eigenvalues of ρ ρ̃ in descending order.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::InvalidState(format!("concurrence needs a 4x4 state, got {}", rho.dim())));
    }
    rho.validate()?;
    // ρρ̃ is similar to the Hermitian √ρ ρ̃ √ρ, which has real eigenvalues.
    let eig = rho.matrix().clone().symmetric_eigen();
    let sqrt_vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    let vecs = &eig.eigenvectors;
    let sqrt_rho = vecs * DMatrix::from_diagonal(&sqrt_vals.map(|v| C64::new(v, 0.0))) * vecs.adjoint();
    let r = &sqrt_rho * spin_flip(rho.matrix()) * &sqrt_rho;
    let r = (&r + r.adjoint()) * C64::new(0.5, 0.0);
    let mut alphas: Vec<f64> = r.symmetric_eigenvalues().iter().copied().collect();
    for a in &mut alphas {
        if *a < 0.0 {
            if *a < -HERMITIAN_TOL {
                return Err(Error::InvalidState(format!("Wootters eigenvalue {a:e} is negative")));
            }
            *a = 0.0;
        }
    }
    alphas.sort_by(|a, b| b.total_cmp(a));
    let s: Vec<f64> = alphas.iter().map(|a| a.sqrt()).collect();
    Ok((s[0] - s[1] - s[2] - s[3]).clamp(0.0, 1.0))
}

/// Which rates drive the markovian stage of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkovRates {
    /// γ± = γ ± γ_col and ω_col.
    #[default]
    Concatenation,
    /// Υ± = γ ± C∞γ_col and Ω_col.
    Polaron,
}

/// Diagonal two-emitter master equation in the product basis.
pub fn two_emitter_spec(mats: &CouplingMatrices, gamma_pd: f64, rates: MarkovRates) -> Result<LindbladSpec> {
    if mats.n() != 2 {
        return Err(Error::Domain(format!("two-emitter master equation needs N = 2, got {}", mats.n())));
    }
    let (g, col, omega) = match rates {
        MarkovRates::Concatenation => (mats.gamma_mat[(0, 0)], mats.gamma_col(), mats.omega_col),
        MarkovRates::Polaron => (mats.upsilon_mat[(0, 0)], mats.upsilon_col(), mats.omega_col_polaron),
    };
    LindbladSpec::two_emitter_diagonal(g + col, g - col, omega, gamma_pd)
}

/// Polaron formation time used as the trajectory seam.
///
/// Falls back to the default tolerance when the tight one is not reached
/// within the search horizon (slow power-law tail at T → 0).
pub fn seam_time(ctx: &PhononContext, epsilon: f64) -> Result<f64> {
    match ctx.polaron_time(epsilon) {
        Ok(t) => Ok(t),
        Err(Error::Horizon { .. }) if epsilon < DEFAULT_POLARON_EPSILON => {
            log::warn!(
                "phonon correlation does not settle to {epsilon:e} within the horizon; \
                 using tolerance {DEFAULT_POLARON_EPSILON:e} for the seam"
            );
            ctx.polaron_time(DEFAULT_POLARON_EPSILON)
        }
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceTrace {
    pub method: Method,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub tau_p: f64,
    /// Index of the last sample of the non-markovian segment (t = τ_P).
    pub seam_index: Option<usize>,
}

impl ConcurrenceTrace {
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["t_ps", "concurrence", "method"]);
        for (a, b) in self.times.iter().zip(&self.values) {
            t.push(vec![num(*a), num(*b), self.method.to_string()]);
        }
        t
    }

    /// Concurrence at the seam, if the trace has one.
    pub fn at_seam(&self) -> Option<f64> {
        self.seam_index.map(|k| self.values[k])
    }
}

/// Concurrence trajectory on `times` from `rho0` at t = 0.
///
/// `Concatenation`: the polaron-formation map up to `tau_p`, then the
/// master equation seeded with exactly the state at `tau_p`. `Markovian`:
/// the master equation from t = 0. `tau_p` is inserted into the sample
/// times when absent.
pub fn concurrence_trajectory(
    rho0: &DensityMatrix,
    method: Method,
    ctx: &PhononContext,
    spec: &LindbladSpec,
    times: &[f64],
    tau_p: f64,
    opts: &IntegratorOptions,
) -> Result<ConcurrenceTrace> {
    rho0.check_support(Layout::TwoQubit)?;
    if times.is_empty() || times[0] < 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("times must be non-negative and strictly increasing".into()));
    }
    let values_of = |states: &[DensityMatrix]| -> Result<Vec<f64>> { states.iter().map(concurrence).collect() };
    match method {
        Method::Markovian => {
            let mut grid = vec![0.0];
            grid.extend(times.iter().copied().filter(|&t| t > 0.0));
            let states = lindblad_evolve(rho0, spec, &grid, opts)?;
            let offset = grid.len() - times.len();
            Ok(ConcurrenceTrace {
                method,
                times: times.to_vec(),
                values: values_of(&states[offset..])?,
                tau_p,
                seam_index: None,
            })
        }
        Method::Concatenation => {
            if !(tau_p >= 0.0) {
                return Err(Error::Domain(format!("tau_p must be >= 0, got {tau_p}")));
            }
            let mut early: Vec<f64> = times.iter().copied().filter(|&t| t < tau_p).collect();
            early.push(tau_p);
            let late: Vec<f64> = times.iter().copied().filter(|&t| t > tau_p).collect();
            let pre: Vec<DensityMatrix> =
                early.par_iter().map(|&t| nonmarkovian_state(rho0, Layout::TwoQubit, t, ctx)).collect::<Result<_>>()?;
            let seam = pre[pre.len() - 1].clone();
            let mut grid = vec![tau_p];
            grid.extend(&late);
            let post = lindblad_evolve(&seam, spec, &grid, opts)?;
            let mut all_t = early;
            all_t.extend(&late);
            let mut values = values_of(&pre)?;
            values.extend(values_of(&post[1..])?);
            let seam_index = Some(pre.len() - 1);
            Ok(ConcurrenceTrace { method, times: all_t, values, tau_p, seam_index })
        }
        other => {
            Err(Error::Domain(format!("concurrence trajectories support concatenation and markovian, not {other}")))
        }
    }
}

/// Concurrence right after polaron formation for one (T, L) point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauPRow {
    pub temperature: f64,
    pub dot_size: f64,
    pub omega_c: f64,
    pub c_inf: f64,
    pub concurrence: f64,
}

/// Table over temperatures × dot sizes of the concurrence of |+⟩ after the
/// coherences have been scaled by C∞², with ω_c = c_s/L.
pub fn concurrence_at_tau_p(
    temperatures: &[f64],
    dot_sizes: &[f64],
    alpha: f64,
    sound_speed: f64,
    quad: &QuadratureSpec,
) -> Result<Vec<TauPRow>> {
    let plus = InitialState::Symmetric.density(Layout::TwoQubit)?;
    let points: Vec<(f64, f64)> = temperatures.iter().flat_map(|&t| dot_sizes.iter().map(move |&l| (t, l))).collect();
    points
        .par_iter()
        .map(|&(temperature, dot_size)| {
            let omega_c = cutoff_from_dot_size(dot_size, sound_speed)?;
            let params = PhononBathParams { alpha, omega_c, temperature };
            let ctx = PhononContext::new(params, *quad)?;
            let state = nonmarkovian_map(&plus, Layout::TwoQubit, C64::new(ctx.c_inf, 0.0))?;
            Ok(TauPRow { temperature, dot_size, omega_c, c_inf: ctx.c_inf, concurrence: concurrence(&state)? })
        })
        .collect()
}

pub fn tau_p_table_csv(rows: &[TauPRow]) -> CsvTable {
    let mut t = CsvTable::new(&["temperature_K", "dot_size_nm", "omega_c", "c_inf", "concurrence"]);
    for r in rows {
        t.push_nums(&[r.temperature, r.dot_size, r.omega_c, r.c_inf, r.concurrence]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn product_and_bell_states() {
        let eg = InitialState::FirstExcited.density(Layout::TwoQubit).unwrap();
        assert!(concurrence(&eg).unwrap().abs() < 1e-12);
        let plus = InitialState::Symmetric.density(Layout::TwoQubit).unwrap();
        assert!((concurrence(&plus).unwrap() - 1.0).abs() < 1e-12);
        let minus = InitialState::Antisymmetric.density(Layout::TwoQubit).unwrap();
        assert!((concurrence(&minus).unwrap() - 1.0).abs() < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let phi = DensityMatrix::from_pure(&[c(h), c(0.0), c(0.0), c(h)]).unwrap();
        assert!((concurrence(&phi).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_invalid_input() {
        let m = DMatrix::from_element(4, 4, c(0.25));
        let bad = DensityMatrix::new(m * c(2.0));
        assert!(bad.is_err());
        let three = InitialState::Symmetric.density(Layout::Sem(2)).unwrap();
        assert!(concurrence(&three).is_err());
    }

    #[test]
    fn seam_value_is_plateau_squared() {
        let ctx = PhononContext::new(PhononBathParams::gaas(25.0), QuadratureSpec::default()).unwrap();
        let tau_p = seam_time(&ctx, SEAM_EPSILON).unwrap();
        let plus = InitialState::Symmetric.density(Layout::TwoQubit).unwrap();
        let spec = LindbladSpec::two_emitter_diagonal(1.6e-3, 1e-4, 7e-4, 0.0).unwrap();
        let times = [0.0, 0.5, 1.0, 100.0];
        let tr = concurrence_trajectory(
            &plus,
            Method::Concatenation,
            &ctx,
            &spec,
            &times,
            tau_p,
            &IntegratorOptions::default(),
        )
        .unwrap();
        assert!((tr.at_seam().unwrap() - ctx.c_inf.powi(2)).abs() < 1e-6);
        assert_eq!(tr.times.len(), 5);
        assert!((tr.values[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tau_p_table_ordering() {
        let rows = concurrence_at_tau_p(&[25.0], &[3.0, 4.5, 6.0], 0.025, 6.705, &QuadratureSpec::default()).unwrap();
        assert!(rows[0].concurrence < rows[1].concurrence);
        assert!(rows[1].concurrence < rows[2].concurrence);
        assert!((rows[1].omega_c - 1.49).abs() < 1e-12);
        assert!((rows[1].concurrence - rows[1].c_inf.powi(2)).abs() < 1e-12);
    }
}
