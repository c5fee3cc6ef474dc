//! One resolved physical setup at a single temperature: the pieces every
//! front end needs, built once.

use crate::collective_modes::{mode_spectrum, ModeSet};
use crate::config::{GridConfig, SimulationConfig};
use crate::dynamics::lindblad::IntegratorOptions;
use crate::dynamics::{
    g1_collective, CorrelationTrace, DensityMatrix, G1Options, InitialState, Layout, Method, TimeGrid,
};
use crate::entanglement::{concurrence_trajectory, seam_time, two_emitter_spec, ConcurrenceTrace, MarkovRates};
use crate::optical_coupling::{build_matrices, CouplingMatrices, EmitterChain};
use crate::phonon_bath::{DephasingParams, PhononBathParams, PhononContext, DEFAULT_POLARON_EPSILON};
use crate::quadrature::QuadratureSpec;
use crate::spectra::{full_spectrum, FrequencyGrid, Spectrum};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct Scenario {
    pub ctx: PhononContext,
    pub gamma_pd: f64,
    pub chain: EmitterChain,
    pub matrices: CouplingMatrices,
    pub initial: InitialState,
    pub rho0: DensityMatrix,
    pub modes: ModeSet,
    /// τ_P at the default tolerance.
    pub tau_p: f64,
}

impl Scenario {
    pub fn new(
        chain: EmitterChain,
        bath: PhononBathParams,
        dephasing: DephasingParams,
        quad: QuadratureSpec,
        initial: InitialState,
    ) -> Result<Self> {
        let ctx = PhononContext::new(bath, quad)?;
        let gamma_pd = ctx.pure_dephasing_rate(&dephasing)?;
        let matrices = build_matrices(&chain, ctx.c_inf, ctx.polaron_shift()?)?;
        let layout = Layout::Sem(chain.n_emitters);
        let rho0 = initial.density(layout)?;
        let modes = mode_spectrum(&matrices, gamma_pd, &rho0, layout)?;
        let tau_p = ctx.polaron_time(DEFAULT_POLARON_EPSILON)?;
        Ok(Scenario { ctx, gamma_pd, chain, matrices, initial, rho0, modes, tau_p })
    }

    pub fn from_config(cfg: &SimulationConfig, temperature: f64) -> Result<Self> {
        Scenario::new(cfg.chain(), cfg.bath(temperature)?, cfg.dephasing(), cfg.quadrature, cfg.initial_state()?)
    }

    pub fn temperature(&self) -> f64 {
        self.ctx.params.temperature
    }

    /// Slowest nonzero amplitude decay rate among the modes.
    pub fn slowest_rate(&self) -> Result<f64> {
        self.modes
            .modes
            .iter()
            .flat_map(|m| [m.big_gamma_l, m.digamma_l])
            .filter(|&r| r > 0.0)
            .min_by(f64::total_cmp)
            .ok_or_else(|| Error::Unphysical("every mode is dark".into()))
    }

    /// Fine window max(5 τ_P, 10 ps), log tail to 12 / Γ_min.
    pub fn time_grid(&self, grids: &GridConfig) -> Result<TimeGrid> {
        let window = (5.0 * self.tau_p).max(10.0);
        TimeGrid::two_scale(window, grids.fine_step, 12.0 / self.slowest_rate()?, grids.tail_points)
    }

    pub fn g1(&self, method: Method, grid: &TimeGrid, opts: G1Options) -> Result<CorrelationTrace> {
        g1_collective(grid, method, &self.modes, &self.ctx, opts)
    }

    pub fn frequency_grid(&self, method: Method, grids: &GridConfig) -> Result<FrequencyGrid> {
        let lines: Vec<(f64, f64)> = self
            .modes
            .modes
            .iter()
            .map(|m| match method {
                Method::Polaron => (m.omega_polaron_l, m.digamma_l),
                _ => (m.omega_l, m.big_gamma_l),
            })
            .collect();
        FrequencyGrid::nested(&lines, grids.zpl_points, grids.sideband_half_span_uev, grids.sideband_step_uev)
    }

    /// ZPL plus sideband spectrum from the method's g¹ trace.
    pub fn spectrum(&self, method: Method, grids: &GridConfig, opts: G1Options) -> Result<Spectrum> {
        let trace = self.g1(method, &self.time_grid(grids)?, opts)?;
        full_spectrum(&trace, &self.frequency_grid(method, grids)?)
    }

    /// Concurrence trajectory of a two-emitter chain out to 12 / γ_min.
    pub fn trajectory(
        &self,
        method: Method,
        rates: MarkovRates,
        seam_epsilon: f64,
        grids: &GridConfig,
    ) -> Result<ConcurrenceTrace> {
        if self.chain.n_emitters != 2 {
            return Err(Error::Domain("concurrence needs N = 2".into()));
        }
        let rho = self.rho0.relayout(Layout::Sem(2), Layout::TwoQubit)?;
        let spec = two_emitter_spec(&self.matrices, self.gamma_pd, rates)?;
        let tau_p = seam_time(&self.ctx, seam_epsilon)?;
        let slowest = self
            .modes
            .modes
            .iter()
            .map(|m| m.gamma_l + 2.0 * self.gamma_pd)
            .filter(|&r| r > 0.0)
            .min_by(f64::total_cmp)
            .ok_or_else(|| Error::Unphysical("every mode is dark".into()))?;
        let window = (5.0 * tau_p).max(10.0);
        let grid = TimeGrid::two_scale(window, grids.fine_step * 5.0, 12.0 / slowest, grids.trajectory_points)?;
        concurrence_trajectory(&rho, method, &self.ctx, &spec, grid.times(), tau_p, &IntegratorOptions::default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_builds() {
        let cfg = SimulationConfig::default();
        let s = Scenario::from_config(&cfg, 4.0).unwrap();
        assert_eq!(s.modes.len(), 2);
        assert!(s.tau_p > 1.0 && s.tau_p < 4.0);
        let grid = s.time_grid(&cfg.grids).unwrap();
        assert!(grid.times().last().unwrap() * s.slowest_rate().unwrap() > 11.9);
    }

    #[test]
    fn trajectory_starts_entangled() {
        let mut cfg = SimulationConfig::default();
        cfg.run.initial_state = crate::config::InitialStateConfig::Named("symmetric".into());
        cfg.grids.trajectory_points = 40;
        let s = Scenario::from_config(&cfg, 25.0).unwrap();
        let tr = s.trajectory(Method::Concatenation, MarkovRates::Concatenation, 1e-7, &cfg.grids).unwrap();
        assert!((tr.values[0] - 1.0).abs() < 1e-12);
        assert!((tr.at_seam().unwrap() - s.ctx.c_inf.powi(2)).abs() < 1e-6);
    }

    #[test]
    fn chain_of_three_has_no_trajectory() {
        let mut cfg = SimulationConfig::default();
        cfg.chain.n_emitters = 3;
        let s = Scenario::from_config(&cfg, 4.0).unwrap();
        assert!(s.trajectory(Method::Markovian, MarkovRates::Concatenation, 1e-7, &cfg.grids).is_err());
    }
}
