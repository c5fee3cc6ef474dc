//! Closed-form first-order correlation functions g¹(τ).
//!
//! All traces are in the frame rotating at ω₀'. The phonon factor is the
//! emission-ordered correlation ⟨B₊B₋(τ)⟩ = C*(τ), which places the
//! phonon-emission sideband on the red side of the zero-phonon line.

use serde::{Deserialize, Serialize};

use crate::collective_modes::ModeSet;
use crate::dynamics::grid::TimeGrid;
use crate::dynamics::Method;
use crate::export::{num, CsvTable};
use crate::phonon_bath::{PhononContext, DEFAULT_POLARON_EPSILON};
use crate::{Error, Result, C64};

/// Multiplicative phonon factor K(τ) applied to the mode sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    Unity,
    Constant(f64),
    /// C*(τ): exact within the fine window, C∞ beyond it.
    Phonon,
}

/// One exponential A·e^{−(rate + i·freq)τ}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeTerm {
    pub amplitude: C64,
    pub rate: f64,
    pub freq: f64,
}

impl ModeTerm {
    pub fn at(&self, tau: f64) -> C64 {
        self.amplitude * C64::new(-self.rate * tau, -self.freq * tau).exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTrace {
    pub method: Method,
    pub grid: TimeGrid,
    pub values: Vec<C64>,
    pub terms: Vec<ModeTerm>,
    pub kernel: Kernel,
    pub c_inf: f64,
    pub temperature: f64,
}

impl CorrelationTrace {
    pub fn times(&self) -> &[f64] {
        self.grid.times()
    }

    /// Mode sum without the phonon factor.
    pub fn mode_sum(&self, tau: f64) -> C64 {
        self.terms.iter().map(|t| t.at(tau)).sum()
    }

    /// Weight multiplying the mode sum in the analytic Lorentzian part.
    pub fn lorentzian_weight(&self) -> f64 {
        match self.kernel {
            Kernel::Unity => 1.0,
            Kernel::Constant(k) => k,
            Kernel::Phonon => self.c_inf,
        }
    }

    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["tau_ps", "re_g1", "im_g1", "abs_g1"]);
        for (tau, v) in self.times().iter().zip(&self.values) {
            t.push_nums(&[*tau, v.re, v.im, v.norm()]);
        }
        t
    }
}

/// Options for collective traces.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct G1Options {
    /// Restore phonon sidebands on polaron traces by multiplying with C(τ)/C∞.
    pub polaron_full_spectrum: bool,
    /// Keep cross-mode initial coherences ρ_{ll'} (l ≠ l').
    pub cross_coherences: bool,
}

fn kernel_values(kernel: Kernel, grid: &TimeGrid, ctx: &PhononContext) -> Result<Vec<C64>> {
    match kernel {
        Kernel::Unity => Ok(vec![C64::new(1.0, 0.0); grid.len()]),
        Kernel::Constant(k) => Ok(vec![C64::new(k, 0.0); grid.len()]),
        Kernel::Phonon => {
            let fine = grid.fine();
            let mut vals: Vec<C64> = ctx.correlation_on(fine)?.into_iter().map(|c| c.conj()).collect();
            let edge = vals[vals.len() - 1];
            let drift = (edge / ctx.c_inf - 1.0).norm();
            if drift > DEFAULT_POLARON_EPSILON {
                return Err(Error::Domain(format!(
                    "fine window ends at {:.3} ps before the phonon correlation has settled \
                     (|C/C∞ − 1| = {drift:.2e})",
                    fine[fine.len() - 1]
                )));
            }
            vals.resize(grid.len(), C64::new(ctx.c_inf, 0.0));
            Ok(vals)
        }
    }
}

fn assemble(
    method: Method,
    grid: &TimeGrid,
    terms: Vec<ModeTerm>,
    kernel: Kernel,
    ctx: &PhononContext,
) -> Result<CorrelationTrace> {
    let k = kernel_values(kernel, grid, ctx)?;
    let values =
        grid.times().iter().zip(&k).map(|(&tau, kv)| kv * terms.iter().map(|t| t.at(tau)).sum::<C64>()).collect();
    Ok(CorrelationTrace {
        method,
        grid: grid.clone(),
        values,
        terms,
        kernel,
        c_inf: ctx.c_inf,
        temperature: ctx.params.temperature,
    })
}

/// Single emitter: γρ_ee K(τ) e^{−Γτ} with Γ = γ/2 + γ_pd.
///
/// Concatenation and polaron coincide exactly here, both with K = C*(τ).
pub fn g1_single(
    grid: &TimeGrid,
    method: Method,
    ctx: &PhononContext,
    gamma: f64,
    gamma_pd: f64,
    rho_ee: f64,
) -> Result<CorrelationTrace> {
    if !(0.0..=1.0).contains(&rho_ee) {
        return Err(Error::InvalidState(format!("rho_ee must lie in [0, 1], got {rho_ee}")));
    }
    if !(gamma > 0.0 && gamma_pd >= 0.0) {
        return Err(Error::Domain("gamma must be > 0 and gamma_pd >= 0".into()));
    }
    let term = ModeTerm { amplitude: C64::new(gamma * rho_ee, 0.0), rate: 0.5 * gamma + gamma_pd, freq: 0.0 };
    let kernel = match method {
        Method::Concatenation | Method::Polaron => Kernel::Phonon,
        Method::Markovian => Kernel::Unity,
        Method::InitialSlip => Kernel::Constant(ctx.c_inf),
    };
    assemble(method, grid, vec![term], kernel, ctx)
}

/// Chain of N emitters from its collective modes.
///
/// The polaron trace carries C∞ in place of C*(τ) unless
/// `polaron_full_spectrum` is set or N = 1, where it equals [`g1_single`].
pub fn g1_collective(
    grid: &TimeGrid,
    method: Method,
    modes: &ModeSet,
    ctx: &PhononContext,
    opts: G1Options,
) -> Result<CorrelationTrace> {
    if modes.is_empty() {
        return Err(Error::Domain("at least one mode is required".into()));
    }
    let polaron = method == Method::Polaron;
    let n = modes.len();
    let terms = (0..n)
        .map(|lp| {
            let m = &modes.modes[lp];
            // amplitude of channel l' is Σ_l γ_{l l'} ρ_{l' l}
            let amplitude = if opts.cross_coherences {
                (0..n).map(|l| modes.coherences[(lp, l)] * modes.gamma_modes[(l, lp)]).sum()
            } else {
                C64::new(m.gamma_l * m.rho_ll, 0.0)
            };
            let (rate, freq) = if polaron { (m.digamma_l, m.omega_polaron_l) } else { (m.big_gamma_l, m.omega_l) };
            ModeTerm { amplitude, rate, freq }
        })
        .collect();
    let kernel = match method {
        Method::Concatenation => Kernel::Phonon,
        // a single emitter has no collective rates to renormalize
        Method::Polaron if opts.polaron_full_spectrum || n == 1 => Kernel::Phonon,
        Method::Polaron | Method::InitialSlip => Kernel::Constant(ctx.c_inf),
        Method::Markovian => Kernel::Unity,
    };
    assemble(method, grid, terms, kernel, ctx)
}

/// Photon flux Σ_l ρ_ll e^{−γ_l τ}, normalized to 1 at τ = 0.
///
/// The polaron method uses Υ_l in place of γ_l.
pub fn integrated_intensity(times: &[f64], modes: &ModeSet, method: Method) -> Result<Vec<f64>> {
    let weight: f64 = modes.modes.iter().map(|m| m.rho_ll).sum();
    if !(weight > 0.0) {
        return Err(Error::InvalidState("initial state has no excited population".into()));
    }
    Ok(times
        .iter()
        .map(|&t| {
            modes
                .modes
                .iter()
                .map(|m| {
                    let rate = if method == Method::Polaron { m.upsilon_l } else { m.gamma_l };
                    m.rho_ll * (-rate * t).exp()
                })
                .sum::<f64>()
                / weight
        })
        .collect())
}

/// CSV of an intensity trace.
pub fn intensity_csv(times: &[f64], values: &[f64]) -> CsvTable {
    let mut t = CsvTable::new(&["tau_ps", "intensity"]);
    for (a, b) in times.iter().zip(values) {
        t.push(vec![num(*a), num(*b)]);
    }
    t
}
