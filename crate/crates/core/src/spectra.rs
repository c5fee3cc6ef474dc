//! Emission spectra S(ω) = Re ∫₀^∞ g¹(τ) e^{iωτ} dτ on a detuning axis
//! measured from ω₀'.
//!
//! The phonon factor is split as C*(τ) = C∞ + C∞(e^{φ*(τ)} − 1). The first
//! term turns every mode into an analytic Lorentzian (zero-phonon line), the
//! second is non-zero only inside the picosecond window and is transformed
//! numerically (phonon sideband).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collective_modes::ModeSet;
use crate::dynamics::trace::{CorrelationTrace, Kernel, ModeTerm};
use crate::dynamics::Method;
use crate::export::{num, CsvTable};
use crate::units::{rad_per_ps_to_uev, uev_to_rad_per_ps};
use crate::{Error, Result, C64};

/// Sorted detuning samples in rad/ps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    omega: Vec<f64>,
}

impl FrequencyGrid {
    pub fn uniform(lo: f64, hi: f64, points: usize) -> Result<Self> {
        if !(hi > lo) || points < 2 {
            return Err(Error::Domain("frequency grid needs hi > lo and at least 2 points".into()));
        }
        let step = (hi - lo) / (points - 1) as f64;
        Ok(FrequencyGrid { omega: (0..points).map(|k| lo + step * k as f64).collect() })
    }

    /// Union of several grids, sorted with duplicates removed.
    pub fn merged(parts: &[FrequencyGrid]) -> Self {
        let mut omega: Vec<f64> = parts.iter().flat_map(|g| g.omega.iter().copied()).collect();
        omega.sort_by(f64::total_cmp);
        omega.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * b.abs().max(1e-12));
        FrequencyGrid { omega }
    }

    /// A dense window around the zero-phonon lines nested inside a coarse
    /// sideband window of ±`sideband_half_span_uev` with `sideband_step_uev`.
    pub fn nested(
        lines: &[(f64, f64)],
        zpl_points: usize,
        sideband_half_span_uev: f64,
        sideband_step_uev: f64,
    ) -> Result<Self> {
        if lines.is_empty() {
            return Err(Error::Domain("at least one line is needed to place the ZPL window".into()));
        }
        let reach = lines.iter().map(|(c, w)| c.abs() + 20.0 * w).fold(0.0, f64::max);
        let zpl = FrequencyGrid::uniform(-reach, reach, zpl_points.max(3))?;
        let span = uev_to_rad_per_ps(sideband_half_span_uev);
        let n = (2.0 * sideband_half_span_uev / sideband_step_uev).round() as usize + 1;
        let sb = FrequencyGrid::uniform(-span, span, n)?;
        Ok(FrequencyGrid::merged(&[zpl, sb]))
    }

    /// Nested grid sized for a mode set.
    pub fn for_modes(modes: &ModeSet, method: Method) -> Result<Self> {
        let lines: Vec<(f64, f64)> = modes
            .modes
            .iter()
            .map(|m| match method {
                Method::Polaron => (m.omega_polaron_l, m.digamma_l),
                _ => (m.omega_l, m.big_gamma_l),
            })
            .collect();
        FrequencyGrid::nested(&lines, 2001, 6000.0, 5.0)
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }
}

/// Re[A / (Γ − i(ω − ω_l))]: a Lorentzian, plus a dispersive part when A is complex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lorentzian {
    pub amplitude: C64,
    pub center: f64,
    pub width: f64,
}

impl Lorentzian {
    pub fn at(&self, omega: f64) -> f64 {
        let d = omega - self.center;
        (self.amplitude.re * self.width - self.amplitude.im * d) / (self.width * self.width + d * d)
    }

    /// Exact integral over [lo, hi].
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        let (a, b) = (lo - self.center, hi - self.center);
        let w = self.width;
        let atan = (b / w).atan() - (a / w).atan();
        let log = 0.5 * ((w * w + b * b) / (w * w + a * a)).ln();
        self.amplitude.re * atan - self.amplitude.im * log
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumParts {
    pub zpl: Vec<f64>,
    pub sideband: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub method: Method,
    pub grid: FrequencyGrid,
    pub total: Vec<f64>,
    pub parts: Option<SpectrumParts>,
    pub lines: Vec<Lorentzian>,
}

impl Spectrum {
    pub fn omega(&self) -> &[f64] {
        self.grid.omega()
    }

    pub fn detuning_uev(&self) -> Vec<f64> {
        self.grid.omega().iter().map(|&w| rad_per_ps_to_uev(w)).collect()
    }

    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["detuning_ueV", "total", "zpl", "sideband"]);
        for (k, &w) in self.grid.omega().iter().enumerate() {
            let (z, s) = match &self.parts {
                Some(p) => (p.zpl[k], p.sideband[k]),
                None => (self.total[k], 0.0),
            };
            // negative truncation noise is clamped for plotting only
            t.push_nums(&[rad_per_ps_to_uev(w), self.total[k].max(0.0), z.max(0.0), s.max(0.0)]);
        }
        t
    }

    /// Trapezoid integral of the sideband part over the grid.
    pub fn sideband_integral(&self) -> f64 {
        match &self.parts {
            Some(p) => trapezoid(self.grid.omega(), &p.sideband),
            None => 0.0,
        }
    }

    /// ZPL integral over the grid range, from the analytic line shapes.
    pub fn zpl_integral(&self) -> f64 {
        let w = self.grid.omega();
        let (lo, hi) = (w[0], w[w.len() - 1]);
        self.lines.iter().map(|l| l.integral(lo, hi)).sum()
    }

    /// Centers and half widths of the lines in µeV, strongest first.
    pub fn peaks_uev(&self) -> Vec<(f64, f64)> {
        let mut lines = self.lines.clone();
        lines.sort_by(|a, b| (b.amplitude.re / b.width).total_cmp(&(a.amplitude.re / a.width)));
        lines.iter().map(|l| (rad_per_ps_to_uev(l.center), rad_per_ps_to_uev(l.width))).collect()
    }
}

pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1])).sum()
}

fn lines_from_terms(terms: &[ModeTerm], weight: f64) -> Vec<Lorentzian> {
    terms.iter().map(|t| Lorentzian { amplitude: t.amplitude * weight, center: t.freq, width: t.rate }).collect()
}

/// Analytic zero-phonon spectrum C∞ Σ_l γ_l ρ_ll Γ_l / ((ω − ω_l)² + Γ_l²).
///
/// Polaron uses (Ϝ_l, Ω_l); markovian sets C∞ to 1. Only diagonal mode
/// weights enter.
pub fn zpl_spectrum(modes: &ModeSet, method: Method, grid: &FrequencyGrid) -> Result<Spectrum> {
    if modes.is_empty() {
        return Err(Error::Domain("at least one mode is required".into()));
    }
    let weight = if method == Method::Markovian { 1.0 } else { modes.c_inf };
    let lines: Vec<Lorentzian> = modes
        .modes
        .iter()
        .map(|m| {
            let (center, width) = match method {
                Method::Polaron => (m.omega_polaron_l, m.digamma_l),
                _ => (m.omega_l, m.big_gamma_l),
            };
            Lorentzian { amplitude: C64::new(weight * m.gamma_l * m.rho_ll, 0.0), center, width }
        })
        .collect();
    let total: Vec<f64> = grid.omega().iter().map(|&w| lines.iter().map(|l| l.at(w)).sum()).collect();
    Ok(Spectrum {
        method,
        grid: grid.clone(),
        parts: Some(SpectrumParts { zpl: total.clone(), sideband: vec![0.0; total.len()] }),
        total,
        lines,
    })
}

/// Full spectrum of a trace: analytic ZPL plus numerically transformed sideband.
pub fn full_spectrum(trace: &CorrelationTrace, grid: &FrequencyGrid) -> Result<Spectrum> {
    let lines = lines_from_terms(&trace.terms, trace.lorentzian_weight());
    let zpl: Vec<f64> = grid.omega().iter().map(|&w| lines.iter().map(|l| l.at(w)).sum()).collect();

    let sideband = if trace.kernel == Kernel::Phonon {
        let fine = trace.grid.fine();
        let dt = trace.grid.fine_step();
        if fine.len() < 3 {
            return Err(Error::Spectrum("fine window has fewer than 3 samples".into()));
        }
        let nyquist = std::f64::consts::PI / dt;
        let w_max = grid.omega().iter().fold(0.0f64, |m, w| m.max(w.abs()));
        if w_max > 0.5 * nyquist {
            return Err(Error::Spectrum(format!(
                "requested |ω| up to {w_max:.3} rad/ps but the {dt} ps fine step resolves only \
                 {:.3} rad/ps",
                0.5 * nyquist
            )));
        }
        let h: Vec<C64> =
            fine.iter().zip(&trace.values).map(|(&tau, v)| v - trace.mode_sum(tau) * trace.c_inf).collect();
        grid.omega().par_iter().map(|&w| sideband_transform(&h, dt, w)).collect()
    } else {
        vec![0.0; grid.len()]
    };
    let total = zpl.iter().zip(&sideband).map(|(a, b)| a + b).collect();
    Ok(Spectrum {
        method: trace.method,
        grid: grid.clone(),
        total,
        parts: Some(SpectrumParts { zpl, sideband }),
        lines,
    })
}

/// Re ∫₀^T h(τ) e^{iωτ} dτ by the trapezoid rule with an Euler-Maclaurin
/// endpoint correction.
fn sideband_transform(h: &[C64], dt: f64, w: f64) -> f64 {
    let n = h.len();
    let rot = C64::new(0.0, w * dt).exp();
    let mut phase = C64::new(1.0, 0.0);
    let mut f = Vec::with_capacity(n);
    for v in h {
        f.push(v * phase);
        phase *= rot;
    }
    let mut sum: C64 = f[1..n - 1].iter().sum();
    sum += 0.5 * (f[0] + f[n - 1]);
    let d0 = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dt);
    let d1 = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dt);
    (sum * dt - (d1 - d0) * (dt * dt / 12.0)).re
}

/// Two-emitter comparison of the summed linewidths and splitting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MethodComparison {
    /// Γ₊ + Γ₋ + 2ω_col
    pub cs: f64,
    /// Ϝ₊ + Ϝ₋ + 2Ω_col
    pub pm: f64,
    pub delta_percent: f64,
}

pub fn delta_metric(modes: &ModeSet) -> Result<MethodComparison> {
    if modes.len() != 2 {
        return Err(Error::Domain(format!("delta metric needs N = 2, got {}", modes.len())));
    }
    let (p, m) = (&modes.modes[0], &modes.modes[1]);
    let cs = p.big_gamma_l + m.big_gamma_l + 2.0 * p.omega_l;
    let pm = p.digamma_l + m.digamma_l + 2.0 * p.omega_polaron_l;
    Ok(MethodComparison { cs, pm, delta_percent: 100.0 * (cs - pm) / cs })
}

/// Δ = 200 ω_col (1 − C∞) / (γ + 2γ_pd + 2ω_col).
pub fn delta_closed_form(gamma: f64, gamma_pd: f64, omega_col: f64, c_inf: f64) -> f64 {
    200.0 * omega_col * (1.0 - c_inf) / (gamma + 2.0 * gamma_pd + 2.0 * omega_col)
}

/// Ratio of the broadest to the narrowest mode linewidth.
pub fn enhancement_ratio(modes: &ModeSet, method: Method) -> Result<f64> {
    if modes.is_empty() {
        return Err(Error::Domain("enhancement ratio needs at least one mode".into()));
    }
    let widths = modes.modes.iter().map(|m| match method {
        Method::Polaron => m.digamma_l,
        _ => m.big_gamma_l,
    });
    let (lo, hi) = widths.fold((f64::INFINITY, 0.0f64), |(lo, hi), w| (lo.min(w), hi.max(w)));
    if !(lo > 0.0) {
        return Err(Error::Unphysical("a mode has zero linewidth".into()));
    }
    Ok(hi / lo)
}

fn check_support(s: &Spectrum) -> Result<&SpectrumParts> {
    let parts =
        s.parts.as_ref().ok_or_else(|| Error::Spectrum("spectrum carries no ZPL/sideband decomposition".into()))?;
    let w = s.grid.omega();
    let (lo, hi) = (w[0], w[w.len() - 1]);
    for l in &s.lines {
        if l.center - 6.0 * l.width < lo || l.center + 6.0 * l.width > hi {
            return Err(Error::Spectrum(format!(
                "grid [{lo:.3e}, {hi:.3e}] rad/ps does not cover 6 widths of the line at {:.3e}",
                l.center
            )));
        }
    }
    let peak = parts.sideband.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let edge = parts.sideband[0].abs().max(parts.sideband[w.len() - 1].abs());
    if peak > 0.0 && edge > 1e-3 * peak {
        return Err(Error::Spectrum("grid truncates the phonon sideband".into()));
    }
    Ok(parts)
}

/// Fraction of the emission in the zero-phonon line.
pub fn zpl_fraction(s: &Spectrum) -> Result<f64> {
    check_support(s)?;
    let zpl = s.zpl_integral();
    let total = zpl + s.sideband_integral();
    if !(total > 0.0) {
        return Err(Error::Spectrum("spectrum has no weight".into()));
    }
    Ok(zpl / total)
}

/// Integrated sideband weight on the blue (ω > 0) and red (ω < 0) sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SidebandAsymmetry {
    pub blue: f64,
    pub red: f64,
    pub ratio: f64,
}

pub fn sideband_asymmetry(s: &Spectrum) -> Result<SidebandAsymmetry> {
    let parts = check_support(s)?;
    let w = s.grid.omega();
    let split = w.partition_point(|&x| x < 0.0);
    // both halves share the sample nearest zero so no interval is dropped
    let red = trapezoid(&w[..(split + 1).min(w.len())], &parts.sideband[..(split + 1).min(w.len())]);
    let blue = trapezoid(&w[split.saturating_sub(1)..], &parts.sideband[split.saturating_sub(1)..]);
    if !(red.abs() > 0.0) {
        return Err(Error::Spectrum("red sideband has no weight".into()));
    }
    Ok(SidebandAsymmetry { blue, red, ratio: blue / red })
}

/// JSON summary written next to a spectrum CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub method: Method,
    #[serde(rename = "peaks_ueV")]
    pub peaks_uev: Vec<(f64, f64)>,
    pub enhancement_ratio: Option<f64>,
    pub delta_percent: Option<f64>,
    pub zpl_fraction: Option<f64>,
}

impl SpectrumSummary {
    pub fn new(s: &Spectrum, modes: Option<&ModeSet>) -> Self {
        SpectrumSummary {
            method: s.method,
            peaks_uev: s.peaks_uev(),
            enhancement_ratio: modes.and_then(|m| enhancement_ratio(m, s.method).ok()),
            delta_percent: modes.and_then(|m| delta_metric(m).ok()).map(|d| d.delta_percent),
            zpl_fraction: zpl_fraction(s).ok(),
        }
    }
}

/// Text form used in one-line CLI summaries.
pub fn describe(s: &Spectrum) -> String {
    let peaks: Vec<String> = s.peaks_uev().iter().map(|(c, _)| num(*c)).collect();
    format!("{} peaks at [{}] ueV", s.method, peaks.join(", "))
}
