//! The single-table subcommands. Points are evaluated on the worker pool and
//! written in input order.

use collective_emission::config::{SimulationConfig, Spacing};
use collective_emission::dynamics::trace::intensity_csv;
use collective_emission::dynamics::{integrated_intensity, G1Options, Method};
use collective_emission::export::{num, CsvTable};
use collective_emission::fit::fit_biexponential;
use collective_emission::scenario::Scenario;
use collective_emission::spectra::{delta_metric, describe, enhancement_ratio, SpectrumSummary};
use collective_emission::{Error, Result};
use rayon::prelude::*;
use serde_json::json;

use crate::args::{label, spacing_label};
use crate::output::{write_all, Artifact, CliError};

fn g1_options(cfg: &SimulationConfig) -> G1Options {
    G1Options { polaron_full_spectrum: cfg.run.polaron_full_spectrum, cross_coherences: cfg.run.cross_coherences }
}

fn temperature_method_points(cfg: &SimulationConfig, methods: &[Method]) -> Vec<(f64, Method)> {
    cfg.run.temperatures.iter().flat_map(|&t| methods.iter().map(move |&m| (t, m))).collect()
}

fn point_name(prefix: &str, t: f64, m: Method) -> String {
    format!("{prefix}_T{}K_{m}", label(t))
}

pub fn spectrum(cfg: &SimulationConfig) -> std::result::Result<(), CliError> {
    let out: Vec<Result<Artifact>> = temperature_method_points(cfg, &cfg.run.methods)
        .par_iter()
        .map(|&(t, m)| {
            let sc = Scenario::from_config(cfg, t)?;
            let s = sc.spectrum(m, &cfg.grids, g1_options(cfg))?;
            let summary = SpectrumSummary::new(&s, Some(&sc.modes));
            let zpl = summary.zpl_fraction.map(num).unwrap_or_else(|| "n/a".into());
            Ok(Artifact {
                job: "spectrum",
                name: point_name("spectrum", t, m),
                table: s.to_csv(),
                parameters: json!({ "temperature_K": t, "method": m }),
                results: serde_json::to_value(&summary).map_err(Error::from)?,
                summary: format!("spectrum T={t} K: {}, zpl_fraction={zpl}", describe(&s)),
            })
        })
        .collect();
    write_all(cfg, out)
}

pub fn g1(cfg: &SimulationConfig) -> std::result::Result<(), CliError> {
    let out: Vec<Result<Artifact>> = temperature_method_points(cfg, &cfg.run.methods)
        .par_iter()
        .map(|&(t, m)| {
            let sc = Scenario::from_config(cfg, t)?;
            let grid = sc.time_grid(&cfg.grids)?;
            let tr = sc.g1(m, &grid, g1_options(cfg))?;
            let g0 = tr.values[0];
            Ok(Artifact {
                job: "g1",
                name: point_name("g1", t, m),
                table: tr.to_csv(),
                parameters: json!({ "temperature_K": t, "method": m }),
                results: json!({
                    "c_inf": sc.ctx.c_inf,
                    "tau_p_ps": sc.tau_p,
                    "g1_0": [g0.re, g0.im],
                    "points": grid.len(),
                }),
                summary: format!(
                    "g1 T={t} K {m}: {} points to {:.4e} ps, g1(0)={:.6e}",
                    grid.len(),
                    grid.times()[grid.len() - 1],
                    g0.re
                ),
            })
        })
        .collect();
    write_all(cfg, out)
}

pub fn modes(cfg: &SimulationConfig) -> std::result::Result<(), CliError> {
    let out: Vec<Result<Artifact>> = cfg
        .run
        .temperatures
        .par_iter()
        .map(|&t| {
            let sc = Scenario::from_config(cfg, t)?;
            let cs = enhancement_ratio(&sc.modes, Method::Concatenation)?;
            let pm = enhancement_ratio(&sc.modes, Method::Polaron)?;
            let delta = delta_metric(&sc.modes).ok().map(|d| d.delta_percent);
            Ok(Artifact {
                job: "modes",
                name: format!("modes_N{}_T{}K", sc.modes.len(), label(t)),
                table: sc.modes.to_csv(),
                parameters: json!({ "temperature_K": t, "n_emitters": sc.modes.len() }),
                results: json!({
                    "enhancement_ratio_concatenation": cs,
                    "enhancement_ratio_polaron": pm,
                    "delta_percent": delta,
                    "gamma_pd_per_ps": sc.gamma_pd,
                    "c_inf": sc.ctx.c_inf,
                    "tau_p_ps": sc.tau_p,
                }),
                summary: format!(
                    "modes N={} T={t} K: Gamma_max/Gamma_min={cs:.6} (concatenation), {pm:.6} (polaron)",
                    sc.modes.len()
                ),
            })
        })
        .collect();
    write_all(cfg, out)
}

/// Uniform samples out to 12 over the slowest bright rate; the fit needs
/// uniform spacing.
fn intensity_times(sc: &Scenario, m: Method, points: usize) -> Result<Vec<f64>> {
    let slowest = sc
        .modes
        .modes
        .iter()
        .map(|l| if m == Method::Polaron { l.upsilon_l } else { l.gamma_l })
        .filter(|&r| r > 0.0)
        .min_by(f64::total_cmp)
        .ok_or_else(|| Error::Unphysical("every mode is dark".into()))?;
    let dt = 12.0 / slowest / (points - 1) as f64;
    Ok((0..points).map(|k| k as f64 * dt).collect())
}

pub fn intensity(cfg: &SimulationConfig) -> std::result::Result<(), CliError> {
    let out: Vec<Result<Artifact>> = temperature_method_points(cfg, &cfg.run.methods)
        .par_iter()
        .map(|&(t, m)| {
            let sc = Scenario::from_config(cfg, t)?;
            let times = intensity_times(&sc, m, cfg.grids.tail_points)?;
            let y = integrated_intensity(&times, &sc.modes, m)?;
            let fit = fit_biexponential(&times, &y).map_err(|e| log::warn!("intensity T={t} K {m}: {e}")).ok();
            let rates = fit.as_ref().map(|f| f.rates.clone()).unwrap_or_default();
            let shown: Vec<String> = rates.iter().map(|r| format!("{r:.6e}")).collect();
            Ok(Artifact {
                job: "intensity",
                name: point_name("intensity", t, m),
                table: intensity_csv(&times, &y),
                parameters: json!({ "temperature_K": t, "method": m }),
                results: json!({ "fit": fit }),
                summary: format!("intensity T={t} K {m}: fitted rates [{}] 1/ps", shown.join(", ")),
            })
        })
        .collect();
    write_all(cfg, out)
}

pub fn concurrence(cfg: &SimulationConfig, explicit_methods: bool) -> std::result::Result<(), CliError> {
    let methods =
        if explicit_methods { cfg.run.methods.clone() } else { vec![Method::Concatenation, Method::Markovian] };
    let out: Vec<Result<Artifact>> = temperature_method_points(cfg, &methods)
        .par_iter()
        .map(|&(t, m)| {
            let sc = Scenario::from_config(cfg, t)?;
            let tr = sc.trajectory(m, cfg.run.markov_rates, cfg.run.seam_epsilon, &cfg.grids)?;
            let peak = tr.values.iter().copied().fold(0.0f64, f64::max);
            let last = tr.values[tr.values.len() - 1];
            Ok(Artifact {
                job: "concurrence",
                name: point_name("concurrence", t, m),
                table: tr.to_csv(),
                parameters: json!({ "temperature_K": t, "method": m, "markov_rates": cfg.run.markov_rates }),
                results: json!({
                    "tau_p_ps": tr.tau_p,
                    "at_seam": tr.at_seam(),
                    "max": peak,
                    "final": last,
                }),
                summary: format!(
                    "concurrence T={t} K {m}: C(0)={:.6}, C(tau_P)={}, max={peak:.6}",
                    tr.values[0],
                    tr.at_seam().map(|c| format!("{c:.6}")).unwrap_or_else(|| "n/a".into())
                ),
            })
        })
        .collect();
    write_all(cfg, out)
}

pub fn compare(cfg: &SimulationConfig, spacings: &[Spacing]) -> std::result::Result<(), CliError> {
    if cfg.chain.n_emitters != 2 {
        return Err(Error::Domain(format!("compare needs N = 2, got {}", cfg.chain.n_emitters)).into());
    }
    let points: Vec<(Spacing, f64)> =
        spacings.iter().flat_map(|&s| cfg.run.temperatures.iter().map(move |&t| (s, t))).collect();
    let rows: Vec<Result<(f64, f64, f64, f64)>> = points
        .par_iter()
        .map(|&(s, t)| {
            let mut c = cfg.clone();
            c.chain.spacing = s;
            let sc = Scenario::from_config(&c, t)?;
            let d = delta_metric(&sc.modes)?;
            Ok((c.spacing_nm(), d.cs, d.pm, d.delta_percent))
        })
        .collect();
    let rows: Vec<(f64, f64, f64, f64)> = rows.into_iter().collect::<Result<_>>()?;

    let mut table = CsvTable::new(&["spacing", "spacing_nm", "temperature_K", "cs", "pm", "delta_percent"]);
    for ((s, t), (nm, cs, pm, d)) in points.iter().zip(&rows) {
        table.push(vec![s.to_string(), num(*nm), num(*t), num(*cs), num(*pm), num(*d)]);
    }
    let mut peaks = Vec::new();
    let mut lines = Vec::new();
    for (k, s) in spacings.iter().enumerate() {
        let block = &rows[k * cfg.run.temperatures.len()..(k + 1) * cfg.run.temperatures.len()];
        let (i, best) = block
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .3.total_cmp(&b.1 .3))
            .map(|(i, r)| (i, r.3))
            .unwrap_or((0, f64::NAN));
        let t_at = cfg.run.temperatures[i];
        peaks.push(json!({ "spacing": s.to_string(), "max_delta_percent": best, "at_temperature_K": t_at }));
        lines.push(format!("{s}: max {best:.4}% at {t_at} K"));
    }
    let name = {
        let labels: Vec<String> = spacings.iter().map(spacing_label).collect();
        format!("delta_{}", labels.join("_"))
    };
    let a = Artifact {
        job: "compare",
        name,
        table,
        parameters: json!({
            "spacings": spacings.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            "temperatures_K": cfg.run.temperatures,
        }),
        results: json!({ "peaks": peaks }),
        summary: format!("compare N=2 over {} temperatures: {}", cfg.run.temperatures.len(), lines.join("; ")),
    };
    crate::output::write(cfg, &a)
}
