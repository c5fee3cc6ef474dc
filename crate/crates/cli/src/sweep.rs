//! One scalar over a parameter axis. Each grid point gets its own artifact;
//! the aggregate table lists the points that succeeded in input order.

use clap::ValueEnum;
use collective_emission::config::{SimulationConfig, Spacing};
use collective_emission::dynamics::{G1Options, Method};
use collective_emission::entanglement::concurrence_at_tau_p;
use collective_emission::export::{num, CsvTable};
use collective_emission::phonon_bath::PhononContext;
use collective_emission::scenario::Scenario;
use collective_emission::spectra::{delta_metric, enhancement_ratio, zpl_fraction};
use collective_emission::Result;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::args::{label, spacing_label, CountList, RealList, SpacingList};
use crate::output::{write, Artifact, CliError, FailedPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    #[value(name = "T")]
    Temperature,
    Spacing,
    #[value(name = "N")]
    Emitters,
    #[value(alias = "dot_size")]
    DotSize,
}

impl Axis {
    fn column(&self) -> &'static str {
        match self {
            Axis::Temperature => "temperature_K",
            Axis::Spacing => "spacing",
            Axis::Emitters => "n_emitters",
            Axis::DotSize => "dot_size_nm",
        }
    }

    fn tag(&self) -> &'static str {
        match self {
            Axis::Temperature => "T",
            Axis::Spacing => "spacing",
            Axis::Emitters => "N",
            Axis::DotSize => "dot_size",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Quantity {
    #[value(alias = "zpl-fraction")]
    ZplFraction,
    #[value(alias = "c-inf")]
    CInf,
    #[value(alias = "enhancement-ratio")]
    EnhancementRatio,
    #[value(alias = "delta-percent")]
    DeltaPercent,
    #[value(alias = "concurrence-at-tau-p")]
    ConcurrenceAtTauP,
    #[value(alias = "tau-p")]
    TauP,
    #[value(alias = "gamma-pd")]
    GammaPd,
}

impl Quantity {
    fn name(&self) -> &'static str {
        match self {
            Quantity::ZplFraction => "zpl_fraction",
            Quantity::CInf => "c_inf",
            Quantity::EnhancementRatio => "enhancement_ratio",
            Quantity::DeltaPercent => "delta_percent",
            Quantity::ConcurrenceAtTauP => "concurrence_at_tau_p",
            Quantity::TauP => "tau_p_ps",
            Quantity::GammaPd => "gamma_pd_per_ps",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum AxisValue {
    Temperature,
    Spacing(Spacing),
    Emitters(usize),
    DotSize(f64),
}

#[derive(Debug, Clone, Copy)]
struct Point {
    temperature: f64,
    value: AxisValue,
}

impl Point {
    fn label(&self) -> String {
        let t = format!("T{}K", label(self.temperature));
        match self.value {
            AxisValue::Temperature => t,
            AxisValue::Spacing(s) => format!("{}_{t}", spacing_label(&s)),
            AxisValue::Emitters(n) => format!("N{n}_{t}"),
            AxisValue::DotSize(l) => format!("L{}nm_{t}", label(l)),
        }
    }

    fn describe(&self) -> String {
        match self.value {
            AxisValue::Temperature => format!("T={}", self.temperature),
            AxisValue::Spacing(s) => format!("spacing={s}, T={}", self.temperature),
            AxisValue::Emitters(n) => format!("N={n}, T={}", self.temperature),
            AxisValue::DotSize(l) => format!("dot_size={l}, T={}", self.temperature),
        }
    }

    fn apply(&self, cfg: &SimulationConfig) -> Result<SimulationConfig> {
        let mut c = cfg.clone();
        match self.value {
            AxisValue::Temperature => {}
            AxisValue::Spacing(s) => c.chain.spacing = s,
            AxisValue::Emitters(n) => c.chain.n_emitters = n,
            AxisValue::DotSize(l) => c.material.dot_size = Some(l),
        }
        c.run.temperatures = vec![self.temperature];
        c.validate()?;
        Ok(c)
    }

    /// Axis cell(s) of a table row.
    fn cells(&self, cfg: &SimulationConfig) -> Vec<String> {
        match self.value {
            AxisValue::Temperature => vec![num(self.temperature)],
            AxisValue::Spacing(s) => {
                vec![s.to_string(), num(s.resolve(cfg.material.wavelength)), num(self.temperature)]
            }
            AxisValue::Emitters(n) => vec![n.to_string(), num(self.temperature)],
            AxisValue::DotSize(l) => vec![num(l), num(self.temperature)],
        }
    }
}

fn header(axis: Axis, quantity: Quantity) -> Vec<&'static str> {
    match axis {
        Axis::Temperature => vec![axis.column(), quantity.name()],
        Axis::Spacing => vec![axis.column(), "spacing_nm", "temperature_K", quantity.name()],
        _ => vec![axis.column(), "temperature_K", quantity.name()],
    }
}

fn points(cfg: &SimulationConfig, axis: Axis, values: &str) -> std::result::Result<Vec<Point>, CliError> {
    let bad = |e: String| CliError::Usage(format!("--values: {e}"));
    let values: Vec<AxisValue> = match axis {
        Axis::Temperature => {
            let ts = values.parse::<RealList>().map_err(bad)?.0;
            return Ok(ts
                .into_iter()
                .map(|temperature| Point { temperature, value: AxisValue::Temperature })
                .collect());
        }
        Axis::Spacing => values.parse::<SpacingList>().map_err(bad)?.0.into_iter().map(AxisValue::Spacing).collect(),
        Axis::Emitters => values.parse::<CountList>().map_err(bad)?.0.into_iter().map(AxisValue::Emitters).collect(),
        Axis::DotSize => values.parse::<RealList>().map_err(bad)?.0.into_iter().map(AxisValue::DotSize).collect(),
    };
    Ok(values
        .into_iter()
        .flat_map(|value| cfg.run.temperatures.iter().map(move |&temperature| Point { temperature, value }))
        .collect())
}

fn evaluate(cfg: &SimulationConfig, p: &Point, quantity: Quantity, method: Method) -> Result<f64> {
    let c = p.apply(cfg)?;
    let t = p.temperature;
    match quantity {
        Quantity::CInf => Ok(PhononContext::new(c.bath(t)?, c.quadrature)?.c_inf),
        Quantity::ConcurrenceAtTauP => {
            let dot_size = c.material.dot_size.unwrap_or(c.material.sound_speed / c.omega_c()?);
            let rows =
                concurrence_at_tau_p(&[t], &[dot_size], c.material.alpha, c.material.sound_speed, &c.quadrature)?;
            Ok(rows[0].concurrence)
        }
        _ => {
            let sc = Scenario::from_config(&c, t)?;
            match quantity {
                Quantity::ZplFraction => {
                    let opts = G1Options {
                        polaron_full_spectrum: c.run.polaron_full_spectrum,
                        cross_coherences: c.run.cross_coherences,
                    };
                    zpl_fraction(&sc.spectrum(method, &c.grids, opts)?)
                }
                Quantity::EnhancementRatio => enhancement_ratio(&sc.modes, method),
                Quantity::DeltaPercent => Ok(delta_metric(&sc.modes)?.delta_percent),
                Quantity::TauP => Ok(sc.tau_p),
                Quantity::GammaPd => Ok(sc.gamma_pd),
                Quantity::CInf | Quantity::ConcurrenceAtTauP => unreachable!(),
            }
        }
    }
}

fn trend(ys: &[f64]) -> &'static str {
    if ys.len() < 2 {
        "single"
    } else if ys.windows(2).all(|w| w[1] > w[0]) {
        "increasing"
    } else if ys.windows(2).all(|w| w[1] < w[0]) {
        "decreasing"
    } else {
        "mixed"
    }
}

pub fn run(
    cfg: &SimulationConfig,
    axis: Axis,
    values: &str,
    quantity: Quantity,
    method: Method,
) -> std::result::Result<(), CliError> {
    let points = points(cfg, axis, values)?;
    let results: Vec<Result<f64>> = points.par_iter().map(|p| evaluate(cfg, p, quantity, method)).collect();

    let job = "sweep";
    let cols = header(axis, quantity);
    let mut aggregate = CsvTable::new(&cols);
    let mut failed = Vec::new();
    let mut ok: Vec<(Point, f64)> = Vec::new();
    for (index, (p, r)) in points.iter().zip(results).enumerate() {
        match r {
            Ok(y) => {
                let mut row = p.cells(cfg);
                row.push(num(y));
                let mut table = CsvTable::new(&cols);
                table.push(row.clone());
                aggregate.push(row);
                write(
                    cfg,
                    &Artifact {
                        job,
                        name: format!("{}_{}", quantity.name(), p.label()),
                        table,
                        parameters: json!({ "axis": axis, "point": p.describe(), "method": method }),
                        results: json!({ quantity.name(): y }),
                        summary: format!("sweep {}: {}={y:.10e}", p.describe(), quantity.name()),
                    },
                )?;
                ok.push((*p, y));
            }
            Err(e) => {
                log::info!("sweep point {} failed: {e}", p.describe());
                failed.push(FailedPoint {
                    index,
                    point: p.describe(),
                    kind: e.kind().to_string(),
                    message: e.to_string(),
                });
            }
        }
    }

    // trend per temperature, along the axis order
    let mut series = Vec::new();
    let temps: Vec<f64> = match axis {
        Axis::Temperature => vec![],
        _ => cfg.run.temperatures.clone(),
    };
    if temps.is_empty() {
        let ys: Vec<f64> = ok.iter().map(|(_, y)| *y).collect();
        series.push(json!({ "trend": trend(&ys) }));
    }
    for t in &temps {
        let ys: Vec<f64> = ok.iter().filter(|(p, _)| p.temperature == *t).map(|(_, y)| *y).collect();
        series.push(json!({ "temperature_K": t, "trend": trend(&ys) }));
    }
    let mut trends: Vec<&str> = series.iter().filter_map(|s| s["trend"].as_str()).collect();
    trends.dedup();
    write(
        cfg,
        &Artifact {
            job,
            name: format!("{}_vs_{}", quantity.name(), axis.tag()),
            table: aggregate,
            parameters: json!({ "axis": axis, "values": values, "quantity": quantity, "method": method }),
            results: json!({ "points": points.len(), "succeeded": ok.len(), "failed": failed, "series": series }),
            summary: format!(
                "sweep {} vs {}: {}/{} points, trend {}",
                quantity.name(),
                axis.tag(),
                ok.len(),
                points.len(),
                trends.join(",")
            ),
        },
    )?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Partial { total: points.len(), failed })
    }
}
