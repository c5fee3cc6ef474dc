//! TOML run configuration. Every field has a default; an empty document
//! yields the GaAs profile. Schema reference: `docs/config.md`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{InitialState, Method};
use crate::entanglement::{MarkovRates, SEAM_EPSILON};
use crate::optical_coupling::EmitterChain;
use crate::phonon_bath::{
    cutoff_from_dot_size, DephasingParams, PhononBathParams, DEFAULT_SOUND_SPEED, GAAS_DEFAULT_MU,
};
use crate::quadrature::QuadratureSpec;
use crate::units::mhz_to_per_ps;
use crate::{Error, Result};

/// Emitter spacing, either absolute or as a fraction of the vacuum wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Spacing {
    Nanometers(f64),
    /// λ / divisor
    WavelengthFraction(f64),
}

impl Spacing {
    pub fn resolve(&self, wavelength: f64) -> f64 {
        match *self {
            Spacing::Nanometers(d) => d,
            Spacing::WavelengthFraction(k) => wavelength / k,
        }
    }
}

impl FromStr for Spacing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::config("spacing", format!("cannot parse `{s}`; use e.g. 37.6 or lambda/25"));
        if let Some(rest) = t.strip_prefix("lambda/") {
            let k: f64 = rest.trim().parse().map_err(|_| bad())?;
            if !(k > 0.0) || !k.is_finite() {
                return Err(Error::config("spacing", format!("divisor must be > 0, got {k}")));
            }
            return Ok(Spacing::WavelengthFraction(k));
        }
        let num = t.strip_suffix("nm").unwrap_or(t).trim();
        num.parse().map(Spacing::Nanometers).map_err(|_| bad())
    }
}

impl fmt::Display for Spacing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Spacing::Nanometers(d) => write!(f, "{d}"),
            Spacing::WavelengthFraction(k) => write!(f, "lambda/{k}"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawSpacing {
    Number(f64),
    Text(String),
}

impl Serialize for Spacing {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Spacing::Nanometers(d) => RawSpacing::Number(d),
            Spacing::WavelengthFraction(_) => RawSpacing::Text(self.to_string()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Spacing {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match RawSpacing::deserialize(d)? {
            RawSpacing::Number(x) => Ok(Spacing::Nanometers(x)),
            RawSpacing::Text(t) => t.parse().map_err(|e: Error| serde::de::Error::custom(e.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MaterialConfig {
    /// ps²
    pub alpha: f64,
    /// rad/ps; ignored when `dot_size` is set.
    pub omega_c: f64,
    /// nm; sets ω_c = sound_speed / dot_size.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dot_size: Option<f64>,
    /// nm/ps
    pub sound_speed: f64,
    pub mu: f64,
    pub refractive_index: f64,
    /// Vacuum wavelength, nm.
    pub wavelength: f64,
    /// Single-emitter decay rate, MHz.
    pub gamma_mhz: f64,
}

impl Default for MaterialConfig {
    fn default() -> Self {
        MaterialConfig {
            alpha: 0.025,
            omega_c: 1.49,
            dot_size: None,
            sound_speed: DEFAULT_SOUND_SPEED,
            mu: GAAS_DEFAULT_MU,
            refractive_index: 3.5,
            wavelength: 940.0,
            gamma_mhz: 850.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChainConfig {
    pub n_emitters: usize,
    pub spacing: Spacing,
    pub dicke_limit: bool,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig { n_emitters: 2, spacing: Spacing::WavelengthFraction(25.0), dicke_limit: false }
    }
}

/// Named initial state or explicit real amplitudes on `|e_1⟩ … |e_N⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialStateConfig {
    Named(String),
    Amplitudes(Vec<f64>),
}

impl InitialStateConfig {
    pub fn resolve(&self) -> Result<InitialState> {
        match self {
            InitialStateConfig::Amplitudes(a) => Ok(InitialState::Amplitudes(a.clone())),
            InitialStateConfig::Named(name) => match name.as_str() {
                "first_excited" | "eg" => Ok(InitialState::FirstExcited),
                "symmetric" | "plus" | "+" => Ok(InitialState::Symmetric),
                "antisymmetric" | "minus" | "-" => Ok(InitialState::Antisymmetric),
                other => Err(Error::config(
                    "run.initial_state",
                    format!("unknown state `{other}`; expected first_excited, symmetric, antisymmetric or an amplitude list"),
                )),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// K
    pub temperatures: Vec<f64>,
    pub methods: Vec<Method>,
    pub initial_state: InitialStateConfig,
    pub polaron_full_spectrum: bool,
    pub cross_coherences: bool,
    pub markov_rates: MarkovRates,
    pub seam_epsilon: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            temperatures: vec![1.0, 4.0, 25.0, 50.0],
            methods: vec![Method::Concatenation, Method::Polaron],
            initial_state: InitialStateConfig::Named("first_excited".into()),
            polaron_full_spectrum: false,
            cross_coherences: false,
            markov_rates: MarkovRates::Concatenation,
            seam_epsilon: SEAM_EPSILON,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Fine time step in ps.
    pub fine_step: f64,
    /// Samples on the coarse decay tail.
    pub tail_points: usize,
    /// Samples across the zero-phonon region of a spectrum.
    pub zpl_points: usize,
    /// Half width of the sideband window, µeV.
    pub sideband_half_span_uev: f64,
    /// Sideband frequency step, µeV.
    pub sideband_step_uev: f64,
    /// Time samples of a concurrence trajectory.
    pub trajectory_points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            fine_step: 0.02,
            tail_points: 600,
            zpl_points: 2001,
            sideband_half_span_uev: 6000.0,
            sideband_step_uev: 5.0,
            trajectory_points: 400,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: String,
    pub formats: Vec<OutputFormat>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: "out".into(), formats: vec![OutputFormat::Csv] }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationConfig {
    pub material: MaterialConfig,
    pub chain: ChainConfig,
    pub run: RunConfig,
    pub grids: GridConfig,
    pub output: OutputConfig,
    pub quadrature: QuadratureSpec,
}

fn positive(path: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::config(path, format!("must be > 0, got {x}")))
    }
}

fn non_negative(path: &str, x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::config(path, format!("must be >= 0, got {x}")))
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        let m = &self.material;
        non_negative("material.alpha", m.alpha)?;
        positive("material.omega_c", m.omega_c)?;
        if let Some(l) = m.dot_size {
            positive("material.dot_size", l)?;
        }
        positive("material.sound_speed", m.sound_speed)?;
        non_negative("material.mu", m.mu)?;
        positive("material.wavelength", m.wavelength)?;
        positive("material.gamma_mhz", m.gamma_mhz)?;
        if !(m.refractive_index >= 1.0) {
            return Err(Error::config(
                "material.refractive_index",
                format!("must be >= 1, got {}", m.refractive_index),
            ));
        }
        if self.chain.n_emitters == 0 {
            return Err(Error::config("chain.n_emitters", "must be >= 1"));
        }
        if self.chain.n_emitters > 1 && !self.chain.dicke_limit {
            positive("chain.spacing", self.spacing_nm())?;
        }
        if self.run.temperatures.is_empty() {
            return Err(Error::config("run.temperatures", "at least one temperature is required"));
        }
        for (k, t) in self.run.temperatures.iter().enumerate() {
            non_negative(&format!("run.temperatures[{k}]"), *t)?;
        }
        if self.run.methods.is_empty() {
            return Err(Error::config("run.methods", "at least one method is required"));
        }
        self.run
            .initial_state
            .resolve()?
            .amplitudes(self.chain.n_emitters)
            .map_err(|e| Error::config("run.initial_state", e.to_string()))?;
        positive("run.seam_epsilon", self.run.seam_epsilon)?;
        let g = &self.grids;
        positive("grids.fine_step", g.fine_step)?;
        positive("grids.sideband_half_span_uev", g.sideband_half_span_uev)?;
        positive("grids.sideband_step_uev", g.sideband_step_uev)?;
        if g.tail_points < 2 || g.zpl_points < 3 || g.trajectory_points < 2 {
            return Err(Error::config("grids", "tail_points and trajectory_points must be >= 2, zpl_points >= 3"));
        }
        if self.output.dir.is_empty() {
            return Err(Error::config("output.dir", "must not be empty"));
        }
        self.quadrature.validate().map_err(|e| Error::config("quadrature", e.to_string()))
    }

    pub fn spacing_nm(&self) -> f64 {
        self.chain.spacing.resolve(self.material.wavelength)
    }

    pub fn omega_c(&self) -> Result<f64> {
        match self.material.dot_size {
            Some(l) => cutoff_from_dot_size(l, self.material.sound_speed),
            None => Ok(self.material.omega_c),
        }
    }

    pub fn bath(&self, temperature: f64) -> Result<PhononBathParams> {
        let p = PhononBathParams { alpha: self.material.alpha, omega_c: self.omega_c()?, temperature };
        p.validate()?;
        Ok(p)
    }

    pub fn dephasing(&self) -> DephasingParams {
        DephasingParams { mu: self.material.mu }
    }

    pub fn chain(&self) -> EmitterChain {
        EmitterChain {
            n_emitters: self.chain.n_emitters,
            spacing: self.spacing_nm(),
            wavelength: self.material.wavelength,
            refractive_index: self.material.refractive_index,
            gamma: mhz_to_per_ps(self.material.gamma_mhz),
            dicke_limit: self.chain.dicke_limit,
        }
    }

    pub fn initial_state(&self) -> Result<InitialState> {
        self.run.initial_state.resolve()
    }

    pub fn render(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("", e.to_string()))
    }
}

/// Parse and validate a TOML document; missing keys take their defaults.
pub fn parse_config(text: &str) -> Result<SimulationConfig> {
    let de = toml::Deserializer::parse(text).map_err(|e| Error::config("", e.to_string()))?;
    let cfg: SimulationConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::config(path, e.into_inner().message().trim().to_string())
    })?;
    cfg.validate()?;
    Ok(cfg)
}
