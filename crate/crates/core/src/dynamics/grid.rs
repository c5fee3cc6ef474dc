use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default step of the picosecond window that resolves φ(τ).
pub const FINE_STEP: f64 = 0.02;
/// Default number of logarithmically spaced tail points.
pub const TAIL_POINTS: usize = 600;

/// Sample times in ps: a uniform fine window starting at 0, then a
/// logarithmic tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    times: Vec<f64>,
    fine_len: usize,
    fine_step: f64,
}

impl TimeGrid {
    /// Fine spacing `fine_step` over `[0, window]`, then `tail_points`
    /// log-spaced samples out to `horizon`.
    pub fn two_scale(window: f64, fine_step: f64, horizon: f64, tail_points: usize) -> Result<Self> {
        if !(fine_step > 0.0 && window >= fine_step) {
            return Err(Error::Domain(format!(
                "fine window {window} ps must cover at least one step of {fine_step} ps"
            )));
        }
        let steps = (window / fine_step).ceil() as usize;
        let mut times: Vec<f64> = (0..=steps).map(|k| k as f64 * fine_step).collect();
        let fine_len = times.len();
        let start = times[fine_len - 1];
        if horizon > start && tail_points > 0 {
            let ratio = (horizon / start).ln() / tail_points as f64;
            times.extend((1..=tail_points).map(|k| start * (ratio * k as f64).exp()));
            *times.last_mut().expect("non-empty") = horizon;
        }
        Ok(TimeGrid { times, fine_len, fine_step })
    }

    /// Window max(5 τ_P, 10 ps), tail to 12/Γ_min.
    pub fn for_decay(polaron_time: f64, min_rate: f64) -> Result<Self> {
        if !(min_rate > 0.0) {
            return Err(Error::Domain(format!("minimum decay rate must be > 0, got {min_rate}")));
        }
        let window = (5.0 * polaron_time).max(10.0);
        TimeGrid::two_scale(window, FINE_STEP, 12.0 / min_rate, TAIL_POINTS)
    }

    /// Uniform samples `0, dt, …, n·dt`.
    pub fn uniform(step: f64, n: usize) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::Domain("grid step must be > 0".into()));
        }
        Ok(TimeGrid { times: (0..=n).map(|k| k as f64 * step).collect(), fine_len: n + 1, fine_step: step })
    }

    /// Arbitrary increasing, non-negative sample times.
    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times[0] < 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("times must be non-negative and strictly increasing".into()));
        }
        let fine_step = if times.len() > 1 { times[1] - times[0] } else { 0.0 };
        let fine_len = times
            .windows(2)
            .position(|w| ((w[1] - w[0]) - fine_step).abs() > 1e-9 * fine_step.max(1.0))
            .map_or(times.len(), |k| k + 1);
        Ok(TimeGrid { times, fine_len, fine_step })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Uniform leading part of the grid.
    pub fn fine(&self) -> &[f64] {
        &self.times[..self.fine_len]
    }

    pub fn fine_step(&self) -> f64 {
        self.fine_step
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}
