//! Sums of decaying exponentials fitted to uniformly sampled data by
//! linear prediction (Prony) followed by linear least squares.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpFit {
    /// Decay rates, fastest first.
    pub rates: Vec<f64>,
    pub amplitudes: Vec<f64>,
    /// RMS residual relative to the RMS of the data.
    pub residual: f64,
}

impl ExpFit {
    pub fn eval(&self, t: f64) -> f64 {
        self.rates.iter().zip(&self.amplitudes).map(|(r, a)| a * (-r * t).exp()).sum()
    }
}

fn lstsq(a: DMatrix<f64>, b: DVector<f64>) -> Result<DVector<f64>> {
    a.svd(true, true).solve(&b, 1e-14).map_err(|e| Error::Fit(format!("least squares failed: {e}")))
}

fn finish(t: &[f64], y: &[f64], mut rates: Vec<f64>) -> Result<ExpFit> {
    rates.sort_by(|a, b| b.total_cmp(a));
    let a = DMatrix::from_fn(t.len(), rates.len(), |i, j| (-rates[j] * t[i]).exp());
    let amps = lstsq(a, DVector::from_column_slice(y))?;
    let fit = ExpFit { rates, amplitudes: amps.iter().copied().collect(), residual: 0.0 };
    let ss: f64 = t.iter().zip(y).map(|(&ti, &yi)| (yi - fit.eval(ti)).powi(2)).sum();
    let norm: f64 = y.iter().map(|v| v * v).sum();
    Ok(ExpFit { residual: (ss / norm).sqrt(), ..fit })
}

/// Fit `a₁e^{−r₁t} + a₂e^{−r₂t}` to samples on a uniform grid.
///
/// Falls back to a single exponential when the data carry only one rate.
pub fn fit_biexponential(t: &[f64], y: &[f64]) -> Result<ExpFit> {
    if t.len() != y.len() || t.len() < 5 {
        return Err(Error::Fit("need at least 5 samples of matching length".into()));
    }
    let dt = t[1] - t[0];
    if !(dt > 0.0) || t.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt) {
        return Err(Error::Fit("samples must be uniformly spaced".into()));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Fit("samples must be finite".into()));
    }
    let m = y.len() - 2;
    // y_{k+2} = p₁ y_{k+1} + p₂ y_k
    let a = DMatrix::from_fn(m, 2, |k, j| if j == 0 { y[k + 1] } else { y[k] });
    let b = DVector::from_fn(m, |k, _| y[k + 2]);
    let sv = a.clone().svd(false, false).singular_values;
    if sv[1] <= 1e-10 * sv[0] {
        let ratio: f64 =
            y[1..].iter().zip(y).map(|(n, p)| n * p).sum::<f64>() / y[..y.len() - 1].iter().map(|p| p * p).sum::<f64>();
        if !(ratio > 0.0) {
            return Err(Error::Fit("data do not decay monotonically".into()));
        }
        return finish(t, y, vec![-ratio.ln() / dt]);
    }
    let p = lstsq(a, b)?;
    let disc = p[0] * p[0] + 4.0 * p[1];
    if disc < 0.0 {
        return Err(Error::Fit("oscillatory data: characteristic roots are complex".into()));
    }
    let s = disc.sqrt();
    let roots = [0.5 * (p[0] + s), 0.5 * (p[0] - s)];
    if roots.iter().any(|z| !(*z > 0.0)) {
        return Err(Error::Fit(format!("non-positive characteristic root in {roots:?}")));
    }
    finish(t, y, roots.iter().map(|z| -z.ln() / dt).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_biexponential() {
        let t: Vec<f64> = (0..200).map(|k| k as f64 * 20.0).collect();
        let y: Vec<f64> = t.iter().map(|&x| 0.5 * (-1.6e-3 * x).exp() + 0.5 * (-1.2e-4 * x).exp()).collect();
        let f = fit_biexponential(&t, &y).unwrap();
        assert!((f.rates[0] - 1.6e-3).abs() < 1e-12);
        assert!((f.rates[1] - 1.2e-4).abs() < 1e-12);
        assert!((f.amplitudes[0] - 0.5).abs() < 1e-9);
        assert!(f.residual < 1e-10);
    }

    #[test]
    fn single_exponential_fallback() {
        let t: Vec<f64> = (0..50).map(|k| k as f64).collect();
        let y: Vec<f64> = t.iter().map(|&x| 2.0 * (-0.05 * x).exp()).collect();
        let f = fit_biexponential(&t, &y).unwrap();
        assert_eq!(f.rates.len(), 1);
        assert!((f.rates[0] - 0.05).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_biexponential(&[0.0, 1.0], &[1.0, 0.5]).is_err());
        let t = [0.0, 1.0, 3.0, 4.0, 5.0];
        assert!(fit_biexponential(&t, &[1.0; 5]).is_err());
        let t: Vec<f64> = (0..40).map(|k| k as f64 * 0.3).collect();
        let y: Vec<f64> = t.iter().map(|&x| (-0.1 * x).exp() * x.cos()).collect();
        assert!(fit_biexponential(&t, &y).is_err());
    }
}
