//! Adaptive Dormand-Prince 5(4) integration of time-independent Lindblad
//! generators on small Hilbert spaces.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::dynamics::density::{DensityMatrix, Layout, HERMITIAN_TOL};
use crate::{Error, Result, C64};

pub const MAX_DIM: usize = 32;

/// H (rad/ps) and collapse operators with their rates (ps⁻¹).
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladSpec {
    hamiltonian: DMatrix<C64>,
    collapse_ops: Vec<(DMatrix<C64>, f64)>,
    // H − (i/2) Σ r A†A
    h_eff: DMatrix<C64>,
}

impl LindbladSpec {
    pub fn new(hamiltonian: DMatrix<C64>, collapse_ops: Vec<(DMatrix<C64>, f64)>) -> Result<Self> {
        let d = hamiltonian.nrows();
        if !hamiltonian.is_square() || d == 0 || d > MAX_DIM {
            return Err(Error::Domain(format!(
                "Hamiltonian must be square with dimension 1..={MAX_DIM}, got {}x{}",
                hamiltonian.nrows(),
                hamiltonian.ncols()
            )));
        }
        if (&hamiltonian - hamiltonian.adjoint()).camax() > HERMITIAN_TOL {
            return Err(Error::Domain("Hamiltonian is not Hermitian".into()));
        }
        let mut h_eff = hamiltonian.clone();
        for (k, (a, rate)) in collapse_ops.iter().enumerate() {
            if a.shape() != (d, d) {
                return Err(Error::Domain(format!("collapse operator {k} has the wrong shape")));
            }
            if !(*rate >= 0.0) || !rate.is_finite() {
                return Err(Error::Domain(format!("collapse rate {k} must be >= 0, got {rate}")));
            }
            h_eff -= a.adjoint() * a * C64::new(0.0, 0.5 * rate);
        }
        Ok(LindbladSpec { hamiltonian, collapse_ops, h_eff })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn hamiltonian(&self) -> &DMatrix<C64> {
        &self.hamiltonian
    }

    pub fn collapse_ops(&self) -> &[(DMatrix<C64>, f64)] {
        &self.collapse_ops
    }

    /// L(X) = −i(H_eff X − X H_eff†) + Σ r A X A†; valid for any X, which
    /// is what quantum-regression propagation needs.
    pub fn apply(&self, x: &DMatrix<C64>) -> DMatrix<C64> {
        let minus_i = C64::new(0.0, -1.0);
        let mut out = (&self.h_eff * x - x * self.h_eff.adjoint()) * minus_i;
        for (a, rate) in &self.collapse_ops {
            if *rate > 0.0 {
                out += a * x * a.adjoint() * C64::new(*rate, 0.0);
            }
        }
        out
    }

    /// Two emitters in the product basis, written in the symmetric and
    /// antisymmetric channels σ± = (σ₁ ± σ₂)/√2:
    /// H = ω(σ₊†σ₊ − σ₋†σ₋), decay γ± on σ±, dephasing 2γ_pd on σ±†σ±.
    pub fn two_emitter_diagonal(gamma_plus: f64, gamma_minus: f64, omega: f64, gamma_pd: f64) -> Result<Self> {
        let (s1, s2) = two_qubit_lowering();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let sp = (&s1 + &s2) * C64::new(h, 0.0);
        let sm = (&s1 - &s2) * C64::new(h, 0.0);
        let np = sp.adjoint() * &sp;
        let nm = sm.adjoint() * &sm;
        let ham = (&np - &nm) * C64::new(omega, 0.0);
        LindbladSpec::new(ham, vec![(sp, gamma_plus), (sm, gamma_minus), (np, 2.0 * gamma_pd), (nm, 2.0 * gamma_pd)])
    }

    /// N emitters in the `Sem(N)` layout: nearest-neighbour exchange ω,
    /// collective decay through the full rate matrix `rates` and local
    /// dephasing 2γ_pd on each |e_n⟩⟨e_n|.
    pub fn site_chain(rates: &DMatrix<f64>, omega: f64, gamma_pd: f64) -> Result<Self> {
        let n = rates.nrows();
        if !rates.is_square() || n == 0 || n + 1 > MAX_DIM {
            return Err(Error::Domain("rate matrix must be square with N + 1 <= 32".into()));
        }
        let d = n + 1;
        let mut ham = DMatrix::zeros(d, d);
        for k in 1..n {
            ham[(k, k + 1)] = C64::new(omega, 0.0);
            ham[(k + 1, k)] = C64::new(omega, 0.0);
        }
        // Diagonal form of Σ γ_nm D[σ_m, σ_n†]: one channel per eigenvector.
        let eig = SymmetricEigen::new(rates.clone());
        let scale = rates.amax();
        let mut ops = Vec::with_capacity(2 * n);
        for (k, &rate) in eig.eigenvalues.iter().enumerate() {
            if rate < -1e-12 * scale {
                return Err(Error::Unphysical(format!("rate matrix has negative eigenvalue {rate:e}")));
            }
            let mut a = DMatrix::zeros(d, d);
            for site in 0..n {
                a[(0, site + 1)] = C64::new(eig.eigenvectors[(site, k)], 0.0);
            }
            ops.push((a, rate.max(0.0)));
        }
        for site in 1..=n {
            let mut p = DMatrix::zeros(d, d);
            p[(site, site)] = C64::new(1.0, 0.0);
            ops.push((p, 2.0 * gamma_pd));
        }
        LindbladSpec::new(ham, ops)
    }
}

/// Lowering operators of emitters 1 and 2 in the `TwoQubit` layout.
pub fn two_qubit_lowering() -> (DMatrix<C64>, DMatrix<C64>) {
    let l = Layout::TwoQubit;
    let one = C64::new(1.0, 0.0);
    let mut s1 = DMatrix::zeros(4, 4);
    let mut s2 = DMatrix::zeros(4, 4);
    // |eg⟩ → |gg⟩, |ee⟩ → |ge⟩
    s1[(0, l.excited(1))] = one;
    s1[(l.excited(2), 3)] = one;
    // |ge⟩ → |gg⟩, |ee⟩ → |eg⟩
    s2[(0, l.excited(2))] = one;
    s2[(l.excited(1), 3)] = one;
    (s1, s2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Smallest admissible step relative to the current time scale.
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions { rel_tol: 1e-9, abs_tol: 1e-12, min_step: 1e-10, max_steps: 2_000_000 }
    }
}

// Stage times are not needed: the generator is time-independent.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combo(y: &DMatrix<C64>, h: f64, terms: &[(f64, &DMatrix<C64>)]) -> DMatrix<C64> {
    let mut out = y.clone();
    for (w, k) in terms {
        if *w != 0.0 {
            out += *k * C64::new(h * w, 0.0);
        }
    }
    out
}

/// Propagate an arbitrary operator `x0` given at `times[0]` under the
/// generator, returning it at every entry of `times`.
pub fn propagate(
    x0: &DMatrix<C64>,
    spec: &LindbladSpec,
    times: &[f64],
    opts: &IntegratorOptions,
) -> Result<Vec<DMatrix<C64>>> {
    if x0.shape() != (spec.dim(), spec.dim()) {
        return Err(Error::Domain("initial operator does not match generator dimension".into()));
    }
    if times.is_empty() {
        return Ok(Vec::new());
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("output times must be non-decreasing".into()));
    }
    let mut out = Vec::with_capacity(times.len());
    let mut t = times[0];
    let mut y = x0.clone();
    let mut k1 = spec.apply(&y);
    out.push(y.clone());
    let span = times[times.len() - 1] - t;
    let mut h = if span > 0.0 { (span * 1e-3).min(1.0) } else { 0.0 };
    let mut steps = 0usize;

    for &target in &times[1..] {
        while t < target {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::Integration { t, reason: format!("exceeded {} steps", opts.max_steps) });
            }
            let last = h >= target - t;
            let step = if last { target - t } else { h };
            let k2 = spec.apply(&combo(&y, step, &[(A21, &k1)]));
            let k3 = spec.apply(&combo(&y, step, &[(A31, &k1), (A32, &k2)]));
            let k4 = spec.apply(&combo(&y, step, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = spec.apply(&combo(&y, step, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
            let k6 = spec.apply(&combo(&y, step, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
            let y_new = combo(&y, step, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
            let k7 = spec.apply(&y_new);
            let err_mat = combo(
                &DMatrix::zeros(y.nrows(), y.ncols()),
                step,
                &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
            );
            let mut err: f64 = 0.0;
            for ((e, a), b) in err_mat.iter().zip(y.iter()).zip(y_new.iter()) {
                let sc = opts.abs_tol + opts.rel_tol * a.norm().max(b.norm());
                err = err.max(e.norm() / sc);
            }
            if err <= 1.0 {
                t = if last { target } else { t + step };
                y = y_new;
                k1 = k7;
                let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last || step >= h {
                    h = step * grow;
                }
            } else {
                h = step * (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
                if h < opts.min_step * t.abs().max(1.0) {
                    return Err(Error::Integration { t, reason: format!("step size underflow (h = {h:e})") });
                }
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

/// Density matrices at every sample time, starting from `rho0` at `times[0]`.
pub fn lindblad_evolve(
    rho0: &DensityMatrix,
    spec: &LindbladSpec,
    times: &[f64],
    opts: &IntegratorOptions,
) -> Result<Vec<DensityMatrix>> {
    propagate(rho0.matrix(), spec, times, opts)?
        .into_iter()
        .map(|m| {
            // Re-symmetrize integration noise so downstream eigen-solvers see an exact Hermitian.
            let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
            DensityMatrix::new_unchecked(m)
        })
        .collect()
}
