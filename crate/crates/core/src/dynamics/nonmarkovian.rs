use crate::dynamics::density::{DensityMatrix, Layout, HERMITIAN_TOL};
use crate::phonon_bath::PhononContext;
use crate::{Error, Result, C64};

/// Polaron-formation map with a given phonon correlation value `c`.
///
/// Populations are untouched. Inter-emitter coherences ρ_nm (n < m) are
/// multiplied by c², their transposes by the conjugate. With three or more
/// emitters a complex `c` can make the result indefinite; that is rejected.
pub fn nonmarkovian_map(rho0: &DensityMatrix, layout: Layout, c: C64) -> Result<DensityMatrix> {
    rho0.check_support(layout)?;
    let n = layout.n_emitters();
    for e in 1..=n {
        let k = layout.excited(e);
        if rho0.get(0, k).norm() > HERMITIAN_TOL {
            return Err(Error::InvalidState(
                "ground/excited coherences are not supported by the polaron-formation map".into(),
            ));
        }
    }
    let c2 = c * c;
    let mut out = rho0.matrix().clone();
    for a in 1..=n {
        for b in (a + 1)..=n {
            let (i, j) = (layout.excited(a), layout.excited(b));
            out[(i, j)] *= c2;
            out[(j, i)] *= c2.conj();
        }
    }
    DensityMatrix::new(out)
}

/// State after polaron formation has run for time `tau` from `rho0`.
pub fn nonmarkovian_state(
    rho0: &DensityMatrix,
    layout: Layout,
    tau: f64,
    ctx: &PhononContext,
) -> Result<DensityMatrix> {
    if !(tau >= 0.0) {
        return Err(Error::Domain(format!("tau must be >= 0, got {tau}")));
    }
    nonmarkovian_map(rho0, layout, ctx.correlation(tau)?)
}
