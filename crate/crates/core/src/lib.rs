//! Collective photon emission from chains of solid-state emitters that share a
//! bulk photon bath and couple to independent acoustic-phonon baths.
//!
//! Two treatments of the phonons are provided side by side:
//!
//! * **concatenation**: the exact picosecond polaron-formation dynamics of the
//!   independent boson model, stitched onto a markovian master equation that
//!   carries spontaneous emission and pure dephasing;
//! * **polaron**: a master equation in the polaron frame in which the
//!   inter-emitter decay rates and dipole-dipole shifts are renormalized by the
//!   Franck-Condon factor.
//!
//! Units are fixed crate-wide: time in ps, angular frequency in rad/ps,
//! temperature in K, lengths in nm. See [`units`].

// negated comparisons reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod collective_modes;
pub mod config;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod export;
pub mod fit;
pub mod optical_coupling;
pub mod phonon_bath;
pub mod quadrature;
pub mod scenario;
pub mod spectra;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
