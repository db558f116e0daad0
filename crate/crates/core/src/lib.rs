//! Floquet dynamics of the kicked Harper model (KHM) and the on-resonance
//! double kicked rotor model (DKRM).
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`]: rationals, Farey enumeration, momentum-lattice states and
//!   the momentum-variance observable.
//! * [`model`]: model descriptions shared by dynamics and spectra.
//! * [`kick`] and [`floquet`]: the kick operator and the one-period maps,
//!   plus long-time evolution with adaptive lattice growth.
//! * [`bloch`]: quasi-energy spectra at rational effective Planck constant
//!   and butterfly scans.
//! * [`classical`]: the classical KHM map, the classical limit of the
//!   resonant DKRM and the canonical transformation connecting them.
//! * [`analysis`]: power-law fits, transport classification, box counting
//!   and circular multiset comparisons.
//! * [`symmetry`]: periodicity, reflection and swap checks on butterflies.

pub mod analysis;
pub mod bloch;
pub mod classical;
mod error;
pub mod floquet;
pub mod kick;
pub mod lattice;
pub mod model;
pub mod symmetry;

pub use error::{Error, Result};
pub use num_complex::Complex64;
