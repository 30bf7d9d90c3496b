//! Spectral simulation of resonance cascades ("echo chains") in the linearized
//! two-dimensional inviscid Boussinesq equations around a shear flow with a
//! traveling wave.
//!
//! The equations decouple in the y-frequency `xi`, so everything lives on a
//! one-dimensional lattice of x-frequencies `k` with nearest-neighbour
//! coupling. The crate provides the Fourier symbols, the wave amplitudes
//! `f, g`, the per-mode homogeneous propagator, the coupled lattice, the two
//! reduced two-mode models, and the growth bookkeeping used to compare
//! simulated norm inflation with Gevrey-type bounds.
//!
//! ```
//! use echo_lattice::mode_lattice::{resonance_partition, symbol_delta_t, ModeIndex};
//!
//! let m = ModeIndex::new(2, 10.0);
//! assert_eq!(symbol_delta_t(m, 5.0), 4.0);
//!
//! let p = resonance_partition(100.0, 0.05, 8).unwrap();
//! assert_eq!(p.t(0), 200.0);
//! ```

pub mod coupled;
pub mod error;
pub mod experiment;
pub mod growth;
pub mod homogeneous;
pub mod mode_lattice;
pub mod ode;
pub mod quadrature;
pub mod special;
pub mod toy;
pub mod wave;

pub use error::{Error, Result};
pub use num_complex::Complex64;
