//! Mean-field simulation of the central impact of two identical coherent
//! electrons.
//!
//! Each electron is a minimum-uncertainty Gaussian packet. The pair state is
//! symmetrized according to the spin orientation, the Hamiltonian of the
//! relative motion is averaged over it, and the resulting classical
//! Hamiltonian is integrated for the packet center and momentum. On top of
//! that the crate computes traveltimes, regime classification, quadrupole
//! observables and density maps, and ships brute-force quadrature oracles
//! for every closed form.
//!
//! Atomic units are used throughout.

// `!(x > 0.0)` is deliberate: NaN fails the check too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod numerics;
pub mod meanfield;
pub mod observables;
pub mod oracle;
pub mod pairstate;
pub mod wavepacket;

pub use error::{Error, Result};
