//! Entanglement distribution over thermal millimetre-wave links.
//!
//! [`gaussian`] handles two-mode Gaussian states by covariance matrix,
//! [`fock`] handles non-Gaussian states on a truncated Fock box, [`link`]
//! turns a physical link description into a channel, and [`scenario`] runs
//! parameter sweeps.

pub mod fock;
pub mod gaussian;
pub mod link;
pub mod scenario;
