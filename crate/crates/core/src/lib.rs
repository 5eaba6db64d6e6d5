//! Particle trapping, bound states and scattering on tight-binding networks.
//!
//! The crate is `no_std` (it needs `alloc`). All physics is carried by the
//! single-particle Hamiltonian in the site basis, a real symmetric matrix.
//!
//! - [`graph`]: networks, Hamiltonian assembly, partitions into subgraphs.
//! - [`pi_lattice`]: the pi-shaped lattice and its site naming.
//! - [`spectra`]: eigenmodes, wave nodes, trapped-mode certificates.
//! - [`dynamics`]: spectral time evolution and survival probabilities.
//! - [`bethe`]: exact resonant and evanescent bound states of the pi-lattice.
//! - [`scatter`]: transmission spectra, their zeros, and a numerical
//!   scattering oracle.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bethe;
pub mod dynamics;
pub mod graph;
pub mod linalg;
pub mod pi_lattice;
pub mod roots;
pub mod scatter;
pub mod spectra;

pub use num_complex::Complex64;

pub use graph::{GraphError, GraphSpec, Hopping, LatticeGraph, Partition};
pub use pi_lattice::{build_pi_lattice, PiLatticeSpec, PiSite, PiSites};
pub use spectra::{EigenMode, TrapCriterion, TrappingCertificate};
