//! Simulation and verification toolkit for linear-optical quantum computing.
//!
//! States live in a sparse Fock representation ([`fock`]), evolve under linear
//! optical networks ([`optics`]) and are measured by ideal or lossy photon
//! counters ([`measure`]). On top of that sit the probabilistic gate
//! constructions ([`gates`]), teleportation ([`teleport`]), parity and
//! redundant encodings ([`encoding`]), cluster-state resources ([`cluster`]),
//! single-photon source models ([`sources`]) and process tomography
//! ([`tomography`]).

pub mod cluster;
pub mod encoding;
pub mod exec;
pub mod fock;
pub mod gates;
pub mod linalg;
pub mod measure;
pub mod optics;
pub mod sources;
pub mod teleport;
pub mod tomography;

pub use num_complex::Complex64 as C64;

pub use exec::Exec;
pub use fock::{FockError, OccupationVector, PureState, StateEnsemble};
pub use optics::{Element, ModeUnitary};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
