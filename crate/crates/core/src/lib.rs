//! Simulation of noisy fermionic measurements and N-representability
//! post-processing of the measured reduced density matrices.
//!
//! The pipeline: build a molecular or Hubbard Hamiltonian
//! ([`hamiltonian`]), find its exact ground state ([`state`]), apply
//! single-qubit decoherence ([`noise`]), estimate the Pauli expectations a
//! device would report ([`measurement`]), assemble the 1- and 2-RDMs
//! ([`rdm`]) and project them back towards the N-representable set
//! ([`projection`]). [`experiment`] runs whole sweeps.

pub mod error;
pub mod experiment;
pub mod hamiltonian;
pub mod measurement;
pub mod noise;
pub mod pauli;
pub mod projection;
pub mod rdm;
pub mod state;

pub use error::{Error, Result};
pub use hamiltonian::{hubbard, parse_fcidump, Fcidump, GeometryPoint, MolecularHamiltonian};
pub use measurement::{Expectations, ShotConfig};
pub use noise::{ChannelKind, NoiseChannel};
pub use pauli::{jordan_wigner, FermionTerm, Pauli, PauliString, PauliWord, QubitOperator};
pub use projection::{ProjectionConfig, ProjectionKind, ProjectionOutcome};
pub use rdm::{OneRdm, TwoRdm};
pub use state::{DensityMatrix, StateVector};
