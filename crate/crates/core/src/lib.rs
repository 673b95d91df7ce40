//! Sequential quaternion-gate optimizers for parameterized quantum circuits.
//!
//! Fraxis and FQS update one single-qubit gate at a time by minimizing a
//! quadratic model of the cost; TGF and TGFQS update two gates jointly
//! through a quartic model reconstructed from 36 or 100 circuit evaluations.
//! Everything runs on a dense statevector simulator.

pub mod ansatz;
pub mod cost;
pub mod eigen;
pub mod error;
pub mod experiment;
pub mod gates;
pub mod models;
pub mod optimizer;
pub mod pauli;
pub mod single_gate;
pub mod statevector;
pub mod trace;
pub mod two_gate;
mod tomography;

pub use ansatz::{eval_count_audit, run_circuit, run_with_replacements, AnsatzSpec, EvalAudit, GateSite, ParameterSet};
pub use cost::{CostFunction, EvalKind, Evaluator};
pub use error::{Error, Result};
pub use experiment::{compare_report, run_experiment, CostSpec, ExperimentConfig, ExperimentResult};
pub use gates::{GateKind, UnitAxis, UnitQuaternion};
pub use optimizer::{optimize, RunSettings, SweepContext};
pub use pauli::{ground_energy, parse_hamiltonian, PauliObservable, Shots};
pub use statevector::StateVector;
pub use trace::{OptimizerKind, RunTrace, UpdateRecord};
pub use two_gate::{CoeffTensor, MinimizerSettings, PairingStrategy};
