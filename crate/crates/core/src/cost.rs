//! Cost functions and the counting evaluator every optimizer measures through.

use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::models::TargetState;
use crate::pauli::{expectation_exact, expectation_shots, PauliObservable, Shots};
use crate::statevector::StateVector;

/// A cost that is the expectation of a Hermitian operator on the circuit
/// output, hence quadratic in the (possibly unnormalized) state.
#[derive(Debug, Clone)]
pub enum CostFunction {
    Observable(PauliObservable),
    /// `M = I - |phi><phi|`, i.e. the infidelity to the target.
    Infidelity(TargetState),
}

impl CostFunction {
    pub fn num_qubits(&self) -> usize {
        match self {
            CostFunction::Observable(o) => o.num_qubits(),
            CostFunction::Infidelity(t) => t.state().num_qubits(),
        }
    }

    /// `<psi|M|psi>`. For the infidelity this is `<psi|psi> - |<phi|psi>|^2`,
    /// which equals `1 - F` on normalized states.
    pub fn exact(&self, state: &StateVector) -> Result<f64> {
        match self {
            CostFunction::Observable(o) => expectation_exact(o, state),
            CostFunction::Infidelity(t) => {
                let overlap = t.state().inner(state)?;
                Ok(state.norm_sqr() - overlap.norm_sqr())
            }
        }
    }
}

/// Which budget an evaluation is charged to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalKind {
    /// Circuit runs that build a local cost model.
    Tomography,
    /// Circuit runs that record the cost of the current parameters.
    Tracking,
}

/// Wraps a cost with the measurement model and counts every circuit
/// evaluation. In shot mode each evaluation draws fresh shot noise from the
/// evaluator's own stream.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    cost: &'a CostFunction,
    shots: Shots,
    rng: ChaCha20Rng,
    tomography: u64,
    tracking: u64,
}

impl<'a> Evaluator<'a> {
    pub fn new(cost: &'a CostFunction, shots: Shots, rng: ChaCha20Rng) -> Result<Self> {
        if !shots.is_exact() && matches!(cost, CostFunction::Infidelity(_)) {
            return Err(Error::config(
                "the infidelity cost is only available in exact mode",
            ));
        }
        Ok(Self {
            cost,
            shots,
            rng,
            tomography: 0,
            tracking: 0,
        })
    }

    pub fn exact(cost: &'a CostFunction) -> Self {
        use rand::SeedableRng;
        Self {
            cost,
            shots: Shots::Exact,
            rng: ChaCha20Rng::seed_from_u64(0),
            tomography: 0,
            tracking: 0,
        }
    }

    pub fn cost(&self) -> &CostFunction {
        self.cost
    }

    pub fn shots(&self) -> Shots {
        self.shots
    }

    pub fn measure(&mut self, state: &StateVector, kind: EvalKind) -> Result<f64> {
        let value = match (self.shots, self.cost) {
            (Shots::Exact, c) => c.exact(state)?,
            (Shots::PerTerm(n), CostFunction::Observable(o)) => {
                expectation_shots(o, state, n, &mut self.rng)?
            }
            (Shots::PerTerm(_), CostFunction::Infidelity(_)) => {
                unreachable!("rejected at construction")
            }
        };
        match kind {
            EvalKind::Tomography => self.tomography += 1,
            EvalKind::Tracking => self.tracking += 1,
        }
        Ok(value)
    }

    pub fn tomography_evals(&self) -> u64 {
        self.tomography
    }

    pub fn tracking_evals(&self) -> u64 {
        self.tracking
    }

    pub fn total_evals(&self) -> u64 {
        self.tomography + self.tracking
    }
}
