//! Hardware-efficient layered ansatz: per layer, one parameterized gate on
//! every qubit followed by an open controlled-Z chain.
//!
//! Gates are numbered `1..=D` (`D = L·n`) layer by layer, top to bottom, which
//! is also their order of application.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{quaternion_matrix, UnitQuaternion};
use crate::statevector::{Mat2, StateVector};
use crate::trace::RunTrace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    num_qubits: usize,
    num_layers: usize,
}

impl AnsatzSpec {
    /// Rejects `n < 2`, `L < 1` and odd gate counts.
    pub fn new(num_qubits: usize, num_layers: usize) -> Result<Self> {
        if num_qubits < 2 || num_qubits > crate::statevector::MAX_QUBITS {
            return Err(Error::config(format!(
                "ansatz needs 2..={} qubits, got {num_qubits}",
                crate::statevector::MAX_QUBITS
            )));
        }
        if num_layers < 1 {
            return Err(Error::config("ansatz needs at least one layer"));
        }
        if (num_qubits * num_layers) % 2 != 0 {
            return Err(Error::config(format!(
                "gate count L·n = {} is odd; pairing needs an even count",
                num_qubits * num_layers
            )));
        }
        Ok(Self {
            num_qubits,
            num_layers,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_layers(&self) -> usize {
        self.num_layers
    }

    /// `D = L·n`.
    pub fn num_gates(&self) -> usize {
        self.num_qubits * self.num_layers
    }

    pub fn site(&self, index: usize) -> Result<GateSite> {
        GateSite::new(index, self)
    }

    /// CZ pairs of one entangling layer: even bonds `(0,1), (2,3), ..` first,
    /// then odd bonds `(1,2), (3,4), ..`. All commute; the order is fixed
    /// for reproducible floating-point traces.
    pub fn entangler(&self) -> Vec<(usize, usize)> {
        let n = self.num_qubits;
        (0..n - 1)
            .step_by(2)
            .chain((1..n - 1).step_by(2))
            .map(|q| (q, q + 1))
            .collect()
    }
}

/// One parameterized gate position, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GateSite {
    index: usize,
    num_qubits: usize,
}

impl GateSite {
    pub fn new(index: usize, spec: &AnsatzSpec) -> Result<Self> {
        if index == 0 || index > spec.num_gates() {
            return Err(Error::index(format!(
                "gate index {index} outside 1..={}",
                spec.num_gates()
            )));
        }
        Ok(Self {
            index,
            num_qubits: spec.num_qubits,
        })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// 1-based layer, `ceil(index / n)`.
    pub fn layer(&self) -> usize {
        self.index.div_ceil(self.num_qubits)
    }

    /// 0-based qubit, `(index - 1) mod n`.
    pub fn qubit(&self) -> usize {
        (self.index - 1) % self.num_qubits
    }
}

/// Quaternions of gates `1..=D`, stored at position `index - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet {
    quats: Vec<UnitQuaternion>,
}

impl ParameterSet {
    pub fn new(spec: &AnsatzSpec, quats: Vec<UnitQuaternion>) -> Result<Self> {
        if quats.len() != spec.num_gates() {
            return Err(Error::shape(format!(
                "{} parameters for {} gates",
                quats.len(),
                spec.num_gates()
            )));
        }
        Ok(Self { quats })
    }

    pub fn identity(spec: &AnsatzSpec) -> Self {
        Self {
            quats: vec![UnitQuaternion::IDENTITY; spec.num_gates()],
        }
    }

    pub fn len(&self) -> usize {
        self.quats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quats.is_empty()
    }

    pub fn get(&self, site: GateSite) -> UnitQuaternion {
        self.quats[site.index - 1]
    }

    pub fn set(&mut self, site: GateSite, q: UnitQuaternion) {
        self.quats[site.index - 1] = q;
    }

    pub fn as_slice(&self) -> &[UnitQuaternion] {
        &self.quats
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Op {
    Gate { index: usize, qubit: usize },
    Cz(usize, usize),
}

/// Flattened operation list of an ansatz, with the position of each gate.
#[derive(Debug, Clone)]
pub(crate) struct Circuit {
    spec: AnsatzSpec,
    ops: Vec<Op>,
    gate_pos: Vec<usize>,
}

impl Circuit {
    pub(crate) fn new(spec: &AnsatzSpec) -> Self {
        let n = spec.num_qubits;
        let entangler = spec.entangler();
        let mut ops = Vec::new();
        let mut gate_pos = Vec::with_capacity(spec.num_gates());
        for layer in 0..spec.num_layers {
            for q in 0..n {
                gate_pos.push(ops.len());
                ops.push(Op::Gate {
                    index: layer * n + q + 1,
                    qubit: q,
                });
            }
            ops.extend(entangler.iter().map(|&(a, b)| Op::Cz(a, b)));
        }
        Self {
            spec: *spec,
            ops,
            gate_pos,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.ops.len()
    }

    pub(crate) fn position(&self, site: GateSite) -> usize {
        self.gate_pos[site.index - 1]
    }

    pub(crate) fn qubits(&self) -> usize {
        self.spec.num_qubits
    }

    /// Applies `ops[range]` with the current parameters.
    pub(crate) fn apply_range(
        &self,
        state: &mut StateVector,
        params: &ParameterSet,
        range: std::ops::Range<usize>,
    ) {
        for op in &self.ops[range] {
            match *op {
                Op::Gate { index, qubit } => state
                    .apply_1q(&quaternion_matrix(params.quats[index - 1].components()), qubit)
                    .expect("qubit in range by construction"),
                Op::Cz(a, b) => state.apply_cz(a, b).expect("distinct qubits by construction"),
            }
        }
    }

    pub(crate) fn apply_op(&self, state: &mut StateVector, op: &Mat2, site: GateSite) {
        state
            .apply_1q(op, site.qubit())
            .expect("qubit in range by construction");
    }
}

fn check_params(spec: &AnsatzSpec, params: &ParameterSet) -> Result<()> {
    if params.len() != spec.num_gates() {
        return Err(Error::shape(format!(
            "{} parameters for {} gates",
            params.len(),
            spec.num_gates()
        )));
    }
    Ok(())
}

/// `|Psi> = U(params) |0..0>`.
pub fn run_circuit(spec: &AnsatzSpec, params: &ParameterSet) -> Result<StateVector> {
    check_params(spec, params)?;
    let circuit = Circuit::new(spec);
    let mut state = StateVector::zero(spec.num_qubits)?;
    circuit.apply_range(&mut state, params, 0..circuit.len());
    Ok(state)
}

/// Runs the circuit with the gates at `replacements` swapped for arbitrary
/// 2x2 operators. Each replacement is applied directly, gate by gate.
pub fn run_with_replacements(
    spec: &AnsatzSpec,
    params: &ParameterSet,
    replacements: &[(GateSite, Mat2)],
) -> Result<StateVector> {
    check_params(spec, params)?;
    if replacements.is_empty() || replacements.len() > 2 {
        return Err(Error::parameter("expected one or two replaced gates"));
    }
    if replacements.len() == 2 && replacements[0].0 == replacements[1].0 {
        return Err(Error::parameter(format!(
            "gate {} replaced twice",
            replacements[0].0.index
        )));
    }
    let mut state = StateVector::zero(spec.num_qubits)?;
    for layer in 0..spec.num_layers {
        for q in 0..spec.num_qubits {
            let index = layer * spec.num_qubits + q + 1;
            let op = replacements
                .iter()
                .find(|(s, _)| s.index == index)
                .map(|(_, m)| *m)
                .unwrap_or_else(|| quaternion_matrix(params.quats[index - 1].components()));
            state.apply_1q(&op, q)?;
        }
        for (a, b) in spec.entangler() {
            state.apply_cz(a, b)?;
        }
    }
    Ok(state)
}

/// Circuit-evaluation tally of a completed run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalAudit {
    pub updates: usize,
    pub gate_updates: usize,
    pub tomography_evals: u64,
    pub tracking_evals: u64,
    pub total_evals: u64,
    /// Tomography evaluations per update (per gate or per pair).
    pub tomography_per_update: f64,
    /// Tomography evaluations per updated gate.
    pub tomography_per_gate: f64,
}

pub fn eval_count_audit(run: &RunTrace) -> EvalAudit {
    let updates = run.records.len();
    let gate_updates: usize = run.records.iter().map(|r| r.sites.len()).sum();
    let tomography_evals: u64 = run.records.iter().map(|r| r.tomography_evals).sum();
    let tracking_evals: u64 =
        run.initial_tracking_evals + run.records.iter().map(|r| r.tracking_evals).sum::<u64>();
    let ratio = |num: u64, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    EvalAudit {
        updates,
        gate_updates,
        tomography_evals,
        tracking_evals,
        total_evals: tomography_evals + tracking_evals,
        tomography_per_update: ratio(tomography_evals, updates),
        tomography_per_gate: ratio(tomography_evals, gate_updates),
    }
}
