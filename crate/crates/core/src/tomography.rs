//! Insertion-state construction shared by the single- and two-gate builders.
//!
//! The circuit output is linear in the operator placed at each replaced site,
//! so the output for any insertion `Σ c_μ ς_μ` is the same combination of the
//! outputs with pure basis insertions. Each tomography value is still one
//! measurement of one output state; only the simulation of the unchanged
//! circuit segments is shared.

use crate::ansatz::{Circuit, GateSite, ParameterSet};
use crate::gates::{GateKind, Insertion};
use crate::statevector::{StateVector, C64};

/// Output states with local basis operator `a` at `site`, for every `a`.
pub(crate) fn single_site_outputs(
    circuit: &Circuit,
    params: &ParameterSet,
    site: GateSite,
    kind: GateKind,
) -> Vec<StateVector> {
    let pos = circuit.position(site);
    let mut prefix = StateVector::zero(circuit.qubits()).expect("valid register");
    circuit.apply_range(&mut prefix, params, 0..pos);
    (0..kind.dim())
        .map(|a| {
            let mut s = prefix.clone();
            circuit.apply_op(&mut s, &Insertion::Basis(a).matrix(kind), site);
            circuit.apply_range(&mut s, params, pos + 1..circuit.len());
            s
        })
        .collect()
}

/// Output states `[a][b]` with basis `a` at the later site `late` and basis
/// `b` at the earlier site `early`.
pub(crate) fn pair_outputs(
    circuit: &Circuit,
    params: &ParameterSet,
    late: GateSite,
    early: GateSite,
    kind: GateKind,
) -> Vec<Vec<StateVector>> {
    let (pe, pl) = (circuit.position(early), circuit.position(late));
    debug_assert!(pe < pl);
    let mut prefix = StateVector::zero(circuit.qubits()).expect("valid register");
    circuit.apply_range(&mut prefix, params, 0..pe);
    let middles: Vec<StateVector> = (0..kind.dim())
        .map(|b| {
            let mut s = prefix.clone();
            circuit.apply_op(&mut s, &Insertion::Basis(b).matrix(kind), early);
            circuit.apply_range(&mut s, params, pe + 1..pl);
            s
        })
        .collect();
    (0..kind.dim())
        .map(|a| {
            let op = Insertion::Basis(a).matrix(kind);
            middles
                .iter()
                .map(|m| {
                    let mut s = m.clone();
                    circuit.apply_op(&mut s, &op, late);
                    circuit.apply_range(&mut s, params, pl + 1..circuit.len());
                    s
                })
                .collect()
        })
        .collect()
}

/// `Σ w_i s_i` over the non-zero weights.
pub(crate) fn combine(terms: &[(&StateVector, f64)]) -> StateVector {
    let mut out = terms[0].0.zeros_like();
    for (s, w) in terms {
        if *w != 0.0 {
            out.axpy(C64::new(*w, 0.0), s).expect("same register");
        }
    }
    out
}

/// Output state for one insertion at a single site.
pub(crate) fn single_insertion_state(outputs: &[StateVector], ins: Insertion) -> StateVector {
    let c = ins.local_coeffs();
    let terms: Vec<(&StateVector, f64)> = outputs.iter().zip(c).collect();
    combine(&terms)
}

/// Output state for insertions `(late_ins, early_ins)` at a pair of sites.
pub(crate) fn pair_insertion_state(
    outputs: &[Vec<StateVector>],
    late_ins: Insertion,
    early_ins: Insertion,
) -> StateVector {
    let (cl, ce) = (late_ins.local_coeffs(), early_ins.local_coeffs());
    let mut terms = Vec::with_capacity(4);
    for (a, row) in outputs.iter().enumerate() {
        for (b, s) in row.iter().enumerate() {
            let w = cl[a] * ce[b];
            if w != 0.0 {
                terms.push((s, w));
            }
        }
    }
    combine(&terms)
}
