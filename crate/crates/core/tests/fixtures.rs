//! Molecular Hamiltonian fixtures against their recorded provenance.

use std::path::{Path, PathBuf};

use twogate::models::{load_hamiltonian_file, load_meta};
use twogate::pauli::{ground_energy, PauliWord};
use twogate::Error;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/hamiltonians").join(name)
}

#[test]
fn lih_matches_metadata() {
    let path = fixture("lih_12q.txt");
    let h = load_hamiltonian_file(&path).unwrap();
    let meta = load_meta(&path).unwrap().unwrap();
    assert_eq!(h.num_qubits(), 12);
    assert_eq!(meta.qubits, 12);
    assert_eq!(Some(h.terms().len()), meta.num_terms);
    assert!(h.terms().iter().all(|t| t.coefficient.is_finite()));
    let e = ground_energy(&h).unwrap();
    assert!((e - meta.ground_energy).abs() < 1e-8, "{e} vs {}", meta.ground_energy);
    // the Hartree-Fock reference lies above the exact ground state
    assert!(meta.hf_energy.unwrap() > e);
}

#[test]
fn beh2_loads_but_exceeds_dense_limit() {
    let path = fixture("beh2_14q.txt");
    let h = load_hamiltonian_file(&path).unwrap();
    let meta = load_meta(&path).unwrap().unwrap();
    assert_eq!(h.num_qubits(), 14);
    assert_eq!(Some(h.terms().len()), meta.num_terms);
    assert!(h.terms().iter().any(|t| t.word == PauliWord::identity(14)));
    assert!(matches!(ground_energy(&h), Err(Error::Capacity(_))));
}
