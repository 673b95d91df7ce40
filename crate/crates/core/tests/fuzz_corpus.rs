//! Replays the checked-in fuzz corpus through the same round-trip checks the
//! fuzz targets run, so the seeds stay meaningful on a stable toolchain.

use std::path::{Path, PathBuf};

use twogate::experiment::{parse_csv, write_csv, CostSpec, ExperimentConfig};
use twogate::pauli::{format_hamiltonian, parse_hamiltonian};

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus").join(target);
    let mut out: Vec<(PathBuf, String)> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            let text = std::fs::read_to_string(&p).unwrap();
            (p, text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out
}

#[test]
fn hamiltonian_seeds() {
    let mut parsed = 0;
    for (path, text) in seeds("hamiltonian_text") {
        if let Ok(obs) = parse_hamiltonian(&text) {
            assert_eq!(parse_hamiltonian(&format_hamiltonian(&obs)).unwrap(), obs, "{}", path.display());
            parsed += 1;
        }
    }
    assert!(parsed >= 3);
}

#[test]
fn cost_spec_seeds() {
    for (path, text) in seeds("cost_spec") {
        let spec: CostSpec = text.parse().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(spec.to_string().parse::<CostSpec>().unwrap(), spec);
    }
}

#[test]
fn config_seeds() {
    for (path, text) in seeds("experiment_config") {
        let cfg: ExperimentConfig = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        cfg.validate().unwrap();
        let again: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(again, cfg);
    }
}

#[test]
fn csv_seeds() {
    for (path, text) in seeds("trace_csv") {
        let rows = parse_csv(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let mut out = Vec::new();
        write_csv(&rows, &mut out).unwrap();
        assert_eq!(parse_csv(std::str::from_utf8(&out).unwrap()).unwrap(), rows);
    }
}

#[test]
fn malformed_inputs_are_rejected_without_panics() {
    for text in ["", "qubits", "qubits 0", "qubits 2\n1.0 Q1", "qubits 2\ninf ZZ", "qubits 2\n1e308 ZZ\n1e308 ZZ", "1.0 Z"] {
        assert!(parse_hamiltonian(text).is_err(), "{text:?}");
    }
    for text in ["tfim:", "fh:a:b", "fidelity:-1", ":", "file"] {
        assert!(text.parse::<CostSpec>().is_err(), "{text:?}");
    }
    assert!(serde_json::from_str::<ExperimentConfig>(r#"{"cost":"fh","layers":4,"optimizer":"adam","iterations":1,"runs":1}"#).is_err());
    assert!(parse_csv("run_id,update_index\nx,1\n").is_err());
}
