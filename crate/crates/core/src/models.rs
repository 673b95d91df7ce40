//! Cost-function factories: transverse-field Ising chain, two-site
//! Fermi-Hubbard through Jordan-Wigner, Hamiltonian files, random targets.

use std::path::{Path, PathBuf};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::cost::CostFunction;
use crate::error::{Error, Result};
use crate::optimizer::{stream, STREAM_TARGET};
use crate::pauli::{parse_hamiltonian, Pauli, PauliObservable, PauliString, PauliSum, PauliWord};
use crate::statevector::{StateVector, C64};

/// Coefficients below this magnitude are dropped from mapped Hamiltonians.
pub const DROP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TfimParams {
    pub n: usize,
    pub j: f64,
    pub h: f64,
}

/// `-J Σ Z_i Z_{i+1} - h Σ X_i` on an open chain.
pub fn tfim_hamiltonian(p: &TfimParams) -> Result<PauliObservable> {
    if p.n < 2 {
        return Err(Error::config(format!("TFIM needs at least 2 sites, got {}", p.n)));
    }
    if !p.j.is_finite() || !p.h.is_finite() {
        return Err(Error::config("TFIM couplings must be finite"));
    }
    let mut terms = Vec::with_capacity(2 * p.n - 1);
    for i in 0..p.n - 1 {
        let w = PauliWord::sparse(p.n, &[(i, Pauli::Z), (i + 1, Pauli::Z)])?;
        terms.push(PauliString::new(w, -p.j)?);
    }
    for i in 0..p.n {
        terms.push(PauliString::new(PauliWord::sparse(p.n, &[(i, Pauli::X)])?, -p.h)?);
    }
    PauliObservable::new(p.n, terms)
}

/// Two-site Hubbard model: hopping `t`, on-site repulsion `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FermiHubbardParams {
    pub t: f64,
    pub u: f64,
}

impl Default for FermiHubbardParams {
    fn default() -> Self {
        Self { t: 0.75, u: 0.75 }
    }
}

/// Spin orbitals are ordered site-major, spin-minor:
/// `(site0 up, site0 down, site1 up, site1 down)`.
pub fn fh_orbital(site: usize, spin_down: bool) -> usize {
    2 * site + spin_down as usize
}

/// `a†_j = ½ (X_j + i Y_j) ⊗ Z_{r<j}` on `n` qubits.
pub fn creation_operator(n: usize, j: usize) -> Result<PauliSum> {
    ladder(n, j, 1.0)
}

/// `a_j = ½ (X_j - i Y_j) ⊗ Z_{r<j}` on `n` qubits.
pub fn annihilation_operator(n: usize, j: usize) -> Result<PauliSum> {
    ladder(n, j, -1.0)
}

fn ladder(n: usize, j: usize, sign: f64) -> Result<PauliSum> {
    if j >= n {
        return Err(Error::index(format!("orbital {j} out of range for {n} qubits")));
    }
    let word = |p: Pauli| {
        let ops: Vec<(usize, Pauli)> = (0..j).map(|r| (r, Pauli::Z)).chain([(j, p)]).collect();
        PauliWord::sparse(n, &ops)
    };
    Ok(PauliSum::from_terms(
        n,
        vec![
            (word(Pauli::X)?, C64::new(0.5, 0.0)),
            (word(Pauli::Y)?, C64::new(0.0, 0.5 * sign)),
        ],
    ))
}

/// `-t Σ_{<i,j>,σ} a†_{iσ} a_{jσ} + U Σ_i n_{i↑} n_{i↓}` on a 1x2 lattice,
/// mapped to 4 qubits. The hopping sum runs over both directions of the bond.
pub fn fermi_hubbard_hamiltonian(p: &FermiHubbardParams) -> Result<PauliObservable> {
    if !p.t.is_finite() || !p.u.is_finite() {
        return Err(Error::config("Hubbard parameters must be finite"));
    }
    let n = 4;
    let c = |j| creation_operator(n, j);
    let a = |j| annihilation_operator(n, j);
    let mut h = PauliSum::zero(n);
    for spin_down in [false, true] {
        for (i, j) in [(0, 1), (1, 0)] {
            let hop = c(fh_orbital(i, spin_down))?.mul(&a(fh_orbital(j, spin_down))?);
            h = h.add(&hop.scaled(C64::new(-p.t, 0.0)));
        }
    }
    for site in 0..2 {
        let (up, down) = (fh_orbital(site, false), fh_orbital(site, true));
        let n_up = c(up)?.mul(&a(up)?);
        let n_down = c(down)?.mul(&a(down)?);
        h = h.add(&n_up.mul(&n_down).scaled(C64::new(p.u, 0.0)));
    }
    h.to_observable(DROP_TOL)
}

/// Reads a Hamiltonian text file.
pub fn load_hamiltonian_file(path: impl AsRef<Path>) -> Result<PauliObservable> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_hamiltonian(&text).map_err(|e| match e {
        Error::Parse { line, message } => Error::Format {
            path: path.to_path_buf(),
            message: format!("line {line}: {message}"),
        },
        other => other,
    })
}

/// Provenance written next to a Hamiltonian fixture as `<stem>.meta.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianMeta {
    #[serde(default)]
    pub molecule: Option<String>,
    pub qubits: usize,
    #[serde(default)]
    pub basis: Option<String>,
    #[serde(default)]
    pub mapping: Option<String>,
    #[serde(default)]
    pub bond_length_angstrom: Option<f64>,
    #[serde(default)]
    pub num_terms: Option<usize>,
    #[serde(default)]
    pub hf_energy: Option<f64>,
    pub ground_energy: f64,
}

pub fn meta_path(hamiltonian: &Path) -> PathBuf {
    hamiltonian.with_extension("meta.json")
}

/// Metadata of a Hamiltonian file, if the sidecar exists.
pub fn load_meta(hamiltonian: impl AsRef<Path>) -> Result<Option<HamiltonianMeta>> {
    let path = meta_path(hamiltonian.as_ref());
    if !path.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text)
        .map(Some)
        .map_err(|e| Error::Format {
            path,
            message: e.to_string(),
        })
}

/// A normalized target state for the infidelity cost.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetState {
    state: StateVector,
    seed: Option<u64>,
}

impl TargetState {
    pub fn new(state: StateVector, seed: Option<u64>) -> Result<Self> {
        if (state.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::parameter(format!(
                "target state has norm {}",
                state.norm()
            )));
        }
        Ok(Self { state, seed })
    }

    /// Haar-random state: normalized complex standard Gaussian amplitudes.
    pub fn haar_random(n: usize, seed: u64) -> Result<Self> {
        let mut rng = stream(seed, STREAM_TARGET);
        let dim = 1usize
            .checked_shl(n as u32)
            .filter(|_| n <= crate::statevector::MAX_QUBITS)
            .ok_or_else(|| Error::config(format!("{n} qubits out of range")))?;
        let mut amps: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        Self::new(StateVector::from_amplitudes(amps)?, Some(seed))
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }
}

/// Cost `<psi|(I - |phi><phi|)|psi>`, i.e. `1 - |<phi|psi>|^2` on unit states.
pub fn infidelity_observable(target: TargetState) -> CostFunction {
    CostFunction::Infidelity(target)
}
