"""Regenerate the molecular Hamiltonian fixtures.

Builds STO-3G qubit Hamiltonians (Jordan-Wigner, interleaved spin orbitals:
orbital 0 up, orbital 0 down, orbital 1 up, ...) with pyscf + openfermion and
writes them in the plain-text term format read by `load_hamiltonian_file`.

    python3 generate.py

Requires: pyscf, openfermion, scipy.
"""

import json
import sys

import numpy as np
import openfermion as of
import scipy.sparse.linalg as sla
from pyscf import ao2mo, fci, gto, scf

MOLECULES = {
    "lih_12q": {
        "atom": "Li 0 0 0; H 0 0 1.57",
        "bond_length_angstrom": 1.57,
    },
    "beh2_14q": {
        "atom": "Be 0 0 0; H 0 0 -1.33; H 0 0 1.33",
        "bond_length_angstrom": 1.33,
    },
}


def qubit_hamiltonian(atom):
    mol = gto.M(atom=atom, basis="sto-3g", unit="Angstrom", verbose=0)
    mf = scf.RHF(mol).run()
    c = mf.mo_coeff
    norb = c.shape[1]
    h1 = c.T @ mf.get_hcore() @ c
    eri = ao2mo.restore(1, ao2mo.kernel(mol, c), norb)
    two = np.asarray(eri.transpose(0, 2, 3, 1), order="C")
    one_so, two_so = of.chem.molecular_data.spinorb_from_spatial(h1, two)
    op = of.InteractionOperator(mol.energy_nuc(), one_so, 0.5 * two_so)
    qop = of.jordan_wigner(op)
    qop.compress(1e-12)
    e_fci = fci.FCI(mf).kernel()[0]
    return mol, mf, qop, 2 * norb, e_fci


def pauli_word(term, n):
    word = ["I"] * n
    for q, p in term:
        word[q] = p
    return "".join(word)


def main():
    for name, spec in MOLECULES.items():
        mol, mf, qop, n, e_fci = qubit_hamiltonian(spec["atom"])
        sparse = of.get_sparse_operator(qop, n_qubits=n)
        e_min = float(sla.eigsh(sparse, k=1, which="SA")[0][0])
        lines = [
            f"# {name}: STO-3G, Jordan-Wigner, bond length {spec['bond_length_angstrom']} A",
            f"qubits {n}",
        ]
        for term, coeff in sorted(qop.terms.items()):
            assert abs(coeff.imag) < 1e-12
            lines.append(f"{coeff.real:.17g} {pauli_word(term, n)}")
        with open(f"{name}.txt", "w") as f:
            f.write("\n".join(lines) + "\n")
        meta = {
            "molecule": name.split("_")[0].upper().replace("BEH2", "BeH2").replace("LIH", "LiH"),
            "qubits": n,
            "basis": "STO-3G",
            "mapping": "jordan_wigner",
            "orbital_order": "interleaved (orbital-major, spin-minor)",
            "bond_length_angstrom": spec["bond_length_angstrom"],
            "geometry": spec["atom"],
            "num_terms": len(qop.terms),
            "hf_energy": float(mf.e_tot),
            "fci_energy": float(e_fci),
            "ground_energy": e_min,
            "generator": "fixtures/hamiltonians/generate.py (pyscf + openfermion)",
        }
        with open(f"{name}.meta.json", "w") as f:
            json.dump(meta, f, indent=2)
            f.write("\n")
        print(name, n, len(qop.terms), mf.e_tot, e_fci, e_min, file=sys.stderr)


if __name__ == "__main__":
    main()
