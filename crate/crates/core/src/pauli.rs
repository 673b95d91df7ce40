//! Pauli-string observables: exact and finite-shot expectation values, dense
//! matrices, ground energies, and the plain-text Hamiltonian format.
//!
//! A string is stored as two bit masks over basis indices: bit `n-1-q` of
//! `x` is set when qubit `q` carries X or Y, of `z` when it carries Z or Y.

use std::collections::HashMap;
use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::{StateVector, C64, MAX_QUBITS, ONE, ZERO};

/// Largest register for which dense matrices are built.
pub const MAX_DENSE_QUBITS: usize = 12;

/// Largest register for which [`ground_energy`] solves densely; above it a
/// Lanczos iteration on the matrix-free operator is used.
const DENSE_EIGEN_QUBITS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Operator part of a Pauli string, without coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliWord {
    num_qubits: usize,
    x: u64,
    z: u64,
}

impl PauliWord {
    pub fn identity(num_qubits: usize) -> Self {
        Self { num_qubits, x: 0, z: 0 }
    }

    pub fn from_ops(ops: &[Pauli]) -> Result<Self> {
        let n = ops.len();
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::shape(format!("Pauli word length {n} unsupported")));
        }
        let mut w = Self::identity(n);
        for (q, p) in ops.iter().enumerate() {
            w = w.with(q, *p);
        }
        Ok(w)
    }

    /// Single-qubit operators at given positions, identity elsewhere.
    pub fn sparse(num_qubits: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut w = Self::identity(num_qubits);
        for &(q, p) in ops {
            if q >= num_qubits {
                return Err(Error::index(format!("qubit {q} out of range")));
            }
            w = w.with(q, p);
        }
        Ok(w)
    }

    fn bit(&self, q: usize) -> u64 {
        1 << (self.num_qubits - 1 - q)
    }

    fn with(mut self, q: usize, p: Pauli) -> Self {
        let b = self.bit(q);
        let (x, z) = p.bits();
        self.x = if x { self.x | b } else { self.x & !b };
        self.z = if z { self.z | b } else { self.z & !b };
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn op(&self, q: usize) -> Pauli {
        let b = self.bit(q);
        Pauli::from_bits(self.x & b != 0, self.z & b != 0)
    }

    pub fn ops(&self) -> Vec<Pauli> {
        (0..self.num_qubits).map(|q| self.op(q)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    fn num_y(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// `i^{#Y}`: the word equals this phase times `X^x Z^z`.
    fn phase(&self) -> C64 {
        match self.num_y() % 4 {
            0 => ONE,
            1 => C64::new(0.0, 1.0),
            2 => -ONE,
            _ => C64::new(0.0, -1.0),
        }
    }

    /// `<psi| P |psi>` without normalization. Real for Hermitian `P`.
    pub fn expectation(&self, amps: &[C64]) -> C64 {
        let (x, z) = (self.x as usize, self.z as usize);
        let mut acc = ZERO;
        for (j, a) in amps.iter().enumerate() {
            let v = amps[j ^ x].conj() * a;
            if (j & z).count_ones() % 2 == 1 {
                acc -= v;
            } else {
                acc += v;
            }
        }
        acc * self.phase()
    }

    /// `out += coeff * P |psi>`.
    pub fn apply_add(&self, coeff: C64, amps: &[C64], out: &mut [C64]) {
        let (x, z) = (self.x as usize, self.z as usize);
        let c = coeff * self.phase();
        for (j, a) in amps.iter().enumerate() {
            let sign = if (j & z).count_ones() % 2 == 1 { -c } else { c };
            out[j ^ x] += sign * a;
        }
    }

    /// Product `self * other = phase * word`.
    pub fn mul(&self, other: &PauliWord) -> (C64, PauliWord) {
        debug_assert_eq!(self.num_qubits, other.num_qubits);
        let mut phase = ONE;
        let mut out = PauliWord::identity(self.num_qubits);
        for q in 0..self.num_qubits {
            let (ph, p) = single_product(self.op(q), other.op(q));
            phase *= ph;
            out = out.with(q, p);
        }
        (phase, out)
    }
}

fn single_product(a: Pauli, b: Pauli) -> (C64, Pauli) {
    use Pauli::*;
    let i = C64::new(0.0, 1.0);
    match (a, b) {
        (I, p) | (p, I) => (ONE, p),
        (X, X) | (Y, Y) | (Z, Z) => (ONE, I),
        (X, Y) => (i, Z),
        (Y, X) => (-i, Z),
        (Y, Z) => (i, X),
        (Z, Y) => (-i, X),
        (Z, X) => (i, Y),
        (X, Z) => (-i, Y),
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.ops() {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliString {
    pub word: PauliWord,
    pub coefficient: f64,
}

impl PauliString {
    pub fn new(word: PauliWord, coefficient: f64) -> Result<Self> {
        if !coefficient.is_finite() {
            return Err(Error::parameter("Pauli coefficient must be finite"));
        }
        Ok(Self { word, coefficient })
    }
}

/// Real-weighted sum of Pauli strings over a fixed register; Hermitian by
/// construction. Duplicate words are merged in order of first appearance.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliObservable {
    num_qubits: usize,
    terms: Vec<PauliString>,
}

impl PauliObservable {
    pub fn new(num_qubits: usize, terms: impl IntoIterator<Item = PauliString>) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::config(format!(
                "observable on {num_qubits} qubits outside 1..={MAX_QUBITS}"
            )));
        }
        let mut merged: Vec<PauliString> = Vec::new();
        let mut index: HashMap<PauliWord, usize> = HashMap::new();
        for t in terms {
            if t.word.num_qubits != num_qubits {
                return Err(Error::shape(format!(
                    "term {} has {} qubits, observable has {num_qubits}",
                    t.word, t.word.num_qubits
                )));
            }
            if !t.coefficient.is_finite() {
                return Err(Error::parameter("Pauli coefficient must be finite"));
            }
            match index.get(&t.word) {
                Some(&i) => merged[i].coefficient += t.coefficient,
                None => {
                    index.insert(t.word, merged.len());
                    merged.push(t);
                }
            }
        }
        if merged.iter().any(|t| !t.coefficient.is_finite()) {
            return Err(Error::parameter("merged Pauli coefficient overflows"));
        }
        Ok(Self {
            num_qubits,
            terms: merged,
        })
    }

    /// Convenience constructor from `(coefficient, "XZI..")` pairs.
    pub fn from_labels(num_qubits: usize, labels: &[(f64, &str)]) -> Result<Self> {
        let terms = labels
            .iter()
            .map(|(c, w)| {
                let ops = w
                    .chars()
                    .map(|ch| {
                        Pauli::from_char(ch)
                            .ok_or_else(|| Error::parameter(format!("bad Pauli letter {ch:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                PauliString::new(PauliWord::from_ops(&ops)?, *c)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(num_qubits, terms)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    /// Removes terms with `|c| < tol`.
    pub fn compressed(mut self, tol: f64) -> Self {
        self.terms.retain(|t| t.coefficient.abs() >= tol);
        self
    }

    fn check_state(&self, state: &StateVector) -> Result<()> {
        if state.num_qubits() != self.num_qubits {
            return Err(Error::shape(format!(
                "{}-qubit observable on {}-qubit state",
                self.num_qubits,
                state.num_qubits()
            )));
        }
        Ok(())
    }

    /// `H |psi>`.
    pub fn apply(&self, amps: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|z| *z = ZERO);
        for t in &self.terms {
            t.word.apply_add(C64::new(t.coefficient, 0.0), amps, out);
        }
    }
}

/// Residual imaginary parts above this abort an expectation evaluation.
const IMAG_TOL: f64 = 1e-10;

/// `<psi| M |psi>` (no normalization, so it stays quadratic in `psi`).
pub fn expectation_exact(obs: &PauliObservable, state: &StateVector) -> Result<f64> {
    obs.check_state(state)?;
    let mut acc = ZERO;
    for t in &obs.terms {
        acc += t.word.expectation(state.amplitudes()) * t.coefficient;
    }
    let scale = state.norm_sqr().max(1.0) * obs.terms.iter().map(|t| t.coefficient.abs()).sum::<f64>().max(1.0);
    assert!(
        acc.im.abs() <= IMAG_TOL * scale,
        "non-real expectation {acc} of a Hermitian observable"
    );
    Ok(acc.re)
}

/// Number of measurement shots per Pauli term, or exact expectation values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shots {
    Exact,
    PerTerm(u32),
}

impl Shots {
    pub fn per_term(n: u64) -> Result<Self> {
        if n == 0 || n >= 1 << 31 {
            return Err(Error::config(format!("shot count {n} outside [1, 2^31)")));
        }
        Ok(Shots::PerTerm(n as u32))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Shots::Exact)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotConfig {
    pub shots: Shots,
    pub rng_seed: u64,
}

/// Finite-shot estimate: every non-identity term is measured independently
/// with `shots` ±1 outcomes drawn from `p(+1) = (1 + <P>) / 2`.
pub fn expectation_shots<R: Rng + ?Sized>(
    obs: &PauliObservable,
    state: &StateVector,
    shots: u32,
    rng: &mut R,
) -> Result<f64> {
    obs.check_state(state)?;
    if shots == 0 {
        return Err(Error::config("shot count must be positive"));
    }
    let norm2 = state.norm_sqr();
    let mut acc = 0.0;
    for t in &obs.terms {
        if t.word.is_identity() {
            acc += t.coefficient;
            continue;
        }
        let exact = t.word.expectation(state.amplitudes()).re / norm2;
        let p = ((1.0 + exact) / 2.0).clamp(0.0, 1.0);
        let plus = Binomial::new(shots as u64, p)
            .expect("probability clamped to [0, 1]")
            .sample(rng);
        let mean = (2.0 * plus as f64 - shots as f64) / shots as f64;
        acc += t.coefficient * mean;
    }
    Ok(acc * norm2)
}

/// Dense `2^n x 2^n` matrix of the observable.
pub fn to_dense(obs: &PauliObservable) -> Result<DMatrix<C64>> {
    if obs.num_qubits > MAX_DENSE_QUBITS {
        return Err(Error::capacity(format!(
            "dense matrix of {} qubits exceeds limit {MAX_DENSE_QUBITS}",
            obs.num_qubits
        )));
    }
    let dim = 1usize << obs.num_qubits;
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for t in &obs.terms {
        let (x, z) = (t.word.x as usize, t.word.z as usize);
        let c = t.word.phase() * t.coefficient;
        for col in 0..dim {
            let sign = if (col & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            m[(col ^ x, col)] += c * sign;
        }
    }
    Ok(m)
}

/// Minimum eigenvalue. Dense Hermitian solve up to 8 qubits, Lanczos with
/// full reorthogonalization up to 12; larger registers are rejected.
pub fn ground_energy(obs: &PauliObservable) -> Result<f64> {
    let n = obs.num_qubits;
    if n > MAX_DENSE_QUBITS {
        return Err(Error::capacity(format!(
            "ground energy of {n} qubits exceeds limit {MAX_DENSE_QUBITS}"
        )));
    }
    if n <= DENSE_EIGEN_QUBITS {
        return Ok(dense_min_eigenvalue(&to_dense(obs)?));
    }
    Ok(crate::eigen::lanczos_min(1 << n, |x, y| obs.apply(x, y), 1e-11))
}

pub(crate) fn dense_min_eigenvalue(m: &DMatrix<C64>) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Parses the Hamiltonian text format:
///
/// ```text
/// # comment
/// qubits 2
/// -0.5 ZZ
/// -0.5 XI
/// ```
///
/// The first non-comment line declares the qubit count; each following
/// non-blank line is `<coefficient> <pauli-word>` with a word over `IXYZ` of
/// exactly that length. Duplicate words are merged.
pub fn parse_hamiltonian(text: &str) -> Result<PauliObservable> {
    let mut num_qubits: Option<usize> = None;
    let mut terms = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let (first, second) = (fields.next(), fields.next());
        if fields.next().is_some() {
            return Err(err(format!("expected two fields, got {line:?}")));
        }
        let (first, second) = match (first, second) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(err(format!("expected two fields, got {line:?}"))),
        };
        let Some(n) = num_qubits else {
            if first != "qubits" {
                return Err(err("first line must be `qubits <n>`".into()));
            }
            let n: usize = second
                .parse()
                .map_err(|_| err(format!("bad qubit count {second:?}")))?;
            if n == 0 || n > MAX_QUBITS {
                return Err(err(format!("qubit count {n} outside 1..={MAX_QUBITS}")));
            }
            num_qubits = Some(n);
            continue;
        };
        let coefficient: f64 = first
            .parse()
            .map_err(|_| err(format!("bad coefficient {first:?}")))?;
        if !coefficient.is_finite() {
            return Err(err(format!("non-finite coefficient {first:?}")));
        }
        if second.chars().count() != n {
            return Err(err(format!(
                "Pauli word {second:?} has length {}, expected {n}",
                second.chars().count()
            )));
        }
        let ops = second
            .chars()
            .map(|c| Pauli::from_char(c).ok_or_else(|| err(format!("bad Pauli letter {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let word = PauliWord::from_ops(&ops).map_err(|e| err(e.to_string()))?;
        terms.push(PauliString { word, coefficient });
    }
    let n = num_qubits.ok_or(Error::Parse {
        line: text.lines().count().max(1),
        message: "missing `qubits <n>` header".into(),
    })?;
    PauliObservable::new(n, terms)
}

/// Inverse of [`parse_hamiltonian`].
pub fn format_hamiltonian(obs: &PauliObservable) -> String {
    let mut out = format!("qubits {}\n", obs.num_qubits);
    for t in &obs.terms {
        out.push_str(&format!("{:?} {}\n", t.coefficient, t.word));
    }
    out
}

/// Complex-weighted Pauli sum used to build mapped fermionic operators.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    num_qubits: usize,
    terms: Vec<(PauliWord, C64)>,
}

impl PauliSum {
    pub fn zero(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            terms: Vec::new(),
        }
    }

    pub fn from_terms(num_qubits: usize, terms: Vec<(PauliWord, C64)>) -> Self {
        let mut s = Self::zero(num_qubits);
        for (w, c) in terms {
            s.add_term(w, c);
        }
        s
    }

    pub fn add_term(&mut self, word: PauliWord, coeff: C64) {
        match self.terms.iter_mut().find(|(w, _)| *w == word) {
            Some((_, c)) => *c += coeff,
            None => self.terms.push((word, coeff)),
        }
    }

    pub fn terms(&self) -> &[(PauliWord, C64)] {
        &self.terms
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self {
            num_qubits: self.num_qubits,
            terms: self.terms.iter().map(|(w, c)| (*w, c * s)).collect(),
        }
    }

    pub fn add(&self, other: &PauliSum) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(*w, *c);
        }
        out
    }

    pub fn mul(&self, other: &PauliSum) -> Self {
        let mut out = Self::zero(self.num_qubits);
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let (phase, w) = wa.mul(wb);
                out.add_term(w, ca * cb * phase);
            }
        }
        out
    }

    /// Hermitian conjugate; Pauli words are Hermitian, so only the
    /// coefficients conjugate.
    pub fn adjoint(&self) -> Self {
        Self {
            num_qubits: self.num_qubits,
            terms: self.terms.iter().map(|(w, c)| (*w, c.conj())).collect(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let dim = 1usize << self.num_qubits;
        let mut m = DMatrix::<C64>::zeros(dim, dim);
        for (w, c) in &self.terms {
            let (x, z) = (w.x as usize, w.z as usize);
            let c = w.phase() * c;
            for col in 0..dim {
                let sign = if (col & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                m[(col ^ x, col)] += c * sign;
            }
        }
        m
    }

    /// Real observable after dropping `|c| < tol`; fails if any retained
    /// coefficient has an imaginary part above `tol`.
    pub fn to_observable(&self, tol: f64) -> Result<PauliObservable> {
        let mut terms = Vec::new();
        for (w, c) in &self.terms {
            if c.norm() < tol {
                continue;
            }
            if c.im.abs() > tol {
                return Err(Error::parameter(format!(
                    "non-Hermitian term {w} with coefficient {c}"
                )));
            }
            terms.push(PauliString::new(*w, c.re)?);
        }
        PauliObservable::new(self.num_qubits, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn obs(n: usize, labels: &[(f64, &str)]) -> PauliObservable {
        PauliObservable::from_labels(n, labels).unwrap()
    }

    fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
        let amps: Vec<C64> = (0..1 << n)
            .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let mut s = StateVector::from_amplitudes(amps).unwrap();
        let inv = 1.0 / s.norm();
        s.scale(C64::new(inv, 0.0));
        s
    }

    fn tfim2() -> PauliObservable {
        obs(2, &[(-0.5, "ZZ"), (-0.5, "XI"), (-0.5, "IX")])
    }

    #[test]
    fn exact_examples() {
        let zero = StateVector::zero(1).unwrap();
        assert_eq!(expectation_exact(&obs(1, &[(1.0, "Z")]), &zero).unwrap(), 1.0);
        assert_eq!(expectation_exact(&obs(1, &[(1.0, "X")]), &zero).unwrap(), 0.0);
        let zz = StateVector::zero(2).unwrap();
        assert_eq!(expectation_exact(&tfim2(), &zz).unwrap(), -0.5);
    }

    #[test]
    fn shape_mismatch() {
        let s = StateVector::zero(2).unwrap();
        assert!(matches!(
            expectation_exact(&obs(1, &[(1.0, "Z")]), &s),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn exact_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let letters = ['I', 'X', 'Y', 'Z'];
        for n in 1..=4 {
            for _ in 0..5 {
                let labels: Vec<(f64, String)> = (0..6)
                    .map(|_| {
                        let w: String = (0..n).map(|_| letters[rng.random_range(0..4)]).collect();
                        (rng.random_range(-1.0..1.0), w)
                    })
                    .collect();
                let refs: Vec<(f64, &str)> = labels.iter().map(|(c, w)| (*c, w.as_str())).collect();
                let o = obs(n, &refs);
                let psi = random_state(n, &mut rng);
                let m = to_dense(&o).unwrap();
                let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
                let dense = (v.adjoint() * &m * &v)[(0, 0)].re;
                assert!((expectation_exact(&o, &psi).unwrap() - dense).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn dense_examples() {
        let z = to_dense(&obs(1, &[(1.0, "Z")])).unwrap();
        assert_eq!(z[(0, 0)], ONE);
        assert_eq!(z[(1, 1)], -ONE);
        assert_eq!(z[(0, 1)], ZERO);
        let x = to_dense(&obs(1, &[(1.0, "X")])).unwrap();
        assert_eq!(x[(0, 1)], ONE);
        assert_eq!(x[(1, 0)], ONE);
        assert_eq!(x[(0, 0)], ZERO);
        let y = to_dense(&obs(1, &[(1.0, "Y")])).unwrap();
        assert_eq!(y[(0, 1)], C64::new(0.0, -1.0));
        assert_eq!(y[(1, 0)], C64::new(0.0, 1.0));
        // qubit 0 is the most significant bit
        let zi = to_dense(&obs(2, &[(1.0, "ZI")])).unwrap();
        assert_eq!(zi[(1, 1)], ONE);
        assert_eq!(zi[(2, 2)], -ONE);
    }

    #[test]
    fn dense_capacity() {
        let big = PauliObservable::new(13, [PauliString::new(PauliWord::identity(13), 1.0).unwrap()])
            .unwrap();
        assert!(matches!(to_dense(&big), Err(Error::Capacity(_))));
        assert!(matches!(ground_energy(&big), Err(Error::Capacity(_))));
    }

    #[test]
    fn ground_energy_examples() {
        assert!((ground_energy(&obs(1, &[(1.0, "Z")])).unwrap() + 1.0).abs() < 1e-12);
        assert!((ground_energy(&obs(1, &[(-0.5, "X")])).unwrap() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn tfim2_ground_energy_against_4x4_eigensolve() {
        // independent real 4x4 construction, basis |q0 q1>
        let mut h = nalgebra::DMatrix::<f64>::zeros(4, 4);
        for s in 0..4usize {
            let z0 = if s & 2 == 0 { 1.0 } else { -1.0 };
            let z1 = if s & 1 == 0 { 1.0 } else { -1.0 };
            h[(s, s)] = -0.5 * z0 * z1;
            h[(s ^ 2, s)] += -0.5;
            h[(s ^ 1, s)] += -0.5;
        }
        let oracle = nalgebra::SymmetricEigen::new(h).eigenvalues.min();
        let e = ground_energy(&tfim2()).unwrap();
        assert!((e - oracle).abs() < 1e-12);
        // frozen from the oracle: -sqrt(1.25) = -(1/2)·√5
        assert!((e + 1.118_033_988_749_895).abs() < 1e-12);
    }

    #[test]
    fn lanczos_path_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let letters = ['I', 'X', 'Y', 'Z'];
        let n = 9;
        let labels: Vec<(f64, String)> = (0..25)
            .map(|_| {
                let w: String = (0..n).map(|_| letters[rng.random_range(0..4)]).collect();
                (rng.random_range(-1.0..1.0), w)
            })
            .collect();
        let refs: Vec<(f64, &str)> = labels.iter().map(|(c, w)| (*c, w.as_str())).collect();
        let o = obs(n, &refs);
        let dense = dense_min_eigenvalue(&to_dense(&o).unwrap());
        let lanczos = ground_energy(&o).unwrap();
        assert!((dense - lanczos).abs() < 1e-9, "{dense} vs {lanczos}");
    }

    #[test]
    fn merging_duplicates() {
        let merged = obs(2, &[(0.25, "ZI"), (0.5, "XX"), (0.75, "ZI")]);
        assert_eq!(merged.terms().len(), 2);
        assert_eq!(merged.terms()[0].coefficient, 1.0);
        let single = obs(2, &[(1.0, "ZI"), (0.5, "XX")]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let psi = random_state(2, &mut rng);
        assert_eq!(
            expectation_exact(&merged, &psi).unwrap(),
            expectation_exact(&single, &psi).unwrap()
        );
    }

    #[test]
    fn shots_deterministic_eigenstate() {
        let zero = StateVector::zero(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for shots in [1, 10, 4096] {
            assert_eq!(
                expectation_shots(&obs(1, &[(1.0, "Z")]), &zero, shots, &mut rng).unwrap(),
                1.0
            );
        }
    }

    #[test]
    fn shots_tail_bound() {
        // P(|mean| > 0.05) for 16384 fair ±1 draws: Hoeffding gives 2e^{-20.5}
        let zero = StateVector::zero(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut fails = 0;
        for _ in 0..200 {
            let e = expectation_shots(&obs(1, &[(1.0, "X")]), &zero, 16384, &mut rng).unwrap();
            if e.abs() > 0.05 {
                fails += 1;
            }
        }
        assert!(fails <= 2);
    }

    #[test]
    fn shots_binomial_variance_and_bias() {
        // state with <Z> = 0.6: cos(t) = 0.6
        let t = 0.6f64.acos() / 2.0;
        let psi = StateVector::from_amplitudes(vec![C64::new(t.cos(), 0.0), C64::new(t.sin(), 0.0)])
            .unwrap();
        let z = obs(1, &[(1.0, "Z")]);
        assert!((expectation_exact(&z, &psi).unwrap() - 0.6).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let reps = 1000;
        let samples: Vec<f64> = (0..reps)
            .map(|_| expectation_shots(&z, &psi, 4096, &mut rng).unwrap())
            .collect();
        let mean = samples.iter().sum::<f64>() / reps as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        let expect_std = ((1.0 - 0.36) / 4096.0f64).sqrt();
        assert!((var.sqrt() / expect_std - 1.0).abs() < 0.2);
        assert!((mean - 0.6).abs() < 3.0 * expect_std / (reps as f64).sqrt());
    }

    #[test]
    fn shot_estimator_unbiased() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let psi = random_state(2, &mut rng);
        let o = obs(2, &[(0.7, "XZ"), (-0.4, "YY"), (0.2, "II")]);
        let exact = expectation_exact(&o, &psi).unwrap();
        let reps = 10_000;
        let shots = 64;
        let samples: Vec<f64> = (0..reps)
            .map(|_| expectation_shots(&o, &psi, shots, &mut rng).unwrap())
            .collect();
        let mean = samples.iter().sum::<f64>() / reps as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        let se = (var / reps as f64).sqrt();
        assert!((mean - exact).abs() <= 3.0 * se, "{mean} vs {exact} (se {se})");
    }

    #[test]
    fn parse_examples() {
        let o = parse_hamiltonian("qubits 1\n1.0 Z").unwrap();
        assert_eq!(o, obs(1, &[(1.0, "Z")]));
        let o = parse_hamiltonian("# dup\nqubits 2\n0.5 ZI\n\n0.5 ZI\n").unwrap();
        assert_eq!(o.terms().len(), 1);
        assert_eq!(o.terms()[0].coefficient, 1.0);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = parse_hamiltonian("qubits 2\n0.5 ZI\n0.5 ZZZ\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        let e = parse_hamiltonian("# c\nqubits 2\nabc ZI\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        let e = parse_hamiltonian("0.5 ZI\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = parse_hamiltonian("qubits 2\n0.5 ZQ\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = parse_hamiltonian("qubits 2\n0.5 ZI extra\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = parse_hamiltonian("qubits 2\nNaN ZI\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        assert!(parse_hamiltonian("").is_err());
        assert!(parse_hamiltonian("qubits 0\n").is_err());
    }

    #[test]
    fn format_round_trip() {
        let o = obs(3, &[(0.1, "XYZ"), (-2.5e-7, "IIZ"), (1.0 / 3.0, "YII")]);
        assert_eq!(parse_hamiltonian(&format_hamiltonian(&o)).unwrap(), o);
    }

    #[test]
    fn pauli_products() {
        let w = |s: &str| {
            PauliWord::from_ops(&s.chars().map(|c| Pauli::from_char(c).unwrap()).collect::<Vec<_>>())
                .unwrap()
        };
        let (ph, p) = w("XZ").mul(&w("YZ"));
        assert_eq!(p, w("ZI"));
        assert_eq!(ph, C64::new(0.0, 1.0));
        // dense check of XY = iZ
        let a = PauliSum::from_terms(1, vec![(w("X"), ONE)]);
        let b = PauliSum::from_terms(1, vec![(w("Y"), ONE)]);
        let prod = a.mul(&b).to_dense();
        let expect = &a.to_dense() * &b.to_dense();
        assert!((prod - expect).norm() < 1e-15);
    }
}
