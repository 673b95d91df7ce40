//! Quaternion and rotation-axis parameters of single-qubit gates.
//!
//! A unit quaternion `q` maps to `R(q) = q0·I + q1·(-iX) + q2·(-iY) + q3·(-iZ)`,
//! the extended Pauli basis being `(I, -iX, -iY, -iZ)`. A unit axis `n` is the
//! quaternion `(0, n)`, i.e. a rotation by π about `n`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::{Mat2, C64};

const UNIT_TOL: f64 = 1e-12;

/// Index into the extended Pauli basis `(I, -iX, -iY, -iZ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtendedPauliIndex(u8);

impl ExtendedPauliIndex {
    pub const IDENTITY: Self = Self(0);

    pub fn new(value: usize) -> Result<Self> {
        if value > 3 {
            return Err(Error::parameter(format!(
                "extended Pauli index {value} outside 0..=3"
            )));
        }
        Ok(Self(value as u8))
    }

    pub fn value(self) -> usize {
        self.0 as usize
    }

    pub fn all() -> [Self; 4] {
        [Self(0), Self(1), Self(2), Self(3)]
    }
}

/// Linear map from an arbitrary real 4-vector to `Σ q_μ ς_μ`. Unitary exactly
/// when `|q| = 1`.
pub fn quaternion_matrix(q: [f64; 4]) -> Mat2 {
    let [q0, q1, q2, q3] = q;
    [
        [C64::new(q0, -q3), C64::new(-q2, -q1)],
        [C64::new(q2, -q1), C64::new(q0, q3)],
    ]
}

fn unit_vector<const N: usize>(v: [f64; N]) -> Result<[f64; N]> {
    let norm2: f64 = v.iter().map(|x| x * x).sum();
    if !v.iter().all(|x| x.is_finite()) || (norm2 - 1.0).abs() > UNIT_TOL {
        return Err(Error::parameter(format!(
            "expected a unit vector, got squared norm {norm2}"
        )));
    }
    Ok(v)
}

fn normalize<const N: usize>(v: [f64; N]) -> Result<[f64; N]> {
    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !norm.is_finite() || norm == 0.0 {
        return Err(Error::parameter("cannot normalize a zero or non-finite vector"));
    }
    Ok(v.map(|x| x / norm))
}

/// Flips the sign so the first component with magnitude above `1e-14` is
/// positive. `q` and `-q` give gates differing by a global phase.
pub fn canonical_sign<const N: usize>(v: [f64; N]) -> [f64; N] {
    match v.iter().find(|x| x.abs() > 1e-14) {
        Some(x) if *x < 0.0 => v.map(|y| -y),
        _ => v,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct UnitQuaternion([f64; 4]);

impl UnitQuaternion {
    pub const IDENTITY: Self = Self([1.0, 0.0, 0.0, 0.0]);

    /// Checked constructor; the squared norm must be 1 within `1e-12`.
    pub fn new(q: [f64; 4]) -> Result<Self> {
        unit_vector(q).map(Self)
    }

    /// Normalizes `q` first.
    pub fn normalized(q: [f64; 4]) -> Result<Self> {
        normalize(q).map(Self)
    }

    /// Uniform sample on S³ from normalized standard Gaussians.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let v: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            if let Ok(q) = Self::normalized(v) {
                return q;
            }
        }
    }

    pub fn components(&self) -> [f64; 4] {
        self.0
    }

    pub fn canonical(self) -> Self {
        Self(canonical_sign(self.0))
    }

    /// The rotation axis when the scalar part vanishes.
    pub fn as_axis(&self) -> Option<UnitAxis> {
        if self.0[0].abs() > UNIT_TOL {
            return None;
        }
        UnitAxis::normalized([self.0[1], self.0[2], self.0[3]]).ok()
    }

    pub fn matrix(&self) -> Mat2 {
        gate_from_quaternion(self)
    }
}

impl TryFrom<[f64; 4]> for UnitQuaternion {
    type Error = Error;

    fn try_from(q: [f64; 4]) -> Result<Self> {
        // serialized values carry ~1e-16 rounding; renormalize within tolerance
        unit_vector(q).and_then(normalize).map(Self)
    }
}

impl From<UnitQuaternion> for [f64; 4] {
    fn from(q: UnitQuaternion) -> Self {
        q.0
    }
}

impl From<UnitAxis> for UnitQuaternion {
    fn from(n: UnitAxis) -> Self {
        let [x, y, z] = n.0;
        Self([0.0, x, y, z])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitAxis([f64; 3]);

impl UnitAxis {
    pub fn new(n: [f64; 3]) -> Result<Self> {
        unit_vector(n).map(Self)
    }

    pub fn normalized(n: [f64; 3]) -> Result<Self> {
        normalize(n).map(Self)
    }

    /// Uniform sample on S².
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let v: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
            if let Ok(n) = Self::normalized(v) {
                return n;
            }
        }
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn canonical(self) -> Self {
        Self(canonical_sign(self.0))
    }
}

/// Parameter family of an optimized gate: a rotation axis (Fraxis family,
/// basis indices 1..=3) or a full unit quaternion (FQS family, 0..=3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    Axis,
    Quaternion,
}

impl GateKind {
    /// Number of free components.
    pub fn dim(self) -> usize {
        match self {
            GateKind::Axis => 3,
            GateKind::Quaternion => 4,
        }
    }

    /// Extended Pauli index of local component 0.
    pub fn offset(self) -> usize {
        4 - self.dim()
    }

    /// Insertion operators needed to reconstruct a quadratic form in this
    /// family: `dim` basis operators plus one sum per unordered pair.
    pub fn num_insertions(self) -> usize {
        let d = self.dim();
        d + d * (d - 1) / 2
    }

    /// Basis insertions `ς_μ` first, then `ς_(μ+ν)` for `μ < ν` in
    /// lexicographic order. Entries are local indices.
    pub fn insertions(self) -> Vec<Insertion> {
        let d = self.dim();
        let mut out: Vec<Insertion> = (0..d).map(Insertion::Basis).collect();
        for a in 0..d {
            for b in a + 1..d {
                out.push(Insertion::Sum(a, b));
            }
        }
        out
    }

    /// Lifts local components to a full quaternion (zero scalar part for axes).
    pub fn embed(self, local: &[f64]) -> [f64; 4] {
        let mut q = [0.0; 4];
        q[self.offset()..].copy_from_slice(&local[..self.dim()]);
        q
    }

    /// Local components of a quaternion.
    pub fn restrict(self, q: &UnitQuaternion) -> Vec<f64> {
        q.0[self.offset()..].to_vec()
    }

    /// Uniform sample on S² (axes, lifted) or S³.
    pub fn random<R: Rng + ?Sized>(self, rng: &mut R) -> UnitQuaternion {
        match self {
            GateKind::Axis => UnitAxis::random(rng).into(),
            GateKind::Quaternion => UnitQuaternion::random(rng),
        }
    }
}

/// Operator substituted for a gate during tomography, in local indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Insertion {
    Basis(usize),
    Sum(usize, usize),
}

impl Insertion {
    /// Coefficients over the local basis.
    pub fn local_coeffs(self) -> [f64; 4] {
        let mut c = [0.0; 4];
        match self {
            Insertion::Basis(a) => c[a] = 1.0,
            Insertion::Sum(a, b) => {
                c[a] = std::f64::consts::FRAC_1_SQRT_2;
                c[b] = std::f64::consts::FRAC_1_SQRT_2;
            }
        }
        c
    }

    /// The 2x2 operator for a gate of the given family.
    pub fn matrix(self, kind: GateKind) -> Mat2 {
        let c = self.local_coeffs();
        quaternion_matrix(kind.embed(&c[..kind.dim()]))
    }
}

/// `R(q) = q · ς`.
pub fn gate_from_quaternion(q: &UnitQuaternion) -> Mat2 {
    quaternion_matrix(q.0)
}

/// `-i (n · σ)`, the Fraxis gate with rotation angle π.
pub fn gate_from_axis(n: &UnitAxis) -> Mat2 {
    gate_from_quaternion(&UnitQuaternion::from(*n))
}

pub fn basis_op(idx: ExtendedPauliIndex) -> Mat2 {
    let mut q = [0.0; 4];
    q[idx.value()] = 1.0;
    quaternion_matrix(q)
}

/// `(ς_i + ς_j) / √2` for `i != j`.
///
/// The coefficient vector `(e_i + e_j)/√2` has unit norm, so the result is
/// itself an SU(2) element.
pub fn basis_sum_op(i: ExtendedPauliIndex, j: ExtendedPauliIndex) -> Result<Mat2> {
    if i == j {
        return Err(Error::parameter(format!(
            "basis sum needs distinct indices, got {} twice",
            i.value()
        )));
    }
    Ok(quaternion_matrix(basis_sum_coeffs(i.value(), j.value())))
}

fn basis_sum_coeffs(i: usize, j: usize) -> [f64; 4] {
    Insertion::Sum(i, j).local_coeffs()
}
