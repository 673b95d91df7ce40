//! Dense statevector simulator.
//!
//! Qubit 0 is the most significant bit of the basis index: for `n` qubits,
//! qubit `q` corresponds to bit `n - 1 - q`. Every other module relies on
//! this ordering.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Row-major 2x2 complex matrix.
pub type Mat2 = [[C64; 2]; 2];

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 20;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// A 2x2 matrix checked to be unitary to within `1e-12`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitUnitary(Mat2);

impl SingleQubitUnitary {
    pub fn new(m: Mat2) -> Result<Self> {
        if unitarity_defect(&m) > 1e-12 {
            return Err(Error::parameter("matrix is not unitary"));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }
}

/// Max-abs entry of `U^dagger U - I`.
pub fn unitarity_defect(m: &Mat2) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let mut s = ZERO;
            for k in 0..2 {
                s += m[k][i].conj() * m[k][j];
            }
            if i == j {
                s -= ONE;
            }
            worst = worst.max(s.norm());
        }
    }
    worst
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<C64>,
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::config(format!(
            "qubit count {n} outside supported range 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

impl StateVector {
    /// `|0...0>` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        check_qubits(n)?;
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        Ok(Self { num_qubits: n, amps })
    }

    /// Wraps raw amplitudes; the length must be `2^n` for `1 <= n <= 20`.
    /// No normalization is applied.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::shape(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let n = len.trailing_zeros() as usize;
        check_qubits(n)?;
        Ok(Self { num_qubits: n, amps })
    }

    /// Computational basis state `|index>`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_qubits(n)?;
        if index >= 1 << n {
            return Err(Error::index(format!("basis index {index} out of range")));
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = ONE;
        Ok(Self { num_qubits: n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    fn check_target(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(Error::index(format!(
                "qubit {qubit} out of range for {} qubits",
                self.num_qubits
            )));
        }
        Ok(())
    }

    /// Applies `I ⊗ .. ⊗ op ⊗ .. ⊗ I` with `op` on `target`. `op` may be any
    /// 2x2 matrix; the norm is only preserved when it is unitary.
    pub fn apply_1q(&mut self, op: &Mat2, target: usize) -> Result<()> {
        self.check_target(target)?;
        let mask = self.mask(target);
        let [[a, b], [c, d]] = *op;
        for i0 in 0..self.amps.len() {
            if i0 & mask != 0 {
                continue;
            }
            let i1 = i0 | mask;
            let x0 = self.amps[i0];
            let x1 = self.amps[i1];
            self.amps[i0] = a * x0 + b * x1;
            self.amps[i1] = c * x0 + d * x1;
        }
        Ok(())
    }

    /// Controlled-Z between two distinct qubits.
    pub fn apply_cz(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_target(control)?;
        self.check_target(target)?;
        if control == target {
            return Err(Error::index(format!(
                "controlled-Z needs distinct qubits, got {control} twice"
            )));
        }
        let both = self.mask(control) | self.mask(target);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & both == both {
                *a = -*a;
            }
        }
        Ok(())
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::shape(format!(
                "inner product of {}-qubit and {}-qubit states",
                self.num_qubits, other.num_qubits
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: C64, other: &StateVector) -> Result<()> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::shape("axpy on states of different size"));
        }
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += alpha * b;
        }
        Ok(())
    }

    pub fn scale(&mut self, alpha: C64) {
        for a in &mut self.amps {
            *a *= alpha;
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            num_qubits: self.num_qubits,
            amps: vec![ZERO; self.amps.len()],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pauli_x() -> Mat2 {
        [[ZERO, ONE], [ONE, ZERO]]
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

    fn random_unitary(rng: &mut ChaCha8Rng) -> Mat2 {
        let (a, b, c, d): (f64, f64, f64, f64) = (rng.random(), rng.random(), rng.random(), rng.random());
        let norm = (a * a + b * b + c * c + d * d).sqrt();
        let (a, b, c, d) = (a / norm, b / norm, c / norm, d / norm);
        let phase = C64::from_polar(1.0, rng.random::<f64>() * 6.0);
        let m = [
            [C64::new(a, -d), C64::new(-c, -b)],
            [C64::new(c, -b), C64::new(a, d)],
        ];
        [[m[0][0] * phase, m[0][1] * phase], [m[1][0] * phase, m[1][1] * phase]]
    }

    /// Dense Kronecker embedding, qubit 0 leftmost.
    fn dense_embed(op: &Mat2, target: usize, n: usize) -> Vec<Vec<C64>> {
        let dim = 1 << n;
        let mut m = vec![vec![ZERO; dim]; dim];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                let mut v = ONE;
                for q in 0..n {
                    let shift = n - 1 - q;
                    let (rb, cb) = ((r >> shift) & 1, (c >> shift) & 1);
                    v *= if q == target {
                        op[rb][cb]
                    } else if rb == cb {
                        ONE
                    } else {
                        ZERO
                    };
                }
                *entry = v;
            }
        }
        m
    }

    fn matvec(m: &[Vec<C64>], v: &[C64]) -> Vec<C64> {
        m.iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    #[test]
    fn init_zero_examples() {
        assert_eq!(StateVector::zero(1).unwrap().amplitudes(), &[ONE, ZERO]);
        assert_eq!(
            StateVector::zero(2).unwrap().amplitudes(),
            &[ONE, ZERO, ZERO, ZERO]
        );
        let s = StateVector::zero(4).unwrap();
        assert_eq!(s.dim(), 16);
        assert_eq!(s.amplitudes()[0], ONE);
        assert!(s.amplitudes()[1..].iter().all(|a| *a == ZERO));
    }

    #[test]
    fn init_zero_rejects_out_of_range() {
        assert!(matches!(StateVector::zero(0), Err(Error::Config(_))));
        assert!(matches!(StateVector::zero(21), Err(Error::Config(_))));
    }

    #[test]
    fn pauli_x_flips() {
        let mut s = StateVector::zero(1).unwrap();
        s.apply_1q(&pauli_x(), 0).unwrap();
        assert_eq!(s.amplitudes(), &[ZERO, ONE]);
    }

    #[test]
    fn minus_i_z_on_zero_gives_phase() {
        let mut s = StateVector::zero(2).unwrap();
        let mz = [[-I, ZERO], [ZERO, I]];
        s.apply_1q(&mz, 1).unwrap();
        assert_eq!(s.amplitudes(), &[-I, ZERO, ZERO, ZERO]);
    }

    #[test]
    fn target_out_of_range() {
        let mut s = StateVector::zero(2).unwrap();
        assert!(matches!(s.apply_1q(&pauli_x(), 2), Err(Error::Index(_))));
        assert!(matches!(s.apply_cz(0, 0), Err(Error::Index(_))));
        assert!(matches!(s.apply_cz(0, 5), Err(Error::Index(_))));
    }

    #[test]
    fn random_unitary_preserves_norm_and_matches_kron() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let s = random_state(3, &mut rng);
            let u = random_unitary(&mut rng);
            let t = rng.random_range(0..3);
            let mut out = s.clone();
            out.apply_1q(&u, t).unwrap();
            assert!((out.norm() - 1.0).abs() <= 1e-12);
            let expect = matvec(&dense_embed(&u, t, 3), s.amplitudes());
            for (a, b) in out.amplitudes().iter().zip(&expect) {
                assert!((a - b).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn embedding_exhaustive_up_to_four_qubits() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=4 {
            for t in 0..n {
                let op: Mat2 = [
                    [C64::new(0.3, -0.2), C64::new(1.1, 0.4)],
                    [C64::new(-0.7, 0.0), C64::new(0.2, 0.9)],
                ];
                let s = random_state(n, &mut rng);
                let mut out = s.clone();
                out.apply_1q(&op, t).unwrap();
                let expect = matvec(&dense_embed(&op, t, n), s.amplitudes());
                for (a, b) in out.amplitudes().iter().zip(&expect) {
                    assert!((a - b).norm() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn cz_examples() {
        let mut s = StateVector::basis(2, 0b11).unwrap();
        s.apply_cz(0, 1).unwrap();
        assert_eq!(s.amplitudes()[3], -ONE);
        let mut s = StateVector::basis(2, 0b10).unwrap();
        s.apply_cz(0, 1).unwrap();
        assert_eq!(s.amplitudes()[2], ONE);
    }

    #[test]
    fn cz_matches_diagonal_oracle_and_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = random_state(4, &mut rng);
        let mut a = s.clone();
        a.apply_cz(1, 3).unwrap();
        let mut b = s.clone();
        b.apply_cz(3, 1).unwrap();
        assert_eq!(a, b);
        for (i, (out, inp)) in a.amplitudes().iter().zip(s.amplitudes()).enumerate() {
            // qubit 1 is bit 2, qubit 3 is bit 0
            let sign = if (i >> 2) & 1 == 1 && i & 1 == 1 { -1.0 } else { 1.0 };
            assert_eq!(*out, inp * sign);
        }
    }

    #[test]
    fn inner_product_examples() {
        let z = StateVector::basis(1, 0).unwrap();
        let o = StateVector::basis(1, 1).unwrap();
        assert_eq!(z.inner(&z).unwrap(), ONE);
        assert_eq!(z.inner(&o).unwrap(), ZERO);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_state(3, &mut rng);
        let b = random_state(3, &mut rng);
        let mut oracle = ZERO;
        for i in 0..8 {
            oracle += a.amplitudes()[i].conj() * b.amplitudes()[i];
        }
        assert!((a.inner(&b).unwrap() - oracle).norm() <= 1e-12);
        assert!(matches!(
            a.inner(&StateVector::zero(2).unwrap()),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn linearity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_state(3, &mut rng);
        let b = random_state(3, &mut rng);
        let u = random_unitary(&mut rng);
        let (alpha, beta) = (C64::new(0.3, 0.7), C64::new(-1.2, 0.1));
        let mut combo = a.zeros_like();
        combo.axpy(alpha, &a).unwrap();
        combo.axpy(beta, &b).unwrap();
        combo.apply_1q(&u, 1).unwrap();
        let (mut ua, mut ub) = (a.clone(), b.clone());
        ua.apply_1q(&u, 1).unwrap();
        ub.apply_1q(&u, 1).unwrap();
        let mut expect = a.zeros_like();
        expect.axpy(alpha, &ua).unwrap();
        expect.axpy(beta, &ub).unwrap();
        for (x, y) in combo.amplitudes().iter().zip(expect.amplitudes()) {
            assert!((x - y).norm() <= 1e-12);
        }
    }

    #[test]
    fn unitarity_over_long_sequences() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut s = StateVector::zero(5).unwrap();
        for _ in 0..200 {
            let u = random_unitary(&mut rng);
            s.apply_1q(&u, rng.random_range(0..5)).unwrap();
            let c = rng.random_range(0..5);
            let t = (c + rng.random_range(1..5)) % 5;
            s.apply_cz(c, t).unwrap();
        }
        assert!((s.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn checked_unitary() {
        assert!(SingleQubitUnitary::new(pauli_x()).is_ok());
        assert!(SingleQubitUnitary::new([[ONE, ONE], [ZERO, ONE]]).is_err());
    }
}
