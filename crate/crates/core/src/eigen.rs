//! Eigensolvers: cyclic Jacobi for the 3x3/4x4 local forms, and Lanczos for
//! ground energies of Pauli operators too large for a comfortable dense solve.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::statevector::C64;

/// Eigen-decomposition of a real symmetric `N x N` matrix by cyclic Jacobi
/// rotations. Eigenvalues ascending; eigenvector `i` is column `i` of the
/// returned matrix. Equal eigenvalues keep the order in which Jacobi leaves
/// them, so the result is deterministic for a given input.
pub fn jacobi_eigen<const N: usize>(mut a: [[f64; N]; N]) -> ([f64; N], [[f64; N]; N]) {
    let mut v = [[0.0; N]; N];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        let mut scale = 0.0;
        for i in 0..N {
            for j in 0..N {
                if i != j {
                    off += a[i][j] * a[i][j];
                }
                scale += a[i][j] * a[i][j];
            }
        }
        if off <= f64::EPSILON * f64::EPSILON * scale {
            break;
        }
        for p in 0..N {
            for q in p + 1..N {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                // exact zero by construction; drop the rounding residue
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: [usize; N] = std::array::from_fn(|i| i);
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let values = order.map(|i| a[i][i]);
    let mut vectors = [[0.0; N]; N];
    for (col, &src) in order.iter().enumerate() {
        for r in 0..N {
            vectors[r][col] = v[r][src];
        }
    }
    (values, vectors)
}

/// Smallest eigenpair of a symmetric matrix, vector sign-canonicalized.
pub fn min_eigenpair<const N: usize>(a: [[f64; N]; N]) -> (f64, [f64; N]) {
    let (values, vectors) = jacobi_eigen(a);
    let v: [f64; N] = std::array::from_fn(|r| vectors[r][0]);
    (values[0], crate::gates::canonical_sign(v))
}

/// Lowest eigenvalue of a Hermitian operator given only as a mat-vec, by
/// Lanczos with full reorthogonalization. Converges when the Ritz residual
/// falls below `tol * max(1, |λ|)` or the Krylov space is exhausted.
pub fn lanczos_min<F>(dim: usize, matvec: F, tol: f64) -> f64
where
    F: Fn(&[C64], &mut [C64]),
{
    let max_basis = dim.min(600);
    // deterministic start vector with weight on every basis state
    let mut q: Vec<C64> = (0..dim)
        .map(|i| {
            let x = ((i as f64 + 1.0) * 0.618_033_988_749_895).fract();
            C64::new(0.5 + x, 0.25 - 0.5 * x)
        })
        .collect();
    let norm = q.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    q.iter_mut().for_each(|z| *z /= norm);

    let mut basis: Vec<Vec<C64>> = vec![q];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![C64::new(0.0, 0.0); dim];
    let mut best = f64::INFINITY;
    loop {
        let j = basis.len() - 1;
        matvec(&basis[j], &mut w);
        let alpha: f64 = basis[j]
            .iter()
            .zip(&w)
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        alphas.push(alpha);
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for b in &basis {
                let proj: C64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= proj * bi;
                }
            }
        }
        let beta = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

        let m = alphas.len();
        let check = m % 10 == 0 || m == max_basis || beta < 1e-13;
        if check {
            let mut t = DMatrix::<f64>::zeros(m, m);
            for i in 0..m {
                t[(i, i)] = alphas[i];
                if i + 1 < m {
                    t[(i, i + 1)] = betas[i];
                    t[(i + 1, i)] = betas[i];
                }
            }
            let eig = SymmetricEigen::new(t);
            let (idx, &theta) = eig
                .eigenvalues
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .expect("non-empty tridiagonal");
            best = theta;
            let residual = (beta * eig.eigenvectors[(m - 1, idx)]).abs();
            if residual <= tol * theta.abs().max(1.0) || beta < 1e-13 || m == max_basis {
                return best;
            }
        }
        betas.push(beta);
        basis.push(w.iter().map(|z| z / beta).collect());
        if basis.len() > max_basis {
            return best;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric<const N: usize>(rng: &mut ChaCha8Rng) -> [[f64; N]; N] {
        let mut a = [[0.0; N]; N];
        for i in 0..N {
            for j in i..N {
                let x = rng.random_range(-2.0..2.0);
                a[i][j] = x;
                a[j][i] = x;
            }
        }
        a
    }

    fn residual<const N: usize>(a: &[[f64; N]; N], lambda: f64, v: &[f64; N]) -> f64 {
        (0..N)
            .map(|i| {
                let av: f64 = (0..N).map(|j| a[i][j] * v[j]).sum();
                (av - lambda * v[i]).powi(2)
            })
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn diagonal() {
        let (lambda, v) = min_eigenpair([[1.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 3.0]]);
        assert_eq!(lambda, 1.0);
        assert_eq!(v, [1.0, 0.0, 0.0]);
    }

    #[test]
    fn degenerate_minimum() {
        let a = [
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 5.0, 0.0],
            [0.0, 0.0, 0.0, 5.0],
        ];
        let (lambda, v) = min_eigenpair(a);
        assert_eq!(lambda, 0.0);
        assert!((v.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(residual(&a, lambda, &v) <= 1e-10);
        assert_eq!(v[2], 0.0);
        assert_eq!(v[3], 0.0);
    }

    #[test]
    fn matches_qr_oracle_on_random_4x4() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let a: [[f64; 4]; 4] = random_symmetric(&mut rng);
            let (lambda, v) = min_eigenpair(a);
            let oracle = SymmetricEigen::new(DMatrix::from_fn(4, 4, |i, j| a[i][j]));
            let expect = oracle.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!((lambda - expect).abs() <= 1e-10);
            assert!(residual(&a, lambda, &v) <= 1e-10);
            assert!(v.iter().find(|x| x.abs() > 1e-14).unwrap() > &0.0);
        }
    }

    #[test]
    fn full_spectrum_3x3() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let a: [[f64; 3]; 3] = random_symmetric(&mut rng);
            let (values, vectors) = jacobi_eigen(a);
            assert!(values.windows(2).all(|w| w[0] <= w[1]));
            for k in 0..3 {
                let v = [vectors[0][k], vectors[1][k], vectors[2][k]];
                assert!(residual(&a, values[k], &v) <= 1e-12);
            }
        }
    }

    #[test]
    fn lanczos_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let dim = 64;
        let mut h = DMatrix::<C64>::zeros(dim, dim);
        for i in 0..dim {
            h[(i, i)] = C64::new(rng.random_range(-1.0..1.0), 0.0);
            for j in i + 1..dim {
                let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
        let dense = SymmetricEigen::new(h.clone())
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        let lz = lanczos_min(
            dim,
            |x, y| {
                for i in 0..dim {
                    y[i] = (0..dim).map(|j| h[(i, j)] * x[j]).sum();
                }
            },
            1e-12,
        );
        assert!((lz - dense).abs() < 1e-9, "{lz} vs {dense}");
    }
}
