use crate::error::{Error, Result};
use crate::tolerances::{HERMITIAN_REL, JACOBI_MAX_SWEEPS};

use super::{ComplexMatrix, C64};

/// Eigenpairs of a Hermitian matrix, eigenvalues sorted descending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the unit eigenvector for `eigenvalues[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// `V diag(λ) V*`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_function(|x| x)
    }

    /// `V diag(f(λ)) V*`.
    pub fn apply_function(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.vectors;
        let fd: Vec<f64> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| (0..n).map(|k| v[(i, k)] * fd[k] * v[(j, k)].conj()).sum())
    }
}

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
///
/// Each rotation first removes the phase of the pivot entry and then applies a
/// real Givens rotation. The result is checked against `eig_tol` on exit.
pub fn hermitian_eigen(a: &ComplexMatrix, eig_tol: f64) -> Result<HermitianEigen> {
    let n = a.require_square()?;
    let norm = a.frobenius_norm();
    let deviation = a.hermitian_deviation();
    if deviation > HERMITIAN_REL * norm.max(f64::MIN_POSITIVE) {
        return Err(Error::NotHermitian { deviation });
    }
    // symmetrize so the iteration sees an exactly Hermitian input
    let mut m = ComplexMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)].conj()));
    let mut v = ComplexMatrix::identity(n);

    let off = |m: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let target = f64::EPSILON * norm * 0.1;
    let mut converged = n == 1 || norm == 0.0;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if converged || off(&m) <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let b = m[(p, q)];
                let babs = b.norm();
                if babs == 0.0 {
                    continue;
                }
                let phase = b / babs;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let zeta = (aqq - app) / (2.0 * babs);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J restricted to (p, q): [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
                let jpp = C64::new(c, 0.0);
                let jpq = C64::new(s, 0.0);
                let jqp = -phase.conj() * s;
                let jqq = phase.conj() * c;
                // M <- M J
                for k in 0..n {
                    let mp = m[(k, p)];
                    let mq = m[(k, q)];
                    m[(k, p)] = mp * jpp + mq * jqp;
                    m[(k, q)] = mp * jpq + mq * jqq;
                }
                // M <- J* M
                for k in 0..n {
                    let mp = m[(p, k)];
                    let mq = m[(q, k)];
                    m[(p, k)] = jpp.conj() * mp + jqp.conj() * mq;
                    m[(q, k)] = jpq.conj() * mp + jqq.conj() * mq;
                }
                m[(p, q)] = C64::new(0.0, 0.0);
                m[(q, p)] = C64::new(0.0, 0.0);
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
                for k in 0..n {
                    let vp = v[(k, p)];
                    let vq = v[(k, q)];
                    v[(k, p)] = vp * jpp + vq * jqp;
                    v[(k, q)] = vp * jpq + vq * jqq;
                }
            }
        }
    }
    if !converged && off(&m) > target {
        return Err(Error::ConvergenceFailure { sweeps: JACOBI_MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[(y, y)].re.total_cmp(&m[(x, x)].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| m[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    let eig = HermitianEigen { eigenvalues, vectors };

    let scale = norm.max(f64::MIN_POSITIVE);
    for k in 0..n {
        let vk = eig.vector(k);
        let av = a.mul_vec(&vk);
        let r: f64 = av.iter().zip(&vk).map(|(x, y)| (x - y * eig.eigenvalues[k]).norm_sqr()).sum::<f64>().sqrt();
        if r > eig_tol * scale {
            return Err(Error::ConvergenceFailure { sweeps: JACOBI_MAX_SWEEPS });
        }
    }
    let ortho = (&(&eig.vectors.adjoint() * &eig.vectors) - &ComplexMatrix::identity(n)).frobenius_norm();
    if ortho > eig_tol.max(1e3 * f64::EPSILON * n as f64) {
        return Err(Error::ConvergenceFailure { sweeps: JACOBI_MAX_SWEEPS });
    }
    Ok(eig)
}

/// Singular values of `k` (rows ≥ cols) by one-sided Hestenes-Jacobi
/// orthogonalization, sorted descending.
///
/// The iteration is invariant under column scaling, so for `k = B D` with
/// `B` well conditioned and `D` diagonal every singular value, including the
/// tiny ones, comes out with small relative error.
pub fn singular_values_jacobi(k: &ComplexMatrix) -> Result<Vec<f64>> {
    let (m, n) = (k.rows(), k.cols());
    if m < n {
        return Err(Error::DimensionMismatch { expected: n, got: m });
    }
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| k.column(j)).collect();
    let tol = f64::EPSILON * m as f64;
    let mut converged = n == 1;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = cols[p].iter().zip(&cols[q]).map(|(a, b)| a.conj() * b).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for i in 0..m {
                    let a = cols[p][i];
                    let b = cols[q][i] * phase.conj();
                    cols[p][i] = a * c - b * s;
                    cols[q][i] = a * s + b * c;
                }
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::ConvergenceFailure { sweeps: JACOBI_MAX_SWEEPS });
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| super::vec_norm(c)).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}
