//! Determinants, minors and the perturbation / complementary-minor identities.
//!
//! Indices are zero-based throughout.

use crate::error::{Error, Result};
use crate::tolerances::{HERMITIAN_REL, SINGULAR_REL};

use super::{ComplexMatrix, C64, ONE, ZERO};

/// Row and column selection for a minor; both lists strictly increasing and
/// of equal length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinorSpec {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl MinorSpec {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        if rows.len() != cols.len() {
            return Err(Error::DimensionMismatch { expected: rows.len(), got: cols.len() });
        }
        for list in [&rows, &cols] {
            for w in list.windows(2) {
                if w[1] <= w[0] {
                    return Err(Error::DuplicateIndex { index: w[1] });
                }
            }
        }
        Ok(Self { rows, cols })
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Determinant by LU factorization with partial pivoting; closed forms for
/// sizes 1 and 2.
pub fn determinant(a: &ComplexMatrix) -> Result<C64> {
    let n = a.require_square()?;
    Ok(det_unchecked(a, n))
}

fn det_unchecked(a: &ComplexMatrix, n: usize) -> C64 {
    match n {
        1 => a[(0, 0)],
        2 => a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)],
        _ => {
            let mut m = a.clone();
            let mut det = ONE;
            for col in 0..n {
                let pivot = (col..n)
                    .max_by(|&x, &y| m[(x, col)].norm().total_cmp(&m[(y, col)].norm()))
                    .expect("non-empty range");
                if m[(pivot, col)] == ZERO {
                    return ZERO;
                }
                if pivot != col {
                    m.swap_rows(col, pivot);
                    det = -det;
                }
                let p = m[(col, col)];
                det *= p;
                for r in col + 1..n {
                    let f = m[(r, col)] / p;
                    if f == ZERO {
                        continue;
                    }
                    for j in col + 1..n {
                        let v = m[(col, j)];
                        m[(r, j)] -= f * v;
                    }
                }
            }
            det
        }
    }
}

/// Determinant of the submatrix on ordered rows/cols. The empty minor is 1.
pub(crate) fn ordered_minor(a: &ComplexMatrix, rows: &[usize], cols: &[usize]) -> C64 {
    if rows.is_empty() {
        return ONE;
    }
    let sub = a.select(rows, cols);
    det_unchecked(&sub, rows.len())
}

pub fn minor(a: &ComplexMatrix, spec: &MinorSpec) -> Result<C64> {
    let n = a.require_square()?;
    for &k in spec.rows().iter().chain(spec.cols()) {
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k, dim: n });
        }
    }
    Ok(ordered_minor(a, spec.rows(), spec.cols()))
}

/// `(-1)^{i+j}` times the minor with row `i` and column `j` deleted. For a
/// 1×1 matrix the cofactor is the empty determinant, 1.
pub fn cofactor(a: &ComplexMatrix, i: usize, j: usize) -> Result<C64> {
    let n = a.require_square()?;
    for k in [i, j] {
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k, dim: n });
        }
    }
    let rows: Vec<usize> = (0..n).filter(|&r| r != i).collect();
    let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
    let m = ordered_minor(a, &rows, &cols);
    Ok(if (i + j) % 2 == 0 { m } else { -m })
}

/// Product of row norms, the Hadamard upper bound on `|det A|`. Used as the
/// natural scale for determinant residuals.
pub fn hadamard_bound(a: &ComplexMatrix) -> f64 {
    (0..a.rows()).map(|i| (0..a.cols()).map(|j| a[(i, j)].norm_sqr()).sum::<f64>().sqrt()).product()
}

fn check_nonsingular(a: &ComplexMatrix, det: C64) -> Result<()> {
    if det.norm() <= SINGULAR_REL * hadamard_bound(a) {
        Err(Error::SingularMatrix)
    } else {
        Ok(())
    }
}

/// Sign of a permutation of `0..n` given in one-line notation.
pub fn permutation_sign(perm: &[usize]) -> Result<f64> {
    let n = perm.len();
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidPermutation { n });
        }
        seen[p] = true;
    }
    let mut visited = vec![false; n];
    let mut sign = 1.0;
    for start in 0..n {
        if visited[start] {
            continue;
        }
        let mut len = 0;
        let mut k = start;
        while !visited[k] {
            visited[k] = true;
            k = perm[k];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    Ok(sign)
}

/// Complementary-minor identity between `X` and `Y = (X⁻¹)ᵀ` for the
/// permutation `k ↦ perm[k]` with rows taken in natural order.
///
/// Returns `|Y(0..p; perm[0..p]) − sgn(perm)/det X · X(p..n; perm[p..n])|`.
pub fn jacobi_minor_residual(x: &ComplexMatrix, perm: &[usize], p: usize) -> Result<f64> {
    let n = x.require_square()?;
    let rows: Vec<usize> = (0..n).collect();
    jacobi_minor_residual_general(x, &rows, perm, p)
}

/// General form: the permutation maps `rows[i] ↦ cols[i]`; the leading `p`
/// pairs select the `Y` minor and the remaining pairs the `X` minor, each in
/// the listed order.
pub fn jacobi_minor_residual_general(x: &ComplexMatrix, rows: &[usize], cols: &[usize], p: usize) -> Result<f64> {
    let n = x.require_square()?;
    if rows.len() != n || cols.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: rows.len().min(cols.len()) });
    }
    if p > n {
        return Err(Error::IndexOutOfRange { index: p, dim: n });
    }
    let sign = permutation_sign(rows)? * permutation_sign(cols)?;
    let det = det_unchecked(x, n);
    check_nonsingular(x, det)?;
    let y = x.inverse()?.transpose();
    let lhs = ordered_minor(&y, &rows[..p], &cols[..p]);
    let rhs = ordered_minor(x, &rows[p..], &cols[p..]) * sign / det;
    Ok((lhs - rhs).norm())
}

/// Closed-form value of `det(1 / (1 + ξ_k − η_l))`.
pub fn cauchy_determinant(xi: &[C64], eta: &[C64]) -> Result<C64> {
    let n = xi.len();
    if eta.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: eta.len() });
    }
    let mut den = ONE;
    for (k, &a) in xi.iter().enumerate() {
        for (l, &b) in eta.iter().enumerate() {
            let d = ONE + a - b;
            if d.norm() <= SINGULAR_REL {
                return Err(Error::SingularDenominator { k, l });
            }
            den *= d;
        }
    }
    let mut num = ONE;
    for k in 0..n {
        for l in k + 1..n {
            num *= (xi[k] - xi[l]) * (eta[l] - eta[k]);
        }
    }
    Ok(num / den)
}

/// `det(X + α e_{a,b}) = det X + α C_{a,b}`.
pub fn rank_one_update_det(x: &ComplexMatrix, alpha: C64, a: usize, b: usize) -> Result<C64> {
    let c = cofactor(x, a, b)?;
    Ok(determinant(x)? + alpha * c)
}

/// `det(X + α e_{a,b} + ᾱ e_{b,a})` for invertible Hermitian `X`.
pub fn rank_two_hermitian_update_det(x: &ComplexMatrix, alpha: C64, a: usize, b: usize) -> Result<C64> {
    let n = x.require_square()?;
    for k in [a, b] {
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k, dim: n });
        }
    }
    if a == b {
        return Err(Error::EqualIndices { a, b });
    }
    let deviation = x.hermitian_deviation();
    if deviation > HERMITIAN_REL * x.frobenius_norm() {
        return Err(Error::NotHermitian { deviation });
    }
    let det = det_unchecked(x, n);
    check_nonsingular(x, det)?;
    let cab = cofactor(x, a, b)?;
    let caa = cofactor(x, a, a)?;
    let cbb = cofactor(x, b, b)?;
    Ok(det + alpha * cab + alpha.conj() * cab.conj() + alpha.norm_sqr() * (cab.norm_sqr() - caa * cbb) / det)
}

/// Both sides of `det(X + V W*) = det(X) det(1_k + W* X⁻¹ V)`.
pub fn low_rank_update_sides(x: &ComplexMatrix, v: &ComplexMatrix, w: &ComplexMatrix) -> Result<(C64, C64)> {
    let n = x.require_square()?;
    if v.rows() != n || w.rows() != n || v.cols() != w.cols() {
        return Err(Error::DimensionMismatch { expected: n, got: v.rows() });
    }
    let k = v.cols();
    let wa = w.adjoint();
    let lhs = determinant(&(x + &(v * &wa)))?;
    let xinv = x.inverse()?;
    let small = &ComplexMatrix::identity(k) + &(&(&wa * &xinv) * v);
    let rhs = determinant(x)? * determinant(&small)?;
    Ok((lhs, rhs))
}
