//! Dense symmetric eigensolvers: implicit-shift QL for symmetric tridiagonal
//! matrices and Householder reduction for full symmetric matrices.
//!
//! Ported from the Algol procedures `tred2`/`tql2` (Bowdler, Martin, Reinsch,
//! Wilkinson; Handbook for Automatic Computation, Vol. II) via the public
//! domain JAMA translation. The interaction Hamiltonian blocks solved here are
//! real symmetric tridiagonal with zero diagonal, so `tql2` is the workhorse;
//! `tred2` only backs the Hermitian positive-semidefiniteness check.

use crate::C64;

/// Eigendecomposition of a real symmetric matrix: `A = V diag(values) Vᵀ`.
///
/// `vectors` is row-major `n × n`; column `j` is the eigenvector for
/// `values[j]`. Eigenvalues are sorted ascending.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub n: usize,
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
}

impl Eigen {
    #[inline]
    pub fn vector_entry(&self, row: usize, col: usize) -> f64 {
        self.vectors[row * self.n + col]
    }
}

/// Eigendecomposition of a symmetric tridiagonal matrix with main diagonal
/// `diag` and first off-diagonal `offdiag` (`offdiag.len() == diag.len() - 1`,
/// or both empty for a 1×1 / 0×0 matrix).
pub fn eig_sym_tridiag(diag: &[f64], offdiag: &[f64]) -> Eigen {
    let n = diag.len();
    assert!(
        n == 0 && offdiag.is_empty() || offdiag.len() + 1 == n,
        "offdiag length must be diag length - 1"
    );
    if n == 0 {
        return Eigen { n, values: Vec::new(), vectors: Vec::new() };
    }
    let mut d = diag.to_vec();
    // tql2 uses e[1..n]; e[0] is scratch
    let mut e = vec![0.0; n];
    e[1..n].copy_from_slice(offdiag);
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    tql2(&mut d, &mut e, &mut v, n);
    Eigen { n, values: d, vectors: v }
}

/// Eigendecomposition of a dense real symmetric matrix (row-major `n × n`).
/// Only the lower triangle is referenced.
pub fn eig_sym(matrix: &[f64], n: usize) -> Eigen {
    assert_eq!(matrix.len(), n * n);
    let mut v = matrix.to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    if n > 0 {
        tred2(&mut v, &mut d, &mut e, n);
        tql2(&mut d, &mut e, &mut v, n);
    }
    Eigen { n, values: d, vectors: v }
}

/// Smallest eigenvalue of a complex Hermitian matrix (row-major `dim × dim`),
/// computed through the real symmetric embedding `[[Re, -Im], [Im, Re]]`,
/// which carries each eigenvalue of the original matrix twice.
pub fn hermitian_min_eigenvalue(elements: &[C64], dim: usize) -> f64 {
    assert_eq!(elements.len(), dim * dim);
    let n = 2 * dim;
    let mut m = vec![0.0; n * n];
    for i in 0..dim {
        for j in 0..dim {
            let z = elements[i * dim + j];
            m[i * n + j] = z.re;
            m[i * n + (dim + j)] = -z.im;
            m[(dim + i) * n + j] = z.im;
            m[(dim + i) * n + (dim + j)] = z.re;
        }
    }
    let eig = eig_sym(&m, n);
    eig.values[0]
}

// Householder reduction of v (row-major symmetric) to tridiagonal form,
// accumulating the transformation back into v.
fn tred2(v: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize) {
    for j in 0..n {
        d[j] = v[(n - 1) * n + j];
    }

    for i in (1..n).rev() {
        // Scale to avoid under/overflow.
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = 0.0;
                v[j * n + i] = 0.0;
            }
        } else {
            // Generate Householder vector.
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = 0.0;
            }

            // Apply similarity transformation to remaining columns.
            for j in 0..i {
                f = d[j];
                v[j * n + i] = f;
                g = e[j] + v[j * n + j] * f;
                for k in (j + 1)..i {
                    g += v[k * n + j] * d[k];
                    e[k] += v[k * n + j] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k * n + j] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = 0.0;
            }
        }
        d[i] = h;
    }

    // Accumulate transformations.
    for i in 0..(n - 1) {
        v[(n - 1) * n + i] = v[i * n + i];
        v[i * n + i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[k * n + (i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k * n + (i + 1)] * v[k * n + j];
                }
                for k in 0..=i {
                    v[k * n + j] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[k * n + (i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1) * n + j];
        v[(n - 1) * n + j] = 0.0;
    }
    v[(n - 1) * n + (n - 1)] = 1.0;
    e[0] = 0.0;
}

// Symmetric tridiagonal QL with implicit shifts; d holds the diagonal,
// e[1..n] the off-diagonal. Eigenvectors accumulate into v (row-major),
// eigenvalues come back sorted ascending in d.
fn tql2(d: &mut [f64], e: &mut [f64], v: &mut [f64], n: usize) {
    if n == 0 {
        return;
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0_f64;
    let mut tst1 = 0.0_f64;
    let eps = 2.0_f64.powi(-52);
    for l in 0..n {
        // Find small subdiagonal element.
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }

        // If m == l, d[l] is an eigenvalue; otherwise iterate.
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                assert!(iter <= 64, "tql2 failed to converge at index {l}");
                // Compute implicit shift.
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item -= h;
                }
                f += h;

                // Implicit QL transformation.
                p = d[m];
                let mut c = 1.0_f64;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0_f64;
                let mut s2 = 0.0_f64;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    // Accumulate transformation.
                    for k in 0..n {
                        h = v[k * n + (i + 1)];
                        v[k * n + (i + 1)] = s * v[k * n + i] + c * h;
                        v[k * n + i] = c * v[k * n + i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // Sort eigenvalues and corresponding vectors ascending.
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for j in (i + 1)..n {
            if d[j] < p {
                k = j;
                p = d[j];
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            for j in 0..n {
                v.swap(j * n + i, j * n + k);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn tridiag_2x2_zero_diagonal() {
        // [[0, t], [t, 0]] has eigenvalues ±t.
        let t = 2.0_f64.sqrt();
        let eig = eig_sym_tridiag(&[0.0, 0.0], &[t]);
        assert_close(eig.values[0], -t, 1e-14);
        assert_close(eig.values[1], t, 1e-14);
    }

    #[test]
    fn tridiag_reconstructs_matrix() {
        let diag = [0.3, -1.2, 0.0, 2.5, 0.7];
        let off = [1.0, 0.5, 2.0, 0.25];
        let n = diag.len();
        let eig = eig_sym_tridiag(&diag, &off);
        // A_ij = sum_k V_ik lambda_k V_jk
        for i in 0..n {
            for j in 0..n {
                let mut a = 0.0;
                for k in 0..n {
                    a += eig.vector_entry(i, k) * eig.values[k] * eig.vector_entry(j, k);
                }
                let expect = if i == j {
                    diag[i]
                } else if i.abs_diff(j) == 1 {
                    off[i.min(j)]
                } else {
                    0.0
                };
                assert_close(a, expect, 1e-12);
            }
        }
    }

    #[test]
    fn tridiag_vectors_orthonormal() {
        let diag = vec![0.0; 40];
        let off: Vec<f64> = (1..40).map(|k| (k as f64).sqrt()).collect();
        let eig = eig_sym_tridiag(&diag, &off);
        for a in 0..40 {
            for b in a..40 {
                let dot: f64 = (0..40)
                    .map(|i| eig.vector_entry(i, a) * eig.vector_entry(i, b))
                    .sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert_close(dot, expect, 1e-12);
            }
        }
    }

    #[test]
    fn dense_symmetric_known_spectrum() {
        // [[2, 1], [1, 2]] -> {1, 3}
        let eig = eig_sym(&[2.0, 1.0, 1.0, 2.0], 2);
        assert_close(eig.values[0], 1.0, 1e-14);
        assert_close(eig.values[1], 3.0, 1e-14);
    }

    #[test]
    fn hermitian_min_eigenvalue_diagonal() {
        let z = C64::new(0.0, 0.0);
        let elements = vec![
            C64::new(0.25, 0.0), z, z,
            z, C64::new(0.5, 0.0), z,
            z, z, C64::new(0.25, 0.0),
        ];
        assert_close(hermitian_min_eigenvalue(&elements, 3), 0.25, 1e-13);
    }

    #[test]
    fn hermitian_min_eigenvalue_with_coherences() {
        // [[0.5, 0.5i], [-0.5i, 0.5]] has eigenvalues {0, 1}.
        let elements = vec![
            C64::new(0.5, 0.0), C64::new(0.0, 0.5),
            C64::new(0.0, -0.5), C64::new(0.5, 0.0),
        ];
        assert_close(hermitian_min_eigenvalue(&elements, 2), 0.0, 1e-13);
    }

    #[test]
    fn single_and_empty_matrices() {
        let eig = eig_sym_tridiag(&[3.5], &[]);
        assert_eq!(eig.values, vec![3.5]);
        assert_eq!(eig.vectors, vec![1.0]);
        let eig = eig_sym_tridiag(&[], &[]);
        assert!(eig.values.is_empty());
    }
}
