//! Hermitian eigendecomposition.
//!
//! The matrix is reduced to Hermitian tridiagonal form by Householder
//! reflections, the off-diagonal phases are absorbed into a diagonal unitary so
//! the remaining problem is real symmetric tridiagonal, and that is solved by
//! implicit QL iteration with Wilkinson-style shifts.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, HERMITIAN_TOL};
use crate::error::{Error, Result};

const MAX_QL_ITERS: usize = 60;

/// Eigenvalues in ascending order, with the matching orthonormal eigenvectors
/// stored as columns when requested.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianSpectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<ComplexMatrix>,
}

impl HermitianSpectrum {
    /// `V diag(lambda) V*`, if eigenvectors were computed.
    pub fn reconstruct(&self) -> Option<ComplexMatrix> {
        let v = self.eigenvectors.as_ref()?;
        let n = self.eigenvalues.len();
        let mut scaled = v.clone();
        for i in 0..n {
            for j in 0..n {
                scaled[(i, j)] *= self.eigenvalues[j];
            }
        }
        Some(scaled.matmul(&v.adjoint()))
    }
}

/// Eigenvalues (and optionally eigenvectors) of a Hermitian matrix.
///
/// Inputs whose Hermitian deviation is within [`HERMITIAN_TOL`] are
/// symmetrized before the decomposition.
pub fn hermitian_eigenvalues(m: &ComplexMatrix, want_vectors: bool) -> Result<HermitianSpectrum> {
    let n = m.square_side()?;
    let deviation = m.hermitian_deviation();
    if !(deviation <= HERMITIAN_TOL) {
        return Err(Error::NotHermitian { deviation });
    }
    if n == 0 {
        return Ok(HermitianSpectrum {
            eigenvalues: vec![],
            eigenvectors: want_vectors.then(|| ComplexMatrix::zeros(0, 0)),
        });
    }
    let mut a = m.hermitian_part();
    let mut q = want_vectors.then(|| ComplexMatrix::identity(n));
    let offdiag = tridiagonalize(&mut a, q.as_mut());

    let mut d: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut e = vec![0.0; n];
    let mut phases = vec![Complex64::new(1.0, 0.0); n];
    for k in 0..n - 1 {
        let mag = offdiag[k].norm();
        e[k] = mag;
        phases[k + 1] = if mag > 0.0 {
            phases[k] * (offdiag[k] / mag)
        } else {
            phases[k]
        };
    }

    let mut z = want_vectors.then(|| {
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
        z
    });
    tridiagonal_ql(&mut d, &mut e, z.as_deref_mut())?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let eigenvalues = order.iter().map(|&i| d[i]).collect();

    let eigenvectors = match (q, z) {
        (Some(q), Some(z)) => {
            // V = Q * diag(phases) * Z, columns permuted into ascending order.
            let v = ComplexMatrix::from_fn(n, n, |r, col| {
                let src = order[col];
                (0..n).map(|k| q[(r, k)] * phases[k] * z[k * n + src]).sum()
            });
            Some(v)
        }
        _ => None,
    };
    Ok(HermitianSpectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Convenience wrapper returning only the ascending eigenvalues.
pub fn eigvalsh(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eigenvalues(m, false)?.eigenvalues)
}

/// Householder reduction of a Hermitian matrix to tridiagonal form in place.
/// Returns the complex subdiagonal `T[k+1, k]`. When `q` is given it is
/// right-multiplied by every reflector so that `A = Q T Q*`.
fn tridiagonalize(a: &mut ComplexMatrix, mut q: Option<&mut ComplexMatrix>) -> Vec<Complex64> {
    let n = a.rows();
    let zero = Complex64::new(0.0, 0.0);
    let mut offdiag = vec![zero; n.saturating_sub(1)];
    let mut v = vec![zero; n];
    let mut p = vec![zero; n];

    for k in 0..n.saturating_sub(1) {
        let x0 = a[(k + 1, k)];
        let tail: f64 = (k + 2..n).map(|i| a[(i, k)].norm_sqr()).sum();
        if tail == 0.0 {
            offdiag[k] = x0;
            continue;
        }
        let norm = (x0.norm_sqr() + tail).sqrt();
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * norm;

        let m = n - k - 1;
        let v = &mut v[..m];
        v[0] = x0 - alpha;
        for i in 1..m {
            v[i] = a[(k + 1 + i, k)];
        }
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for vi in v.iter_mut() {
            *vi /= vnorm;
        }

        // p = B v on the trailing block, then q = p - (v* p) v.
        let p = &mut p[..m];
        for (i, pi) in p.iter_mut().enumerate() {
            let row = &a.row(k + 1 + i)[k + 1..];
            *pi = row.iter().zip(v.iter()).map(|(b, vj)| b * vj).sum();
        }
        let kappa: Complex64 = v.iter().zip(p.iter()).map(|(vi, pi)| vi.conj() * pi).sum();
        for i in 0..m {
            p[i] -= kappa.re * v[i];
        }
        for i in 0..m {
            for j in 0..m {
                let upd = v[i] * p[j].conj() + p[i] * v[j].conj();
                a[(k + 1 + i, k + 1 + j)] -= upd * 2.0;
            }
        }

        a[(k + 1, k)] = alpha;
        a[(k, k + 1)] = alpha.conj();
        for i in k + 2..n {
            a[(i, k)] = zero;
            a[(k, i)] = zero;
        }
        offdiag[k] = alpha;

        if let Some(q) = q.as_deref_mut() {
            for r in 0..n {
                let qv: Complex64 = (0..m).map(|j| q[(r, k + 1 + j)] * v[j]).sum();
                for j in 0..m {
                    q[(r, k + 1 + j)] -= qv * v[j].conj() * 2.0;
                }
            }
        }
    }
    offdiag
}

/// Implicit QL on a real symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e[k]` between rows `k` and `k + 1`. On return `d` holds the
/// eigenvalues; `z` (row-major `n x n`) has eigenvector columns accumulated.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() + dd == dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERS {
                return Err(Error::NoConvergence);
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r } else { -r });
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let zi1 = z[k * n + i + 1];
                        let zi = z[k * n + i];
                        z[k * n + i + 1] = s * zi + c * zi1;
                        z[k * n + i] = c * zi - s * zi1;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_spectrum() {
        let s = eigvalsh(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(s, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn reflection_spectrum() {
        let m = ComplexMatrix::from_vec(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let s = eigvalsh(&m).unwrap();
        assert!((s[0] + 1.0).abs() < 1e-15 && (s[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn complex_two_by_two_with_vectors() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let m = ComplexMatrix::from_vec(2, 2, vec![c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]).unwrap();
        let spec = hermitian_eigenvalues(&m, true).unwrap();
        assert!((spec.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((spec.eigenvalues[1] - 3.0).abs() < 1e-14);
        assert!(spec.reconstruct().unwrap().max_abs_diff(&m) < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian_and_non_square() {
        let m = ComplexMatrix::from_vec(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(eigvalsh(&m), Err(Error::NotHermitian { .. })));
        assert!(matches!(
            eigvalsh(&ComplexMatrix::zeros(2, 3)),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn tiny_asymmetry_is_accepted() {
        let mut m = ComplexMatrix::identity(3);
        m[(0, 1)] = c(5e-13, 0.0);
        let s = eigvalsh(&m).unwrap();
        assert!((s.iter().sum::<f64>() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn already_diagonal_and_zero_matrices() {
        let s = eigvalsh(&ComplexMatrix::diag(&[3.0, -1.0, 2.0])).unwrap();
        assert_eq!(s, vec![-1.0, 2.0, 3.0]);
        let z = hermitian_eigenvalues(&ComplexMatrix::zeros(4, 4), true).unwrap();
        assert!(z.eigenvalues.iter().all(|&x| x == 0.0));
        let v = z.eigenvectors.unwrap();
        assert!(v.unitarity_deviation() < 1e-15);
    }
}
