use super::eigen::eigvalsh;
use super::matrix::{ComplexMatrix, HERMITIAN_TOL};
use crate::error::{Error, Result};

/// Singular values in descending order, from the spectrum of the smaller Gram
/// matrix `X*X` or `XX*`.
pub fn singular_values(x: &ComplexMatrix) -> Result<Vec<f64>> {
    let gram = if x.rows() >= x.cols() {
        x.adjoint().matmul(x)
    } else {
        x.matmul(&x.adjoint())
    };
    let mut sv: Vec<f64> = eigvalsh(&gram.hermitian_part())?
        .into_iter()
        .map(|l| l.max(0.0).sqrt())
        .collect();
    sv.reverse();
    Ok(sv)
}

/// `(Σ χ^p)^(1/p)` of an arbitrary list of singular values.
pub fn pnorm_of_values(values: &[f64], p: f64) -> f64 {
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return 0.0;
    }
    // scaled to avoid overflow for large p
    let sum: f64 = values.iter().map(|v| (v.abs() / max).powf(p)).sum();
    max * sum.powf(1.0 / p)
}

/// Schatten p-norm `‖X‖_p = (tr |X|^p)^(1/p)`, `p ≥ 1`.
///
/// Hermitian inputs use `|eigenvalues|` directly; everything else goes through
/// [`singular_values`].
pub fn schatten_p_norm(x: &ComplexMatrix, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidExponent(p));
    }
    let values = if x.is_square() && x.is_hermitian(HERMITIAN_TOL) {
        eigvalsh(x)?
    } else {
        singular_values(x)?
    };
    Ok(pnorm_of_values(&values, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn identity_two_norm() {
        for d in 1..6 {
            let n = schatten_p_norm(&ComplexMatrix::identity(d), 2.0).unwrap();
            assert!((n - (d as f64).sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn rank_one_projector_has_unit_norm() {
        let v = vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let proj = ComplexMatrix::outer(&v, &v);
        for p in [1.0, 1.3, 2.0, 7.0] {
            assert!((schatten_p_norm(&proj, p).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn trace_norm_of_positive_diagonal() {
        let m = ComplexMatrix::diag(&[3.0, 4.0]);
        assert!((schatten_p_norm(&m, 1.0).unwrap() - 7.0).abs() < 1e-14);
    }

    #[test]
    fn rectangular_matrix() {
        // rows (3, 0) and (0, 4) padded with a zero column -> singular values 4, 3
        let m = ComplexMatrix::from_fn(2, 3, |i, j| match (i, j) {
            (0, 0) => Complex64::new(3.0, 0.0),
            (1, 1) => Complex64::new(0.0, 4.0),
            _ => Complex64::new(0.0, 0.0),
        });
        let sv = singular_values(&m).unwrap();
        assert!((sv[0] - 4.0).abs() < 1e-14 && (sv[1] - 3.0).abs() < 1e-14);
        assert!((schatten_p_norm(&m, 1.0).unwrap() - 7.0).abs() < 1e-13);
    }

    #[test]
    fn rejects_small_exponent() {
        assert_eq!(
            schatten_p_norm(&ComplexMatrix::identity(2), 0.5),
            Err(Error::InvalidExponent(0.5))
        );
        assert!(schatten_p_norm(&ComplexMatrix::identity(2), f64::NAN).is_err());
    }
}
