//! Tensor products and site-wise operations on multipartite operators.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::dims::{SiteDims, SubsetMask};
use crate::error::{Error, Result};

/// Kronecker product: `(A ⊗ B)[i*rB + k, j*cB + l] = A[i,j] B[k,l]`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (rb, cb) = (b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(a.rows() * rb, a.cols() * cb);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let aij = a[(i, j)];
            if aij.re == 0.0 && aij.im == 0.0 {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of complex vectors.
pub fn tensor_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

fn check_side(m: &ComplexMatrix, dims: &SiteDims) -> Result<usize> {
    let side = m.square_side()?;
    if side != dims.total() {
        return Err(Error::DimMismatch {
            expected: dims.total(),
            found: side,
        });
    }
    Ok(side)
}

fn check_mask(mask: SubsetMask, dims: &SiteDims) -> Result<()> {
    SubsetMask::for_sites(mask.bits(), dims.num_sites()).map(|_| ())
}

/// Reduced operator on the sites in `keep`, tracing out the rest.
///
/// Kept sites appear in ascending site order. `keep = ∅` yields the `1x1`
/// matrix `[tr M]`.
pub fn partial_trace(m: &ComplexMatrix, dims: &SiteDims, keep: SubsetMask) -> Result<ComplexMatrix> {
    check_side(m, dims)?;
    check_mask(keep, dims)?;
    let kept = dims.offsets(keep);
    let traced = dims.offsets(keep.complement(dims.num_sites()));
    let n = kept.len();
    let mut out = ComplexMatrix::zeros(n, n);
    for (a, &ra) in kept.iter().enumerate() {
        for (b, &cb) in kept.iter().enumerate() {
            out[(a, b)] = traced.iter().map(|&t| m[(ra + t, cb + t)]).sum();
        }
    }
    Ok(out)
}

/// Transpose with respect to the standard basis on the sites in `sites` only.
pub fn transpose_sites(m: &ComplexMatrix, dims: &SiteDims, sites: SubsetMask) -> Result<ComplexMatrix> {
    let side = check_side(m, dims)?;
    check_mask(sites, dims)?;
    let (swap_part, rest_part) = split_offsets(dims, sites);
    Ok(ComplexMatrix::from_fn(side, side, |r, c| {
        m[(rest_part[r] + swap_part[c], rest_part[c] + swap_part[r])]
    }))
}

/// For every global index, its offset restricted to `mask` and to the complement.
fn split_offsets(dims: &SiteDims, mask: SubsetMask) -> (Vec<usize>, Vec<usize>) {
    let strides = dims.strides();
    let total = dims.total();
    let mut inside = vec![0; total];
    let mut outside = vec![0; total];
    for g in 0..total {
        for (j, (&d, &s)) in dims.as_slice().iter().zip(&strides).enumerate() {
            let digit = (g / s) % d;
            if mask.contains(j) {
                inside[g] += digit * s;
            } else {
                outside[g] += digit * s;
            }
        }
    }
    (inside, outside)
}

/// Reorder the tensor factors of `m`.
///
/// `m` is laid out with factors of dimension `dims[0], dims[1], ...`.
/// Factor `k` of the input becomes factor `order[k]` of the output. The output
/// factor dimensions are therefore `dims` permuted accordingly.
pub fn permute_sites(m: &ComplexMatrix, dims: &[usize], order: &[usize]) -> Result<ComplexMatrix> {
    let n = dims.len();
    if order.len() != n {
        return Err(Error::DimMismatch {
            expected: n,
            found: order.len(),
        });
    }
    let mut seen = vec![false; n];
    for &o in order {
        if o >= n || seen[o] {
            return Err(Error::InvalidDims(format!("{order:?} is not a permutation")));
        }
        seen[o] = true;
    }
    let total: usize = dims.iter().product();
    let side = m.square_side()?;
    if side != total {
        return Err(Error::DimMismatch {
            expected: total,
            found: side,
        });
    }

    let mut out_dims = vec![0; n];
    for k in 0..n {
        out_dims[order[k]] = dims[k];
    }
    let mut out_strides = vec![1; n];
    for j in (0..n.saturating_sub(1)).rev() {
        out_strides[j] = out_strides[j + 1] * out_dims[j + 1];
    }
    // map[g] = output index of input index g
    let mut map = vec![0usize; total];
    for (g, slot) in map.iter_mut().enumerate() {
        let mut rem = g;
        let mut target = 0;
        for k in (0..n).rev() {
            let digit = rem % dims[k];
            rem /= dims[k];
            target += digit * out_strides[order[k]];
        }
        *slot = target;
    }
    let mut out = ComplexMatrix::zeros(total, total);
    for r in 0..total {
        for c in 0..total {
            out[(map[r], map[c])] = m[(r, c)];
        }
    }
    Ok(out)
}

/// `reduced ⊗ 𝟙` placed back in global site order, where `reduced` lives on the
/// sites of `keep` (ascending) and the identity acts on the remaining sites.
///
/// The operator is first assembled in block order (kept sites, then the
/// complement) and then permuted into the global order.
pub fn embed_with_identity(reduced: &ComplexMatrix, dims: &SiteDims, keep: SubsetMask) -> Result<ComplexMatrix> {
    let expected = dims.subset_total(keep);
    let side = reduced.square_side()?;
    if side != expected {
        return Err(Error::DimMismatch { expected, found: side });
    }
    let rest = keep.complement(dims.num_sites());
    let block = tensor_product(reduced, &ComplexMatrix::identity(dims.subset_total(rest)));
    let block_sites: Vec<usize> = keep.sites().chain(rest.sites()).collect();
    let block_dims: Vec<usize> = block_sites.iter().map(|&j| dims.get(j)).collect();
    permute_sites(&block, &block_dims, &block_sites)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn identity_kron_identity() {
        let p = tensor_product(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3));
        assert_eq!(p, ComplexMatrix::identity(6));
    }

    #[test]
    fn kron_with_scalar() {
        let a = ComplexMatrix::from_vec(2, 2, vec![c(0.0), c(1.0), c(0.0), c(0.0)]).unwrap();
        let s = ComplexMatrix::from_vec(1, 1, vec![c(2.0)]).unwrap();
        let p = tensor_product(&a, &s);
        assert_eq!(
            p,
            ComplexMatrix::from_vec(2, 2, vec![c(0.0), c(2.0), c(0.0), c(0.0)]).unwrap()
        );
    }

    #[test]
    fn partial_trace_of_product() {
        let a = ComplexMatrix::from_vec(2, 2, vec![c(1.0), c(2.0), c(3.0), c(4.0)]).unwrap();
        let b = ComplexMatrix::diag(&[0.25, 0.25, 0.5]);
        let dims = SiteDims::new(vec![2, 3]).unwrap();
        let m = tensor_product(&a, &b);
        let r = partial_trace(&m, &dims, SubsetMask::single(0)).unwrap();
        assert!(r.max_abs_diff(&a) < 1e-15);
        let full = partial_trace(&m, &dims, dims.full_mask()).unwrap();
        assert_eq!(full, m);
        let scalar = partial_trace(&m, &dims, SubsetMask::EMPTY).unwrap();
        assert_eq!((scalar.rows(), scalar.cols()), (1, 1));
        assert!((scalar[(0, 0)] - m.trace()).norm() < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_wrong_side() {
        let dims = SiteDims::new(vec![2, 2]).unwrap();
        assert_eq!(
            partial_trace(&ComplexMatrix::identity(3), &dims, SubsetMask::EMPTY),
            Err(Error::DimMismatch { expected: 4, found: 3 })
        );
        assert!(transpose_sites(&ComplexMatrix::identity(5), &dims, SubsetMask::EMPTY).is_err());
    }

    #[test]
    fn transpose_fixes_diagonal_and_empty_set() {
        let dims = SiteDims::new(vec![2, 3]).unwrap();
        let d = ComplexMatrix::diag(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(transpose_sites(&d, &dims, SubsetMask::single(1)).unwrap(), d);
        let m = ComplexMatrix::from_fn(6, 6, |i, j| Complex64::new(i as f64, j as f64));
        assert_eq!(transpose_sites(&m, &dims, SubsetMask::EMPTY).unwrap(), m);
        assert_eq!(transpose_sites(&m, &dims, dims.full_mask()).unwrap(), m.transpose());
    }

    #[test]
    fn permute_swaps_kron_factors() {
        let a = ComplexMatrix::from_fn(2, 2, |i, j| Complex64::new((i * 2 + j) as f64, 1.0));
        let b = ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new(-((i * 3 + j) as f64), 0.5));
        let ab = tensor_product(&a, &b);
        let ba = permute_sites(&ab, &[2, 3], &[1, 0]).unwrap();
        assert!(ba.max_abs_diff(&tensor_product(&b, &a)) < 1e-15);
        assert!(permute_sites(&ab, &[2, 3], &[0, 0]).is_err());
    }

    #[test]
    fn embed_places_identity_on_complement() {
        let dims = SiteDims::new(vec![2, 3]).unwrap();
        let b = ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new((i + 2 * j) as f64, 0.0));
        let e = embed_with_identity(&b, &dims, SubsetMask::single(1)).unwrap();
        assert!(e.max_abs_diff(&tensor_product(&ComplexMatrix::identity(2), &b)) < 1e-15);
        let s = ComplexMatrix::from_vec(1, 1, vec![c(1.0)]).unwrap();
        assert_eq!(
            embed_with_identity(&s, &dims, SubsetMask::EMPTY).unwrap(),
            ComplexMatrix::identity(6)
        );
    }
}
