//! Pure states and density matrices over a site factorization.

use num_complex::Complex64;

use crate::dims::SiteDims;
use crate::error::{Error, Result};
use crate::linalg::{eigvalsh, tensor_product, tensor_vec, ComplexMatrix, HERMITIAN_TOL};

pub const NORM_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Unit vector in `⊗_j C^{d_j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    vec: Vec<Complex64>,
    dims: SiteDims,
}

impl PureState {
    /// Wraps a vector that is already normalized within [`NORM_TOL`].
    pub fn new(vec: Vec<Complex64>, dims: SiteDims) -> Result<Self> {
        check_len(vec.len(), &dims)?;
        let norm = l2_norm(&vec);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("vector norm {norm} is not 1")));
        }
        Ok(Self { vec, dims })
    }

    /// Normalizes `vec`; fails for the zero vector.
    pub fn normalized(mut vec: Vec<Complex64>, dims: SiteDims) -> Result<Self> {
        check_len(vec.len(), &dims)?;
        let norm = l2_norm(&vec);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        for z in &mut vec {
            *z /= norm;
        }
        Ok(Self { vec, dims })
    }

    /// Standard basis vector `|index>`.
    pub fn basis(dims: SiteDims, index: usize) -> Result<Self> {
        let total = dims.total();
        if index >= total {
            return Err(Error::DimMismatch {
                expected: total,
                found: index,
            });
        }
        let mut vec = vec![Complex64::new(0.0, 0.0); total];
        vec[index] = Complex64::new(1.0, 0.0);
        Ok(Self { vec, dims })
    }

    /// `(1/√d) Σ_i |ii>` on `C^d ⊗ C^d`.
    pub fn maximally_entangled(d: usize) -> Result<Self> {
        let dims = SiteDims::new(vec![d, d])?;
        let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
        let mut vec = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            vec[i * d + i] = amp;
        }
        Ok(Self { vec, dims })
    }

    /// Tensor product of single-site states, site order preserved.
    pub fn product(factors: &[PureState]) -> Result<Self> {
        let mut dims = Vec::new();
        let mut vec = vec![Complex64::new(1.0, 0.0)];
        for f in factors {
            dims.extend_from_slice(f.dims.as_slice());
            vec = tensor_vec(&vec, &f.vec);
        }
        Self::normalized(vec, SiteDims::new(dims)?)
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.vec
    }

    pub fn dims(&self) -> &SiteDims {
        &self.dims
    }

    /// Complex conjugate in the standard basis.
    pub fn conj(&self) -> Self {
        Self {
            vec: self.vec.iter().map(|z| z.conj()).collect(),
            dims: self.dims.clone(),
        }
    }

    /// `|φ><φ|` as a raw matrix.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.vec, &self.vec)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            mat: self.projector(),
            dims: self.dims.clone(),
        }
    }
}

fn check_len(len: usize, dims: &SiteDims) -> Result<()> {
    if len != dims.total() {
        return Err(Error::DimMismatch {
            expected: dims.total(),
            found: len,
        });
    }
    Ok(())
}

pub(crate) fn l2_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Positive semi-definite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    dims: SiteDims,
}

impl DensityMatrix {
    /// Validated construction: Hermitian within [`HERMITIAN_TOL`], unit trace
    /// within [`TRACE_TOL`], smallest eigenvalue at least `-POSITIVITY_TOL`.
    pub fn new(mat: ComplexMatrix, dims: SiteDims) -> Result<Self> {
        let side = mat.square_side()?;
        if side != dims.total() {
            return Err(Error::DimMismatch {
                expected: dims.total(),
                found: side,
            });
        }
        let deviation = mat.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = eigvalsh(&mat)?.first().copied().unwrap_or(0.0);
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { mat, dims })
    }

    /// Unstructured state on a single site.
    pub fn from_matrix(mat: ComplexMatrix) -> Result<Self> {
        let d = mat.square_side()?;
        Self::new(mat, SiteDims::single(d)?)
    }

    /// Skips validation; used for outputs that are states by construction.
    pub(crate) fn new_unchecked(mat: ComplexMatrix, dims: SiteDims) -> Self {
        debug_assert_eq!(mat.rows(), dims.total());
        Self { mat, dims }
    }

    /// `𝟙/D`.
    pub fn maximally_mixed(dims: SiteDims) -> Self {
        let d = dims.total();
        Self {
            mat: ComplexMatrix::identity(d).scale(1.0 / d as f64),
            dims,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn dims(&self) -> &SiteDims {
        &self.dims
    }

    pub fn side(&self) -> usize {
        self.mat.rows()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        eigvalsh(&self.mat)
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.mat.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// `ρ ⊗ σ` with concatenated site dims.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let mut dims = self.dims.as_slice().to_vec();
        dims.extend_from_slice(other.dims.as_slice());
        Ok(Self {
            mat: tensor_product(&self.mat, &other.mat),
            dims: SiteDims::new(dims)?,
        })
    }

    /// `U ρ U*`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<DensityMatrix> {
        if u.rows() != self.side() || !u.is_square() {
            return Err(Error::DimMismatch {
                expected: self.side(),
                found: u.rows(),
            });
        }
        let m = u.matmul(&self.mat).matmul(&u.adjoint());
        Ok(Self {
            mat: m.hermitian_part(),
            dims: self.dims.clone(),
        })
    }
}
