//! The Werner–Holevo channel `Γ_d(ρ) = (𝟙 − ρᵀ)/(d − 1)` and its tensor powers.

use num_complex::Complex64;

use crate::dims::{SiteDims, SubsetMask};
use crate::error::{Error, Result};
use crate::linalg::{eigvalsh, partial_trace, ComplexMatrix};
use crate::state::DensityMatrix;

/// Tolerance for accepting a matrix as unitary in covariance checks.
pub const UNITARY_TOL: f64 = 1e-10;

/// `Γ_d` for a fixed dimension `d ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WhChannel {
    d: usize,
}

impl WhChannel {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDims(format!("channel dimension {d} is below 2")));
        }
        Ok(Self { d })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// `Γ_d(ρ)` on a density matrix.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let out = self.apply_operator(rho.matrix())?;
        Ok(DensityMatrix::new_unchecked(out, SiteDims::single(self.d)?))
    }

    /// Linear extension `X ↦ (tr X · 𝟙 − Xᵀ)/(d − 1)` on arbitrary operators.
    pub fn apply_operator(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let side = x.square_side()?;
        if side != self.d {
            return Err(Error::DimMismatch {
                expected: self.d,
                found: side,
            });
        }
        let tr = x.trace();
        let scale = 1.0 / (self.d as f64 - 1.0);
        Ok(ComplexMatrix::from_fn(side, side, |i, j| {
            let id = if i == j { tr } else { Complex64::new(0.0, 0.0) };
            (id - x[(j, i)]) * scale
        }))
    }

    /// Choi matrix `(id ⊗ Γ_d)(|Φ⁺><Φ⁺|)`, `Φ⁺ = d^{-1/2} Σ_i |ii>`.
    pub fn choi(&self) -> ComplexMatrix {
        let d = self.d;
        let dims = SiteDims::new(vec![d, d]).expect("d >= 2");
        let mut phi = ComplexMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                phi[(i * d + i, j * d + j)] = Complex64::new(1.0 / d as f64, 0.0);
            }
        }
        apply_site(&phi, &dims, 1).expect("shape checked")
    }

    /// `‖U Γ(ρ) U* − Γ(Ū ρ Ū*)‖_F`.
    pub fn covariance_residual(&self, u: &ComplexMatrix, rho: &DensityMatrix) -> Result<f64> {
        if u.rows() != self.d || !u.is_square() {
            return Err(Error::DimMismatch {
                expected: self.d,
                found: u.rows(),
            });
        }
        let deviation = u.unitarity_deviation();
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        let lhs = u.matmul(self.apply(rho)?.matrix()).matmul(&u.adjoint());
        let ubar = u.conj();
        let rotated = ubar.matmul(rho.matrix()).matmul(&ubar.adjoint());
        let rhs = self.apply_operator(&rotated)?;
        Ok((&lhs - &rhs).frobenius_norm())
    }
}

/// `Γ_{d_j}` acting on site `j` of a multipartite operator, identity elsewhere:
/// `(tr_j M ⊗ 𝟙_j − M^{T_j}) / (d_j − 1)`.
pub fn apply_site(m: &ComplexMatrix, dims: &SiteDims, site: usize) -> Result<ComplexMatrix> {
    let side = m.square_side()?;
    if side != dims.total() {
        return Err(Error::DimMismatch {
            expected: dims.total(),
            found: side,
        });
    }
    if site >= dims.num_sites() {
        return Err(Error::DimMismatch {
            expected: dims.num_sites(),
            found: site,
        });
    }
    let d = dims.get(site);
    let stride = dims.strides()[site];
    let digit: Vec<usize> = (0..side).map(|g| (g / stride) % d).collect();
    let base: Vec<usize> = (0..side).map(|g| g - digit[g] * stride).collect();
    let scale = 1.0 / (d as f64 - 1.0);

    let mut out = ComplexMatrix::zeros(side, side);
    for r in 0..side {
        for c in 0..side {
            let (br, bc) = (base[r], base[c]);
            let mut v = -m[(br + digit[c] * stride, bc + digit[r] * stride)];
            if digit[r] == digit[c] {
                for k in 0..d {
                    v += m[(br + k * stride, bc + k * stride)];
                }
            }
            out[(r, c)] = v * scale;
        }
    }
    Ok(out)
}

/// `⊗_j Γ_{d_j}` over a site factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductChannel {
    factors: Vec<WhChannel>,
    dims: SiteDims,
}

impl ProductChannel {
    pub fn new(factors: Vec<WhChannel>) -> Result<Self> {
        let dims = SiteDims::new(factors.iter().map(|f| f.dim()).collect())?;
        Ok(Self { factors, dims })
    }

    pub fn from_dims(dims: &SiteDims) -> Self {
        Self {
            factors: dims.as_slice().iter().map(|&d| WhChannel { d }).collect(),
            dims: dims.clone(),
        }
    }

    pub fn factors(&self) -> &[WhChannel] {
        &self.factors
    }

    pub fn dims(&self) -> &SiteDims {
        &self.dims
    }

    /// Sequential single-site application, site 1 first.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dims() != &self.dims {
            return Err(Error::DimMismatch {
                expected: self.dims.total(),
                found: rho.side(),
            });
        }
        let out = self.apply_operator(rho.matrix())?;
        Ok(DensityMatrix::new_unchecked(out, self.dims.clone()))
    }

    /// Linear action on an arbitrary operator over the same sites.
    pub fn apply_operator(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        let mut cur = apply_site(m, &self.dims, 0)?;
        for j in 1..self.dims.num_sites() {
            cur = apply_site(&cur, &self.dims, j)?;
        }
        Ok(cur)
    }
}

/// Outcome of a Choi-matrix check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CptpReport {
    pub min_eigenvalue: f64,
    pub trace_preservation_error: f64,
}

impl CptpReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.min_eigenvalue >= -tol && self.trace_preservation_error <= tol
    }
}

/// Positivity and trace preservation of a `d² x d²` Choi matrix whose second
/// factor is the channel output.
pub fn verify_cptp(choi: &ComplexMatrix, d: usize) -> Result<CptpReport> {
    let side = choi.square_side()?;
    if side != d * d {
        return Err(Error::DimMismatch {
            expected: d * d,
            found: side,
        });
    }
    let min_eigenvalue = eigvalsh(choi)?.first().copied().unwrap_or(0.0);
    let dims = SiteDims::new(vec![d, d])?;
    let input_marginal = partial_trace(choi, &dims, SubsetMask::single(0))?;
    let target = ComplexMatrix::identity(d).scale(1.0 / d as f64);
    Ok(CptpReport {
        min_eigenvalue,
        trace_preservation_error: (&input_marginal - &target).frobenius_norm(),
    })
}
