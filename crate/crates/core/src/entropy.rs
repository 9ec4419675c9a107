//! Von Neumann and Rényi entropies (natural log), computed from spectra.

use crate::channel::ProductChannel;
use crate::error::{Error, Result};
use crate::linalg::{pnorm_of_values, schatten_p_norm};
use crate::state::{DensityMatrix, PureState, POSITIVITY_TOL};

/// Eigenvalues at or below this value are dropped from entropy sums.
pub const NEGLIGIBLE_EIGENVALUE: f64 = 1e-15;

/// Which exponents a Rényi evaluation accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExponentRange {
    /// `1 ≤ p ≤ 2`, the range covered by the additivity result.
    #[default]
    Standard,
    /// Any finite `p ≥ 1`. Sandwich-based lower bounds do not apply.
    Unrestricted,
}

impl ExponentRange {
    pub fn check(self, p: f64) -> Result<()> {
        let ok = match self {
            ExponentRange::Standard => (1.0..=2.0).contains(&p),
            ExponentRange::Unrestricted => p >= 1.0 && p.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidExponent(p))
        }
    }
}

/// Eigenvalues with rounding-level negatives clipped to zero.
fn clipped_spectrum(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let eigs = rho.eigenvalues()?;
    clip_spectrum(eigs)
}

pub(crate) fn clip_spectrum(mut eigs: Vec<f64>) -> Result<Vec<f64>> {
    for l in &mut eigs {
        if *l < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {l:e}")));
        }
        if *l < 0.0 {
            *l = 0.0;
        }
    }
    Ok(eigs)
}

/// `−Σ λ log λ` over a clipped spectrum.
pub fn von_neumann_from_spectrum(eigs: &[f64]) -> f64 {
    -eigs
        .iter()
        .filter(|&&l| l > NEGLIGIBLE_EIGENVALUE)
        .map(|&l| l * l.ln())
        .sum::<f64>()
}

/// `−log(Σ λ^p)/(p − 1)` for `p > 1`, or von Neumann for `p = 1`.
pub fn renyi_from_spectrum(eigs: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        return von_neumann_from_spectrum(eigs);
    }
    let tr: f64 = eigs
        .iter()
        .filter(|&&l| l > NEGLIGIBLE_EIGENVALUE)
        .map(|&l| l.powf(p))
        .sum();
    -tr.ln() / (p - 1.0)
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(von_neumann_from_spectrum(&clipped_spectrum(rho)?))
}

/// `S_p(ρ) = −log(tr ρ^p)/(p − 1)` for `1 < p ≤ 2`.
pub fn renyi_entropy(rho: &DensityMatrix, p: f64) -> Result<f64> {
    renyi_entropy_in(rho, p, ExponentRange::Standard)
}

/// As [`renyi_entropy`], but with an explicit exponent policy.
pub fn renyi_entropy_in(rho: &DensityMatrix, p: f64, range: ExponentRange) -> Result<f64> {
    if p == 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    range.check(p)?;
    Ok(renyi_from_spectrum(&clipped_spectrum(rho)?, p))
}

/// `S_p` for `p ∈ [1, 2]`, with `p = 1` meaning von Neumann.
pub fn entropy(rho: &DensityMatrix, p: f64) -> Result<f64> {
    entropy_in(rho, p, ExponentRange::Standard)
}

pub fn entropy_in(rho: &DensityMatrix, p: f64, range: ExponentRange) -> Result<f64> {
    range.check(p)?;
    if p == 1.0 {
        von_neumann_entropy(rho)
    } else {
        renyi_entropy_in(rho, p, range)
    }
}

/// `S_p(ρ) = −(p/(p − 1)) log ‖ρ‖_p`, evaluated through the Schatten norm.
pub fn renyi_from_pnorm(rho: &DensityMatrix, p: f64) -> Result<f64> {
    if !(p > 1.0 && p <= 2.0) {
        return Err(Error::InvalidExponent(p));
    }
    let norm = schatten_p_norm(rho.matrix(), p)?;
    Ok(-(p / (p - 1.0)) * norm.ln())
}

/// `−(p/(p − 1)) log ν` for a p-norm value `ν`.
pub fn pnorm_to_entropy(norm: f64, p: f64) -> f64 {
    -(p / (p - 1.0)) * norm.ln()
}

/// Schatten p-norm from a clipped spectrum.
pub fn pnorm_from_spectrum(eigs: &[f64], p: f64) -> f64 {
    pnorm_of_values(eigs, p)
}

/// `S_p(Γ(|φ><φ|))` for the product channel `Γ`.
pub fn entropy_output(pc: &ProductChannel, phi: &PureState, p: f64) -> Result<f64> {
    entropy_output_in(pc, phi, p, ExponentRange::Standard)
}

pub fn entropy_output_in(pc: &ProductChannel, phi: &PureState, p: f64, range: ExponentRange) -> Result<f64> {
    range.check(p)?;
    if phi.dims() != pc.dims() {
        return Err(Error::DimMismatch {
            expected: pc.dims().total(),
            found: phi.as_slice().len(),
        });
    }
    let out = pc.apply(&phi.to_density())?;
    let eigs = clipped_spectrum(&out)?;
    Ok(renyi_from_spectrum(&eigs, p))
}
