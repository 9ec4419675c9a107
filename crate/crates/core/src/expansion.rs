//! Inclusion–exclusion form of `⊗_j Γ_{d_j}(|Ω><Ω|)` and its purity.
//!
//! For a pure input `Ω` on sites `1..N`,
//!
//! ```text
//! X_N(Ω) = ∏_j 1/(d_j − 1) · Σ_Λ (−1)^{|Λ|} ρ_Λ ⊗ 𝟙_{Λᶜ}
//! ```
//!
//! where `ρ_Λ` is the reduction of `|Ω̄><Ω̄|` to the sites in `Λ`, and the purity
//! collapses to
//!
//! ```text
//! tr X_N² = ∏_j 1/(d_j − 1)² · Σ_Λ tr ρ_Λ² · ∏_{j ∈ Λᶜ} (d_j − 2)
//! ```
//!
//! which is bounded by `∏_j 1/(d_j − 1)` since every `tr ρ_Λ² ≤ 1`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::dims::{SiteDims, SubsetMask};
use crate::error::{Error, Result};
use crate::linalg::{embed_with_identity, partial_trace, ComplexMatrix};
use crate::state::{DensityMatrix, PureState};

fn check_state(dims: &SiteDims, omega: &PureState) -> Result<()> {
    if omega.dims() != dims {
        return Err(Error::DimMismatch {
            expected: dims.total(),
            found: omega.as_slice().len(),
        });
    }
    Ok(())
}

/// `∏_j 1/(d_j − 1)`.
pub fn purity_bound(dims: &SiteDims) -> f64 {
    1.0 / dims.as_slice().iter().map(|&d| (d - 1) as f64).product::<f64>()
}

/// `Σ_j log(d_j − 1)`, the minimal output entropy of the product channel.
pub fn additivity_rhs(dims: &SiteDims) -> f64 {
    dims.as_slice().iter().map(|&d| ((d - 1) as f64).ln()).sum()
}

/// `∏_{j ∈ Λᶜ} (d_j − 2)` in exact integer arithmetic.
pub fn subset_weight(dims: &SiteDims, lambda: SubsetMask) -> u64 {
    lambda
        .complement(dims.num_sites())
        .sites()
        .map(|j| (dims.get(j) - 2) as u64)
        .product()
}

/// The inclusion–exclusion output `X_N(Ω)`, assembled term by term.
pub fn xn_output(dims: &SiteDims, omega: &PureState) -> Result<DensityMatrix> {
    check_state(dims, omega)?;
    let total = dims.total();
    let conj_proj = omega.conj().projector();
    let mut acc = ComplexMatrix::zeros(total, total);
    for lambda in dims.subsets() {
        let reduced = partial_trace(&conj_proj, dims, lambda)?;
        let term = embed_with_identity(&reduced, dims, lambda)?;
        acc = if lambda.len() % 2 == 0 {
            &acc + &term
        } else {
            &acc - &term
        };
    }
    Ok(DensityMatrix::new_unchecked(
        acc.scale(purity_bound(dims)),
        dims.clone(),
    ))
}

/// `tr ρ_Λ²` for one subset, from the reshaped amplitude matrix `Ψ` with
/// `ρ_Λ = Ψ Ψ*`.
fn reduced_purity(dims: &SiteDims, amps: &[Complex64], lambda: SubsetMask) -> f64 {
    if lambda.is_empty() {
        return 1.0;
    }
    let inside = dims.offsets(lambda);
    let outside = dims.offsets(lambda.complement(dims.num_sites()));
    let mut sum = 0.0;
    for (a, &ia) in inside.iter().enumerate() {
        for &ib in &inside[a..] {
            let entry: Complex64 = outside.iter().map(|&o| amps[ia + o] * amps[ib + o].conj()).sum();
            let w = if ia == ib { 1.0 } else { 2.0 };
            sum += w * entry.norm_sqr();
        }
    }
    sum
}

/// `tr ρ_Λ²` for every `Λ ⊂ {1..N}`, with `tr ρ_∅² = 1`.
pub fn subset_purities(dims: &SiteDims, omega: &PureState) -> Result<BTreeMap<SubsetMask, f64>> {
    check_state(dims, omega)?;
    let conj = omega.conj();
    Ok(dims
        .subsets()
        .map(|lambda| (lambda, reduced_purity(dims, conj.as_slice(), lambda)))
        .collect())
}

/// Closed-form `tr X_N(Ω)²`.
pub fn purity_closed_form(dims: &SiteDims, omega: &PureState) -> Result<f64> {
    let purities = subset_purities(dims, omega)?;
    Ok(closed_form_from_purities(dims, &purities))
}

fn closed_form_from_purities(dims: &SiteDims, purities: &BTreeMap<SubsetMask, f64>) -> f64 {
    let weighted: f64 = purities
        .iter()
        .map(|(&lambda, &purity)| purity * subset_weight(dims, lambda) as f64)
        .sum();
    let denom: u128 = dims.as_slice().iter().map(|&d| ((d - 1) as u128).pow(2)).product();
    weighted / denom as f64
}

/// `tr X_N(Ω)²` from the assembled output matrix.
pub fn purity_brute_force(dims: &SiteDims, omega: &PureState) -> Result<f64> {
    Ok(xn_output(dims, omega)?.purity())
}

/// One term of the closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsetTerm {
    pub purity: f64,
    pub weight: u64,
}

/// Both routes to `tr X_N²` side by side, with the per-subset breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct PurityReport {
    pub closed_form: f64,
    pub brute_force: f64,
    pub bound: f64,
    pub per_subset: BTreeMap<SubsetMask, SubsetTerm>,
}

impl PurityReport {
    pub fn abs_error(&self) -> f64 {
        (self.closed_form - self.brute_force).abs()
    }
}

pub fn purity_report(dims: &SiteDims, omega: &PureState) -> Result<PurityReport> {
    let purities = subset_purities(dims, omega)?;
    let closed_form = closed_form_from_purities(dims, &purities);
    let brute_force = purity_brute_force(dims, omega)?;
    let per_subset = purities
        .iter()
        .map(|(&lambda, &purity)| {
            (
                lambda,
                SubsetTerm {
                    purity,
                    weight: subset_weight(dims, lambda),
                },
            )
        })
        .collect();
    Ok(PurityReport {
        closed_form,
        brute_force,
        bound: purity_bound(dims),
        per_subset,
    })
}

/// Evaluates
/// `Σ_{Δ ⊂ Λᶜ} (−1)^{|Δ|} Σ_{Δ' ⊂ Λᶜ∖Δ} (−1)^{|Δ'|} ∏_{j ∈ (Λᶜ∖Δ)∖Δ'} d_j`
/// by enumerating every `(Δ, Δ')` pair.
pub fn inclusion_exclusion_collapse(dims: &SiteDims, lambda: SubsetMask) -> i128 {
    let rest = lambda.complement(dims.num_sites());
    let mut total: i128 = 0;
    for delta in rest.subsets() {
        let after_delta = rest.difference(delta);
        for delta2 in after_delta.subsets() {
            let prod: i128 = after_delta
                .difference(delta2)
                .sites()
                .map(|j| dims.get(j) as i128)
                .product();
            let sign = if (delta.len() + delta2.len()) % 2 == 0 { 1 } else { -1 };
            total += sign * prod;
        }
    }
    total
}
