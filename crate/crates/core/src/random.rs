//! Seeded random states and unitaries.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dims::SiteDims;
use crate::error::Result;
use crate::linalg::ComplexMatrix;
use crate::state::{DensityMatrix, PureState};

pub type StdRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> StdRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `index`-th independent stream derived from `seed`.
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    mix64(seed ^ index)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| complex_gaussian(rng)).collect()
}

/// Normalized complex Gaussian vector (unitarily invariant distribution).
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, dims: &SiteDims) -> PureState {
    loop {
        let v = gaussian_vector(rng, dims.total());
        if let Ok(s) = PureState::normalized(v, dims.clone()) {
            return s;
        }
    }
}

/// Tensor product of independent random single-site states.
pub fn random_product_state<R: Rng + ?Sized>(rng: &mut R, dims: &SiteDims) -> Result<PureState> {
    let factors: Result<Vec<PureState>> = dims
        .as_slice()
        .iter()
        .map(|&d| Ok(random_pure_state(rng, &SiteDims::single(d)?)))
        .collect();
    PureState::product(&factors?)
}

/// `G G* / tr(G G*)` for a complex Gaussian `G` of the given rank.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R, dims: &SiteDims, rank: usize) -> DensityMatrix {
    let d = dims.total();
    let g = ComplexMatrix::from_fn(d, rank.max(1), |_, _| complex_gaussian(rng));
    let w = g.matmul(&g.adjoint()).hermitian_part();
    let tr = w.trace().re;
    DensityMatrix::new_unchecked(w.scale(1.0 / tr), dims.clone())
}

/// Random unitary from the QR decomposition of a complex Gaussian matrix.
///
/// Modified Gram–Schmidt leaves `R` with a positive real diagonal, which is the
/// phase convention that makes the distribution Haar.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = (0..d).map(|_| gaussian_vector(rng, d)).collect();
    for j in 0..d {
        for k in 0..j {
            let (head, tail) = cols.split_at_mut(j);
            let qk = &head[k];
            let cj = &mut tail[0];
            let proj: Complex64 = qk.iter().zip(cj.iter()).map(|(a, b)| a.conj() * b).sum();
            for (x, q) in cj.iter_mut().zip(qk) {
                *x -= proj * q;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in &mut cols[j] {
            *x /= norm;
        }
    }
    ComplexMatrix::from_fn(d, d, |i, j| cols[j][i])
}

/// Diagonal unitary with uniformly random phases.
pub fn random_diagonal_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let mut u = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        u[(i, i)] = Complex64::from_polar(1.0, theta);
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = rng_from_seed(3);
        for d in 1..8 {
            let u = random_unitary(&mut rng, d);
            assert!(u.unitarity_deviation() < 1e-12);
        }
    }

    #[test]
    fn seeded_streams_repeat() {
        let dims = SiteDims::new(vec![2, 3]).unwrap();
        let a = random_pure_state(&mut rng_from_seed(11), &dims);
        let b = random_pure_state(&mut rng_from_seed(11), &dims);
        assert_eq!(a, b);
        assert_ne!(sub_seed(11, 0), sub_seed(11, 1));
    }

    #[test]
    fn density_matrix_is_valid() {
        let mut rng = rng_from_seed(5);
        let dims = SiteDims::new(vec![3, 2]).unwrap();
        for rank in [1, 2, 6] {
            let rho = random_density_matrix(&mut rng, &dims, rank);
            assert!(DensityMatrix::new(rho.matrix().clone(), dims.clone()).is_ok());
        }
    }
}
