//! Site factorizations and subsets of sites.
//!
//! Sites are numbered `0..N` internally. Site 0 is the most significant
//! factor of a row-major flattened multi-index, so for dims `(d0, d1, d2)`
//! the global index of `(i0, i1, i2)` is `(i0 * d1 + i1) * d2 + i2`.

use std::fmt;

use crate::error::{Error, Result};

/// Largest total dimension accepted anywhere in the crate.
pub const MAX_TOTAL_DIM: usize = 1024;

/// Ordered list of local dimensions `(d_1, ..., d_N)`, each at least 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SiteDims {
    dims: Vec<usize>,
}

impl SiteDims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidDims("at least one site is required".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidDims(format!("site dimension {d} is below 2")));
        }
        if dims.len() >= 32 {
            return Err(Error::InvalidDims(format!("{} sites is too many", dims.len())));
        }
        let total = Self::unbounded(dims.clone())?.total();
        if total > MAX_TOTAL_DIM {
            return Err(Error::DimensionTooLarge {
                dim: total,
                max: MAX_TOTAL_DIM,
            });
        }
        Ok(Self { dims })
    }

    /// Dimensions without the total-size cap, for subset combinatorics that
    /// never materialize an operator on the full space.
    pub fn unbounded(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidDims("at least one site is required".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidDims(format!("site dimension {d} is below 2")));
        }
        if dims.len() >= 32 {
            return Err(Error::InvalidDims(format!("{} sites is too many", dims.len())));
        }
        Ok(Self { dims })
    }

    /// A single unstructured site of dimension `d`.
    pub fn single(d: usize) -> Result<Self> {
        Self::new(vec![d])
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_sites(&self) -> usize {
        self.dims.len()
    }

    /// Product of the site dimensions, saturating at `usize::MAX`.
    pub fn total(&self) -> usize {
        self.dims.iter().fold(1usize, |acc, &d| acc.saturating_mul(d))
    }

    pub fn get(&self, site: usize) -> usize {
        self.dims[site]
    }

    /// Row-major strides: `strides[j] = prod_{k > j} d_k`.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for j in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * self.dims[j + 1];
        }
        strides
    }

    /// Product of the dimensions of the sites in `mask`.
    pub fn subset_total(&self, mask: SubsetMask) -> usize {
        mask.sites().map(|j| self.dims[j]).product()
    }

    pub fn full_mask(&self) -> SubsetMask {
        SubsetMask::full(self.num_sites())
    }

    /// Iterate over every subset of sites in ascending bitmask order.
    pub fn subsets(&self) -> impl Iterator<Item = SubsetMask> {
        SubsetMask::all(self.num_sites())
    }

    /// Offsets of every multi-index restricted to `mask`, in row-major order over
    /// the sites of `mask`. Entry `k` is the global offset contributed by the
    /// `k`-th local multi-index on those sites.
    pub(crate) fn offsets(&self, mask: SubsetMask) -> Vec<usize> {
        let strides = self.strides();
        let mut offsets = vec![0usize];
        for j in mask.sites() {
            let mut next = Vec::with_capacity(offsets.len() * self.dims[j]);
            for &base in &offsets {
                for i in 0..self.dims[j] {
                    next.push(base + i * strides[j]);
                }
            }
            offsets = next;
        }
        offsets
    }
}

impl fmt::Display for SiteDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// A subset of sites; bit `j` set means site `j` belongs to the subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SubsetMask(u32);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    pub fn new(bits: u32) -> Self {
        Self(bits)
    }

    /// Validated construction against a number of sites.
    pub fn for_sites(bits: u32, num_sites: usize) -> Result<Self> {
        if num_sites < 32 && (bits >> num_sites) != 0 {
            return Err(Error::InvalidDims(format!(
                "mask {bits:#b} addresses sites beyond {num_sites}"
            )));
        }
        Ok(Self(bits))
    }

    pub fn from_sites<I: IntoIterator<Item = usize>>(sites: I) -> Self {
        Self(sites.into_iter().fold(0, |acc, j| acc | (1 << j)))
    }

    pub fn full(num_sites: usize) -> Self {
        Self(((1u64 << num_sites) - 1) as u32)
    }

    pub fn single(site: usize) -> Self {
        Self(1 << site)
    }

    pub fn all(num_sites: usize) -> impl Iterator<Item = SubsetMask> {
        (0..(1u32 << num_sites)).map(SubsetMask)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, site: usize) -> bool {
        self.0 & (1 << site) != 0
    }

    pub fn complement(self, num_sites: usize) -> Self {
        Self(!self.0 & Self::full(num_sites).0)
    }

    pub fn union(self, other: Self) -> Self {
        Self(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        Self(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        Self(self.0 & !other.0)
    }

    /// Sites in ascending order.
    pub fn sites(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |j| bits & (1 << j) != 0)
    }

    /// Every subset of `self`, ascending by bitmask value.
    pub fn subsets(self) -> impl Iterator<Item = SubsetMask> {
        let sup = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == sup {
                None
            } else {
                Some(((cur | !sup).wrapping_add(1)) & sup)
            };
            Some(SubsetMask(cur))
        })
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.sites().map(|j| (j + 1).to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}
