//! Mixed-dimension qudit registers and operator embedding.
//!
//! A register is an ordered list of local dimensions (2 for qubits, 3 for
//! qutrits; mixed registers are allowed). Site 0 is the most significant
//! digit of the computational index.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::linalg::{CMat, MAX_REGISTER_DIM};

/// Shape of a qudit register: per-site local dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterShape {
    dims: Vec<usize>,
}

impl RegisterShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(SimError::InvalidParameter("register needs at least one site".into()));
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(SimError::InvalidParameter(format!("local dimension {d} < 2")));
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = total
                .checked_mul(d)
                .filter(|&t| t <= MAX_REGISTER_DIM)
                .ok_or(SimError::RegisterTooLarge { dim: usize::MAX, cap: MAX_REGISTER_DIM })?;
        }
        Ok(Self { dims })
    }

    /// Uniform register of `n` sites with local dimension `d`.
    pub fn uniform(d: usize, n: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    pub fn n_sites(&self) -> usize {
        self.dims.len()
    }

    pub fn dim_at(&self, site: usize) -> usize {
        self.dims[site]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Row-major strides: site 0 is most significant.
    pub fn strides(&self) -> Vec<usize> {
        let n = self.dims.len();
        let mut s = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.dims[i + 1];
        }
        s
    }

    /// Digits of a computational index, site-ordered.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let strides = self.strides();
        let mut out = Vec::with_capacity(self.dims.len());
        for s in strides {
            out.push(index / s);
            index %= s;
        }
        out
    }

    /// Computational index from site digits.
    pub fn index_of(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.dims.len());
        self.strides().iter().zip(digits).map(|(s, d)| s * d).sum()
    }

    fn check_sites(&self, sites: &[usize]) -> Result<()> {
        for (i, &s) in sites.iter().enumerate() {
            if s >= self.dims.len() {
                return Err(SimError::SiteOutOfRange { site: s, n_sites: self.dims.len() });
            }
            if sites[..i].contains(&s) {
                return Err(SimError::DuplicateSite { site: s });
            }
        }
        Ok(())
    }
}

/// Precomputed index arithmetic for one (register, target-sites) pair.
///
/// Splits every computational index `I` into `I = target_offsets[t] +
/// comp_offsets[c]`, where `t` runs over the targeted sub-register (digits in
/// the order the sites were listed) and `c` over everything else. All local
/// kernels in [`crate::density`] are loops over these two offset tables.
#[derive(Debug, Clone)]
pub struct SiteIndexer {
    /// Combined dimension of the targeted sites.
    pub target_dim: usize,
    /// Dimension of the complement.
    pub comp_dim: usize,
    /// Offset of each target multi-index into the full register index.
    pub target_offsets: Vec<usize>,
    /// Offset of each complement multi-index.
    pub comp_offsets: Vec<usize>,
}

impl SiteIndexer {
    pub fn new(shape: &RegisterShape, sites: &[usize]) -> Result<Self> {
        shape.check_sites(sites)?;
        let strides = shape.strides();
        let target_dims: Vec<usize> = sites.iter().map(|&s| shape.dim_at(s)).collect();
        let target_dim: usize = target_dims.iter().product();

        let mut target_offsets = vec![0usize; target_dim.max(1)];
        for (t, off) in target_offsets.iter_mut().enumerate() {
            let mut rem = t;
            let mut acc = 0usize;
            // First listed site is the most significant digit of `t`.
            for (pos, &site) in sites.iter().enumerate() {
                let radix: usize = target_dims[pos + 1..].iter().product();
                let digit = rem / radix;
                rem %= radix;
                acc += digit * strides[site];
            }
            *off = acc;
        }

        let comp_sites: Vec<usize> =
            (0..shape.n_sites()).filter(|s| !sites.contains(s)).collect();
        let comp_dims: Vec<usize> = comp_sites.iter().map(|&s| shape.dim_at(s)).collect();
        let comp_dim: usize = comp_dims.iter().product();
        let mut comp_offsets = vec![0usize; comp_dim.max(1)];
        for (c, off) in comp_offsets.iter_mut().enumerate() {
            let mut rem = c;
            let mut acc = 0usize;
            for (pos, &site) in comp_sites.iter().enumerate() {
                let radix: usize = comp_dims[pos + 1..].iter().product();
                let digit = rem / radix;
                rem %= radix;
                acc += digit * strides[site];
            }
            *off = acc;
        }

        Ok(Self { target_dim, comp_dim, target_offsets, comp_offsets })
    }
}

/// Embed `op` (acting on `sites`, tensor factors in listed order) into the
/// full register, identity on all other sites.
pub fn embed(op: &CMat, sites: &[usize], shape: &RegisterShape) -> Result<CMat> {
    let idx = SiteIndexer::new(shape, sites)?;
    if !op.is_square() || op.rows() != idx.target_dim {
        return Err(SimError::DimensionMismatch(format!(
            "operator is {}×{}, targeted sub-register has dimension {}",
            op.rows(),
            op.cols(),
            idx.target_dim
        )));
    }
    let total = shape.total_dim();
    let mut out = CMat::zeros(total, total);
    for t in 0..idx.target_dim {
        for t2 in 0..idx.target_dim {
            let v = op.get(t, t2);
            if v.re == 0.0 && v.im == 0.0 {
                continue;
            }
            for &co in &idx.comp_offsets {
                out.set(idx.target_offsets[t] + co, idx.target_offsets[t2] + co, v);
            }
        }
    }
    Ok(out)
}

/// Standard basis ket |index⟩ on the register.
pub fn basis_ket(shape: &RegisterShape, index: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); shape.total_dim()];
    v[index] = C64::new(1.0, 0.0);
    v
}
