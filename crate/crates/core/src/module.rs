//! The truncated standard Hilbert module `A^N`.
//!
//! A vector `x = (ξ_1, …, ξ_N)` is stored as the `nN × n` matrix obtained by
//! stacking its entries vertically. With that layout the A-valued inner
//! product `⟨x, y⟩ = Σ ξ_j* η_j` is the single product `X* Y`, and the module
//! norm `‖⟨x, x⟩‖^{1/2}` is the largest singular value of `X`.
//!
//! Slots are zero-based throughout the API.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{hermitian_eigen, AlgebraDescriptor, AlgebraElement, C64};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ModuleVector {
    desc: AlgebraDescriptor,
    len: usize,
    stacked: DMatrix<C64>,
}

impl ModuleVector {
    pub fn zero(desc: AlgebraDescriptor, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::dim("truncation must be at least 1"));
        }
        Ok(Self {
            desc,
            len,
            stacked: DMatrix::zeros(desc.dim * len, desc.dim),
        })
    }

    pub fn from_entries(entries: &[AlgebraElement]) -> Result<Self> {
        let first = entries
            .first()
            .ok_or_else(|| Error::dim("truncation must be at least 1"))?;
        let desc = first.descriptor();
        let n = desc.dim;
        let mut stacked = DMatrix::zeros(n * entries.len(), n);
        for (j, e) in entries.iter().enumerate() {
            desc.check_same(&e.descriptor())?;
            stacked.view_mut((j * n, 0), (n, n)).copy_from(e.matrix());
        }
        Ok(Self {
            desc,
            len: entries.len(),
            stacked,
        })
    }

    /// Builds a vector from its stacked `nN × n` form, validating every block.
    pub fn from_stacked(desc: AlgebraDescriptor, stacked: DMatrix<C64>) -> Result<Self> {
        let n = desc.dim;
        if stacked.ncols() != n || stacked.nrows() == 0 || !stacked.nrows().is_multiple_of(n) {
            return Err(Error::dim(format!(
                "stacked matrix {}x{} is not (N*{n})x{n}",
                stacked.nrows(),
                stacked.ncols()
            )));
        }
        let len = stacked.nrows() / n;
        for j in 0..len {
            desc.check_matrix(&stacked.view((j * n, 0), (n, n)).into_owned())?;
        }
        Ok(Self { desc, len, stacked })
    }

    pub(crate) fn from_stacked_raw(desc: AlgebraDescriptor, stacked: DMatrix<C64>) -> Self {
        debug_assert_eq!(stacked.ncols(), desc.dim);
        let len = stacked.nrows() / desc.dim;
        Self { desc, len, stacked }
    }

    pub fn descriptor(&self) -> AlgebraDescriptor {
        self.desc
    }

    /// Truncation length `N`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn stacked(&self) -> &DMatrix<C64> {
        &self.stacked
    }

    pub fn entry(&self, slot: usize) -> Result<AlgebraElement> {
        if slot >= self.len {
            return Err(Error::Index {
                index: slot,
                limit: self.len,
            });
        }
        let n = self.desc.dim;
        let block = self.stacked.view((slot * n, 0), (n, n)).into_owned();
        Ok(AlgebraElement::from_raw(self.desc, block))
    }

    pub fn entries(&self) -> Vec<AlgebraElement> {
        (0..self.len).map(|j| self.entry(j).expect("slot in range")).collect()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        self.desc.check_same(&other.desc)?;
        if self.len != other.len {
            return Err(Error::dim(format!("truncations differ: {} vs {}", self.len, other.len)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self::from_stacked_raw(self.desc, &self.stacked + &other.stacked))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self::from_stacked_raw(self.desc, &self.stacked - &other.stacked))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_stacked_raw(self.desc, &self.stacked * c)
    }

    /// Module norm `‖⟨x, x⟩‖^{1/2}`.
    pub fn norm(&self) -> Result<f64> {
        module_norm(self)
    }

    /// Largest entry modulus over all slots.
    pub fn max_abs(&self) -> f64 {
        crate::algebra::max_abs(&self.stacked)
    }
}

/// `⟨x, y⟩ = Σ_j ξ_j* η_j`.
pub fn inner_product(x: &ModuleVector, y: &ModuleVector) -> Result<AlgebraElement> {
    x.check_compatible(y)?;
    Ok(AlgebraElement::from_raw(x.desc, x.stacked.adjoint() * &y.stacked))
}

pub fn module_norm(x: &ModuleVector) -> Result<f64> {
    let gram = x.stacked.adjoint() * &x.stacked;
    let (values, _) = hermitian_eigen(&gram)?;
    Ok(values.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// `e_slot · a`: the vector carrying `a` in `slot` and zero elsewhere.
pub fn basis_vector(len: usize, slot: usize, a: &AlgebraElement) -> Result<ModuleVector> {
    if slot >= len {
        return Err(Error::Index {
            index: slot,
            limit: len,
        });
    }
    let desc = a.descriptor();
    let n = desc.dim;
    let mut x = ModuleVector::zero(desc, len)?;
    x.stacked.view_mut((slot * n, 0), (n, n)).copy_from(a.matrix());
    Ok(x)
}

/// `e_slot` with the unit of the algebra.
pub fn unit_basis_vector(desc: AlgebraDescriptor, len: usize, slot: usize) -> Result<ModuleVector> {
    basis_vector(len, slot, &AlgebraElement::unit(desc))
}

/// `P_k x`: keeps the first `k` slots.
pub fn coord_project(k: usize, x: &ModuleVector) -> Result<ModuleVector> {
    if k > x.len {
        return Err(Error::Index { index: k, limit: x.len });
    }
    let n = x.desc.dim;
    let mut out = x.clone();
    out.stacked.rows_mut(k * n, (x.len - k) * n).fill(C64::new(0.0, 0.0));
    Ok(out)
}

/// Right module action `(ξ_j a)_j`.
pub fn right_mul(x: &ModuleVector, a: &AlgebraElement) -> Result<ModuleVector> {
    x.desc.check_same(&a.descriptor())?;
    Ok(ModuleVector::from_stacked_raw(x.desc, &x.stacked * a.matrix()))
}

/// Embeds a unit vector `v ∈ C^{nN}` as the module vector whose `j`-th entry
/// has the `j`-th length-`n` block of `v` as its first column and zeros
/// elsewhere. Then `⟨x, x⟩ = e_1 e_1*` scaled by `‖v‖²`, so `‖x‖ = ‖v‖ = 1`,
/// and for any operator `T` with flattened matrix `F`, `‖T x‖ = ‖F v‖`.
pub fn rank_one_from_unit(desc: AlgebraDescriptor, v: &DVector<C64>) -> Result<ModuleVector> {
    let n = desc.dim;
    if v.is_empty() || !v.len().is_multiple_of(n) {
        return Err(Error::dim(format!(
            "vector length {} is not a multiple of {n}",
            v.len()
        )));
    }
    let norm = v.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::domain(format!("embedding needs a unit vector (norm {norm})")));
    }
    if desc.commutative && n > 1 {
        return Err(Error::UnsupportedAlgebra(
            "first-column embedding leaves the diagonal subalgebra".into(),
        ));
    }
    let mut stacked = DMatrix::zeros(v.len(), n);
    stacked.column_mut(0).copy_from(v);
    Ok(ModuleVector::from_stacked_raw(desc, stacked))
}
