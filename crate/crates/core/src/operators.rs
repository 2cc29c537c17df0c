//! Adjointable operators on `A^N`.
//!
//! An adjointable operator is an `N × N` block matrix `(t_ij)` over `A`
//! acting by `(T x)_i = Σ_j t_ij ξ_j`. It is stored flattened as an
//! `nN × nN` complex matrix `F`, so that `T x` is `F X` on the stacked form
//! of `x` and the norm in `B^a(A^N)` is the largest singular value of `F`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algebra::{spectral_norm, AlgebraDescriptor, AlgebraElement, C64};
use crate::error::{Error, Result};
use crate::module::ModuleVector;

/// Which constructor produced an operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorTag {
    Generic,
    Identity,
    Theta,
    FiniteRank { terms: usize },
    CoordinateProjection { k: usize },
    DiagonalMultiplier,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModuleOperator {
    desc: AlgebraDescriptor,
    len: usize,
    flat: DMatrix<C64>,
    tag: OperatorTag,
}

impl ModuleOperator {
    /// Builds an operator from its flattened matrix, validating every block.
    pub fn from_flat(desc: AlgebraDescriptor, flat: DMatrix<C64>, tag: OperatorTag) -> Result<Self> {
        let n = desc.dim;
        if !flat.is_square() || flat.nrows() == 0 || !flat.nrows().is_multiple_of(n) {
            return Err(Error::dim(format!(
                "flattened operator {}x{} is not a square multiple of {n}",
                flat.nrows(),
                flat.ncols()
            )));
        }
        let len = flat.nrows() / n;
        for i in 0..len {
            for j in 0..len {
                desc.check_matrix(&flat.view((i * n, j * n), (n, n)).into_owned())?;
            }
        }
        Ok(Self { desc, len, flat, tag })
    }

    fn from_flat_raw(desc: AlgebraDescriptor, flat: DMatrix<C64>, tag: OperatorTag) -> Self {
        let len = flat.nrows() / desc.dim;
        Self { desc, len, flat, tag }
    }

    /// `blocks[i][j] = t_ij`.
    pub fn from_blocks(blocks: &[Vec<AlgebraElement>]) -> Result<Self> {
        let len = blocks.len();
        let first = blocks
            .first()
            .and_then(|r| r.first())
            .ok_or_else(|| Error::dim("operator needs at least one block"))?;
        let desc = first.descriptor();
        let n = desc.dim;
        let mut flat = DMatrix::zeros(n * len, n * len);
        for (i, row) in blocks.iter().enumerate() {
            if row.len() != len {
                return Err(Error::dim(format!(
                    "block row {i} has {} entries, expected {len}",
                    row.len()
                )));
            }
            for (j, b) in row.iter().enumerate() {
                desc.check_same(&b.descriptor())?;
                flat.view_mut((i * n, j * n), (n, n)).copy_from(b.matrix());
            }
        }
        Ok(Self::from_flat_raw(desc, flat, OperatorTag::Generic))
    }

    pub fn identity(desc: AlgebraDescriptor, len: usize) -> Self {
        let size = desc.dim * len;
        Self::from_flat_raw(desc, DMatrix::identity(size, size), OperatorTag::Identity)
    }

    pub fn zero(desc: AlgebraDescriptor, len: usize) -> Self {
        let size = desc.dim * len;
        Self::from_flat_raw(desc, DMatrix::zeros(size, size), OperatorTag::Generic)
    }

    pub fn descriptor(&self) -> AlgebraDescriptor {
        self.desc
    }

    /// Truncation `N`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn tag(&self) -> &OperatorTag {
        &self.tag
    }

    pub fn with_tag(mut self, tag: OperatorTag) -> Self {
        self.tag = tag;
        self
    }

    pub fn flat(&self) -> &DMatrix<C64> {
        &self.flat
    }

    pub fn block(&self, i: usize, j: usize) -> Result<AlgebraElement> {
        for idx in [i, j] {
            if idx >= self.len {
                return Err(Error::Index {
                    index: idx,
                    limit: self.len,
                });
            }
        }
        let n = self.desc.dim;
        let b = self.flat.view((i * n, j * n), (n, n)).into_owned();
        Ok(AlgebraElement::from_raw(self.desc, b))
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        self.desc.check_same(&other.desc)?;
        if self.len != other.len {
            return Err(Error::dim(format!("truncations differ: {} vs {}", self.len, other.len)));
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_shape(other)?;
        Ok(crate::algebra::max_abs(&(&self.flat - &other.flat)))
    }
}

/// `Θ_{y,z} : x ↦ z ⟨y, x⟩`, with blocks `t_ij = ζ_i η_j*`.
pub fn theta(y: &ModuleVector, z: &ModuleVector) -> Result<ModuleOperator> {
    y.descriptor().check_same(&z.descriptor())?;
    if y.len() != z.len() {
        return Err(Error::dim(format!("truncations differ: {} vs {}", y.len(), z.len())));
    }
    let flat = z.stacked() * y.stacked().adjoint();
    Ok(ModuleOperator::from_flat_raw(y.descriptor(), flat, OperatorTag::Theta))
}

/// `Σ λ_i Θ_{y_i, z_i}`.
pub fn finite_rank(terms: &[(C64, ModuleVector, ModuleVector)]) -> Result<ModuleOperator> {
    let (_, y0, _) = terms
        .first()
        .ok_or_else(|| Error::dim("finite-rank operator needs at least one term"))?;
    let mut acc = ModuleOperator::zero(y0.descriptor(), y0.len());
    for (lambda, y, z) in terms {
        let t = theta(y, z)?;
        acc.check_shape(&t)?;
        acc.flat += &t.flat * *lambda;
    }
    Ok(acc.with_tag(OperatorTag::FiniteRank { terms: terms.len() }))
}

/// `(T x)_i = Σ_j t_ij ξ_j`.
pub fn apply(t: &ModuleOperator, x: &ModuleVector) -> Result<ModuleVector> {
    t.desc.check_same(&x.descriptor())?;
    if t.len != x.len() {
        return Err(Error::dim(format!(
            "operator truncation {} vs vector truncation {}",
            t.len,
            x.len()
        )));
    }
    Ok(ModuleVector::from_stacked_raw(t.desc, &t.flat * x.stacked()))
}

/// `(T*)_ji = t_ij*`.
pub fn adjoint_op(t: &ModuleOperator) -> ModuleOperator {
    let tag = match &t.tag {
        tag @ (OperatorTag::Identity | OperatorTag::CoordinateProjection { .. }) => tag.clone(),
        OperatorTag::Theta => OperatorTag::Theta,
        OperatorTag::FiniteRank { terms } => OperatorTag::FiniteRank { terms: *terms },
        _ => OperatorTag::Generic,
    };
    ModuleOperator::from_flat_raw(t.desc, t.flat.adjoint(), tag)
}

/// `T S`.
pub fn compose(t: &ModuleOperator, s: &ModuleOperator) -> Result<ModuleOperator> {
    t.check_shape(s)?;
    Ok(ModuleOperator::from_flat_raw(
        t.desc,
        &t.flat * &s.flat,
        OperatorTag::Generic,
    ))
}

/// `Σ λ_i T_i`.
pub fn lincomb(terms: &[(C64, &ModuleOperator)]) -> Result<ModuleOperator> {
    let (_, first) = terms
        .first()
        .ok_or_else(|| Error::dim("linear combination needs at least one term"))?;
    let mut acc = ModuleOperator::zero(first.desc, first.len);
    for (lambda, t) in terms {
        acc.check_shape(t)?;
        acc.flat += &t.flat * *lambda;
    }
    Ok(acc)
}

/// Norm in `B^a(A^N)`: the largest singular value of the flattened matrix.
pub fn operator_norm(t: &ModuleOperator, tol: f64) -> Result<f64> {
    spectral_norm(&t.flat, tol)
}

/// `P_k`: unit blocks on the first `k` diagonal slots.
pub fn coordinate_projection(desc: AlgebraDescriptor, len: usize, k: usize) -> Result<ModuleOperator> {
    if k > len {
        return Err(Error::Index { index: k, limit: len });
    }
    let size = desc.dim * len;
    let mut flat = DMatrix::zeros(size, size);
    for i in 0..desc.dim * k {
        flat[(i, i)] = C64::new(1.0, 0.0);
    }
    Ok(ModuleOperator::from_flat_raw(
        desc,
        flat,
        OperatorTag::CoordinateProjection { k },
    ))
}

/// `I - P_k`.
pub fn co_projection(desc: AlgebraDescriptor, len: usize, k: usize) -> Result<ModuleOperator> {
    let p = coordinate_projection(desc, len, k)?;
    let size = desc.dim * len;
    let flat = DMatrix::identity(size, size) - p.flat;
    Ok(ModuleOperator::from_flat_raw(desc, flat, OperatorTag::Generic))
}

/// `(ξ_j)_j ↦ (a_j ξ_j)_j`.
pub fn diagonal_multiplier(entries: &[AlgebraElement]) -> Result<ModuleOperator> {
    let first = entries
        .first()
        .ok_or_else(|| Error::dim("diagonal multiplier needs at least one entry"))?;
    let desc = first.descriptor();
    let n = desc.dim;
    let len = entries.len();
    let mut flat = DMatrix::zeros(n * len, n * len);
    for (j, a) in entries.iter().enumerate() {
        desc.check_same(&a.descriptor())?;
        flat.view_mut((j * n, j * n), (n, n)).copy_from(a.matrix());
    }
    Ok(ModuleOperator::from_flat_raw(
        desc,
        flat,
        OperatorTag::DiagonalMultiplier,
    ))
}

/// `‖(I - P_k) T‖` with rows `0..k` of the flattened matrix dropped.
pub fn tail_norm(t: &ModuleOperator, k: usize, tol: f64) -> Result<f64> {
    if k > t.len {
        return Err(Error::Index { index: k, limit: t.len });
    }
    let n = t.desc.dim;
    let rows = t.flat.rows(k * n, (t.len - k) * n).into_owned();
    spectral_norm(&rows, tol)
}

/// The profile `k ↦ ‖T - P_k T‖` for `k = 0..=N`.
///
/// Non-increasing in `k` and zero at `k = N`; how fast it decays is the
/// finite-truncation surrogate for being a norm limit of finite-rank operators.
pub fn compactness_profile(t: &ModuleOperator, tol: f64) -> Result<Vec<f64>> {
    (0..=t.len).map(|k| tail_norm(t, k, tol)).collect()
}
