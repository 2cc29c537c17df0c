//! Finite-dimensional W*-algebras: `M_n(C)` and its diagonal (commutative)
//! subalgebra.
//!
//! Elements are dense complex matrices tagged with the descriptor of the
//! algebra they live in. Spectral quantities go through nalgebra's SVD and
//! Hermitian eigensolvers, with a power-iteration fallback for the norm.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling;

pub type C64 = Complex64;

/// Iteration cap shared by the eigensolvers and the power-iteration fallback.
pub const MAX_ITERATIONS: usize = 100_000;

/// Below this distance `unitary_from_to` returns the identity.
const PARALLEL_THRESHOLD: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraDescriptor {
    pub dim: usize,
    #[serde(default)]
    pub commutative: bool,
}

impl AlgebraDescriptor {
    pub fn new(dim: usize, commutative: bool) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("algebra dimension must be at least 1"));
        }
        Ok(Self { dim, commutative })
    }

    /// The full matrix algebra `M_n(C)`.
    pub fn full(dim: usize) -> Self {
        assert!(dim >= 1, "algebra dimension must be at least 1");
        Self {
            dim,
            commutative: false,
        }
    }

    /// The diagonal subalgebra of `M_n(C)`.
    pub fn diagonal(dim: usize) -> Self {
        assert!(dim >= 1, "algebra dimension must be at least 1");
        Self { dim, commutative: true }
    }

    pub(crate) fn check_same(&self, other: &Self) -> Result<()> {
        if self != other {
            return Err(Error::dim(format!("algebra descriptors differ: {self:?} vs {other:?}")));
        }
        Ok(())
    }

    /// Checks that `m` is a legal element of this algebra.
    pub(crate) fn check_matrix(&self, m: &DMatrix<C64>) -> Result<()> {
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(Error::dim(format!(
                "expected {0}x{0} matrix, got {1}x{2}",
                self.dim,
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("matrix has non-finite entries"));
        }
        if self.commutative && !is_diagonal(m) {
            return Err(Error::domain("commutative algebra elements must be diagonal"));
        }
        Ok(())
    }
}

pub(crate) fn is_diagonal(m: &DMatrix<C64>) -> bool {
    m.iter()
        .enumerate()
        .all(|(idx, z)| idx % m.nrows() == idx / m.nrows() || *z == C64::new(0.0, 0.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    desc: AlgebraDescriptor,
    m: DMatrix<C64>,
}

impl AlgebraElement {
    pub fn new(desc: AlgebraDescriptor, m: DMatrix<C64>) -> Result<Self> {
        desc.check_matrix(&m)?;
        Ok(Self { desc, m })
    }

    /// Skips validation. Callers guarantee shape and diagonality.
    pub(crate) fn from_raw(desc: AlgebraDescriptor, m: DMatrix<C64>) -> Self {
        debug_assert!(m.nrows() == desc.dim && m.ncols() == desc.dim);
        Self { desc, m }
    }

    pub fn from_rows(desc: AlgebraDescriptor, rows: &[&[C64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::dim("rows of unequal length"));
        }
        let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::new(desc, m)
    }

    /// Convenience for real-valued matrices given row by row.
    pub fn from_real_rows(desc: AlgebraDescriptor, rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::dim("rows of unequal length"));
        }
        let m = DMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j], 0.0));
        Self::new(desc, m)
    }

    pub fn from_diagonal(desc: AlgebraDescriptor, diag: &[C64]) -> Result<Self> {
        if diag.len() != desc.dim {
            return Err(Error::dim(format!(
                "diagonal of length {} for dimension {}",
                diag.len(),
                desc.dim
            )));
        }
        let m = DMatrix::from_diagonal(&DVector::from_column_slice(diag));
        Self::new(desc, m)
    }

    pub fn from_real_diagonal(desc: AlgebraDescriptor, diag: &[f64]) -> Result<Self> {
        let diag: Vec<C64> = diag.iter().map(|&d| C64::new(d, 0.0)).collect();
        Self::from_diagonal(desc, &diag)
    }

    pub fn unit(desc: AlgebraDescriptor) -> Self {
        Self::from_raw(desc, DMatrix::identity(desc.dim, desc.dim))
    }

    pub fn zero(desc: AlgebraDescriptor) -> Self {
        Self::from_raw(desc, DMatrix::zeros(desc.dim, desc.dim))
    }

    pub fn scalar(desc: AlgebraDescriptor, c: C64) -> Self {
        Self::from_raw(desc, DMatrix::identity(desc.dim, desc.dim) * c)
    }

    /// Matrix unit `E_kk` (zero-based `k`).
    pub fn matrix_unit(desc: AlgebraDescriptor, k: usize) -> Result<Self> {
        if k >= desc.dim {
            return Err(Error::Index {
                index: k,
                limit: desc.dim,
            });
        }
        let mut m = DMatrix::zeros(desc.dim, desc.dim);
        m[(k, k)] = C64::new(1.0, 0.0);
        Ok(Self::from_raw(desc, m))
    }

    pub fn descriptor(&self) -> AlgebraDescriptor {
        self.desc
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.m
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.desc.check_same(&other.desc)?;
        Ok(Self::from_raw(self.desc, &self.m + &other.m))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.desc.check_same(&other.desc)?;
        Ok(Self::from_raw(self.desc, &self.m - &other.m))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.desc.check_same(&other.desc)?;
        Ok(Self::from_raw(self.desc, &self.m * &other.m))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_raw(self.desc, self.m.adjoint())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_raw(self.desc, &self.m * c)
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    /// Largest entry modulus; the `max` norm used for residuals.
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.m)
    }

    /// C*-norm (largest singular value).
    pub fn norm(&self, tol: f64) -> Result<f64> {
        operator_norm_alg(self, tol)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        hermitian_defect(&self.m) <= tol
    }
}

pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermitian_defect(m: &DMatrix<C64>) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Largest singular value of `a`.
pub fn operator_norm_alg(a: &AlgebraElement, tol: f64) -> Result<f64> {
    spectral_norm(&a.m, tol)
}

/// Largest singular value of an arbitrary dense matrix.
///
/// Uses the SVD; if it fails to converge within the iteration cap, falls back
/// to power iteration on `m* m` with relative stopping tolerance `tol`.
pub fn spectral_norm(m: &DMatrix<C64>, tol: f64) -> Result<f64> {
    if m.is_empty() {
        return Ok(0.0);
    }
    if let Some(svd) = m.clone().try_svd(false, false, f64::EPSILON, MAX_ITERATIONS) {
        return Ok(svd.singular_values.max());
    }
    let gram = m.adjoint() * m;
    power_iteration(&gram, tol).map(|lambda| lambda.max(0.0).sqrt())
}

/// Dominant eigenvalue of a Hermitian positive semidefinite matrix.
fn power_iteration(h: &DMatrix<C64>, tol: f64) -> Result<f64> {
    let n = h.nrows();
    let mut v = DVector::from_element(n, C64::new(1.0 / (n as f64).sqrt(), 0.0));
    let mut lambda = 0.0;
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        let w = h * &v;
        let norm = w.norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        let next = v.dotc(&w).re;
        v = w / C64::new(norm, 0.0);
        residual = (next - lambda).abs();
        lambda = next;
        if residual <= tol * lambda.abs().max(1.0) {
            return Ok(lambda);
        }
    }
    Err(Error::Numeric {
        context: "power iteration".into(),
        residual,
    })
}

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and the
/// matching orthonormal eigenvectors (as columns).
pub(crate) fn hermitian_eigen(m: &DMatrix<C64>) -> Result<(Vec<f64>, DMatrix<C64>)> {
    // Symmetrize so the solver sees an exactly Hermitian input.
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, MAX_ITERATIONS).ok_or_else(|| Error::Numeric {
        context: "Hermitian eigendecomposition".into(),
        residual: hermitian_defect(m),
    })?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(a: &AlgebraElement) -> Result<f64> {
    let (values, _) = hermitian_eigen(&a.m)?;
    Ok(values[0])
}

/// Largest eigenvalue of a positive semidefinite `a` with a unit eigenvector.
///
/// Rejects non-Hermitian input and input with an eigenvalue below `-tol`.
pub fn top_eigenpair(a: &AlgebraElement, tol: f64) -> Result<(f64, DVector<C64>)> {
    let scale = a.max_abs().max(1.0);
    let defect = hermitian_defect(&a.m);
    if defect > tol * scale {
        return Err(Error::domain(format!("matrix is not Hermitian (defect {defect:e})")));
    }
    let (values, vectors) = hermitian_eigen(&a.m)?;
    if values[0] < -tol * scale {
        return Err(Error::domain(format!(
            "matrix is not positive semidefinite (min eigenvalue {:e})",
            values[0]
        )));
    }
    let last = values.len() - 1;
    let h = vectors.column(last).into_owned();
    Ok((values[last], h))
}

fn check_unit(v: &DVector<C64>, what: &str) -> Result<()> {
    let norm = v.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::domain(format!("{what} is not a unit vector (norm {norm})")));
    }
    Ok(())
}

/// A unitary `u` in `M_n(C)` with `u psi = h`.
///
/// Built as a Householder reflection composed with a global phase: the phase
/// rotates `psi` so its overlap with `h` is real, then the reflection across
/// the bisector swaps the two.
pub fn unitary_from_to(psi: &DVector<C64>, h: &DVector<C64>) -> Result<AlgebraElement> {
    if psi.len() != h.len() {
        return Err(Error::dim(format!("vectors of length {} and {}", psi.len(), h.len())));
    }
    check_unit(psi, "psi")?;
    check_unit(h, "h")?;
    let n = psi.len();
    let desc = AlgebraDescriptor::full(n);
    if (psi - h).norm() < PARALLEL_THRESHOLD {
        return Ok(AlgebraElement::unit(desc));
    }
    let overlap = psi.dotc(h);
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let rotated = psi * phase;
    let w = &rotated - h;
    let w_norm_sq = w.norm_squared();
    let mut u = DMatrix::<C64>::identity(n, n) * phase;
    if w_norm_sq > 0.0 {
        let reflection = DMatrix::<C64>::identity(n, n) - (&w * w.adjoint()) * C64::new(2.0 / w_norm_sq, 0.0);
        u = reflection * u;
    }
    Ok(AlgebraElement::from_raw(desc, u))
}

/// Seeded Haar-like unitary: QR of a complex Gaussian matrix with the phases
/// of `R`'s diagonal folded back into `Q`. For a commutative descriptor the
/// result is a diagonal matrix of random unimodular phases.
pub fn random_unitary(desc: AlgebraDescriptor, seed: u64) -> AlgebraElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_unitary_with(desc, &mut rng)
}

pub fn random_unitary_with(desc: AlgebraDescriptor, rng: &mut ChaCha8Rng) -> AlgebraElement {
    let n = desc.dim;
    if desc.commutative {
        let phases: Vec<C64> = (0..n)
            .map(|_| C64::from_polar(1.0, sampling::uniform_angle(rng)))
            .collect();
        return AlgebraElement::from_raw(desc, DMatrix::from_diagonal(&DVector::from_vec(phases)));
    }
    let g = DMatrix::from_fn(n, n, |_, _| sampling::complex_gaussian(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    AlgebraElement::from_raw(desc, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn full2() -> AlgebraDescriptor {
        AlgebraDescriptor::full(2)
    }

    #[test]
    fn descriptor_rejects_zero_dim() {
        assert!(AlgebraDescriptor::new(0, false).is_err());
    }

    #[test]
    fn commutative_rejects_off_diagonal() {
        let d = AlgebraDescriptor::diagonal(2);
        let err = AlgebraElement::from_real_rows(d, &[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_nan() {
        let err = AlgebraElement::from_real_rows(full2(), &[&[f64::NAN, 0.0], &[0.0, 1.0]]);
        assert!(err.is_err());
    }

    #[test]
    fn hand_product() {
        let a = AlgebraElement::from_real_rows(full2(), &[&[1.0, 0.0], &[0.0, 0.0]]).unwrap();
        let b = AlgebraElement::from_real_rows(full2(), &[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let prod = a.adjoint().mul(&b).unwrap();
        let expected = AlgebraElement::from_real_rows(full2(), &[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert_eq!(prod, expected);
    }

    #[test]
    fn unit_and_involution() {
        let a = AlgebraElement::from_rows(
            full2(),
            &[&[C64::new(1.0, 2.0), c(3.0)], &[C64::new(0.0, -1.0), c(4.0)]],
        )
        .unwrap();
        assert_eq!(a.adjoint().adjoint(), a);
        assert_eq!(AlgebraElement::unit(full2()).mul(&a).unwrap(), a);
    }

    #[test]
    fn descriptor_mismatch() {
        let a = AlgebraElement::unit(full2());
        let b = AlgebraElement::unit(AlgebraDescriptor::full(3));
        assert!(matches!(a.mul(&b), Err(Error::Dimension(_))));
    }

    #[test]
    fn norms() {
        let id = AlgebraElement::unit(full2());
        assert!((operator_norm_alg(&id, TOL).unwrap() - 1.0).abs() < TOL);
        let d = AlgebraElement::from_real_diagonal(full2(), &[2.0, 1.0]).unwrap();
        assert!((operator_norm_alg(&d, TOL).unwrap() - 2.0).abs() < TOL);
        let nil = AlgebraElement::from_real_rows(full2(), &[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!((operator_norm_alg(&nil, TOL).unwrap() - 1.0).abs() < TOL);
    }

    #[test]
    fn power_iteration_agrees_with_svd() {
        let m = DMatrix::from_fn(3, 3, |i, j| c((i * 3 + j) as f64 - 4.0));
        let svd = spectral_norm(&m, 1e-12).unwrap();
        let power = power_iteration(&(m.adjoint() * &m), 1e-14).unwrap().sqrt();
        assert!((svd - power).abs() < 1e-8);
    }

    #[test]
    fn eigenpair_diag() {
        let d = AlgebraElement::from_real_diagonal(full2(), &[2.0, 1.0]).unwrap();
        let (lambda, h) = top_eigenpair(&d, TOL).unwrap();
        assert!((lambda - 2.0).abs() < TOL);
        assert!((h[0].norm() - 1.0).abs() < TOL);
        assert!(h[1].norm() < TOL);
    }

    #[test]
    fn eigenpair_zero_and_rank_one() {
        let z = AlgebraElement::zero(full2());
        let (lambda, h) = top_eigenpair(&z, TOL).unwrap();
        assert_eq!(lambda, 0.0);
        assert!((h.norm() - 1.0).abs() < TOL);

        let psi = DVector::from_vec(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
        let proj = AlgebraElement::new(full2(), &psi * psi.adjoint()).unwrap();
        let (lambda, h) = top_eigenpair(&proj, TOL).unwrap();
        assert!((lambda - 1.0).abs() < TOL);
        assert!((h.dotc(&psi).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigenpair_rejects_non_hermitian() {
        let nil = AlgebraElement::from_real_rows(full2(), &[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(top_eigenpair(&nil, 1e-10), Err(Error::Domain(_))));
        let neg = AlgebraElement::from_real_diagonal(full2(), &[-1.0, 1.0]).unwrap();
        assert!(matches!(top_eigenpair(&neg, 1e-10), Err(Error::Domain(_))));
    }

    #[test]
    fn unitary_basis_swap() {
        let e1 = DVector::from_vec(vec![c(1.0), c(0.0)]);
        let e2 = DVector::from_vec(vec![c(0.0), c(1.0)]);
        let u = unitary_from_to(&e1, &e2).unwrap();
        assert!((u.matrix() * &e1 - &e2).norm() < 1e-14);
        let defect = u.matrix().adjoint() * u.matrix() - DMatrix::identity(2, 2);
        assert!(max_abs(&defect) < 1e-14);
        assert_eq!(unitary_from_to(&e1, &e1).unwrap(), AlgebraElement::unit(full2()));
    }

    #[test]
    fn unitary_rejects_non_unit() {
        let v = DVector::from_vec(vec![c(2.0), c(0.0)]);
        let e1 = DVector::from_vec(vec![c(1.0), c(0.0)]);
        assert!(matches!(unitary_from_to(&v, &e1), Err(Error::Domain(_))));
    }

    #[test]
    fn random_unitary_properties() {
        for desc in [AlgebraDescriptor::full(4), AlgebraDescriptor::diagonal(4)] {
            let u = random_unitary(desc, 7);
            assert_eq!(u, random_unitary(desc, 7));
            let defect = u.matrix().adjoint() * u.matrix() - DMatrix::identity(4, 4);
            assert!(max_abs(&defect) <= 1e-12);
            assert!((operator_norm_alg(&u, TOL).unwrap() - 1.0).abs() < 1e-12);
            assert!(desc.check_matrix(u.matrix()).is_ok());
        }
    }
}
