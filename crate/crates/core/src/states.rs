//! Normal states as density matrices, `φ(a) = tr(ρ a)`.
//!
//! For the diagonal algebra a state is a probability vector on the diagonal;
//! it uses the same type with a diagonal `ρ`.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{hermitian_defect, hermitian_eigen, top_eigenpair, AlgebraDescriptor, AlgebraElement, C64};
use crate::error::{Error, Result};

const STATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct NormalState {
    desc: AlgebraDescriptor,
    rho: DMatrix<C64>,
}

impl NormalState {
    /// Validates `rho`: Hermitian, positive semidefinite and of unit trace,
    /// each to `1e-12`.
    pub fn new(desc: AlgebraDescriptor, rho: DMatrix<C64>) -> Result<Self> {
        desc.check_matrix(&rho)?;
        let defect = hermitian_defect(&rho);
        if defect > STATE_TOL {
            return Err(Error::domain(format!("density matrix not Hermitian ({defect:e})")));
        }
        let (values, _) = hermitian_eigen(&rho)?;
        if values[0] < -STATE_TOL {
            return Err(Error::domain(format!(
                "density matrix not positive (min eigenvalue {:e})",
                values[0]
            )));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::domain(format!("density matrix trace {tr} is not 1")));
        }
        Ok(Self { desc, rho })
    }

    pub(crate) fn from_density_unchecked(desc: AlgebraDescriptor, rho: DMatrix<C64>) -> Self {
        Self { desc, rho }
    }

    /// The tracial state `ρ = I/n`.
    pub fn uniform(desc: AlgebraDescriptor) -> Self {
        let n = desc.dim as f64;
        Self::from_density_unchecked(desc, DMatrix::identity(desc.dim, desc.dim) / C64::new(n, 0.0))
    }

    /// `ρ = E_kk` (zero-based `k`); valid for both descriptor kinds.
    pub fn basis(desc: AlgebraDescriptor, k: usize) -> Result<Self> {
        let e = AlgebraElement::matrix_unit(desc, k)?;
        Ok(Self::from_density_unchecked(desc, e.into_matrix()))
    }

    /// Diagonal state with the given probability weights.
    pub fn diagonal(desc: AlgebraDescriptor, weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(Error::domain("state weights must be finite and non-negative"));
        }
        let rho = AlgebraElement::from_real_diagonal(desc, weights)?;
        Self::new(desc, rho.into_matrix())
    }

    /// Diagonal state with truncated geometric weights, see [`geometric_weights`].
    pub fn geometric(desc: AlgebraDescriptor, ratio: f64) -> Result<Self> {
        Self::diagonal(desc, &geometric_weights(desc.dim, ratio)?)
    }

    pub fn descriptor(&self) -> AlgebraDescriptor {
        self.desc
    }

    pub fn density(&self) -> &DMatrix<C64> {
        &self.rho
    }

    /// `φ(a) = tr(ρ a)`.
    pub fn eval(&self, a: &AlgebraElement) -> Result<C64> {
        self.desc.check_same(&a.descriptor())?;
        Ok(self.eval_matrix(a.matrix()))
    }

    /// `tr(ρ m)` for a raw `n × n` matrix, computed without forming `ρ m`.
    pub(crate) fn eval_matrix(&self, m: &DMatrix<C64>) -> C64 {
        let n = self.desc.dim;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.rho[(i, j)] * m[(j, i)];
            }
        }
        acc
    }
}

/// `φ(a) = tr(ρ a)`.
pub fn eval(phi: &NormalState, a: &AlgebraElement) -> Result<C64> {
    phi.eval(a)
}

/// Truncated geometric distribution on `len` slots: `(1 - r) r^j` for
/// `j < len - 1`, with the remaining mass `r^{len-1}` on the last slot.
///
/// The tail beyond slot `k` is then exactly `r^k`.
pub fn geometric_weights(len: usize, ratio: f64) -> Result<Vec<f64>> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::config("ratio", format!("{ratio} is not in (0, 1)")));
    }
    if len == 0 {
        return Err(Error::config("len", "geometric weights need at least one slot"));
    }
    let mut weights: Vec<f64> = (0..len - 1).map(|j| (1.0 - ratio) * ratio.powi(j as i32)).collect();
    weights.push(ratio.powi(len as i32 - 1));
    Ok(weights)
}

/// `ρ = ψ ψ*` on `M_n(C)`, `n = len(ψ)`.
pub fn vector_state(psi: &DVector<C64>) -> Result<NormalState> {
    if psi.is_empty() {
        return Err(Error::dim("empty vector"));
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::domain(format!("vector state needs a unit vector (norm {norm})")));
    }
    let desc = AlgebraDescriptor::full(psi.len());
    Ok(NormalState::from_density_unchecked(desc, psi * psi.adjoint()))
}

/// A state with `φ(a) = ‖a‖` for positive `a`.
///
/// On `M_n(C)` this is the vector state at a top eigenvector. On the diagonal
/// algebra it is the point mass at the largest diagonal entry.
pub fn norm_attaining_state(a: &AlgebraElement) -> Result<NormalState> {
    let desc = a.descriptor();
    if desc.commutative {
        let diag = a.matrix().diagonal();
        if diag.iter().any(|z| z.re < -1e-10 || z.im.abs() > 1e-10) {
            return Err(Error::domain("element is not positive"));
        }
        let k = (0..desc.dim)
            .max_by(|&i, &j| diag[i].re.total_cmp(&diag[j].re).then(j.cmp(&i)))
            .expect("dimension at least 1");
        return NormalState::basis(desc, k);
    }
    let (_, h) = top_eigenpair(a, 1e-10)?;
    vector_state(&h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::operator_norm_alg;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn trace_examples() {
        let d = AlgebraDescriptor::full(2);
        let phi = NormalState::basis(d, 0).unwrap();
        assert_eq!(phi.eval(&AlgebraElement::unit(d)).unwrap(), c(1.0));
        let a = AlgebraElement::from_real_diagonal(d, &[2.0, 1.0]).unwrap();
        assert_eq!(phi.eval(&a).unwrap(), c(2.0));
        assert!((NormalState::uniform(d).eval(&a).unwrap() - c(1.5)).norm() < 1e-15);
    }

    #[test]
    fn vector_state_examples() {
        let s = 1.0 / 2f64.sqrt();
        let psi = DVector::from_vec(vec![c(s), c(s)]);
        let phi = vector_state(&psi).unwrap();
        let flip = AlgebraElement::from_real_rows(phi.descriptor(), &[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert!((phi.eval(&flip).unwrap() - c(1.0)).norm() < 1e-12);

        let e1 = DVector::from_vec(vec![c(1.0), c(0.0)]);
        let phi = vector_state(&e1).unwrap();
        let a =
            AlgebraElement::from_rows(phi.descriptor(), &[&[C64::new(3.0, 1.0), c(2.0)], &[c(5.0), c(7.0)]]).unwrap();
        assert_eq!(phi.eval(&a).unwrap(), C64::new(3.0, 1.0));
        let (values, _) = hermitian_eigen(phi.density()).unwrap();
        assert_eq!(values.iter().filter(|v| v.abs() > 1e-12).count(), 1);
    }

    #[test]
    fn vector_state_rejects_non_unit() {
        let v = DVector::from_vec(vec![c(1.0), c(1.0)]);
        assert!(matches!(vector_state(&v), Err(Error::Domain(_))));
    }

    #[test]
    fn validation() {
        let d = AlgebraDescriptor::full(2);
        let bad_trace = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0), c(1.0)]));
        assert!(NormalState::new(d, bad_trace).is_err());
        let negative = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.5), c(-0.5)]));
        assert!(NormalState::new(d, negative).is_err());
        let non_herm = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.1), c(0.0), c(0.5)]);
        assert!(NormalState::new(d, non_herm).is_err());
    }

    #[test]
    fn norm_attaining() {
        let d = AlgebraDescriptor::full(2);
        let a = AlgebraElement::from_real_diagonal(d, &[2.0, 1.0]).unwrap();
        let phi = norm_attaining_state(&a).unwrap();
        assert!((phi.eval(&a).unwrap().re - 2.0).abs() < 1e-10);

        let id = AlgebraElement::unit(d);
        assert!((norm_attaining_state(&id).unwrap().eval(&id).unwrap().re - 1.0).abs() < 1e-12);

        let psi = DVector::from_vec(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
        let proj = AlgebraElement::new(d, &psi * psi.adjoint()).unwrap();
        let phi = norm_attaining_state(&proj).unwrap();
        let expected = vector_state(&psi).unwrap();
        assert!(crate::algebra::max_abs(&(phi.density() - expected.density())) < 1e-12);

        let neg = AlgebraElement::from_real_diagonal(d, &[-1.0, 0.5]).unwrap();
        assert!(norm_attaining_state(&neg).is_err());
    }

    #[test]
    fn norm_attaining_commutative() {
        let d = AlgebraDescriptor::diagonal(3);
        let a = AlgebraElement::from_real_diagonal(d, &[0.5, 3.0, 1.0]).unwrap();
        let phi = norm_attaining_state(&a).unwrap();
        assert_eq!(phi.eval(&a).unwrap().re, operator_norm_alg(&a, 1e-12).unwrap());
    }

    #[test]
    fn geometric_tails_are_exact_powers() {
        let w = geometric_weights(16, 0.5).unwrap();
        assert_eq!(w.iter().sum::<f64>(), 1.0);
        for k in 0..16 {
            let tail: f64 = w[k..].iter().sum();
            assert_eq!(tail, 0.5f64.powi(k as i32));
        }
        assert!(geometric_weights(4, 1.0).is_err());
    }
}
