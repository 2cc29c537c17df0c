use nalgebra::DVector;
use serde::Serialize;

use crate::algebra::{operator_norm_alg, top_eigenpair, unitary_from_to, AlgebraElement, C64};
use crate::error::{Error, Result};
use crate::states::{vector_state, NormalState};

/// Slack allowed between `φ(u* a u)` and `‖a‖`.
const ATTAINMENT_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct ChosenState {
    /// Vector state at the first standard basis vector.
    pub state: NormalState,
    /// One unitary per input; each serves as both the left and right unitary.
    pub unitaries: Vec<AlgebraElement>,
    /// `φ(u_j* a_j u_j)`.
    pub values: Vec<f64>,
    pub norms: Vec<f64>,
}

/// Given positive `a_j` in `M_n(C)` with `‖a_j‖ > delta`, returns a single
/// vector state `φ` at `ψ = e_1` and unitaries `u_j` with
/// `φ(u_j* a_j u_j) = ‖a_j‖ > delta`.
///
/// Each `u_j` maps `ψ` to a top eigenvector `h_j` of `a_j`, so
/// `φ(u_j* a_j u_j) = ⟨a_j h_j, h_j⟩`. The diagonal algebra is refused: there
/// the values `φ(p_j)` of any state on orthogonal projections are summable and
/// no uniform lower bound is possible.
pub fn choose_state_unitaries(a_list: &[AlgebraElement], delta: f64) -> Result<ChosenState> {
    let first = a_list
        .first()
        .ok_or_else(|| Error::domain("need at least one element"))?;
    let desc = first.descriptor();
    if desc.commutative {
        return Err(Error::UnsupportedAlgebra(
            "state/unitary selection needs the full matrix algebra".into(),
        ));
    }
    let n = desc.dim;
    let mut psi = DVector::zeros(n);
    psi[0] = C64::new(1.0, 0.0);
    let state = vector_state(&psi)?;

    let mut unitaries = Vec::with_capacity(a_list.len());
    let mut values = Vec::with_capacity(a_list.len());
    let mut norms = Vec::with_capacity(a_list.len());
    for (j, a) in a_list.iter().enumerate() {
        desc.check_same(&a.descriptor())?;
        let norm = operator_norm_alg(a, 1e-12)?;
        if norm <= delta {
            return Err(Error::Precondition(format!(
                "element {j} has norm {norm} <= delta {delta}"
            )));
        }
        let (_, mut h) = top_eigenpair(a, 1e-10)?;
        // Fix the phase so that h = psi exactly when psi is already a top eigenvector.
        let overlap = psi.dotc(&h);
        if overlap.norm() > 0.0 {
            h *= overlap.conj() / overlap.norm();
        }
        let u = unitary_from_to(&psi, &h)?;
        let value = state.eval(&u.adjoint().mul(a)?.mul(&u)?)?.re;
        if value < norm - ATTAINMENT_SLACK {
            return Err(Error::Numeric {
                context: format!("norm attainment for element {j}"),
                residual: norm - value,
            });
        }
        unitaries.push(u);
        values.push(value);
        norms.push(norm);
    }
    Ok(ChosenState {
        state,
        unitaries,
        values,
        norms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraDescriptor;
    use crate::sampling;

    #[test]
    fn projection_at_reference_vector_needs_no_rotation() {
        let d = AlgebraDescriptor::full(3);
        let a = AlgebraElement::from_real_diagonal(d, &[2.5, 0.0, 0.0]).unwrap();
        let chosen = choose_state_unitaries(&[a], 1.0).unwrap();
        assert_eq!(chosen.unitaries[0], AlgebraElement::unit(d));
        assert!((chosen.values[0] - 2.5).abs() < 1e-12);
    }

    #[test]
    fn diagonal_examples() {
        let d = AlgebraDescriptor::full(2);
        let a1 = AlgebraElement::from_real_diagonal(d, &[2.0, 1.0]).unwrap();
        let chosen = choose_state_unitaries(std::slice::from_ref(&a1), 1.9).unwrap();
        assert!((chosen.values[0] - 2.0).abs() < 1e-10);

        let a2 = AlgebraElement::from_real_diagonal(d, &[0.5, 3.0]).unwrap();
        let chosen = choose_state_unitaries(&[a1, a2], 1.5).unwrap();
        assert!((chosen.values[0] - 2.0).abs() < 1e-10);
        assert!((chosen.values[1] - 3.0).abs() < 1e-10);
    }

    #[test]
    fn random_positive_elements() {
        let d = AlgebraDescriptor::full(4);
        let mut rng = sampling::rng(17);
        let a: Vec<_> = (0..10).map(|_| sampling::positive_element(d, &mut rng)).collect();
        let chosen = choose_state_unitaries(&a, 0.0).unwrap();
        for (v, n) in chosen.values.iter().zip(&chosen.norms) {
            assert!(*v >= n - 1e-10);
        }
    }

    #[test]
    fn refuses_small_norm_and_commutative() {
        let d = AlgebraDescriptor::full(2);
        let a = AlgebraElement::from_real_diagonal(d, &[1.0, 0.5]).unwrap();
        assert!(matches!(choose_state_unitaries(&[a], 1.0), Err(Error::Precondition(_))));
        let d = AlgebraDescriptor::diagonal(2);
        let a = AlgebraElement::from_real_diagonal(d, &[2.0, 0.5]).unwrap();
        assert!(matches!(
            choose_state_unitaries(&[a], 1.0),
            Err(Error::UnsupportedAlgebra(_))
        ));
    }
}
