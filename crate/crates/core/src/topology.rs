//! Seminorms generating the topologies `τ₁ ⊂ τ ⊂ τ₂` on `A^N`.
//!
//! Every seminorm here has the form `p(x) = ‖F(x)‖₂` for a complex-linear
//! feature map `F : A^N → C^m`:
//!
//! * `τ`: `F(x)_j = φ(η_j* ξ_j)`, one coordinate per slot;
//! * `τ₁`: the single functional `φ(⟨y, x⟩)`;
//! * generalized: `F(x)_j = φ(⟨z_j, x⟩)` for an orthogonal family `z_j`;
//! * `τ₂`: `F(x) = vec(X ρ^{1/2})`, since `φ(⟨x, x⟩) = ‖X ρ^{1/2}‖_F²`.
//!
//! Each functional `φ(⟨z, x⟩) = tr(ρ Z* X)` is the entrywise pairing of `X`
//! with the kernel `conj(Z ρ)`, which is precomputed once per seminorm.
//! Sums of squared moduli use pairwise summation.
//!
//! Admissibility (`max_j φ(η_j* η_j) = 1`) is checked with `max`: at finite
//! truncation the supremum is attained. Whether an unattained supremum would
//! give the same topology on the untruncated module does not arise here.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{hermitian_eigen, AlgebraDescriptor, AlgebraElement, C64};
use crate::error::{Error, Result};
use crate::module::{inner_product, ModuleVector};
use crate::states::NormalState;

/// Band around 1 accepted for `max_j φ(η_j* η_j)`.
pub const ADMISSIBLE_TOL: f64 = 1e-9;
/// `φ(η_j* η_j)` at or below this counts as zero when normalizing.
pub const NULL_WEIGHT_THRESHOLD: f64 = 1e-14;
/// Orthogonality tolerance for generalized families.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Pairwise (cascade) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// `sqrt(Σ |v_i|²)` with pairwise accumulation.
pub fn euclidean_norm(v: &[C64]) -> f64 {
    let squares: Vec<f64> = v.iter().map(|z| z.norm_sqr()).collect();
    pairwise_sum(&squares).sqrt()
}

/// Entrywise pairing `Σ_{rc} k[r,c] x[r,c]` of two equally shaped views.
fn pair<'a>(kernel: impl Iterator<Item = &'a C64>, x: impl Iterator<Item = &'a C64>) -> C64 {
    kernel.zip(x).map(|(k, v)| k * v).sum()
}

/// Kernel of the functional `X ↦ tr(ρ Z* X)`.
fn kernel_of(phi: &NormalState, z: &DMatrix<C64>) -> DMatrix<C64> {
    (z * phi.density()).map(|v| v.conj())
}

fn check_state_desc(phi: &NormalState, desc: AlgebraDescriptor) -> Result<()> {
    phi.descriptor().check_same(&desc)
}

/// True iff `max_j φ(η_j* η_j)` lies within `1 ± 1e-9`.
pub fn is_admissible(phi: &NormalState, eta: &[AlgebraElement]) -> bool {
    match max_weight(phi, eta) {
        Ok(Some(m)) => (m - 1.0).abs() <= ADMISSIBLE_TOL,
        _ => false,
    }
}

fn slot_weights(phi: &NormalState, eta: &[AlgebraElement]) -> Result<Vec<f64>> {
    eta.iter().map(|e| Ok(phi.eval(&e.adjoint().mul(e)?)?.re)).collect()
}

fn max_weight(phi: &NormalState, eta: &[AlgebraElement]) -> Result<Option<f64>> {
    Ok(slot_weights(phi, eta)?.into_iter().reduce(f64::max))
}

/// `ζ_j = η_j / φ(η_j* η_j)^{1/2}`, or `0` where `φ(η_j* η_j)` is null.
pub fn normalize_admissible(phi: &NormalState, eta: &[AlgebraElement]) -> Result<Vec<AlgebraElement>> {
    let weights = slot_weights(phi, eta)?;
    if weights.iter().all(|&w| w <= NULL_WEIGHT_THRESHOLD) {
        return Err(Error::DegenerateWeights);
    }
    Ok(eta
        .iter()
        .zip(&weights)
        .map(|(e, &w)| {
            if w > NULL_WEIGHT_THRESHOLD {
                e.scale(C64::new(1.0 / w.sqrt(), 0.0))
            } else {
                AlgebraElement::zero(e.descriptor())
            }
        })
        .collect())
}

/// Block-diagonal functional family `x ↦ (Σ K_j ⊙ ξ_j)_j`.
#[derive(Debug, Clone, PartialEq)]
struct SlotKernels {
    desc: AlgebraDescriptor,
    stacked: DMatrix<C64>,
}

impl SlotKernels {
    fn new(phi: &NormalState, eta: &[AlgebraElement]) -> Result<Self> {
        let desc = phi.descriptor();
        let n = desc.dim;
        if eta.is_empty() {
            return Err(Error::dim("weight sequence must be nonempty"));
        }
        let mut stacked = DMatrix::zeros(n * eta.len(), n);
        for (j, e) in eta.iter().enumerate() {
            desc.check_same(&e.descriptor())?;
            stacked
                .view_mut((j * n, 0), (n, n))
                .copy_from(&kernel_of(phi, e.matrix()));
        }
        Ok(Self { desc, stacked })
    }

    fn len(&self) -> usize {
        self.stacked.nrows() / self.desc.dim
    }

    fn features(&self, x: &ModuleVector) -> Result<Vec<C64>> {
        self.desc.check_same(&x.descriptor())?;
        if x.len() != self.len() {
            return Err(Error::dim(format!(
                "seminorm has {} slots, vector has {}",
                self.len(),
                x.len()
            )));
        }
        let n = self.desc.dim;
        Ok((0..self.len())
            .map(|j| {
                let k = self.stacked.view((j * n, 0), (n, n));
                let v = x.stacked().view((j * n, 0), (n, n));
                pair(k.iter(), v.iter())
            })
            .collect())
    }
}

/// State plus admissible weight sequence, the data of a `τ` seminorm.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibleWeights {
    phi: NormalState,
    eta: Vec<AlgebraElement>,
    kernels: SlotKernels,
}

impl AdmissibleWeights {
    pub fn new(phi: NormalState, eta: Vec<AlgebraElement>) -> Result<Self> {
        let kernels = SlotKernels::new(&phi, &eta)?;
        let max = max_weight(&phi, &eta)?.unwrap_or(0.0);
        if (max - 1.0).abs() > ADMISSIBLE_TOL {
            return Err(Error::domain(format!("weights are not admissible: max φ(η*η) = {max}")));
        }
        Ok(Self { phi, eta, kernels })
    }

    /// Normalizes an arbitrary sequence first.
    pub fn normalized(phi: NormalState, eta: &[AlgebraElement]) -> Result<Self> {
        let zeta = normalize_admissible(&phi, eta)?;
        Self::new(phi, zeta)
    }

    /// `η_j = 1` for every slot, admissible for every state.
    pub fn ones(phi: NormalState, len: usize) -> Result<Self> {
        let unit = AlgebraElement::unit(phi.descriptor());
        Self::new(phi, vec![unit; len])
    }

    pub fn state(&self) -> &NormalState {
        &self.phi
    }

    pub fn weights(&self) -> &[AlgebraElement] {
        &self.eta
    }

    pub fn len(&self) -> usize {
        self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }

    /// `(φ(η_j* ξ_j))_j`.
    pub fn slot_values(&self, x: &ModuleVector) -> Result<Vec<C64>> {
        self.kernels.features(x)
    }
}

/// `sqrt(Σ_j |φ(η_j* ξ_j)|²)` with no admissibility requirement on `η`.
pub fn weighted_seminorm(phi: &NormalState, eta: &[AlgebraElement], x: &ModuleVector) -> Result<f64> {
    check_state_desc(phi, x.descriptor())?;
    let values = SlotKernels::new(phi, eta)?.features(x)?;
    Ok(euclidean_norm(&values))
}

/// The `τ` seminorm `p_{φ,η}`.
pub fn p_tau(weights: &AdmissibleWeights, x: &ModuleVector) -> Result<f64> {
    Ok(euclidean_norm(&weights.slot_values(x)?))
}

/// The `τ₁` seminorm `|φ(⟨y, x⟩)|`.
pub fn p_tau1(phi: &NormalState, y: &ModuleVector, x: &ModuleVector) -> Result<f64> {
    check_state_desc(phi, x.descriptor())?;
    Ok(phi.eval(&inner_product(y, x)?)?.norm())
}

/// The `τ₂` seminorm `φ(⟨x, x⟩)^{1/2}`.
pub fn p_tau2(phi: &NormalState, x: &ModuleVector) -> Result<f64> {
    check_state_desc(phi, x.descriptor())?;
    Ok(phi.eval(&inner_product(x, x)?)?.re.max(0.0).sqrt())
}

/// `sqrt(Σ_j |φ(⟨z_j, x⟩)|²)` for a pairwise orthogonal family.
pub fn p_generalized(phi: &NormalState, family: &[ModuleVector], x: &ModuleVector) -> Result<f64> {
    let spec = SeminormSpec::generalized(phi.clone(), family.to_vec())?;
    spec.eval(x)
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeminormKind {
    Tau1 { y: ModuleVector },
    Tau(AdmissibleWeights),
    Tau2,
    Generalized { family: Vec<ModuleVector> },
}

/// A seminorm on `A^N` with its feature-map kernels precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct SeminormSpec {
    phi: NormalState,
    kind: SeminormKind,
    kernels: Kernels,
}

#[derive(Debug, Clone, PartialEq)]
enum Kernels {
    Slots(SlotKernels),
    /// One full `nN × n` kernel per functional.
    Full(Vec<DMatrix<C64>>),
    /// `ρ^{1/2}` for the `τ₂` feature map.
    SqrtDensity(DMatrix<C64>),
}

impl SeminormSpec {
    pub fn tau(weights: AdmissibleWeights) -> Self {
        Self {
            phi: weights.phi.clone(),
            kernels: Kernels::Slots(weights.kernels.clone()),
            kind: SeminormKind::Tau(weights),
        }
    }

    pub fn tau1(phi: NormalState, y: ModuleVector) -> Result<Self> {
        check_state_desc(&phi, y.descriptor())?;
        let kernel = kernel_of(&phi, y.stacked());
        Ok(Self {
            kernels: Kernels::Full(vec![kernel]),
            phi,
            kind: SeminormKind::Tau1 { y },
        })
    }

    pub fn tau2(phi: NormalState) -> Result<Self> {
        let (values, vectors) = hermitian_eigen(phi.density())?;
        let roots = DVector::from_iterator(values.len(), values.iter().map(|&v| C64::new(v.max(0.0).sqrt(), 0.0)));
        let sqrt = &vectors * DMatrix::from_diagonal(&roots) * vectors.adjoint();
        Ok(Self {
            phi,
            kind: SeminormKind::Tau2,
            kernels: Kernels::SqrtDensity(sqrt),
        })
    }

    /// Validates pairwise orthogonality (`1e-10`) and `max_j φ(⟨z_j, z_j⟩) = 1 ± 1e-9`.
    pub fn generalized(phi: NormalState, family: Vec<ModuleVector>) -> Result<Self> {
        let first = family
            .first()
            .ok_or_else(|| Error::domain("generalized family must be nonempty"))?;
        for z in &family {
            check_state_desc(&phi, z.descriptor())?;
            if z.len() != first.len() {
                return Err(Error::dim("family members have different truncations"));
            }
        }
        for (i, zi) in family.iter().enumerate() {
            for zj in &family[i + 1..] {
                let defect = inner_product(zi, zj)?.max_abs();
                if defect > ORTHOGONALITY_TOL {
                    return Err(Error::domain(format!(
                        "family is not orthogonal (|⟨z_i, z_j⟩| = {defect:e})"
                    )));
                }
            }
        }
        let mut max = f64::NEG_INFINITY;
        for z in &family {
            max = max.max(phi.eval(&inner_product(z, z)?)?.re);
        }
        if (max - 1.0).abs() > ADMISSIBLE_TOL {
            return Err(Error::domain(format!(
                "family is not admissible: max φ(⟨z, z⟩) = {max}"
            )));
        }
        let kernels = family.iter().map(|z| kernel_of(&phi, z.stacked())).collect();
        Ok(Self {
            phi,
            kind: SeminormKind::Generalized { family },
            kernels: Kernels::Full(kernels),
        })
    }

    /// The discrete-basis seminorm `p_{φ,(1,1,…)}`.
    pub fn tau_ones(phi: NormalState, len: usize) -> Result<Self> {
        Ok(Self::tau(AdmissibleWeights::ones(phi, len)?))
    }

    pub fn state(&self) -> &NormalState {
        &self.phi
    }

    pub fn kind(&self) -> &SeminormKind {
        &self.kind
    }

    /// Short label: `tau1`, `tau`, `tau2` or `generalized`.
    pub fn label(&self) -> &'static str {
        match self.kind {
            SeminormKind::Tau1 { .. } => "tau1",
            SeminormKind::Tau(_) => "tau",
            SeminormKind::Tau2 => "tau2",
            SeminormKind::Generalized { .. } => "generalized",
        }
    }

    /// Feature vector `F(x)` with `p(x) = ‖F(x)‖₂`; `F` is complex-linear.
    pub fn features(&self, x: &ModuleVector) -> Result<Vec<C64>> {
        check_state_desc(&self.phi, x.descriptor())?;
        match &self.kernels {
            Kernels::Slots(k) => k.features(x),
            Kernels::Full(ks) => ks
                .iter()
                .map(|k| {
                    if k.shape() != x.stacked().shape() {
                        return Err(Error::dim("seminorm and vector truncations differ"));
                    }
                    Ok(pair(k.iter(), x.stacked().iter()))
                })
                .collect(),
            Kernels::SqrtDensity(s) => Ok((x.stacked() * s).iter().copied().collect()),
        }
    }

    pub fn eval(&self, x: &ModuleVector) -> Result<f64> {
        match &self.kind {
            SeminormKind::Tau2 => p_tau2(&self.phi, x),
            _ => Ok(euclidean_norm(&self.features(x)?)),
        }
    }

    /// `p(x - y)`.
    pub fn distance(&self, x: &ModuleVector, y: &ModuleVector) -> Result<f64> {
        self.eval(&x.sub(y)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::unit_basis_vector;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn scalar_desc() -> AlgebraDescriptor {
        AlgebraDescriptor::full(1)
    }

    fn s(v: f64) -> AlgebraElement {
        AlgebraElement::scalar(scalar_desc(), c(v))
    }

    fn scalars(values: &[f64]) -> ModuleVector {
        let entries: Vec<_> = values.iter().map(|&v| s(v)).collect();
        ModuleVector::from_entries(&entries).unwrap()
    }

    fn id_state() -> NormalState {
        NormalState::uniform(scalar_desc())
    }

    #[test]
    fn pairwise_sum_matches_naive_on_small_input() {
        let v: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 5050.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn admissibility() {
        assert!(is_admissible(&id_state(), &[s(1.0), s(1.0), s(1.0)]));
        assert!(!is_admissible(&id_state(), &[s(0.0), s(0.0)]));
        assert!(is_admissible(&id_state(), &[s(1.0), s(1.0 / 2f64.sqrt())]));
        assert!(!is_admissible(&id_state(), &[s(2.0)]));
        assert!(!is_admissible(&id_state(), &[]));
    }

    #[test]
    fn normalization() {
        let z = normalize_admissible(&id_state(), &[s(2.0), s(1.0)]).unwrap();
        assert_eq!(z, vec![s(1.0), s(1.0)]);
        let z = normalize_admissible(&id_state(), &[s(3.0), s(0.0)]).unwrap();
        assert_eq!(z, vec![s(1.0), s(0.0)]);
        assert_eq!(
            normalize_admissible(&id_state(), &[s(0.0)]),
            Err(Error::DegenerateWeights)
        );
    }

    #[test]
    fn null_slot_under_state_maps_to_zero() {
        let d = AlgebraDescriptor::full(2);
        let phi = NormalState::basis(d, 0).unwrap();
        let e22 = AlgebraElement::matrix_unit(d, 1).unwrap();
        let z = normalize_admissible(&phi, &[AlgebraElement::unit(d), e22]).unwrap();
        assert_eq!(z[1], AlgebraElement::zero(d));
    }

    #[test]
    fn tau_examples() {
        let w = AdmissibleWeights::ones(id_state(), 2).unwrap();
        let v = p_tau(&w, &scalars(&[1.0, -1.0])).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(p_tau(&w, &scalars(&[0.0, 0.0])).unwrap(), 0.0);

        let w = AdmissibleWeights::new(id_state(), vec![s(1.0), s(1.0 / 2f64.sqrt())]).unwrap();
        let v = p_tau(&w, &scalars(&[1.0, 1.0])).unwrap();
        assert!((v - 1.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn tau_rejects_truncation_mismatch() {
        let w = AdmissibleWeights::ones(id_state(), 2).unwrap();
        assert!(matches!(p_tau(&w, &scalars(&[1.0])), Err(Error::Dimension(_))));
    }

    #[test]
    fn tau1_examples() {
        let phi = id_state();
        assert_eq!(
            p_tau1(&phi, &scalars(&[1.0, 1.0]), &scalars(&[1.0, -1.0])).unwrap(),
            0.0
        );
        assert_eq!(
            p_tau1(&phi, &scalars(&[1.0, 2.0]), &scalars(&[3.0, 4.0])).unwrap(),
            11.0
        );
        let d = AlgebraDescriptor::full(3);
        let e1 = unit_basis_vector(d, 2, 0).unwrap();
        let v = p_tau1(&NormalState::uniform(d), &e1, &e1).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tau2_examples() {
        let d = AlgebraDescriptor::full(2);
        let e1 = unit_basis_vector(d, 3, 0).unwrap();
        assert!((p_tau2(&NormalState::uniform(d), &e1).unwrap() - 1.0).abs() < 1e-15);
        assert!((p_tau2(&id_state(), &scalars(&[3.0, 4.0])).unwrap() - 5.0).abs() < 1e-15);
        assert_eq!(p_tau2(&id_state(), &scalars(&[0.0])).unwrap(), 0.0);
    }

    #[test]
    fn generalized_reduces_to_tau() {
        let d = AlgebraDescriptor::full(2);
        let phi = NormalState::uniform(d);
        let mut rng = crate::sampling::rng(5);
        let eta: Vec<_> = (0..3).map(|_| crate::sampling::gaussian_element(d, &mut rng)).collect();
        let w = AdmissibleWeights::normalized(phi.clone(), &eta).unwrap();
        let family: Vec<_> = w
            .weights()
            .iter()
            .enumerate()
            .map(|(j, e)| crate::module::basis_vector(3, j, e).unwrap())
            .collect();
        let x = crate::sampling::gaussian_vector(d, 3, &mut rng);
        let a = p_tau(&w, &x).unwrap();
        let b = p_generalized(&phi, &family, &x).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn generalized_examples() {
        let d = AlgebraDescriptor::full(2);
        let phi = NormalState::uniform(d);
        let e1 = unit_basis_vector(d, 2, 0).unwrap();
        let e2 = unit_basis_vector(d, 2, 1).unwrap();
        assert!((p_generalized(&phi, std::slice::from_ref(&e1), &e1).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(p_generalized(&phi, std::slice::from_ref(&e1), &e2).unwrap(), 0.0);
        let both = e1.add(&e2).unwrap();
        assert!(matches!(p_generalized(&phi, &[e1, both], &e2), Err(Error::Domain(_))));
    }

    #[test]
    fn features_reproduce_tau2() {
        let d = AlgebraDescriptor::full(3);
        let mut rng = crate::sampling::rng(9);
        let phi = crate::sampling::random_state(d, &mut rng);
        let spec = SeminormSpec::tau2(phi.clone()).unwrap();
        let x = crate::sampling::gaussian_vector(d, 4, &mut rng);
        let via_features = euclidean_norm(&spec.features(&x).unwrap());
        assert!((via_features - p_tau2(&phi, &x).unwrap()).abs() < 1e-12);
    }
}
