//! Seeded random generators for algebra elements, states and module vectors.
//!
//! Every generator draws from a caller-supplied `ChaCha8Rng`. Independent
//! trials derive their generator from `(seed, counter)` through ChaCha stream
//! selection, so results do not depend on evaluation order.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{AlgebraDescriptor, AlgebraElement, C64};
use crate::error::Result;
use crate::module::ModuleVector;
use crate::states::NormalState;
use crate::topology::{normalize_admissible, AdmissibleWeights};

/// The generator behind every sampler.
pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for trial `counter` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, counter: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(counter);
    rng
}

pub fn complex_gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn uniform_angle(rng: &mut ChaCha8Rng) -> f64 {
    rng.random::<f64>() * std::f64::consts::TAU
}

/// Complex Gaussian element (diagonal for commutative algebras).
pub fn gaussian_element(desc: AlgebraDescriptor, rng: &mut ChaCha8Rng) -> AlgebraElement {
    let n = desc.dim;
    let m = if desc.commutative {
        let diag: Vec<C64> = (0..n).map(|_| complex_gaussian(rng)).collect();
        DMatrix::from_diagonal(&DVector::from_vec(diag))
    } else {
        DMatrix::from_fn(n, n, |_, _| complex_gaussian(rng))
    };
    AlgebraElement::from_raw(desc, m)
}

/// Random positive element `g* g`.
pub fn positive_element(desc: AlgebraDescriptor, rng: &mut ChaCha8Rng) -> AlgebraElement {
    let g = gaussian_element(desc, rng);
    let m = g.matrix().adjoint() * g.matrix();
    AlgebraElement::from_raw(desc, m)
}

pub fn unit_vector(n: usize, rng: &mut ChaCha8Rng) -> DVector<C64> {
    loop {
        let v = DVector::from_fn(n, |_, _| complex_gaussian(rng));
        let norm = v.norm();
        if norm > 1e-8 {
            return v / C64::new(norm, 0.0);
        }
    }
}

/// Random faithful-ish density matrix `g* g / tr(g* g)`.
pub fn random_state(desc: AlgebraDescriptor, rng: &mut ChaCha8Rng) -> NormalState {
    loop {
        let p = positive_element(desc, rng);
        let tr = p.trace().re;
        if tr > 1e-8 {
            return NormalState::from_density_unchecked(desc, p.matrix() / C64::new(tr, 0.0));
        }
    }
}

pub fn gaussian_vector(desc: AlgebraDescriptor, len: usize, rng: &mut ChaCha8Rng) -> ModuleVector {
    let entries: Vec<AlgebraElement> = (0..len).map(|_| gaussian_element(desc, rng)).collect();
    ModuleVector::from_entries(&entries).expect("entries share a descriptor")
}

/// Gaussian direction rescaled to module norm `r` with `r` uniform in `[0, 1)`.
pub fn unit_ball_vector(desc: AlgebraDescriptor, len: usize, rng: &mut ChaCha8Rng) -> ModuleVector {
    loop {
        let g = gaussian_vector(desc, len, rng);
        let norm = g.norm().unwrap_or(0.0);
        if norm > 1e-8 {
            let radius: f64 = rng.random();
            return g.scale(C64::new(radius / norm, 0.0));
        }
    }
}

/// Gaussian weights normalized to be admissible for `state`, then every
/// slot but one (chosen uniformly) shrunk by an independent uniform factor.
pub fn admissible_weights(state: &NormalState, len: usize, rng: &mut ChaCha8Rng) -> Result<AdmissibleWeights> {
    let desc = state.descriptor();
    let raw: Vec<_> = (0..len).map(|_| gaussian_element(desc, rng)).collect();
    let normalized = normalize_admissible(state, &raw)?;
    let pinned = rng.random_range(0..len);
    let eta = normalized
        .into_iter()
        .enumerate()
        .map(|(j, e)| {
            if j == pinned {
                e
            } else {
                e.scale(C64::new(rng.random::<f64>(), 0.0))
            }
        })
        .collect();
    AdmissibleWeights::new(state.clone(), eta)
}
