use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::C64;
use crate::check::Check;
use crate::error::{Error, Result};
use crate::module::{inner_product, ModuleVector};
use crate::sampling;
use crate::states::{norm_attaining_state, NormalState};
use crate::topology::weighted_seminorm;

/// Radius of the separating neighbourhood as a fraction of its upper limit
/// `(‖z‖² - ‖z‖) / √N`.
pub const SEPARATION_FRACTION: f64 = 0.9;

const CS_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct SeparationReport {
    pub z_norm: f64,
    pub epsilon: f64,
    pub epsilon_limit: f64,
    pub state: NormalState,
    /// `φ(⟨z, z⟩)`, equal to `‖z‖²` up to rounding.
    pub state_value: f64,
    pub samples: usize,
    /// Samples that fell outside `G` through rounding; they are skipped.
    pub outside_g: usize,
    /// Samples in `G` with `‖x‖ <= 1`.
    pub violations: usize,
    pub lower_bound_violations: usize,
    pub cs_violations: usize,
    pub min_norm: f64,
    pub max_norm: f64,
    /// Smallest `|φ(⟨z, x⟩)| - (‖z‖² - 2ε√N)`.
    pub min_lower_bound_margin: f64,
    /// Largest `|φ(⟨z, x⟩)|² - φ(⟨z, z⟩) φ(⟨x, x⟩)`, clamped at zero.
    pub max_cs_residual: f64,
    pub checks: Vec<Check>,
}

impl SeparationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct SampleOutcome {
    in_g: bool,
    norm: f64,
    lower_bound_margin: f64,
    cs_residual: f64,
    cs_outer_residual: f64,
}

/// Separates a point `z` with `‖z‖ > 1` from the unit ball by the
/// neighbourhood `G = {x : p_{φ,z}(x - z) < ε}`, where `φ` attains the norm
/// of `⟨z, z⟩` and `p_{φ,z}` uses the entries of `z` as weights.
///
/// Draws `samples` seeded points of `G` (a random component of `p`-size
/// below `ε` plus a large random component in the kernel of `p`), and checks
/// on each that `‖x‖ > 1` together with the two inequalities the argument
/// chains: `‖z‖² - 2ε√N < |φ(⟨z, x⟩)|` and
/// `|φ(⟨z, x⟩)|² ≤ φ(⟨z, z⟩) φ(⟨x, x⟩) ≤ ‖z‖² ‖x‖²`.
pub fn separate_from_ball(z: &ModuleVector, samples: usize, seed: u64) -> Result<SeparationReport> {
    let z_norm = z.norm()?;
    if z_norm <= 1.0 {
        return Err(Error::Precondition(format!("‖z‖ = {z_norm} must exceed 1")));
    }
    let len = z.len();
    let root_n = (len as f64).sqrt();
    let epsilon_limit = (z_norm * z_norm - z_norm) / root_n;
    let epsilon = SEPARATION_FRACTION * epsilon_limit;
    let zz = inner_product(z, z)?;
    let state = norm_attaining_state(&zz)?;
    let state_value = state.eval(&zz)?.re;
    let weights = z.entries();

    let mut checks = vec![Check::greater(
        "state nearly attains ‖z‖²",
        state_value,
        z_norm * z_norm - epsilon * root_n,
    )];

    let outcomes = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sampling::trial_rng(seed, i as u64);
            let x = sample_in_neighbourhood(z, &state, epsilon, z_norm, &mut rng)?;
            let in_g = weighted_seminorm(&state, &weights, &x.sub(z)?)? < epsilon;
            let norm = x.norm()?;
            let pairing = state.eval(&inner_product(z, &x)?)?.norm();
            let xx = state.eval(&inner_product(&x, &x)?)?.re;
            Ok(SampleOutcome {
                in_g,
                norm,
                lower_bound_margin: pairing - (z_norm * z_norm - 2.0 * epsilon * root_n),
                cs_residual: pairing * pairing - state_value * xx,
                cs_outer_residual: state_value * xx - z_norm * z_norm * norm * norm,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let accepted: Vec<&SampleOutcome> = outcomes.iter().filter(|o| o.in_g).collect();
    let violations = accepted.iter().filter(|o| o.norm <= 1.0).count();
    let lower_bound_violations = accepted.iter().filter(|o| o.lower_bound_margin <= 0.0).count();
    let cs_violations = accepted
        .iter()
        .filter(|o| o.cs_residual > CS_SLACK || o.cs_outer_residual > CS_SLACK)
        .count();
    let min_norm = accepted.iter().map(|o| o.norm).fold(f64::INFINITY, f64::min);
    let max_norm = accepted.iter().map(|o| o.norm).fold(0.0, f64::max);
    let min_lower_bound_margin = accepted
        .iter()
        .map(|o| o.lower_bound_margin)
        .fold(f64::INFINITY, f64::min);
    let max_cs_residual = accepted
        .iter()
        .map(|o| o.cs_residual.max(o.cs_outer_residual))
        .fold(0.0, f64::max);

    checks.push(Check::at_most("unit-ball violations", violations as f64, 0.0, 0.0));
    checks.push(Check::at_most(
        "lower bound violations",
        lower_bound_violations as f64,
        0.0,
        0.0,
    ));
    checks.push(Check::at_most(
        "Cauchy-Schwarz residual",
        max_cs_residual,
        0.0,
        CS_SLACK,
    ));
    if !accepted.is_empty() {
        checks.push(Check::greater("min ‖x‖ over G", min_norm, 1.0));
    }

    Ok(SeparationReport {
        z_norm,
        epsilon,
        epsilon_limit,
        state,
        state_value,
        samples,
        outside_g: outcomes.len() - accepted.len(),
        violations,
        lower_bound_violations,
        cs_violations,
        min_norm,
        max_norm,
        min_lower_bound_margin,
        max_cs_residual,
        checks,
    })
}

fn sample_in_neighbourhood(
    z: &ModuleVector,
    state: &NormalState,
    epsilon: f64,
    z_norm: f64,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<ModuleVector> {
    let desc = z.descriptor();
    let len = z.len();
    let weights = z.entries();

    let near = sampling::gaussian_vector(desc, len, rng);
    let size = weighted_seminorm(state, &weights, &near)?;
    let target = epsilon * rng.random::<f64>();
    let near = if size > 0.0 {
        near.scale(C64::new(target / size, 0.0))
    } else {
        near
    };

    // Component invisible to p: each slot projected onto the kernel of
    // ξ ↦ φ(ζ_j* ξ) = ⟨ζ_j ρ, ξ⟩_F.
    let far = sampling::gaussian_vector(desc, len, rng);
    let mut far_entries = far.entries();
    for (xi, zeta) in far_entries.iter_mut().zip(&weights) {
        let dual = zeta.matrix() * state.density();
        let dual_sq = dual.norm_squared();
        if dual_sq > 0.0 {
            let coeff = dual.dotc(xi.matrix()) / C64::new(dual_sq, 0.0);
            let projected = xi.matrix() - dual * coeff;
            *xi = crate::algebra::AlgebraElement::new(desc, projected)?;
        }
    }
    let far = ModuleVector::from_entries(&far_entries)?;
    let stretch = 3.0 * z_norm * rng.random::<f64>();
    z.add(&near)?.add(&far.scale(C64::new(stretch, 0.0)))
}
