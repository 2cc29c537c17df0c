use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{AlgebraDescriptor, AlgebraElement};
use crate::check::Check;
use crate::error::{Error, Result};
use crate::operators::{apply, diagonal_multiplier, tail_norm};
use crate::sampling;
use crate::states::NormalState;
use crate::topology::pairwise_sum;

const SUM_TOL: f64 = 1e-9;
const PROFILE_TOL: f64 = 1e-9;
const TAIL_SLACK: f64 = 1e-9;

/// The diagonal multiplier `T x = (p_1 ξ_1, p_2 ξ_2, …)` over the diagonal
/// algebra, with `p_j` the matrix units and `φ` the state with weights `w_j`.
#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub weights: Vec<f64>,
    pub samples: usize,
    /// `k = 0..=k_max`.
    pub k: Vec<usize>,
    /// `‖T - P_k T‖`.
    pub norm_profile: Vec<f64>,
    /// `Σ_{j>k} w_j`.
    pub tail_bounds: Vec<f64>,
    /// Largest `p((T - P_k T) x)` over the sampled pairs of unit-ball vector
    /// and admissible weight sequence.
    pub sampled_sup: Vec<f64>,
    pub checks: Vec<Check>,
}

impl CounterexampleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs the commutative counterexample: `‖T - P_k T‖ = 1` for every `k < N`,
/// while every `τ` seminorm of `(T - P_k T) x` over the unit ball is bounded
/// by `(Σ_{j>k} w_j)^{1/2}`.
pub fn counterexample_experiment(
    weights: &[f64],
    k_max: usize,
    samples: usize,
    seed: u64,
) -> Result<CounterexampleReport> {
    let len = weights.len();
    if len == 0 {
        return Err(Error::config("weights", "need at least one weight"));
    }
    if weights.iter().any(|&w| w.is_nan() || w <= 0.0 || w.is_infinite()) {
        return Err(Error::config("weights", "weights must be positive"));
    }
    let total = pairwise_sum(weights);
    if (total - 1.0).abs() > SUM_TOL {
        return Err(Error::config("weights", format!("weights sum to {total}, not 1")));
    }
    if k_max > len {
        return Err(Error::config("k_max", format!("{k_max} exceeds truncation {len}")));
    }

    let desc = AlgebraDescriptor::diagonal(len);
    let state = NormalState::diagonal(desc, weights)?;
    let units = (0..len)
        .map(|j| AlgebraElement::matrix_unit(desc, j))
        .collect::<Result<Vec<_>>>()?;
    let t = diagonal_multiplier(&units)?;

    let ks: Vec<usize> = (0..=k_max).collect();
    let norm_profile = ks
        .iter()
        .map(|&k| tail_norm(&t, k, 1e-12))
        .collect::<Result<Vec<_>>>()?;
    let mut suffix = vec![0.0; len + 1];
    for j in (0..len).rev() {
        suffix[j] = suffix[j + 1] + weights[j];
    }
    let tail_bounds: Vec<f64> = ks.iter().map(|&k| suffix[k]).collect();

    // Squared slot contributions |φ(η_j* p_j ξ_j)|² per sample; the seminorm of
    // (T - P_k T) x is the root of their sum over slots j >= k.
    let per_sample = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sampling::trial_rng(seed, i as u64);
            let x = sampling::unit_ball_vector(desc, len, &mut rng);
            let eta = sampling::admissible_weights(&state, len, &mut rng)?;
            let tx = apply(&t, &x)?;
            let values = eta.slot_values(&tx)?;
            Ok(values.iter().map(|v| v.norm_sqr()).collect::<Vec<f64>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let sampled_sup: Vec<f64> = ks
        .iter()
        .map(|&k| {
            per_sample
                .iter()
                .map(|sq| pairwise_sum(&sq[k..]).sqrt())
                .fold(0.0, f64::max)
        })
        .collect();

    let mut checks = Vec::new();
    for (idx, &k) in ks.iter().enumerate() {
        if k < len {
            let dev = (norm_profile[idx] - 1.0).abs();
            checks.push(Check::at_most(format!("‖T - P_{k} T‖ = 1"), dev, 0.0, PROFILE_TOL));
        } else {
            checks.push(Check::at_most(
                format!("‖T - P_{k} T‖ = 0"),
                norm_profile[idx],
                0.0,
                PROFILE_TOL,
            ));
        }
        checks.push(Check::at_most(
            format!("sup p((T - P_{k} T) x)² <= tail_{k}"),
            sampled_sup[idx] * sampled_sup[idx],
            tail_bounds[idx],
            TAIL_SLACK,
        ));
    }
    for w in tail_bounds.windows(2) {
        if w[1] > 0.0 || w[0] > 0.0 {
            checks.push(Check::less("tail strictly decreasing", w[1], w[0]));
        }
    }

    Ok(CounterexampleReport {
        weights: weights.to_vec(),
        samples,
        k: ks,
        norm_profile,
        tail_bounds,
        sampled_sup,
        checks,
    })
}
