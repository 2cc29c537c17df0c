//! Empirical covering numbers of `T(ball)` in a seminorm.
//!
//! Sample `i` is drawn from its own stream `trial_rng(seed, i)`, so the
//! sample set of size `s` is a prefix of every larger one. Greedy nets are
//! built in input order, hence the net on a prefix is the prefix of the net
//! and a single pass gives every row.

use rayon::prelude::*;
use serde::Serialize;

use crate::compactness::net::greedy_net;
use crate::error::{Error, Result};
use crate::module::ModuleVector;
use crate::operators::{apply, ModuleOperator};
use crate::sampling::{trial_rng, unit_ball_vector};
use crate::topology::SeminormSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProbeRow {
    pub samples: usize,
    pub net_size: usize,
}

/// Images `T x_i` of `count` unit-ball samples.
pub fn probe_samples(t: &ModuleOperator, count: usize, seed: u64) -> Result<Vec<ModuleVector>> {
    let desc = t.descriptor();
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i as u64);
            apply(t, &unit_ball_vector(desc, t.len(), &mut rng))
        })
        .collect()
}

/// Greedy `epsilon`-net sizes of `T(ball)` samples for each entry of
/// `sample_sizes`.
pub fn compactness_probe(
    t: &ModuleOperator,
    p: &SeminormSpec,
    epsilon: f64,
    sample_sizes: &[usize],
    seed: u64,
) -> Result<Vec<ProbeRow>> {
    let max = sample_sizes.iter().copied().max().unwrap_or(0);
    let points = probe_samples(t, max, seed)?;
    probe_points(&points, p, epsilon, sample_sizes)
}

/// Net sizes over prefixes of `points`.
pub fn probe_points(
    points: &[ModuleVector],
    p: &SeminormSpec,
    epsilon: f64,
    sample_sizes: &[usize],
) -> Result<Vec<ProbeRow>> {
    if let Some(&bad) = sample_sizes.iter().find(|&&s| s > points.len()) {
        return Err(Error::dim(format!(
            "{bad} samples requested from {} points",
            points.len()
        )));
    }
    let net = greedy_net(points, p, epsilon)?;
    Ok(sample_sizes
        .iter()
        .map(|&samples| ProbeRow {
            samples,
            net_size: net.center_indices.partition_point(|&c| c < samples),
        })
        .collect())
}
