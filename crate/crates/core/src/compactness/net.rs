use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::C64;
use crate::error::{Error, Result};
use crate::module::ModuleVector;
use crate::topology::{euclidean_norm, SeminormSpec};

/// Points mapped through a seminorm's feature map, so that
/// `p(x_i - x_j) = ‖F(x_i) - F(x_j)‖₂`.
#[derive(Debug, Clone)]
pub struct FeatureCloud {
    features: Vec<Vec<C64>>,
}

impl FeatureCloud {
    pub fn new(points: &[ModuleVector], p: &SeminormSpec) -> Result<Self> {
        let features = points.par_iter().map(|x| p.features(x)).collect::<Result<Vec<_>>>()?;
        Ok(Self { features })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        distance(&self.features[i], &self.features[j])
    }
}

fn distance(a: &[C64], b: &[C64]) -> f64 {
    let diff: Vec<C64> = a.iter().zip(b).map(|(u, v)| u - v).collect();
    euclidean_norm(&diff)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetResult {
    pub epsilon: f64,
    /// Indices into the input of the points chosen as centers.
    pub center_indices: Vec<usize>,
    #[serde(skip)]
    pub centers: Vec<ModuleVector>,
    /// `assignments[i]` is the position in `centers` covering point `i`.
    pub assignments: Vec<usize>,
    pub covered: bool,
}

impl NetResult {
    pub fn size(&self) -> usize {
        self.center_indices.len()
    }
}

/// Greedy ε-net in input order: a point becomes a center iff its
/// `p`-distance to every existing center exceeds `epsilon`; otherwise it is
/// assigned to the first center within `epsilon`.
pub fn greedy_net(points: &[ModuleVector], p: &SeminormSpec, epsilon: f64) -> Result<NetResult> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let cloud = FeatureCloud::new(points, p)?;
    let mut center_indices: Vec<usize> = Vec::new();
    let mut assignments = Vec::with_capacity(points.len());
    for i in 0..cloud.len() {
        match center_indices.iter().position(|&c| cloud.distance(i, c) <= epsilon) {
            Some(slot) => assignments.push(slot),
            None => {
                assignments.push(center_indices.len());
                center_indices.push(i);
            }
        }
    }
    Ok(NetResult {
        epsilon,
        centers: center_indices.iter().map(|&i| points[i].clone()).collect(),
        center_indices,
        covered: true,
        assignments,
    })
}

/// `d_p(S, T) = max_{x∈S} min_{y∈T} p(x - y)`. Not symmetric.
pub fn net_distance(s: &[ModuleVector], t: &[ModuleVector], p: &SeminormSpec) -> Result<f64> {
    if t.is_empty() {
        return Err(Error::domain("net distance to an empty set"));
    }
    let fs = FeatureCloud::new(s, p)?;
    let ft = FeatureCloud::new(t, p)?;
    Ok(fs
        .features
        .par_iter()
        .map(|a| ft.features.iter().map(|b| distance(a, b)).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max))
}
