//! Builds operators, points and weights from their config strings.

use hilmod_core::json::{vector_from_json, MatrixJson, OperatorJson};
use hilmod_core::module::unit_basis_vector;
use hilmod_core::operators::{coordinate_projection, diagonal_multiplier, theta};
use hilmod_core::sampling::{gaussian_vector, trial_rng, unit_ball_vector, SampleRng};
use hilmod_core::states::geometric_weights;
use hilmod_core::{AlgebraDescriptor, AlgebraElement, ModuleOperator, ModuleVector, C64};

use crate::config::WeightsSpec;
use crate::error::CliError;

/// Stream reserved for operator and point construction, so that sample
/// streams `0, 1, …` stay independent of it.
pub const CONSTRUCTION_STREAM: u64 = u64::MAX;

fn read_json<T: serde::de::DeserializeOwned>(field: &str, path: &str) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::config(field, format!("{path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CliError::config(field, format!("{path}: {e}")))
}

fn unit_gaussian(desc: AlgebraDescriptor, len: usize, rng: &mut SampleRng) -> Result<ModuleVector, CliError> {
    let g = gaussian_vector(desc, len, rng);
    let norm = g.norm()?;
    Ok(g.scale(C64::new(1.0 / norm, 0.0)))
}

/// `identity`, `zero`, `proj:k`, `theta` (random unit `y`, `z` from the
/// seed), `diag` (multiplier by the matrix units `E_jj`) or `file:PATH`.
pub fn build_operator(spec: &str, desc: AlgebraDescriptor, len: usize, seed: u64) -> Result<ModuleOperator, CliError> {
    let bad = |msg: String| CliError::config("operator", msg);
    match spec.split_once(':') {
        None => match spec {
            "identity" => Ok(ModuleOperator::identity(desc, len)),
            "zero" => Ok(ModuleOperator::zero(desc, len)),
            "theta" => {
                let mut rng = trial_rng(seed, CONSTRUCTION_STREAM);
                let y = unit_gaussian(desc, len, &mut rng)?;
                let z = unit_gaussian(desc, len, &mut rng)?;
                Ok(theta(&y, &z)?)
            }
            "diag" => {
                if desc.dim < len {
                    return Err(bad(format!(
                        "`diag` needs dimension >= truncation, got {} < {len}",
                        desc.dim
                    )));
                }
                let units = (0..len)
                    .map(|j| AlgebraElement::matrix_unit(desc, j))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(diagonal_multiplier(&units)?)
            }
            _ => Err(bad(format!("unknown operator `{spec}`"))),
        },
        Some(("proj", k)) => {
            let k: usize = k.parse().map_err(|_| bad(format!("bad slot count in `{spec}`")))?;
            if k > len {
                return Err(bad(format!("projection rank {k} exceeds truncation {len}")));
            }
            Ok(coordinate_projection(desc, len, k)?)
        }
        Some(("file", path)) => {
            let json: OperatorJson = read_json("operator", path)?;
            let t = json.to_operator()?;
            if t.descriptor() != desc || t.len() != len {
                return Err(bad(format!(
                    "{path} holds an operator on A^{} with dim {}, expected A^{len} with dim {}",
                    t.len(),
                    t.descriptor().dim,
                    desc.dim
                )));
            }
            Ok(t)
        }
        _ => Err(bad(format!("unknown operator `{spec}`"))),
    }
}

/// `basis:k:c` (one-based `k`) or `random:r` (random direction, norm `r`).
pub fn build_point(spec: &str, desc: AlgebraDescriptor, len: usize, seed: u64) -> Result<ModuleVector, CliError> {
    let bad = |msg: String| CliError::config("point", msg);
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["basis", k, c] => {
            let k: usize = k.parse().map_err(|_| bad(format!("bad slot in `{spec}`")))?;
            let c: f64 = c.parse().map_err(|_| bad(format!("bad scale in `{spec}`")))?;
            if k == 0 || k > len {
                return Err(bad(format!("slot {k} outside 1..={len}")));
            }
            Ok(unit_basis_vector(desc, len, k - 1)?.scale(C64::new(c, 0.0)))
        }
        ["random", r] => {
            let r: f64 = r.parse().map_err(|_| bad(format!("bad norm in `{spec}`")))?;
            let mut rng = trial_rng(seed, CONSTRUCTION_STREAM);
            Ok(unit_gaussian(desc, len, &mut rng)?.scale(C64::new(r, 0.0)))
        }
        _ => Err(bad(format!("unknown point `{spec}`"))),
    }
}

/// `basis` (`e_1, …, e_N`), `ball:COUNT` (unit-ball samples, sample `i` on
/// stream `i`) or `file:PATH` (a JSON list of vectors).
pub fn build_points(spec: &str, desc: AlgebraDescriptor, len: usize, seed: u64) -> Result<Vec<ModuleVector>, CliError> {
    let bad = |msg: String| CliError::config("points", msg);
    match spec.split_once(':') {
        None if spec == "basis" => (0..len)
            .map(|j| unit_basis_vector(desc, len, j).map_err(CliError::from))
            .collect(),
        Some(("ball", count)) => {
            let count: usize = count.parse().map_err(|_| bad(format!("bad count in `{spec}`")))?;
            if count == 0 || count > crate::config::MAX_SAMPLES {
                return Err(bad(format!("{count} is outside 1..={}", crate::config::MAX_SAMPLES)));
            }
            Ok((0..count)
                .map(|i| unit_ball_vector(desc, len, &mut trial_rng(seed, i as u64)))
                .collect())
        }
        Some(("file", path)) => {
            let raw: Vec<Vec<MatrixJson>> = read_json("points", path)?;
            raw.iter()
                .map(|entries| {
                    let v = vector_from_json(desc, entries)?;
                    if v.len() != len {
                        return Err(bad(format!("a point has {} slots, expected {len}", v.len())));
                    }
                    Ok(v)
                })
                .collect()
        }
        _ => Err(bad(format!("unknown point set `{spec}`"))),
    }
}

/// Probability weights on `len` slots.
pub fn resolve_weights(spec: &WeightsSpec, len: usize) -> Result<Vec<f64>, CliError> {
    match spec {
        WeightsSpec::Values(v) => {
            if v.len() != len {
                return Err(CliError::config(
                    "weights",
                    format!("{} weights for truncation {len}", v.len()),
                ));
            }
            Ok(v.clone())
        }
        WeightsSpec::Preset(name) => match name.split_once(':') {
            None if name == "uniform" => Ok(vec![1.0 / len as f64; len]),
            Some(("geometric", r)) => {
                let r: f64 = r
                    .parse()
                    .map_err(|_| CliError::config("weights", format!("bad ratio in `{name}`")))?;
                geometric_weights(len, r).map_err(|e| CliError::config("weights", e.to_string()))
            }
            _ => Err(CliError::config("weights", format!("unknown weights preset `{name}`"))),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hilmod_core::operators::operator_norm;

    #[test]
    fn operators() {
        let d = AlgebraDescriptor::full(2);
        assert_eq!(
            build_operator("identity", d, 4, 0).unwrap(),
            ModuleOperator::identity(d, 4)
        );
        let p = build_operator("proj:2", d, 4, 0).unwrap();
        assert!((operator_norm(&p, 1e-12).unwrap() - 1.0).abs() < 1e-12);
        let t = build_operator("theta", d, 4, 7).unwrap();
        assert!(operator_norm(&t, 1e-12).unwrap() <= 1.0 + 1e-9);
        assert_eq!(t, build_operator("theta", d, 4, 7).unwrap());
        assert!(matches!(build_operator("diag", d, 4, 0), Err(CliError::Config { .. })));
        assert!(build_operator("diag", AlgebraDescriptor::diagonal(4), 4, 0).is_ok());
        assert!(matches!(build_operator("shift", d, 4, 0), Err(CliError::Config { .. })));
        assert!(matches!(
            build_operator("proj:5", d, 4, 0),
            Err(CliError::Config { .. })
        ));
    }

    #[test]
    fn points() {
        let d = AlgebraDescriptor::full(2);
        let z = build_point("basis:1:2", d, 4, 0).unwrap();
        assert!((z.norm().unwrap() - 2.0).abs() < 1e-15);
        let r = build_point("random:3", d, 4, 0).unwrap();
        assert!((r.norm().unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(build_points("basis", d, 5, 0).unwrap().len(), 5);
        assert_eq!(build_points("ball:7", d, 5, 0).unwrap().len(), 7);
        assert!(build_point("basis:5:2", d, 4, 0).is_err());
    }

    #[test]
    fn weights() {
        let w = resolve_weights(&WeightsSpec::Preset("geometric:0.5".into()), 4).unwrap();
        assert_eq!(w, vec![0.5, 0.25, 0.125, 0.125]);
        assert!(resolve_weights(&WeightsSpec::Values(vec![1.0]), 2).is_err());
        assert!(resolve_weights(&WeightsSpec::Preset("zipf".into()), 2).is_err());
    }
}
