//! JSON wire formats.
//!
//! * matrix: array of rows, each row an array of `[re, im]` pairs;
//! * module vector: array of `N` matrices;
//! * state: a density matrix, or one of the presets `"uniform"`,
//!   `"vector:k"` (`ρ = E_kk`, one-based `k`) and `"geometric:r"`;
//! * operator: `{ "trunc", "alg_dim", "commutative", "blocks", "tag" }` with
//!   `blocks[i][j]` the matrix `t_ij`;
//! * seminorm: `{ "kind": "tau" | "tau1" | "tau2" | "generalized", "state",
//!   "weights", "family" }`. For `tau`, `weights` is the list of `η_j` or the
//!   string `"ones"` (needs `trunc`); for `tau1` it holds the vector `y`;
//!   `family` lists the vectors of a generalized seminorm.

use nalgebra::DMatrix;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{AlgebraDescriptor, AlgebraElement, C64};
use crate::error::{Error, Result};
use crate::module::ModuleVector;
use crate::operators::{ModuleOperator, OperatorTag};
use crate::states::NormalState;
use crate::topology::{AdmissibleWeights, SeminormKind, SeminormSpec};

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &DMatrix<C64>) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<DMatrix<C64>> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::dim("empty matrix"));
    }
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::dim("matrix must be square with rows of equal length"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

pub fn element_from_json(desc: AlgebraDescriptor, rows: &MatrixJson) -> Result<AlgebraElement> {
    AlgebraElement::new(desc, matrix_from_json(rows)?)
}

pub fn vector_to_json(x: &ModuleVector) -> Vec<MatrixJson> {
    x.entries().iter().map(|e| matrix_to_json(e.matrix())).collect()
}

pub fn vector_from_json(desc: AlgebraDescriptor, entries: &[MatrixJson]) -> Result<ModuleVector> {
    let elems = entries
        .iter()
        .map(|m| element_from_json(desc, m))
        .collect::<Result<Vec<_>>>()?;
    ModuleVector::from_entries(&elems)
}

/// A state given either as a preset name or as a density matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateJson {
    Preset(String),
    Density(MatrixJson),
}

impl StateJson {
    pub fn resolve(&self, desc: AlgebraDescriptor) -> Result<NormalState> {
        match self {
            StateJson::Density(m) => NormalState::new(desc, matrix_from_json(m)?),
            StateJson::Preset(name) => state_preset(desc, name),
        }
    }
}

/// Resolves `uniform`, `vector:k` (one-based) or `geometric:r`.
pub fn state_preset(desc: AlgebraDescriptor, name: &str) -> Result<NormalState> {
    let bad = |msg: String| Error::config("state", msg);
    match name.split_once(':') {
        None if name == "uniform" => Ok(NormalState::uniform(desc)),
        Some(("vector", k)) => {
            let k: usize = k.parse().map_err(|_| bad(format!("bad slot in `{name}`")))?;
            if k == 0 || k > desc.dim {
                return Err(bad(format!("slot {k} outside 1..={}", desc.dim)));
            }
            NormalState::basis(desc, k - 1)
        }
        Some(("geometric", r)) => {
            let r: f64 = r.parse().map_err(|_| bad(format!("bad ratio in `{name}`")))?;
            NormalState::geometric(desc, r)
        }
        _ => Err(bad(format!("unknown state preset `{name}`"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub trunc: usize,
    pub alg_dim: usize,
    #[serde(default)]
    pub commutative: bool,
    pub blocks: Vec<Vec<MatrixJson>>,
    #[serde(default = "generic_tag")]
    pub tag: OperatorTag,
}

fn generic_tag() -> OperatorTag {
    OperatorTag::Generic
}

impl OperatorJson {
    pub fn from_operator(t: &ModuleOperator) -> Self {
        let n = t.len();
        let blocks = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| matrix_to_json(t.block(i, j).expect("in range").matrix()))
                    .collect()
            })
            .collect();
        Self {
            trunc: n,
            alg_dim: t.descriptor().dim,
            commutative: t.descriptor().commutative,
            blocks,
            tag: t.tag().clone(),
        }
    }

    pub fn to_operator(&self) -> Result<ModuleOperator> {
        let desc = AlgebraDescriptor::new(self.alg_dim, self.commutative)?;
        if self.blocks.len() != self.trunc {
            return Err(Error::config(
                "blocks",
                format!("{} block rows for trunc {}", self.blocks.len(), self.trunc),
            ));
        }
        let blocks = self
            .blocks
            .iter()
            .map(|row| {
                row.iter()
                    .map(|m| element_from_json(desc, m))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ModuleOperator::from_blocks(&blocks)?.with_tag(self.tag.clone()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeminormKindJson {
    Tau,
    Tau1,
    Tau2,
    Generalized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightsJson {
    Named(String),
    Entries(Vec<MatrixJson>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeminormJson {
    pub kind: SeminormKindJson,
    pub state: StateJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightsJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Vec<Vec<MatrixJson>>>,
}

impl SeminormJson {
    /// `p_{uniform,(1,…,1)}`.
    pub fn uniform_ones() -> Self {
        Self {
            kind: SeminormKindJson::Tau,
            state: StateJson::Preset("uniform".into()),
            weights: Some(WeightsJson::Named("ones".into())),
            family: None,
        }
    }

    pub fn from_spec(p: &SeminormSpec) -> Self {
        let state = StateJson::Density(matrix_to_json(p.state().density()));
        let entries = |x: &ModuleVector| vector_to_json(x);
        let (kind, weights, family) = match p.kind() {
            SeminormKind::Tau(w) => (
                SeminormKindJson::Tau,
                Some(WeightsJson::Entries(
                    w.weights().iter().map(|e| matrix_to_json(e.matrix())).collect(),
                )),
                None,
            ),
            SeminormKind::Tau1 { y } => (SeminormKindJson::Tau1, Some(WeightsJson::Entries(entries(y))), None),
            SeminormKind::Tau2 => (SeminormKindJson::Tau2, None, None),
            SeminormKind::Generalized { family } => (
                SeminormKindJson::Generalized,
                None,
                Some(family.iter().map(entries).collect()),
            ),
        };
        Self {
            kind,
            state,
            weights,
            family,
        }
    }

    /// Builds the seminorm on `A^trunc`.
    pub fn resolve(&self, desc: AlgebraDescriptor, trunc: usize) -> Result<SeminormSpec> {
        let phi = self.state.resolve(desc)?;
        let check_len = |len: usize, field: &str| {
            if len == trunc {
                Ok(())
            } else {
                Err(Error::config(field, format!("{len} entries for truncation {trunc}")))
            }
        };
        match self.kind {
            SeminormKindJson::Tau => match &self.weights {
                Some(WeightsJson::Named(name)) if name == "ones" => SeminormSpec::tau_ones(phi, trunc),
                Some(WeightsJson::Named(name)) => {
                    Err(Error::config("weights", format!("unknown weights preset `{name}`")))
                }
                Some(WeightsJson::Entries(m)) => {
                    check_len(m.len(), "weights")?;
                    let eta = m
                        .iter()
                        .map(|e| element_from_json(desc, e))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(SeminormSpec::tau(AdmissibleWeights::new(phi, eta)?))
                }
                None => Err(Error::config("weights", "tau seminorm needs weights")),
            },
            SeminormKindJson::Tau1 => match &self.weights {
                Some(WeightsJson::Entries(m)) => {
                    check_len(m.len(), "weights")?;
                    SeminormSpec::tau1(phi, vector_from_json(desc, m)?)
                }
                _ => Err(Error::config("weights", "tau1 seminorm needs the vector y as weights")),
            },
            SeminormKindJson::Tau2 => SeminormSpec::tau2(phi),
            SeminormKindJson::Generalized => {
                let family = self
                    .family
                    .as_ref()
                    .ok_or_else(|| Error::config("family", "generalized seminorm needs a family"))?;
                let family = family
                    .iter()
                    .map(|z| {
                        check_len(z.len(), "family")?;
                        vector_from_json(desc, z)
                    })
                    .collect::<Result<Vec<_>>>()?;
                SeminormSpec::generalized(phi, family)
            }
        }
    }
}

impl Serialize for AlgebraElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_json(self.matrix()).serialize(s)
    }
}

impl Serialize for ModuleVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        vector_to_json(self).serialize(s)
    }
}

impl Serialize for NormalState {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_json(self.density()).serialize(s)
    }
}

impl Serialize for ModuleOperator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OperatorJson::from_operator(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ModuleOperator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        OperatorJson::deserialize(d)?.to_operator().map_err(D::Error::custom)
    }
}
