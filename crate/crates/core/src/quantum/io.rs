//! JSON instance schema.
//!
//! Complex entries are `[re, im]` pairs and matrices are arrays of rows.
//!
//! ```json
//! { "state":      { "dim": 2, "matrix": [[[0.5,0],[0,0]], [[0,0],[0.5,0]]] },
//!   "observable": { "effects": [ ... ], "values": [1, -1] },
//!   "group":      { "unitaries": [ ... ] } }
//! ```
//!
//! Floats are written in shortest round-trip form and parsed exactly, so
//! serializing a parsed instance reproduces the input bits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matops::{c64, ComplexMatrix};

use super::channel::KrausChannel;
use super::commutant::OperatorSet;
use super::observable::Observable;
use super::state::DensityOperator;

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<ComplexMatrix> {
    let r = rows.len();
    if r == 0 {
        return Err(Error::Invalid("matrix has no rows".into()));
    }
    let c = rows[0].len();
    if c == 0 || rows.iter().any(|row| row.len() != c) {
        return Err(Error::Invalid("matrix rows have inconsistent or zero length".into()));
    }
    Ok(ComplexMatrix::from_fn(r, c, |i, j| c64(rows[i][j][0], rows[i][j][1])))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub dim: usize,
    pub matrix: MatrixJson,
}

impl TryFrom<StateJson> for DensityOperator {
    type Error = Error;
    fn try_from(s: StateJson) -> Result<Self> {
        let m = matrix_from_json(&s.matrix)?;
        if m.nrows() != s.dim || m.ncols() != s.dim {
            return Err(Error::DimensionMismatch(format!(
                "declared dim {} but matrix is {}x{}",
                s.dim,
                m.nrows(),
                m.ncols()
            )));
        }
        DensityOperator::new(m)
    }
}

impl From<DensityOperator> for StateJson {
    fn from(s: DensityOperator) -> Self {
        StateJson { dim: s.dim(), matrix: matrix_to_json(s.matrix()) }
    }
}

impl Serialize for DensityOperator {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        StateJson::from(self.clone()).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for DensityOperator {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = StateJson::deserialize(de)?;
        DensityOperator::try_from(s).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub effects: Vec<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl TryFrom<ObservableJson> for Observable {
    type Error = Error;
    fn try_from(o: ObservableJson) -> Result<Self> {
        let effects = o.effects.iter().map(matrix_from_json).collect::<Result<Vec<_>>>()?;
        Observable::new(o.label.unwrap_or_else(|| "X".into()), effects, o.values)
    }
}

impl From<&Observable> for ObservableJson {
    fn from(o: &Observable) -> Self {
        ObservableJson {
            label: Some(o.label().to_string()),
            effects: o.effects().iter().map(|e| matrix_to_json(e.matrix())).collect(),
            values: o.values().map(|v| v.to_vec()),
        }
    }
}

impl Serialize for Observable {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ObservableJson::from(self).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Observable {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let o = ObservableJson::deserialize(de)?;
        Observable::try_from(o).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupJson {
    pub unitaries: Vec<MatrixJson>,
}

impl GroupJson {
    pub fn matrices(&self) -> Result<Vec<ComplexMatrix>> {
        self.unitaries.iter().map(matrix_from_json).collect()
    }

    pub fn from_matrices(us: &[ComplexMatrix]) -> Self {
        GroupJson { unitaries: us.iter().map(matrix_to_json).collect() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSetJson {
    pub operators: Vec<MatrixJson>,
}

impl OperatorSetJson {
    pub fn to_set(&self) -> Result<OperatorSet> {
        OperatorSet::new(self.operators.iter().map(matrix_from_json).collect::<Result<_>>()?)
    }

    pub fn from_set(s: &OperatorSet) -> Self {
        OperatorSetJson { operators: s.members().iter().map(matrix_to_json).collect() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelJson {
    pub kraus: Vec<MatrixJson>,
}

impl ChannelJson {
    pub fn to_channel(&self) -> Result<KrausChannel> {
        KrausChannel::new(self.kraus.iter().map(matrix_from_json).collect::<Result<_>>()?)
    }
}

/// Everything a single computation may need; unused fields are omitted.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<DensityOperator>,
    /// Second state, for divergences.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<DensityOperator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<Observable>,
    /// Second observable, for uncertainty relations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable_y: Option<Observable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observables: Option<Vec<Observable>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<OperatorSetJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set_t: Option<OperatorSetJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn state(&self) -> Result<&DensityOperator> {
        self.state.as_ref().ok_or_else(|| Error::Invalid("instance has no 'state'".into()))
    }

    pub fn observable(&self) -> Result<&Observable> {
        self.observable.as_ref().ok_or_else(|| Error::Invalid("instance has no 'observable'".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_round_trip_is_bit_exact() {
        let rho = crate::quantum::random::random_state(3, 2, 11).unwrap();
        let text = serde_json::to_string(&rho).unwrap();
        let back: DensityOperator = serde_json::from_str(&text).unwrap();
        assert_eq!(back.matrix(), rho.matrix());
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn observable_round_trip() {
        let t = Observable::trine();
        let text = serde_json::to_string(&t).unwrap();
        let back: Observable = serde_json::from_str(&text).unwrap();
        for (a, b) in t.effects().iter().zip(back.effects()) {
            assert_eq!(a.matrix(), b.matrix());
        }
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(serde_json::from_str::<DensityOperator>(r#"{"dim":2,"matrix":[[[1,0]]]}"#).is_err());
        assert!(serde_json::from_str::<DensityOperator>(r#"{"dim":1,"matrix":[[[2,0]]]}"#).is_err());
        assert!(Instance::from_json(r#"{"stat": 1}"#).is_err());
    }
}
