//! JSON files for plants and policies.
//!
//! Matrices are stored as `{"rows": r, "cols": c, "data": [...]}` with
//! row-major data. Every number is written with 17 significant digits so a
//! load/save round trip is bit-exact.
//!
//! ```json
//! {
//!   "format": "musynth/plant-v1",
//!   "n_x": 1,
//!   "dims": {"n_w": 1, "n_d": 1, "n_u": 1, "n_v": 1, "n_e": 1, "n_y": 1},
//!   "a": {"rows": 1, "cols": 1, "data": [5.0000000000000000e-1]},
//!   "b": ..., "c": ..., "d": ...,
//!   "spectral_radius": 5.0000000000000000e-1
//! }
//! ```

use std::path::Path;

use nalgebra::DMatrix;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use super::{AugmentedPolicy, ChannelDims, ControllerParams, DScaleParams, PartitionedPlant, PolicyLayout};
use crate::error::{Error, Result};
use crate::linalg::{from_row_major, row_major};
use crate::lti::{self, StateSpace};

pub const PLANT_FORMAT: &str = "musynth/plant-v1";
pub const POLICY_FORMAT: &str = "musynth/policy-v1";

/// Formats with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn serialize_f64_17<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    let raw = RawValue::from_string(format_f64(*v)).map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

fn serialize_vec_17<S: Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        let raw = RawValue::from_string(format_f64(*x)).map_err(serde::ser::Error::custom)?;
        seq.serialize_element(&raw)?;
    }
    seq.end()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    #[serde(serialize_with = "serialize_vec_17")]
    pub data: Vec<f64>,
}

impl MatrixJson {
    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        Self { rows: m.nrows(), cols: m.ncols(), data: row_major(m) }
    }

    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        if self.rows * self.cols != self.data.len() {
            return Err(Error::Format(format!(
                "matrix declares {}x{} but holds {} entries",
                self.rows,
                self.cols,
                self.data.len()
            )));
        }
        Ok(from_row_major(self.rows, self.cols, &self.data))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantFile {
    pub format: String,
    pub n_x: usize,
    pub dims: ChannelDims,
    pub a: MatrixJson,
    pub b: MatrixJson,
    pub c: MatrixJson,
    pub d: MatrixJson,
    #[serde(default, skip_serializing_if = "Option::is_none", serialize_with = "serialize_opt_17")]
    pub spectral_radius: Option<f64>,
}

fn serialize_opt_17<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => serialize_f64_17(x, s),
        None => s.serialize_none(),
    }
}

impl PlantFile {
    pub fn from_plant(plant: &PartitionedPlant, with_rho: bool) -> Result<Self> {
        let sys = plant.sys();
        let spectral_radius = if with_rho { Some(lti::spectral_radius(sys)?) } else { None };
        Ok(Self {
            format: PLANT_FORMAT.into(),
            n_x: sys.n_x(),
            dims: plant.dims(),
            a: MatrixJson::from_matrix(sys.a()),
            b: MatrixJson::from_matrix(sys.b()),
            c: MatrixJson::from_matrix(sys.c()),
            d: MatrixJson::from_matrix(sys.d()),
            spectral_radius,
        })
    }

    /// The state-space system alone; the channel split is not checked.
    pub fn to_system(&self) -> Result<StateSpace> {
        if self.format != PLANT_FORMAT {
            return Err(Error::Format(format!("unsupported plant format {:?}", self.format)));
        }
        let sys = StateSpace::new(self.a.to_matrix()?, self.b.to_matrix()?, self.c.to_matrix()?, self.d.to_matrix()?)?;
        if sys.n_x() != self.n_x {
            return Err(Error::Format(format!("n_x = {} but A is {}x{}", self.n_x, sys.n_x(), sys.n_x())));
        }
        Ok(sys)
    }

    pub fn to_plant(&self) -> Result<PartitionedPlant> {
        PartitionedPlant::new(self.to_system()?, self.dims)
    }
}

pub fn plant_to_json(plant: &PartitionedPlant, with_rho: bool) -> Result<String> {
    Ok(serde_json::to_string_pretty(&PlantFile::from_plant(plant, with_rho)?)?)
}

pub fn plant_from_json(text: &str) -> Result<PartitionedPlant> {
    serde_json::from_str::<PlantFile>(text)?.to_plant()
}

pub fn load_plant(path: &Path) -> Result<PartitionedPlant> {
    plant_from_json(&std::fs::read_to_string(path)?)
}

/// Loads only the state-space system of a plant file, e.g. for norm queries
/// on systems without a controller channel.
pub fn load_system(path: &Path) -> Result<StateSpace> {
    serde_json::from_str::<PlantFile>(&std::fs::read_to_string(path)?)?.to_system()
}

pub fn save_plant(plant: &PartitionedPlant, path: &Path, with_rho: bool) -> Result<()> {
    std::fs::write(path, plant_to_json(plant, with_rho)? + "\n")?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyFile {
    pub format: String,
    pub layout: PolicyLayout,
    pub a_k: MatrixJson,
    pub b_k: MatrixJson,
    pub c_k: MatrixJson,
    pub d_k: MatrixJson,
    pub a_d: MatrixJson,
    pub b_d: MatrixJson,
    pub c_d: MatrixJson,
    pub d_d: MatrixJson,
}

impl PolicyFile {
    pub fn from_policy(p: &AugmentedPolicy) -> Self {
        let m = MatrixJson::from_matrix;
        Self {
            format: POLICY_FORMAT.into(),
            layout: p.layout(),
            a_k: m(&p.ctrl.a_k),
            b_k: m(&p.ctrl.b_k),
            c_k: m(&p.ctrl.c_k),
            d_k: m(&p.ctrl.d_k),
            a_d: m(&p.dscale.a_d),
            b_d: m(&p.dscale.b_d),
            c_d: m(&p.dscale.c_d),
            d_d: m(&p.dscale.d_d),
        }
    }

    pub fn to_policy(&self) -> Result<AugmentedPolicy> {
        if self.format != POLICY_FORMAT {
            return Err(Error::Format(format!("unsupported policy format {:?}", self.format)));
        }
        let ctrl = ControllerParams {
            a_k: self.a_k.to_matrix()?,
            b_k: self.b_k.to_matrix()?,
            c_k: self.c_k.to_matrix()?,
            d_k: self.d_k.to_matrix()?,
        };
        let dscale = DScaleParams {
            a_d: self.a_d.to_matrix()?,
            b_d: self.b_d.to_matrix()?,
            c_d: self.c_d.to_matrix()?,
            d_d: self.d_d.to_matrix()?,
        };
        let p = AugmentedPolicy::new(ctrl, dscale)?;
        if p.layout() != self.layout {
            return Err(Error::Format("policy layout disagrees with its matrices".into()));
        }
        Ok(p)
    }
}

pub fn policy_to_json(p: &AugmentedPolicy) -> Result<String> {
    Ok(serde_json::to_string_pretty(&PolicyFile::from_policy(p))?)
}

pub fn policy_from_json(text: &str) -> Result<AugmentedPolicy> {
    serde_json::from_str::<PolicyFile>(text)?.to_policy()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::musyn::{doyle_plant, random_plant};
    use proptest::prelude::*;

    #[test]
    fn numbers_carry_17_significant_digits() {
        let json = plant_to_json(&doyle_plant(), false).unwrap();
        assert!(json.contains("-1.0000000000000000e0"));
        assert_eq!(format_f64(0.1), "1.0000000000000001e-1");
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut v: serde_json::Value = serde_json::from_str(&plant_to_json(&doyle_plant(), false).unwrap()).unwrap();
        v["extra"] = serde_json::json!(1);
        assert!(plant_from_json(&v.to_string()).is_err());
    }

    #[test]
    fn inconsistent_matrix_rejected() {
        let mut f = PlantFile::from_plant(&doyle_plant(), false).unwrap();
        f.d.data.pop();
        assert!(f.to_plant().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn plant_round_trip_is_bit_exact(seed in any::<u64>(), n_x in 0usize..5) {
            let plant = random_plant(n_x.max(1), crate::musyn::ChannelDims::siso(), 0.7, seed).unwrap();
            let back = plant_from_json(&plant_to_json(&plant, true).unwrap()).unwrap();
            prop_assert_eq!(back, plant);
        }

        #[test]
        fn policy_round_trip_is_bit_exact(vals in proptest::collection::vec(-1e3f64..1e3, 8)) {
            let layout = PolicyLayout { n_k: 1, n_dscale: 1, n_u: 1, n_y: 1, n_v: 1 };
            let p = AugmentedPolicy::unflatten(&layout, &vals).unwrap();
            prop_assert_eq!(policy_from_json(&policy_to_json(&p).unwrap()).unwrap(), p);
        }
    }
}
