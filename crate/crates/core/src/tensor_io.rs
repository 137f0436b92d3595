//! JSON file format for curvature tensors.
//!
//! ```json
//! {"dim": 3, "signature": [1, 2], "gram": [[-1,0,0],[0,1,0],[0,0,1]],
//!  "components": [[0, 1, 1, 0, 2.5]]}
//! ```
//!
//! `components` lists `[i, j, k, l, value]` with 0-based indices (the
//! mathematical `e_1..e_m` is `0..m-1` here). Omitted entries are zero. On
//! load, every entry related to a listed one by pair symmetry or
//! antisymmetry is filled in unless it is listed itself, so a file may give
//! one representative per orbit. Files are written with every non-zero entry.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::curvature::{symmetry_images, CurvatureTensor};
use crate::error::{Error, Result};
use crate::linalg::{IndefiniteInnerProduct, Signature};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorFile {
    pub dim: usize,
    pub signature: [usize; 2],
    pub gram: Vec<Vec<f64>>,
    pub components: Vec<(usize, usize, usize, usize, f64)>,
}

impl TensorFile {
    pub fn from_tensor(t: &CurvatureTensor) -> Self {
        let m = t.dim();
        let sig = t.space().signature();
        let g = t.space().gram();
        let mut components = Vec::new();
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        let v = t.get(i, j, k, l);
                        if v != 0.0 {
                            components.push((i, j, k, l, v));
                        }
                    }
                }
            }
        }
        TensorFile {
            dim: m,
            signature: [sig.p, sig.q],
            gram: (0..m).map(|i| (0..m).map(|j| g[(i, j)]).collect()).collect(),
            components,
        }
    }

    pub fn into_tensor(self) -> Result<CurvatureTensor> {
        let m = self.dim;
        let sig = Signature::new(self.signature[0], self.signature[1])?;
        if sig.dim() != m {
            return Err(Error::InvalidTensor(format!(
                "signature ({},{}) does not match dim {m}",
                sig.p, sig.q
            )));
        }
        if self.gram.len() != m || self.gram.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidTensor(format!("gram must be {m}x{m}")));
        }
        let gram = DMatrix::from_fn(m, m, |i, j| self.gram[i][j]);
        let space = Arc::new(IndefiniteInnerProduct::with_signature(gram, sig)?);
        let mut t = CurvatureTensor::zeros(space);
        let mut explicit = vec![false; m * m * m * m];
        let flat = |i: usize, j: usize, k: usize, l: usize| ((i * m + j) * m + k) * m + l;
        for &(i, j, k, l, v) in &self.components {
            if [i, j, k, l].iter().any(|&a| a >= m) {
                return Err(Error::InvalidTensor(format!(
                    "index ({i},{j},{k},{l}) out of range for dim {m}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidTensor(format!("non-finite value at ({i},{j},{k},{l})")));
            }
            if explicit[flat(i, j, k, l)] {
                return Err(Error::InvalidTensor(format!("entry ({i},{j},{k},{l}) listed twice")));
            }
            explicit[flat(i, j, k, l)] = true;
            t.set(i, j, k, l, v);
        }
        for &(i, j, k, l, v) in &self.components {
            for (a, b, c, d, s) in symmetry_images(i, j, k, l) {
                if !explicit[flat(a, b, c, d)] {
                    t.set(a, b, c, d, s * v);
                }
            }
        }
        Ok(t)
    }
}

pub fn tensor_from_json(text: &str) -> Result<CurvatureTensor> {
    let file: TensorFile = serde_json::from_str(text)?;
    file.into_tensor()
}

pub fn tensor_to_json(t: &CurvatureTensor) -> Result<String> {
    Ok(serde_json::to_string_pretty(&TensorFile::from_tensor(t))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Endomorphism;
    use crate::random::{random_curvature, random_inner_product, stream_rng};

    #[test]
    fn single_representative_is_completed() {
        let text = r#"{"dim":3,"signature":[1,2],"gram":[[-1,0,0],[0,1,0],[0,0,1]],
                       "components":[[0,1,1,0,2.5]]}"#;
        let t = tensor_from_json(text).unwrap();
        assert_eq!(t.get(1, 0, 0, 1), 2.5);
        assert_eq!(t.get(0, 1, 0, 1), -2.5);
        assert!(t.validate().passes());
    }

    #[test]
    fn explicit_entries_are_not_overridden() {
        let text = r#"{"dim":3,"signature":[0,3],"gram":[[1,0,0],[0,1,0],[0,0,1]],
                       "components":[[0,1,1,0,1.0],[1,0,1,0,-0.5]]}"#;
        let t = tensor_from_json(text).unwrap();
        assert_eq!(t.get(1, 0, 1, 0), -0.5);
        assert!((t.validate().antisymmetry - 0.5).abs() < 1e-15);
    }

    #[test]
    fn round_trip_is_exact() {
        let mut rng = stream_rng(5, 0);
        let g = Arc::new(random_inner_product(&mut rng, Signature::new(2, 2).unwrap()));
        let a = random_curvature(&mut rng, g, 3);
        let back = tensor_from_json(&tensor_to_json(&a).unwrap()).unwrap();
        assert_eq!(back, a);
        let id = CurvatureTensor::build_a_phi(
            Arc::new(IndefiniteInnerProduct::euclidean(3).unwrap()),
            &Endomorphism::identity(3),
        )
        .unwrap();
        assert_eq!(tensor_from_json(&tensor_to_json(&id).unwrap()).unwrap(), id);
    }

    #[test]
    fn rejects_malformed_files() {
        let base = |comps: &str, sig: &str| {
            format!(r#"{{"dim":3,"signature":{sig},"gram":[[1,0,0],[0,1,0],[0,0,1]],"components":{comps}}}"#)
        };
        assert!(matches!(tensor_from_json("{"), Err(Error::Json(_))));
        assert!(tensor_from_json(&base("[[0,1,1,3,1.0]]", "[0,3]")).is_err());
        assert!(tensor_from_json(&base("[]", "[1,2]")).is_err());
        assert!(tensor_from_json(&base("[]", "[0,4]")).is_err());
        assert!(tensor_from_json(&base("[[0,1,1,0,1.0],[0,1,1,0,2.0]]", "[0,3]")).is_err());
        assert!(tensor_from_json(&base("[]", "[0,3]")).is_ok());
    }
}
