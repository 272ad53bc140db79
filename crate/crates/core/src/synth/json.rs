use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Matrix, SynthError};
use crate::ring::Scalar;

#[derive(Serialize, Deserialize)]
struct MatRepr {
    d: u32,
    #[serde(rename = "in")]
    n_in: usize,
    #[serde(rename = "out")]
    n_out: usize,
    entries: Vec<Vec<Scalar>>,
}

pub fn matrix_to_json(m: &Matrix) -> Value {
    serde_json::to_value(MatRepr { d: m.d, n_in: m.n_in, n_out: m.n_out, entries: m.entries.clone() })
        .expect("matrix serializes")
}

pub fn matrix_from_json(text: &str) -> Result<Matrix, SynthError> {
    let r: MatRepr = serde_json::from_str(text).map_err(|e| SynthError::Format(e.to_string()))?;
    let m = Matrix::new(r.d, r.entries)?;
    if m.n_in != r.n_in || m.n_out != r.n_out {
        return Err(SynthError::Format(format!(
            "declared {}→{} wires but entries are {}×{}",
            r.n_in,
            r.n_out,
            m.rows(),
            m.cols()
        )));
    }
    Ok(m)
}
