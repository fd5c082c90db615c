//! JSON and CSV encodings shared by the library and the command line.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, dim_of, Operator, C64};

/// Version tag carried at the top of every emitted JSON document.
pub const SCHEMA_VERSION: u32 = 1;

/// `{"dims": [...], "re": [[...]], "im": [[...]]}`, row-major. Rectangular
/// operators additionally carry `dims_in`, in which case `dims` are the output dims.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims_in: Option<Vec<usize>>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&Operator> for OperatorJson {
    fn from(op: &Operator) -> Self {
        let m = op.matrix();
        let rows = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        OperatorJson {
            dims: op.dims_out().to_vec(),
            dims_in: (!op.is_square()).then(|| op.dims_in().to_vec()),
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }
}

impl TryFrom<OperatorJson> for Operator {
    type Error = Error;

    fn try_from(j: OperatorJson) -> Result<Operator> {
        let dims_in = j.dims_in.unwrap_or_else(|| j.dims.clone());
        let (r, cdim) = (dim_of(&j.dims), dim_of(&dims_in));
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == r && rows.iter().all(|row| row.len() == cdim);
        if !shape_ok(&j.re) || !shape_ok(&j.im) {
            return Err(Error::DimensionMismatch(format!(
                "dims {:?} <- {dims_in:?} need a {r}x{cdim} matrix",
                j.dims
            )));
        }
        let m = DMatrix::from_fn(r, cdim, |i, k| c(j.re[i][k], j.im[i][k]));
        Operator::new(j.dims, dims_in, m)
    }
}

pub fn operator_from_json(text: &str) -> Result<Operator> {
    let j: OperatorJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    Operator::try_from(j)
}

pub fn operator_to_json(op: &Operator) -> String {
    serde_json::to_string_pretty(&OperatorJson::from(op)).expect("serializable")
}

/// `%.12g`-style rendering: 12 significant digits, trailing zeros trimmed,
/// exponent form outside `[1e-5, 1e12)`. Used for every CSV number.
pub fn fmt_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.11e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        let mant = trim_zeros(mant);
        return format!("{mant}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{named_gate, NamedGate};

    #[test]
    fn sig12() {
        assert_eq!(fmt_sig12(0.5), "0.5");
        assert_eq!(fmt_sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig12(2000.0), "2000");
        assert_eq!(fmt_sig12(-1.25e-7), "-1.25e-07");
        assert_eq!(fmt_sig12(123456789012345.0), "1.23456789012e+14");
        assert_eq!(fmt_sig12(0.0), "0");
    }

    #[test]
    fn operator_json_roundtrip() {
        let y = named_gate(NamedGate::Y);
        let back = operator_from_json(&operator_to_json(&y)).unwrap();
        assert_eq!(back, y);
    }

    #[test]
    fn malformed_dims() {
        let text = r#"{"dims":[2,2],"re":[[0,1],[1,0]],"im":[[0,0],[0,0]]}"#;
        assert!(matches!(operator_from_json(text), Err(Error::DimensionMismatch(_))));
        assert!(matches!(operator_from_json("{"), Err(Error::Parse(_))));
    }
}
