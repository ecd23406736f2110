//! JSON file formats and output rendering.
//!
//! Floats are written with 17 significant digits (`%.17g`), which is enough
//! to read every `f64` back unchanged.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;
use thiserror::Error;

use crate::completion::{CompletionError, LengthGraph};
use crate::embed::{EmbedError, SquaredDistanceMatrix};
use crate::kissing::KissingSphere;
use crate::lightcone::MinkowskiVector;
use crate::numkernel::{KernelError, SymMatrix};
use crate::spheres::{EuclideanSphere, SeparationMatrix};

/// Absolute asymmetry accepted in matrix files.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> FormatError {
    FormatError::Invalid(msg.into())
}

/// `%.17g` for a finite double.
pub fn format_g17(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, v);
        strip_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", strip_zeros(mantissa), sign, exp.abs())
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

struct G17;

impl Formatter for G17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            writer.write_all(format_g17(value).as_bytes())
        } else {
            writer.write_all(b"null")
        }
    }
}

/// Compact JSON with `%.17g` floats.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, G17);
    value.serialize(&mut ser).expect("in-memory serialization");
    String::from_utf8(out).expect("JSON is UTF-8")
}

/// `{"n": n, "spheres": [{"t": [...], "phi": x} | {"h": x}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereSetFile {
    pub n: usize,
    pub spheres: Vec<KissingSphere>,
}

impl SphereSetFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let f: SphereSetFile = serde_json::from_str(text)?;
        if f.n < 1 {
            return Err(invalid("n must be at least 1"));
        }
        for (i, s) in f.spheres.iter().enumerate() {
            s.validate().and_then(|_| s.check_ambient(f.n)).map_err(|e| invalid(format!("sphere {i}: {e}")))?;
        }
        Ok(f)
    }
}

/// `{"labels": [...]?, "d2": [[...]], "diag": -1?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub d2: Vec<Vec<f64>>,
    /// `-1` marks a separation matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diag: Option<f64>,
}

impl MatrixFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn is_separation(&self) -> bool {
        self.diag == Some(-1.0)
    }

    /// Checks squareness and symmetry to [`SYMMETRY_TOLERANCE`], then mirrors
    /// the upper triangle.
    fn symmetric(&self) -> Result<SymMatrix, FormatError> {
        let k = self.d2.len();
        if k == 0 {
            return Err(invalid("matrix is empty"));
        }
        for (i, row) in self.d2.iter().enumerate() {
            if row.len() != k {
                return Err(invalid(format!("row {i} has {} entries, expected {k}", row.len())));
            }
        }
        for i in 0..k {
            for j in (i + 1)..k {
                let (a, b) = (self.d2[i][j], self.d2[j][i]);
                if !((a - b).abs() <= SYMMETRY_TOLERANCE) {
                    return Err(invalid(format!("not symmetric at ({i}, {j}): {a} vs {b}")));
                }
            }
        }
        let m = SymMatrix::from_fn(k, |i, j| if i <= j { self.d2[i][j] } else { self.d2[j][i] });
        if let Some(i) = (0..k).find(|&i| !(0..k).all(|j| m.get(i, j).is_finite())) {
            return Err(invalid(format!("row {i} has a non-finite entry")));
        }
        Ok(m)
    }

    pub fn distance_matrix(&self) -> Result<SquaredDistanceMatrix, FormatError> {
        if let Some(d) = self.diag {
            if d != 0.0 {
                return Err(invalid(format!("diag marker {d} is not a distance matrix")));
            }
        }
        let d = SquaredDistanceMatrix::from_sym(self.symmetric()?).map_err(|e| invalid(e.to_string()))?;
        match &self.labels {
            Some(l) => d.with_labels(l.clone()).map_err(|e| invalid(e.to_string())),
            None => Ok(d),
        }
    }

    pub fn separation_matrix(&self) -> Result<SeparationMatrix, FormatError> {
        if self.diag.is_some_and(|d| d != -1.0) {
            return Err(invalid("separation matrices carry \"diag\": -1"));
        }
        SeparationMatrix::from_sym(self.symmetric()?).map_err(|e| invalid(e.to_string()))
    }

    pub fn from_distance(d: &SquaredDistanceMatrix) -> Self {
        MatrixFile {
            labels: d.labels().map(<[String]>::to_vec),
            d2: d.to_rows(),
            diag: None,
        }
    }

    pub fn from_separation(s: &SeparationMatrix) -> Self {
        MatrixFile {
            labels: None,
            d2: s.to_rows(),
            diag: Some(-1.0),
        }
    }
}

/// `{"n": n, "spheres": [{"c": [...], "r": x}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EuclideanSphereFile {
    pub n: usize,
    pub spheres: Vec<EuclideanSphere>,
}

impl EuclideanSphereFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let f: EuclideanSphereFile = serde_json::from_str(text)?;
        for (i, s) in f.spheres.iter().enumerate() {
            s.validate().map_err(|e| invalid(format!("sphere {i}: {e}")))?;
            if s.dim() != f.n {
                return Err(invalid(format!("sphere {i} has {} coordinates, expected {}", s.dim(), f.n)));
            }
        }
        Ok(f)
    }
}

/// `{"n": n, "vectors": [[x_0, ..., x_{n-1}, t], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorFile {
    pub n: usize,
    pub vectors: Vec<MinkowskiVector>,
}

impl VectorFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let f: VectorFile = serde_json::from_str(text)?;
        for (i, v) in f.vectors.iter().enumerate() {
            if v.dim() != f.n {
                return Err(invalid(format!("vector {i} has {} coordinates, expected {}", v.dim() + 1, f.n + 1)));
            }
        }
        Ok(f)
    }
}

pub fn parse_graph(text: &str) -> Result<LengthGraph, FormatError> {
    Ok(serde_json::from_str(text)?)
}

impl From<KernelError> for FormatError {
    fn from(e: KernelError) -> Self {
        invalid(e.to_string())
    }
}

impl From<EmbedError> for FormatError {
    fn from(e: EmbedError) -> Self {
        invalid(e.to_string())
    }
}

impl From<CompletionError> for FormatError {
    fn from(e: CompletionError) -> Self {
        invalid(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf() {
        let cases = [
            (1.0, "1"),
            (0.1, "0.10000000000000001"),
            (-2.5, "-2.5"),
            (1e-5, "1.0000000000000001e-05"),
            (1e17, "1e+17"),
            (123456789012345680.0, "1.2345678901234568e+17"),
            (1e16, "10000000000000000"),
            (0.0001, "0.0001"),
            (0.0, "0"),
        ];
        for (v, want) in cases {
            assert_eq!(format_g17(v), want, "{v}");
        }
    }

    #[test]
    fn g17_round_trips() {
        for v in [std::f64::consts::PI, 1.0 / 3.0, 2f64.sqrt() * 1e-300, 6.02214076e23, f64::MAX, f64::MIN_POSITIVE] {
            assert_eq!(format_g17(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn json_rendering() {
        assert_eq!(to_json(&vec![1.0, 0.5]), "[1,0.5]");
    }

    #[test]
    fn matrix_validation() {
        let ok = MatrixFile::parse(r#"{"d2": [[0, 1], [1.0000000000001, 0]]}"#).unwrap();
        assert!(ok.distance_matrix().is_ok());
        let bad = MatrixFile::parse(r#"{"d2": [[0, 1], [1.001, 0]]}"#).unwrap();
        assert!(bad.distance_matrix().is_err());
        let sep = MatrixFile::parse(r#"{"d2": [[-1, 1], [1, -1]], "diag": -1}"#).unwrap();
        assert!(sep.is_separation());
        assert!(sep.separation_matrix().is_ok());
        assert!(sep.distance_matrix().is_err());
        assert!(MatrixFile::parse(r#"{"d2": [[0]], "extra": 1}"#).is_err());
    }

    #[test]
    fn sphere_files() {
        let f = SphereSetFile::parse(r#"{"n": 2, "spheres": [{"t": [0], "phi": 1}, {"h": 2}]}"#).unwrap();
        assert_eq!(f.spheres[1], KissingSphere::hyperplane(2.0).unwrap());
        assert!(SphereSetFile::parse(r#"{"n": 3, "spheres": [{"t": [0], "phi": 1}]}"#).is_err());
        assert!(SphereSetFile::parse(r#"{"n": 2, "spheres": [{"t": [0], "phi": -1}]}"#).is_err());
    }
}
