//! JSON file formats.
//!
//! A matrix is an object `{"re": [[..], ..], "im": [[..], ..]}` of row-major
//! real and imaginary parts; `im` may be omitted for real matrices. Extended
//! reals are written as numbers, or as the strings `"inf"`, `"-inf"` and
//! `"nan"`.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64 as C64;
use oneshot_core::divergences::DivergenceValue;
use oneshot_core::sdp::{SdpProblem, SdpSolution, Sense};
use oneshot_core::smoothing::{BoundCheck, JointResponse, JointSmoothingResult, SmoothingCertificate};
use oneshot_core::{CMatrix, HermitianOperator, PositiveOperator, QuantumState};
use serde::{Deserialize, Serialize, Serializer};

use crate::{OneshotError, Result};

/// Serializer for `f64` fields that may be infinite or NaN.
pub mod ext_f64 {
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

fn divergence<S: Serializer>(v: &DivergenceValue, s: S) -> std::result::Result<S::Ok, S::Error> {
    ext_f64::serialize(&v.to_f64(), s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let part = |f: fn(&C64) -> f64| (0..m.rows()).map(|i| (0..m.cols()).map(|j| f(&m[(i, j)])).collect()).collect();
        let im: Vec<Vec<f64>> = part(|z| z.im);
        let real = im.iter().flatten().all(|&x| x == 0.0);
        MatrixJson { re: part(|z| z.re), im: if real { None } else { Some(im) } }
    }

    pub fn from_operator(h: &HermitianOperator) -> Self {
        Self::from_matrix(h.matrix())
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let rows = self.re.len();
        let cols = self.re.first().map_or(0, Vec::len);
        if rows == 0 || self.re.iter().any(|r| r.len() != cols) {
            return Err(OneshotError::usage("matrix rows must be nonempty and of equal length"));
        }
        if let Some(im) = &self.im {
            if im.len() != rows || im.iter().any(|r| r.len() != cols) {
                return Err(OneshotError::usage("imaginary part has a different shape"));
            }
        }
        Ok(CMatrix::from_fn(rows, cols, |i, j| C64::new(self.re[i][j], self.im.as_ref().map_or(0.0, |im| im[i][j]))))
    }

    pub fn to_operator(&self) -> Result<HermitianOperator> {
        Ok(HermitianOperator::new(self.to_matrix()?)?)
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| OneshotError::io(path.display().to_string(), e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| OneshotError::usage(format!("cannot parse {}: {e}", path.display())))
}

pub fn read_operator(path: &Path) -> Result<HermitianOperator> {
    read_json::<MatrixJson>(path)?.to_operator()
}

/// A state; unit trace (within tolerance) makes it normalized.
pub fn read_state(path: &Path) -> Result<QuantumState> {
    Ok(QuantumState::infer(read_operator(path)?)?)
}

pub fn read_positive(path: &Path) -> Result<PositiveOperator> {
    Ok(PositiveOperator::new(read_operator(path)?)?)
}

/// Pretty JSON to `path`, or to standard output when `path` is `None`.
pub fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match path {
        Some(p) => fs::write(p, text).map_err(|e| OneshotError::io(p.display().to_string(), e)),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| OneshotError::io("<stdout>", e)),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundCheckJson {
    pub name: String,
    #[serde(serialize_with = "ext_f64::serialize")]
    pub lhs: f64,
    #[serde(serialize_with = "ext_f64::serialize")]
    pub rhs: f64,
    #[serde(serialize_with = "ext_f64::serialize")]
    pub slack: f64,
}

impl From<&BoundCheck> for BoundCheckJson {
    fn from(c: &BoundCheck) -> Self {
        BoundCheckJson { name: c.name.clone(), lhs: c.lhs, rhs: c.rhs, slack: c.slack() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateJson {
    pub smoothed_state: MatrixJson,
    pub normalized: bool,
    pub projector: MatrixJson,
    #[serde(serialize_with = "ext_f64::serialize")]
    pub distance: f64,
    #[serde(serialize_with = "divergence")]
    pub claimed_bound: DivergenceValue,
    #[serde(serialize_with = "ext_f64::serialize")]
    pub witness_value: f64,
    pub inequalities: Vec<BoundCheckJson>,
    #[serde(serialize_with = "ext_f64::serialize")]
    pub worst_slack: f64,
}

impl From<&SmoothingCertificate> for CertificateJson {
    fn from(c: &SmoothingCertificate) -> Self {
        CertificateJson {
            smoothed_state: MatrixJson::from_operator(c.smoothed_state.op()),
            normalized: c.smoothed_state.is_normalized(),
            projector: MatrixJson::from_operator(&c.projector),
            distance: c.distance,
            claimed_bound: c.claimed_bound,
            witness_value: c.witness_value,
            inequalities: c.inequalities.iter().map(BoundCheckJson::from).collect(),
            worst_slack: c.worst_slack(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MarginalJson {
    pub projector: MatrixJson,
    #[serde(serialize_with = "divergence")]
    pub k: DivergenceValue,
    pub kept_mass: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct JointResponseJson {
    pub certificate: CertificateJson,
    pub a: MarginalJson,
    pub b: MarginalJson,
    #[serde(serialize_with = "divergence")]
    pub lambda_a: DivergenceValue,
    #[serde(serialize_with = "divergence")]
    pub lambda_b: DivergenceValue,
    pub delta: f64,
}

impl From<&JointResponse> for JointResponseJson {
    fn from(r: &JointResponse) -> Self {
        let marginal = |m: &oneshot_core::smoothing::MarginalProjection| MarginalJson {
            projector: MatrixJson::from_operator(&m.projector),
            k: m.k,
            kept_mass: m.kept_mass,
        };
        JointResponseJson {
            certificate: (&r.certificate).into(),
            a: marginal(&r.a),
            b: marginal(&r.b),
            lambda_a: r.lambda_a,
            lambda_b: r.lambda_b,
            delta: r.delta,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SolutionSummaryJson {
    pub status: &'static str,
    pub primal_value: f64,
    pub dual_value: f64,
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
}

impl From<&SdpSolution> for SolutionSummaryJson {
    fn from(s: &SdpSolution) -> Self {
        SolutionSummaryJson {
            status: s.status.as_str(),
            primal_value: s.primal_value,
            dual_value: s.dual_value,
            gap: s.gap,
            primal_residual: s.primal_residual,
            dual_residual: s.dual_residual,
            iterations: s.iterations,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct JointResultJson {
    pub smoothed_joint_state: MatrixJson,
    pub marginal_a: MatrixJson,
    pub marginal_b: MatrixJson,
    #[serde(serialize_with = "divergence")]
    pub lambda_a: DivergenceValue,
    #[serde(serialize_with = "divergence")]
    pub lambda_b: DivergenceValue,
    pub delta: f64,
    pub radius: f64,
    pub checks: Vec<BoundCheckJson>,
    pub solution: SolutionSummaryJson,
}

impl From<&JointSmoothingResult> for JointResultJson {
    fn from(r: &JointSmoothingResult) -> Self {
        JointResultJson {
            smoothed_joint_state: MatrixJson::from_operator(r.smoothed_joint_state.op()),
            marginal_a: MatrixJson::from_operator(r.marginal_a.op()),
            marginal_b: MatrixJson::from_operator(r.marginal_b.op()),
            lambda_a: r.lambda_a,
            lambda_b: r.lambda_b,
            delta: r.delta,
            radius: r.radius,
            checks: r.checks.iter().map(BoundCheckJson::from).collect(),
            solution: (&r.solution).into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstraintJson {
    pub terms: Vec<(usize, MatrixJson)>,
    pub sense: &'static str,
    pub rhs: f64,
}

/// Full dump of an SDP, for replaying solver failures.
#[derive(Clone, Debug, Serialize)]
pub struct SdpProblemJson {
    pub blocks: Vec<usize>,
    pub objective: Vec<MatrixJson>,
    pub constraints: Vec<ConstraintJson>,
}

impl From<&SdpProblem> for SdpProblemJson {
    fn from(p: &SdpProblem) -> Self {
        SdpProblemJson {
            blocks: p.blocks.clone(),
            objective: p.objective.iter().map(MatrixJson::from_operator).collect(),
            constraints: p
                .constraints
                .iter()
                .map(|c| ConstraintJson {
                    terms: c.terms.iter().map(|(b, a)| (*b, MatrixJson::from_operator(a))).collect(),
                    sense: match c.sense {
                        Sense::Eq => "eq",
                        Sense::Le => "le",
                        Sense::Ge => "ge",
                    },
                    rhs: c.rhs,
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let m = CMatrix::from_fn(2, 2, |i, j| C64::new(i as f64 + 0.5, if i == j { 0.0 } else if i < j { 1.0 } else { -1.0 }));
        let j = MatrixJson::from_matrix(&m);
        let text = serde_json::to_string(&j).unwrap();
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_matrix().unwrap(), m);
    }

    #[test]
    fn real_matrices_omit_imaginary_part() {
        let text = serde_json::to_string(&MatrixJson::from_matrix(&CMatrix::identity(2))).unwrap();
        assert_eq!(text, r#"{"re":[[1.0,0.0],[0.0,1.0]]}"#);
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let j: MatrixJson = serde_json::from_str(r#"{"re": [[1, 0], [0]]}"#).unwrap();
        assert!(j.to_matrix().is_err());
    }

    #[test]
    fn infinities_are_strings() {
        #[derive(Serialize)]
        struct T {
            #[serde(serialize_with = "ext_f64::serialize")]
            x: f64,
        }
        assert_eq!(serde_json::to_string(&T { x: f64::INFINITY }).unwrap(), r#"{"x":"inf"}"#);
        assert_eq!(serde_json::to_string(&T { x: 0.5 }).unwrap(), r#"{"x":0.5}"#);
    }
}
