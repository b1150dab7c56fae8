//! JSON scenario documents.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major nested
//! arrays:
//!
//! ```json
//! {
//!   "alice_dim": 2,
//!   "bob_dim": 2,
//!   "state": [[[0.5, 0], [0, 0], ...], ...],
//!   "alice_povm": [ <matrix>, ... ],
//!   "bob_povm": [ <matrix>, ... ],
//!   "post_unitaries": [ <matrix>, ... ]
//! }
//! ```
//!
//! `post_unitaries` is optional.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::matcore::{c, ComplexMatrix};
use crate::quantum::{DensityMatrix, Povm, Scenario};

pub type MatrixDoc = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub alice_dim: usize,
    pub bob_dim: usize,
    pub state: MatrixDoc,
    pub alice_povm: Vec<MatrixDoc>,
    pub bob_povm: Vec<MatrixDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub post_unitaries: Option<Vec<MatrixDoc>>,
}

/// A bare measurement, as accepted by `check`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmDocument {
    pub povm: Vec<MatrixDoc>,
}

pub fn matrix_from_doc(doc: &MatrixDoc, field: &str) -> Result<ComplexMatrix, String> {
    let rows: Vec<Vec<_>> = doc
        .iter()
        .map(|row| row.iter().map(|&[re, im]| c(re, im)).collect())
        .collect();
    ComplexMatrix::from_rows(&rows).map_err(|e| format!("{field}: {e}"))
}

pub fn matrix_to_doc(m: &ComplexMatrix) -> MatrixDoc {
    m.to_rows()
        .into_iter()
        .map(|row| row.into_iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn povm_from_doc(docs: &[MatrixDoc], field: &str, tol: f64) -> Result<Povm, String> {
    let elements = docs
        .iter()
        .enumerate()
        .map(|(i, m)| matrix_from_doc(m, &format!("{field}[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    Povm::new(elements, tol).map_err(|e| format!("{field}: {e}"))
}

impl ScenarioDocument {
    pub fn from_scenario(s: &Scenario) -> Self {
        Self {
            alice_dim: s.alice_dim(),
            bob_dim: s.bob_dim(),
            state: matrix_to_doc(s.state().matrix()),
            alice_povm: s.alice_povm().elements().iter().map(matrix_to_doc).collect(),
            bob_povm: s.bob_povm().elements().iter().map(matrix_to_doc).collect(),
            post_unitaries: s.post_unitaries().map(|us| us.iter().map(matrix_to_doc).collect()),
        }
    }

    /// Validates every field; the error names the first violated invariant.
    pub fn to_scenario(&self, tol: f64) -> Result<Scenario, String> {
        let state = matrix_from_doc(&self.state, "state")?;
        let expected = self.alice_dim * self.bob_dim;
        if state.rows() != expected || state.cols() != expected {
            return Err(format!(
                "state: expected {expected}x{expected} for alice_dim {} and bob_dim {}, got {}x{}",
                self.alice_dim,
                self.bob_dim,
                state.rows(),
                state.cols()
            ));
        }
        let state = DensityMatrix::new(state, tol).map_err(|e| format!("state: {e}"))?;
        let alice = povm_from_doc(&self.alice_povm, "alice_povm", tol)?;
        if alice.dim() != self.alice_dim {
            return Err(format!(
                "alice_povm: elements are {0}x{0}, alice_dim is {1}",
                alice.dim(),
                self.alice_dim
            ));
        }
        let bob = povm_from_doc(&self.bob_povm, "bob_povm", tol)?;
        if bob.dim() != self.bob_dim {
            return Err(format!(
                "bob_povm: elements are {0}x{0}, bob_dim is {1}",
                bob.dim(),
                self.bob_dim
            ));
        }
        let unitaries = self
            .post_unitaries
            .as_ref()
            .map(|us| {
                us.iter()
                    .enumerate()
                    .map(|(i, m)| matrix_from_doc(m, &format!("post_unitaries[{i}]")))
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?;
        Scenario::new(state, alice, bob, unitaries, tol).map_err(|e| format!("scenario: {e}"))
    }
}

/// Parses a scenario document, also accepting output files that wrap one
/// under a `"scenario"` key.
pub fn parse_scenario_document(text: &str) -> Result<ScenarioDocument, String> {
    let value: Value = serde_json::from_str(text).map_err(|e| format!("malformed JSON: {e}"))?;
    let inner = match value {
        Value::Object(mut map) if map.contains_key("scenario") => map.remove("scenario").unwrap_or_default(),
        other => other,
    };
    serde_json::from_value(inner).map_err(|e| format!("not a scenario document: {e}"))
}

/// POVMs found in a document, labelled by field name.
pub fn parse_povm_documents(text: &str) -> Result<Vec<(String, Vec<MatrixDoc>)>, String> {
    let value: Value = serde_json::from_str(text).map_err(|e| format!("malformed JSON: {e}"))?;
    if value.get("povm").is_some() {
        let doc: PovmDocument = serde_json::from_value(value).map_err(|e| format!("not a POVM document: {e}"))?;
        return Ok(vec![("povm".to_string(), doc.povm)]);
    }
    let doc = parse_scenario_document(&value.to_string())?;
    Ok(vec![
        ("alice_povm".to_string(), doc.alice_povm),
        ("bob_povm".to_string(), doc.bob_povm),
    ])
}
