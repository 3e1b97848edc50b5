use serde::{Deserialize, Serialize};

use crate::Label;

use super::kernel::rbf_unchecked;
use super::SvmError;

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Trained classifier: `y(x) = Σ coef_n·K(x, sv_n) + bias`.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    support_vectors: Vec<Vec<f64>>,
    /// `a_n · t_n` for each support vector.
    dual_coefficients: Vec<f64>,
    bias: f64,
    sigma: f64,
    cost: f64,
    feature_schema: Vec<String>,
}

impl SvmModel {
    pub fn new(
        support_vectors: Vec<Vec<f64>>,
        dual_coefficients: Vec<f64>,
        bias: f64,
        sigma: f64,
        cost: f64,
    ) -> Result<Self, SvmError> {
        if support_vectors.is_empty() {
            return Err(SvmError::InvalidModel("no support vectors".into()));
        }
        if support_vectors.len() != dual_coefficients.len() {
            return Err(SvmError::InvalidModel(format!(
                "{} support vectors but {} dual coefficients",
                support_vectors.len(),
                dual_coefficients.len()
            )));
        }
        let dim = support_vectors[0].len();
        if support_vectors.iter().any(|sv| sv.len() != dim) {
            return Err(SvmError::InvalidModel(
                "support vectors differ in dimension".into(),
            ));
        }
        if !(sigma > 0.0 && sigma.is_finite()) || !(cost > 0.0 && cost.is_finite()) {
            return Err(SvmError::InvalidModel(format!(
                "sigma and cost must be positive, got sigma={sigma} cost={cost}"
            )));
        }
        if let Some(c) = dual_coefficients
            .iter()
            .find(|c| c.abs() > cost + 1e-9 || !c.is_finite())
        {
            return Err(SvmError::InvalidModel(format!(
                "dual coefficient {c} outside the box [-{cost}, {cost}]"
            )));
        }
        if !bias.is_finite() {
            return Err(SvmError::InvalidModel("bias is not finite".into()));
        }
        Ok(SvmModel {
            support_vectors,
            dual_coefficients,
            bias,
            sigma,
            cost,
            feature_schema: Vec::new(),
        })
    }

    /// Attaches feature names; stored alongside the model when saved.
    pub fn with_feature_schema(mut self, schema: Vec<String>) -> Self {
        self.feature_schema = schema;
        self
    }

    pub fn support_vectors(&self) -> &[Vec<f64>] {
        &self.support_vectors
    }

    pub fn dual_coefficients(&self) -> &[f64] {
        &self.dual_coefficients
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn feature_schema(&self) -> &[String] {
        &self.feature_schema
    }

    pub fn dim(&self) -> usize {
        self.support_vectors[0].len()
    }

    pub fn decision_value(&self, x: &[f64]) -> Result<f64, SvmError> {
        if x.len() != self.dim() {
            return Err(SvmError::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        let sum: f64 = self
            .support_vectors
            .iter()
            .zip(&self.dual_coefficients)
            .map(|(sv, coef)| coef * rbf_unchecked(x, sv, self.sigma))
            .sum();
        Ok(sum + self.bias)
    }

    pub fn predict(&self, x: &[f64]) -> Result<Label, SvmError> {
        self.decision_value(x).map(Label::from_decision)
    }

    pub(crate) fn to_document(&self) -> ModelDocument {
        ModelDocument {
            format_version: MODEL_FORMAT_VERSION,
            sigma: self.sigma,
            cost: self.cost,
            bias: self.bias,
            label_map: LabelMap::default(),
            support_vectors: self.support_vectors.clone(),
            dual_coefficients: self.dual_coefficients.clone(),
            feature_schema: self.feature_schema.clone(),
        }
    }

    pub(crate) fn from_document(doc: ModelDocument) -> Result<Self, SvmError> {
        if doc.format_version != MODEL_FORMAT_VERSION {
            return Err(SvmError::InvalidModel(format!(
                "unsupported format_version {} (expected {MODEL_FORMAT_VERSION})",
                doc.format_version
            )));
        }
        if doc.label_map != LabelMap::default() {
            return Err(SvmError::InvalidModel(
                "label_map must encode true as 1 and pseudo as -1".into(),
            ));
        }
        let model = SvmModel::new(
            doc.support_vectors,
            doc.dual_coefficients,
            doc.bias,
            doc.sigma,
            doc.cost,
        )?;
        if !doc.feature_schema.is_empty() && doc.feature_schema.len() != model.dim() {
            return Err(SvmError::InvalidModel(format!(
                "feature_schema has {} names for {}-dimensional support vectors",
                doc.feature_schema.len(),
                model.dim()
            )));
        }
        Ok(model.with_feature_schema(doc.feature_schema))
    }

    /// Pretty-printed JSON document. Floats use shortest round-trip formatting.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("finite model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SvmError> {
        let doc: ModelDocument =
            serde_json::from_str(text).map_err(|e| SvmError::InvalidModel(e.to_string()))?;
        Self::from_document(doc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub(crate) struct LabelMap {
    #[serde(rename = "true")]
    true_defect: i8,
    pseudo: i8,
}

impl Default for LabelMap {
    fn default() -> Self {
        LabelMap {
            true_defect: 1,
            pseudo: -1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct ModelDocument {
    pub format_version: u32,
    pub sigma: f64,
    pub cost: f64,
    pub bias: f64,
    pub label_map: LabelMap,
    pub support_vectors: Vec<Vec<f64>>,
    pub dual_coefficients: Vec<f64>,
    #[serde(default)]
    pub feature_schema: Vec<String>,
}
