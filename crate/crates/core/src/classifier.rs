//! Feature extraction and SVM bundled into one trainable, serializable unit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::LabeledSample;
use crate::dwt::{FilterFamily, FilterPair, Image};
use crate::features::{extract_features_with, schema, BandSelection, FeatureError, Standardizer};
use crate::svm::{self, ModelDocument, SvmModel, TrainConfig};
use crate::{Error, Label};

/// How an image becomes a feature vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeaturePipeline {
    pub level: u32,
    pub filter: FilterFamily,
    pub bands: BandSelection,
    /// Z-score features with statistics fitted on the training set.
    pub standardize: bool,
}

impl FeaturePipeline {
    pub fn new(level: u32) -> Self {
        FeaturePipeline {
            level,
            filter: FilterFamily::Haar,
            bands: BandSelection::AllLevels,
            standardize: false,
        }
    }

    pub fn feature_names(&self) -> Vec<String> {
        schema(self.level, self.bands)
            .iter()
            .map(ToString::to_string)
            .collect()
    }

    /// Raw (unstandardized) features of one image.
    pub fn extract(&self, image: &Image) -> Result<Vec<f64>, FeatureError> {
        let filter = FilterPair::new(self.filter);
        extract_features_with(image, self.level, &filter, self.bands).map(|f| f.into_values())
    }

    pub fn extract_all(&self, samples: &[LabeledSample]) -> Result<Vec<Vec<f64>>, FeatureError> {
        samples.iter().map(|s| self.extract(&s.image)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classifier {
    pipeline: FeaturePipeline,
    standardizer: Option<Standardizer>,
    model: SvmModel,
}

impl Classifier {
    pub fn fit(
        samples: &[LabeledSample],
        pipeline: FeaturePipeline,
        config: &TrainConfig,
    ) -> Result<Self, Error> {
        let features = pipeline.extract_all(samples)?;
        let labels: Vec<Label> = samples.iter().map(|s| s.label).collect();
        Self::fit_features(&features, &labels, pipeline, config)
    }

    /// Trains on precomputed raw features (as produced by
    /// [`FeaturePipeline::extract`]).
    pub fn fit_features(
        features: &[Vec<f64>],
        labels: &[Label],
        pipeline: FeaturePipeline,
        config: &TrainConfig,
    ) -> Result<Self, Error> {
        let standardizer = if pipeline.standardize {
            Some(Standardizer::fit(features)?)
        } else {
            None
        };
        let inputs = match &standardizer {
            Some(s) => features
                .iter()
                .map(|f| s.transform(f))
                .collect::<Result<Vec<_>, _>>()?,
            None => features.to_vec(),
        };
        let model = svm::train(&inputs, labels, config)?.with_feature_schema(pipeline.feature_names());
        Ok(Classifier {
            pipeline,
            standardizer,
            model,
        })
    }

    pub fn pipeline(&self) -> &FeaturePipeline {
        &self.pipeline
    }

    pub fn model(&self) -> &SvmModel {
        &self.model
    }

    pub fn standardizer(&self) -> Option<&Standardizer> {
        self.standardizer.as_ref()
    }

    pub fn decision_value_for_features(&self, raw: &[f64]) -> Result<f64, Error> {
        let value = match &self.standardizer {
            Some(s) => self.model.decision_value(&s.transform(raw)?)?,
            None => self.model.decision_value(raw)?,
        };
        Ok(value)
    }

    pub fn decision_value(&self, image: &Image) -> Result<f64, Error> {
        self.decision_value_for_features(&self.pipeline.extract(image)?)
    }

    pub fn predict(&self, image: &Image) -> Result<Label, Error> {
        self.decision_value(image).map(Label::from_decision)
    }

    pub fn to_json(&self) -> String {
        let doc = ClassifierDocument {
            model: self.model.to_document(),
            pipeline: PipelineDocument {
                level: self.pipeline.level,
                filter: self.pipeline.filter,
                bands: self.pipeline.bands,
                standardizer: self.standardizer.clone(),
            },
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("finite model serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        let doc: ClassifierDocument =
            serde_json::from_str(text).map_err(|e| Error::ModelFormat(e.to_string()))?;
        let model = SvmModel::from_document(doc.model)?;
        let p = doc.pipeline;
        let pipeline = FeaturePipeline {
            level: p.level,
            filter: p.filter,
            bands: p.bands,
            standardize: p.standardizer.is_some(),
        };
        let expected = pipeline.feature_names();
        if model.dim() != expected.len() {
            return Err(Error::ModelFormat(format!(
                "support vectors have {} features but the pipeline produces {}",
                model.dim(),
                expected.len()
            )));
        }
        if !model.feature_schema().is_empty() && model.feature_schema() != expected.as_slice() {
            return Err(Error::ModelFormat(
                "feature_schema does not match the pipeline".into(),
            ));
        }
        if let Some(s) = &p.standardizer {
            if s.dim() != expected.len() || s.scale.len() != s.dim() {
                return Err(Error::ModelFormat("standardizer dimension mismatch".into()));
            }
        }
        Ok(Classifier {
            pipeline,
            standardizer: p.standardizer,
            model,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), Error> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|source| Error::Io {
            context: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, Error> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            context: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }
}

#[derive(Serialize, Deserialize)]
struct PipelineDocument {
    level: u32,
    filter: FilterFamily,
    bands: BandSelection,
    standardizer: Option<Standardizer>,
}

#[derive(Serialize, Deserialize)]
struct ClassifierDocument {
    #[serde(flatten)]
    model: ModelDocument,
    pipeline: PipelineDocument,
}
