use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use super::{confusion, format_percent, ConfusionMatrix, EvalError};
use crate::dataset::LabeledSample;
use crate::dwt::FilterFamily;
use crate::features::BandSelection;
use crate::svm::{SvmError, TrainConfig};
use crate::{Classifier, Error, FeaturePipeline, Label};

/// Parameters swept by [`grid_search`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    /// `(σ, c)` rows, reported in this order.
    pub pairs: Vec<(f64, f64)>,
    /// Decomposition levels, one accuracy column each.
    pub levels: Vec<u32>,
    pub filter: FilterFamily,
    pub bands: BandSelection,
    pub standardize: bool,
    pub kkt_tolerance: f64,
    pub max_passes: usize,
    /// Worker threads; the result does not depend on this.
    pub jobs: usize,
}

impl GridSpec {
    pub fn new(pairs: Vec<(f64, f64)>, levels: Vec<u32>) -> Self {
        GridSpec {
            pairs,
            levels,
            filter: FilterFamily::Haar,
            bands: BandSelection::AllLevels,
            standardize: false,
            kkt_tolerance: TrainConfig::DEFAULT_TOLERANCE,
            max_passes: TrainConfig::DEFAULT_MAX_PASSES,
            jobs: 1,
        }
    }

    pub fn pipeline(&self, level: u32) -> FeaturePipeline {
        FeaturePipeline {
            level,
            filter: self.filter,
            bands: self.bands,
            standardize: self.standardize,
        }
    }

    pub fn train_config(&self, sigma: f64, cost: f64) -> TrainConfig {
        TrainConfig::new(sigma, cost)
            .with_tolerance(self.kkt_tolerance)
            .with_max_passes(self.max_passes)
    }
}

/// Every `(σ, c)` combination, σ-major.
pub fn cartesian(sigmas: &[f64], costs: &[f64]) -> Vec<(f64, f64)> {
    sigmas
        .iter()
        .flat_map(|&s| costs.iter().map(move |&c| (s, c)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellOutcome {
    Evaluated(ConfusionMatrix),
    /// Training or feature extraction failed; the message says why.
    Absent(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub level: u32,
    pub outcome: CellOutcome,
}

impl GridCell {
    pub fn accuracy(&self) -> Option<f64> {
        match &self.outcome {
            CellOutcome::Evaluated(cm) => cm.accuracy().ok(),
            CellOutcome::Absent(_) => None,
        }
    }

    pub fn matrix(&self) -> Option<&ConfusionMatrix> {
        match &self.outcome {
            CellOutcome::Evaluated(cm) => Some(cm),
            CellOutcome::Absent(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub sigma: f64,
    pub cost: f64,
    /// One cell per requested level, in request order.
    pub cells: Vec<GridCell>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub levels: Vec<u32>,
    pub rows: Vec<GridRow>,
}

/// Best cell: `(σ, c, level, accuracy)`.
pub type BestCell = (f64, f64, u32, f64);

impl GridResult {
    /// Highest-accuracy cell; the earliest one wins ties.
    pub fn best(&self) -> Option<BestCell> {
        let mut best: Option<BestCell> = None;
        for row in &self.rows {
            for cell in &row.cells {
                if let Some(acc) = cell.accuracy() {
                    if best.is_none_or(|b| acc > b.3) {
                        best = Some((row.sigma, row.cost, cell.level, acc));
                    }
                }
            }
        }
        best
    }

    /// Table with a `sigma` and `c` column followed by one accuracy column per level.
    pub fn render(&self) -> String {
        let mut header = vec!["sigma".to_string(), "c".to_string()];
        header.extend(self.levels.iter().map(|l| format!("{l}-level Decomposition")));
        let body: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|row| {
                let mut cols = vec![row.sigma.to_string(), row.cost.to_string()];
                cols.extend(
                    row.cells
                        .iter()
                        .map(|c| c.accuracy().map_or_else(|| "absent".to_string(), format_percent)),
                );
                cols
            })
            .collect();
        let widths: Vec<usize> = (0..header.len())
            .map(|i| {
                body.iter()
                    .map(|r| r[i].len())
                    .chain(std::iter::once(header[i].len()))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cols: &[String]| -> String {
            let padded: Vec<String> = cols
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            padded.join("  ").trim_end().to_string()
        };

        let mut out = String::new();
        let _ = writeln!(out, "{}", line(&header));
        for row in &body {
            let _ = writeln!(out, "{}", line(row));
        }
        match self.best() {
            Some((s, c, l, acc)) => {
                let _ = writeln!(
                    out,
                    "best: sigma={s} c={c} level={l} accuracy={}",
                    format_percent(acc)
                );
            }
            None => {
                let _ = writeln!(out, "best: none (every cell absent)");
            }
        }
        for row in &self.rows {
            for cell in &row.cells {
                if let CellOutcome::Absent(why) = &cell.outcome {
                    let _ = writeln!(
                        out,
                        "absent: sigma={} c={} level={}: {why}",
                        row.sigma, row.cost, cell.level
                    );
                }
            }
        }
        out
    }

    /// `sigma,cost,level,accuracy,tp,fn,fp,tn`; absent cells leave the numeric
    /// fields empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sigma,cost,level,accuracy,tp,fn,fp,tn\n");
        for row in &self.rows {
            for cell in &row.cells {
                match cell.matrix() {
                    Some(cm) => {
                        let acc = cm.accuracy().map(|a| format!("{a:.2}")).unwrap_or_default();
                        let _ = writeln!(
                            out,
                            "{},{},{},{acc},{},{},{},{}",
                            row.sigma, row.cost, cell.level, cm.tp, cm.fn_, cm.fp, cm.tn
                        );
                    }
                    None => {
                        let _ = writeln!(out, "{},{},{},,,,,", row.sigma, row.cost, cell.level);
                    }
                }
            }
        }
        out
    }
}

struct LevelData {
    train: Vec<Vec<f64>>,
    test: Vec<Vec<f64>>,
}

fn run_cell(
    spec: &GridSpec,
    data: &Result<LevelData, String>,
    train_labels: &[Label],
    test_labels: &[Label],
    (sigma, cost): (f64, f64),
    level: u32,
) -> CellOutcome {
    let data = match data {
        Ok(d) => d,
        Err(why) => return CellOutcome::Absent(why.clone()),
    };
    let result = (|| -> Result<ConfusionMatrix, Error> {
        let clf = Classifier::fit_features(
            &data.train,
            train_labels,
            spec.pipeline(level),
            &spec.train_config(sigma, cost),
        )?;
        let predictions = data
            .test
            .iter()
            .map(|f| clf.decision_value_for_features(f).map(Label::from_decision))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(confusion(&predictions, test_labels)?)
    })();
    match result {
        Ok(cm) => CellOutcome::Evaluated(cm),
        Err(e) => CellOutcome::Absent(e.to_string()),
    }
}

/// Trains one classifier per `(σ, c, level)` on `train` and scores it on `test`.
///
/// Failed cells are kept as [`CellOutcome::Absent`] rather than aborting the
/// grid. Rows follow `spec.pairs`, columns follow `spec.levels`.
pub fn grid_search(
    train: &[LabeledSample],
    test: &[LabeledSample],
    spec: &GridSpec,
) -> Result<GridResult, Error> {
    if spec.pairs.is_empty() {
        return Err(EvalError::EmptyGrid("(sigma, cost) pairs").into());
    }
    if spec.levels.is_empty() {
        return Err(EvalError::EmptyGrid("levels").into());
    }
    if test.is_empty() {
        return Err(EvalError::EmptyInput.into());
    }
    let train_labels: Vec<Label> = train.iter().map(|s| s.label).collect();
    match train_labels.first() {
        None => return Err(SvmError::EmptyTrainingSet.into()),
        Some(&first) if train_labels.iter().all(|&l| l == first) => {
            return Err(SvmError::SingleClass(first).into())
        }
        _ => {}
    }
    let test_labels: Vec<Label> = test.iter().map(|s| s.label).collect();

    let mut features: BTreeMap<u32, Result<LevelData, String>> = BTreeMap::new();
    for &level in &spec.levels {
        features.entry(level).or_insert_with(|| {
            let pipeline = spec.pipeline(level);
            let extract = |s: &[LabeledSample]| pipeline.extract_all(s).map_err(|e| e.to_string());
            Ok(LevelData {
                train: extract(train)?,
                test: extract(test)?,
            })
        });
    }

    let tasks: Vec<((f64, f64), u32)> = spec
        .pairs
        .iter()
        .flat_map(|&pair| spec.levels.iter().map(move |&l| (pair, l)))
        .collect();
    let evaluate = |&(pair, level): &((f64, f64), u32)| {
        run_cell(spec, &features[&level], &train_labels, &test_labels, pair, level)
    };
    let outcomes: Vec<CellOutcome> = if spec.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(spec.jobs)
            .build()
            .map_err(|e| Error::Io {
                context: "starting grid workers".into(),
                source: std::io::Error::other(e),
            })?;
        pool.install(|| tasks.par_iter().map(evaluate).collect())
    } else {
        tasks.iter().map(evaluate).collect()
    };

    let mut outcomes = outcomes.into_iter();
    let rows = spec
        .pairs
        .iter()
        .map(|&(sigma, cost)| GridRow {
            sigma,
            cost,
            cells: spec
                .levels
                .iter()
                .map(|&level| GridCell {
                    level,
                    outcome: outcomes.next().expect("one outcome per task"),
                })
                .collect(),
        })
        .collect();
    Ok(GridResult {
        levels: spec.levels.clone(),
        rows,
    })
}
