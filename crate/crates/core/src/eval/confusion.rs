use std::fmt::Write as _;

use super::EvalError;
use crate::dataset::LabeledSample;
use crate::{Classifier, Error, Label};

/// Rows are actual classes, columns predicted classes; a true defect is the
/// positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionMatrix {
    /// True defect predicted true.
    pub tp: usize,
    /// True defect predicted pseudo.
    pub fn_: usize,
    /// Pseudo defect predicted true.
    pub fp: usize,
    /// Pseudo defect predicted pseudo.
    pub tn: usize,
}

impl ConfusionMatrix {
    pub fn new(tp: usize, fn_: usize, fp: usize, tn: usize) -> Self {
        ConfusionMatrix { tp, fn_, fp, tn }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fn_ + self.fp + self.tn
    }

    pub fn record(&mut self, actual: Label, predicted: Label) {
        match (actual, predicted) {
            (Label::TrueDefect, Label::TrueDefect) => self.tp += 1,
            (Label::TrueDefect, Label::PseudoDefect) => self.fn_ += 1,
            (Label::PseudoDefect, Label::TrueDefect) => self.fp += 1,
            (Label::PseudoDefect, Label::PseudoDefect) => self.tn += 1,
        }
    }

    /// Percentage of actual true defects classified correctly.
    pub fn true_rate(&self) -> Option<f64> {
        percent(self.tp, self.tp + self.fn_)
    }

    /// Percentage of actual pseudo defects classified correctly.
    pub fn pseudo_rate(&self) -> Option<f64> {
        percent(self.tn, self.fp + self.tn)
    }

    pub fn accuracy(&self) -> Result<f64, EvalError> {
        percent(self.tp + self.tn, self.total()).ok_or(EvalError::EmptyInput)
    }

    /// The same matrix with the roles of the two classes exchanged.
    pub fn swapped(&self) -> Self {
        ConfusionMatrix::new(self.tn, self.fp, self.fn_, self.tp)
    }

    /// Text table: one row per actual class, one column per predicted class,
    /// and the per-class correct-classification rate, then overall accuracy.
    pub fn render(&self) -> String {
        let rate = |r: Option<f64>| r.map_or_else(|| "n/a".to_string(), format_percent);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<20}{:>14}{:>16}{:>26}",
            "Actual \\ Predicted", "True defects", "Pseudo defects", "Correct Classifications"
        );
        let _ = writeln!(
            out,
            "{:<20}{:>14}{:>16}{:>26}",
            "True defects",
            self.tp,
            self.fn_,
            rate(self.true_rate())
        );
        let _ = writeln!(
            out,
            "{:<20}{:>14}{:>16}{:>26}",
            "Pseudo defects",
            self.fp,
            self.tn,
            rate(self.pseudo_rate())
        );
        let accuracy = self.accuracy().map_or_else(|_| "n/a".to_string(), format_percent);
        let _ = writeln!(
            out,
            "Accuracy: {accuracy} ({}/{})",
            self.tp + self.tn,
            self.total()
        );
        out
    }
}

fn percent(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| 100.0 * num as f64 / den as f64)
}

/// `86.27%` style.
pub fn format_percent(value: f64) -> String {
    format!("{value:.2}%")
}

pub fn confusion(predictions: &[Label], labels: &[Label]) -> Result<ConfusionMatrix, EvalError> {
    if predictions.len() != labels.len() {
        return Err(EvalError::LengthMismatch {
            predictions: predictions.len(),
            labels: labels.len(),
        });
    }
    if labels.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let mut cm = ConfusionMatrix::default();
    for (&p, &l) in predictions.iter().zip(labels) {
        cm.record(l, p);
    }
    Ok(cm)
}

pub fn accuracy(cm: &ConfusionMatrix) -> Result<f64, EvalError> {
    cm.accuracy()
}

/// Classifies every sample and tallies the results.
pub fn evaluate(classifier: &Classifier, samples: &[LabeledSample]) -> Result<ConfusionMatrix, Error> {
    let predictions = samples
        .iter()
        .map(|s| classifier.predict(&s.image))
        .collect::<Result<Vec<_>, _>>()?;
    let labels: Vec<Label> = samples.iter().map(|s| s.label).collect();
    Ok(confusion(&predictions, &labels)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Label::{PseudoDefect as N, TrueDefect as P};
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 5e-3
    }

    #[test]
    fn two_level_table_counts() {
        // Per-class rates print as 76% and 96% when rounded to whole percent.
        let cm = ConfusionMatrix::new(19, 6, 1, 25);
        assert!(close(cm.true_rate().unwrap(), 76.0));
        assert_eq!(cm.pseudo_rate().unwrap().round(), 96.0);
        assert_eq!(format_percent(cm.pseudo_rate().unwrap()), "96.15%");
        assert_eq!(format_percent(cm.accuracy().unwrap()), "86.27%");
    }

    #[test]
    fn three_level_table_counts() {
        let cm = ConfusionMatrix::new(25, 0, 19, 7);
        assert_eq!(cm.true_rate(), Some(100.0));
        assert_eq!(format_percent(cm.pseudo_rate().unwrap()), "26.92%");
    }

    #[test]
    fn one_level_table_counts() {
        let cm = ConfusionMatrix::new(21, 4, 9, 17);
        assert_eq!(format_percent(cm.accuracy().unwrap()), "74.51%");
        assert_eq!(format_percent(cm.pseudo_rate().unwrap()), "65.38%");
        assert_eq!(format_percent(cm.true_rate().unwrap()), "84.00%");
    }

    #[test]
    fn perfect_predictions() {
        let labels = [P, P, N, P, N, N, N, P, P, N];
        let cm = confusion(&labels, &labels).unwrap();
        assert_eq!(cm, ConfusionMatrix::new(5, 0, 0, 5));
        assert_eq!(cm.true_rate(), Some(100.0));
        assert_eq!(cm.pseudo_rate(), Some(100.0));
        assert_eq!(format_percent(accuracy(&cm).unwrap()), "100.00%");
    }

    #[test]
    fn tallies_each_cell() {
        let cm = confusion(&[P, N, P, N], &[P, P, N, N]).unwrap();
        assert_eq!(cm, ConfusionMatrix::new(1, 1, 1, 1));
    }

    #[test]
    fn errors() {
        assert_eq!(confusion(&[], &[]), Err(EvalError::EmptyInput));
        assert!(matches!(
            confusion(&[P], &[P, N]),
            Err(EvalError::LengthMismatch { .. })
        ));
        assert_eq!(ConfusionMatrix::default().accuracy(), Err(EvalError::EmptyInput));
        let only_pseudo = ConfusionMatrix::new(0, 0, 2, 3);
        assert_eq!(only_pseudo.true_rate(), None);
        assert!(only_pseudo.render().contains("n/a"));
    }

    #[test]
    fn rendered_layout() {
        let text = ConfusionMatrix::new(19, 6, 1, 25).render();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].contains("True defects") && lines[0].contains("Pseudo defects"));
        let row: Vec<&str> = lines[1].split_whitespace().collect();
        assert_eq!(row, ["True", "defects", "19", "6", "76.00%"]);
        let row: Vec<&str> = lines[2].split_whitespace().collect();
        assert_eq!(row, ["Pseudo", "defects", "1", "25", "96.15%"]);
        assert_eq!(lines[3], "Accuracy: 86.27% (44/51)");
    }

    proptest! {
        #[test]
        fn relabeling_symmetry(tp in 0usize..50, fn_ in 0usize..50, fp in 0usize..50, tn in 0usize..50) {
            prop_assume!(tp + fn_ + fp + tn > 0);
            let cm = ConfusionMatrix::new(tp, fn_, fp, tn);
            let swapped = cm.swapped();
            prop_assert_eq!(swapped, ConfusionMatrix::new(tn, fp, fn_, tp));
            prop_assert_eq!(cm.accuracy().unwrap(), swapped.accuracy().unwrap());
            prop_assert_eq!(cm.true_rate(), swapped.pseudo_rate());
            let acc = cm.accuracy().unwrap();
            prop_assert!((0.0..=100.0).contains(&acc));
        }

        #[test]
        fn swapping_labels_swaps_matrix(pairs in prop::collection::vec((any::<bool>(), any::<bool>()), 1..40)) {
            let to = |b: bool| if b { P } else { N };
            let preds: Vec<_> = pairs.iter().map(|p| to(p.0)).collect();
            let labels: Vec<_> = pairs.iter().map(|p| to(p.1)).collect();
            let flipped_p: Vec<_> = preds.iter().map(|l| l.other()).collect();
            let flipped_l: Vec<_> = labels.iter().map(|l| l.other()).collect();
            let cm = confusion(&preds, &labels).unwrap();
            prop_assert_eq!(confusion(&flipped_p, &flipped_l).unwrap(), cm.swapped());
            prop_assert_eq!(cm.total(), pairs.len());
        }
    }
}
