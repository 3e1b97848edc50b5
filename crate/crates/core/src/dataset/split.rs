use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{DatasetError, LabeledSample};
use crate::Label;

/// Number of training samples to draw from each class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSpec {
    pub train_true: usize,
    pub train_pseudo: usize,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train_true: usize, train_pseudo: usize, seed: u64) -> Self {
        SplitSpec {
            train_true,
            train_pseudo,
            seed,
        }
    }

    fn wanted(&self, label: Label) -> usize {
        match label {
            Label::TrueDefect => self.train_true,
            Label::PseudoDefect => self.train_pseudo,
        }
    }
}

/// Shuffles each class with a seeded generator and sends the first
/// `train_*` members to the training set, the rest to the test set.
///
/// Both outputs keep the input order of the samples they contain.
pub fn split(
    samples: &[LabeledSample],
    spec: &SplitSpec,
) -> Result<(Vec<LabeledSample>, Vec<LabeledSample>), DatasetError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut in_train = vec![false; samples.len()];
    for label in Label::ALL {
        let mut members: Vec<usize> = (0..samples.len())
            .filter(|&i| samples[i].label == label)
            .collect();
        let wanted = spec.wanted(label);
        if wanted > members.len() {
            return Err(DatasetError::InfeasibleSplit {
                label,
                requested: wanted,
                available: members.len(),
            });
        }
        members.shuffle(&mut rng);
        for &i in &members[..wanted] {
            in_train[i] = true;
        }
    }
    let (train, test): (Vec<_>, Vec<_>) = samples.iter().zip(&in_train).partition(|(_, &train)| train);
    Ok((
        train.into_iter().map(|(s, _)| s.clone()).collect(),
        test.into_iter().map(|(s, _)| s.clone()).collect(),
    ))
}
