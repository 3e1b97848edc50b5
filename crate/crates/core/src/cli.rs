//! Command-line front end. Every subcommand is a thin wrapper over the library.
//!
//! Exit status: 0 on success, 1 on usage errors, 2 on data or model errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::dataset::{
    load_dataset, load_pgm, split, synth_generate, write_dataset, write_pgm, LabeledSample, SplitSpec,
};
use crate::dwt::{decompose, FilterFamily, FilterPair, Image};
use crate::eval::{cartesian, evaluate, grid_search, GridSpec};
use crate::features::BandSelection;
use crate::svm::TrainConfig;
use crate::{Classifier, Error, FeaturePipeline};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "pcb-defect",
    version,
    about = "Wavelet-feature SVM for true vs pseudo PCB defects"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decompose one image; write each sub-band as a PGM plus raw CSV.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        levels: u32,
        #[arg(long, default_value = "haar")]
        filter: FilterFamily,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write one feature row per image of a dataset.
    Extract {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        level: u32,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        features: FeatureArgs,
    },
    /// Generate a synthetic dataset.
    Synth {
        /// Images per class.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 64)]
        size: usize,
    },
    /// Train a classifier on the training part of a split.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        level: u32,
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        cost: f64,
        #[command(flatten)]
        split: SplitArgs,
        #[command(flatten)]
        features: FeatureArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        model: PathBuf,
    },
    /// Classify one image.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Confusion matrix and accuracy of a saved model.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Evaluate only the test part of this split (default: whole dataset).
        #[arg(long, requires = "train_pseudo")]
        train_true: Option<usize>,
        #[arg(long, requires = "train_true")]
        train_pseudo: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Accuracy for every (sigma, c, level) combination.
    Grid {
        #[arg(long)]
        data: PathBuf,
        #[arg(
            long,
            value_delimiter = ',',
            required_unless_present = "pairs",
            requires = "costs"
        )]
        sigmas: Vec<f64>,
        #[arg(long, value_delimiter = ',', requires = "sigmas")]
        costs: Vec<f64>,
        /// Explicit `sigma:c` rows, e.g. `0.01:3,0.02:9`.
        #[arg(long, value_delimiter = ',', value_parser = parse_pair, conflicts_with_all = ["sigmas", "costs"])]
        pairs: Vec<(f64, f64)>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        levels: Vec<u32>,
        #[command(flatten)]
        split: SplitArgs,
        #[command(flatten)]
        features: FeatureArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Also write `sigma,cost,level,accuracy,tp,fn,fp,tn` rows here.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Debug, Args)]
struct SplitArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 26)]
    train_true: usize,
    #[arg(long, default_value_t = 24)]
    train_pseudo: usize,
}

impl SplitArgs {
    fn spec(&self) -> SplitSpec {
        SplitSpec::new(self.train_true, self.train_pseudo, self.seed)
    }
}

#[derive(Debug, Args)]
struct FeatureArgs {
    #[arg(long, default_value = "haar")]
    filter: FilterFamily,
    #[arg(long, default_value = "all-levels")]
    bands: BandSelection,
    /// Z-score features using training-set statistics.
    #[arg(long)]
    standardize: bool,
}

impl FeatureArgs {
    fn pipeline(&self, level: u32) -> FeaturePipeline {
        FeaturePipeline {
            level,
            filter: self.filter,
            bands: self.bands,
            standardize: self.standardize,
        }
    }
}

#[derive(Debug, Args)]
struct SolverArgs {
    #[arg(long, default_value_t = TrainConfig::DEFAULT_TOLERANCE)]
    tol: f64,
    #[arg(long, default_value_t = TrainConfig::DEFAULT_MAX_PASSES)]
    max_passes: usize,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (sigma, cost) = s
        .split_once(':')
        .ok_or_else(|| format!("expected sigma:c, got `{s}`"))?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    Ok((num(sigma)?, num(cost)?))
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli.command) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Data(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_DATA
        }
    }
}

enum CliError {
    Usage(String),
    Data(Error),
}

impl<E: Into<Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Data(e.into())
    }
}

fn io_error(path: &Path, source: std::io::Error) -> CliError {
    CliError::Data(Error::Io {
        context: path.display().to_string(),
        source,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| io_error(path, e))
}

fn execute(command: Command) -> Result<String, CliError> {
    match command {
        Command::Decompose {
            input,
            levels,
            filter,
            out,
        } => cmd_decompose(&input, levels, filter, &out),
        Command::Extract {
            data,
            level,
            out,
            features,
        } => cmd_extract(&data, features.pipeline(level), &out),
        Command::Synth { n, seed, out, size } => {
            if n == 0 {
                return Err(CliError::Usage("--n must be at least 1".into()));
            }
            if size < 8 {
                return Err(CliError::Usage("--size must be at least 8".into()));
            }
            let samples = synth_generate(n, size, seed);
            write_dataset(&samples, &out)?;
            Ok(format!(
                "wrote {} true and {n} pseudo {size}x{size} images to {}\n",
                n,
                out.display()
            ))
        }
        Command::Train {
            data,
            level,
            sigma,
            cost,
            split: split_args,
            features,
            solver,
            model,
        } => {
            let samples = load_dataset(&data)?;
            let (train, _) = split(&samples, &split_args.spec())?;
            let config = TrainConfig::new(sigma, cost)
                .with_tolerance(solver.tol)
                .with_max_passes(solver.max_passes);
            let clf = Classifier::fit(&train, features.pipeline(level), &config)?;
            clf.save(&model)?;
            let train_cm = evaluate(&clf, &train)?;
            Ok(format!(
                "trained on {} images: {} support vectors, bias {}, training accuracy {}\nwrote {}\n",
                train.len(),
                clf.model().support_vectors().len(),
                clf.model().bias(),
                crate::eval::format_percent(train_cm.accuracy().map_err(Error::from)?),
                model.display()
            ))
        }
        Command::Predict { model, input } => {
            let clf = Classifier::load(&model)?;
            let image = load_pgm(&input)?;
            let value = clf.decision_value(&image)?;
            let label = crate::Label::from_decision(value);
            Ok(format!("label={label} decision_value={value}\n"))
        }
        Command::Eval {
            model,
            data,
            train_true,
            train_pseudo,
            seed,
        } => {
            let clf = Classifier::load(&model)?;
            let samples = load_dataset(&data)?;
            let subset = match (train_true, train_pseudo) {
                (Some(t), Some(p)) => split(&samples, &SplitSpec::new(t, p, seed))?.1,
                _ => samples,
            };
            let cm = evaluate(&clf, &subset)?;
            Ok(format!(
                "Confusion matrix, level {} ({} images; rows = actual class, columns = predicted class)\n{}",
                clf.pipeline().level,
                subset.len(),
                cm.render()
            ))
        }
        Command::Grid {
            data,
            sigmas,
            costs,
            pairs,
            levels,
            split: split_args,
            features,
            solver,
            csv,
            jobs,
        } => {
            let pairs = if pairs.is_empty() {
                cartesian(&sigmas, &costs)
            } else {
                pairs
            };
            if pairs.is_empty() || levels.is_empty() {
                return Err(CliError::Usage(
                    "grid needs at least one (sigma, c) pair and one level".into(),
                ));
            }
            let samples = load_dataset(&data)?;
            let (train, test) = split(&samples, &split_args.spec())?;
            let spec = GridSpec {
                pairs,
                levels,
                filter: features.filter,
                bands: features.bands,
                standardize: features.standardize,
                kkt_tolerance: solver.tol,
                max_passes: solver.max_passes,
                jobs: jobs.max(1),
            };
            let result = grid_search(&train, &test, &spec)?;
            if let Some(path) = csv {
                write_file(&path, &result.to_csv())?;
            }
            Ok(result.render())
        }
    }
}

/// Per-band affine min-max rescale to `0..=255`; flat bands map to 0.
fn visualize(band: &Image) -> Image {
    let (lo, hi) = band
        .pixels()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| {
            (lo.min(p), hi.max(p))
        });
    let range = hi - lo;
    band.map(|p| {
        if range > 0.0 {
            ((p - lo) / range * 255.0).round()
        } else {
            0.0
        }
    })
}

fn band_csv(band: &Image) -> String {
    let mut out = String::new();
    for r in 0..band.height() {
        let row: Vec<String> = band.row(r).iter().map(f64::to_string).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

fn cmd_decompose(input: &Path, levels: u32, filter: FilterFamily, out: &Path) -> Result<String, CliError> {
    let image = load_pgm(input)?;
    let pyramid = decompose(&image, levels, &FilterPair::new(filter))?;
    fs::create_dir_all(out).map_err(|e| io_error(out, e))?;
    let mut report = String::new();
    for band in pyramid.bands() {
        let name = band.label();
        write_pgm(&visualize(band.as_image()), out.join(format!("{name}.pgm")))?;
        write_file(&out.join(format!("{name}.csv")), &band_csv(band.as_image()))?;
        let _ = writeln!(report, "{name} {}x{}", band.height(), band.width());
    }
    let _ = writeln!(
        report,
        "wrote {} sub-bands to {}",
        pyramid.bands().count(),
        out.display()
    );
    Ok(report)
}

/// `LH1_mean,...,label` header, then one row per image. With
/// `pipeline.standardize` the columns are z-scored over all rows.
pub fn features_csv(samples: &[LabeledSample], pipeline: &FeaturePipeline) -> Result<String, Error> {
    let mut rows = pipeline.extract_all(samples)?;
    if pipeline.standardize {
        let scaler = crate::features::Standardizer::fit(&rows)?;
        rows = rows
            .iter()
            .map(|r| scaler.transform(r))
            .collect::<Result<_, _>>()?;
    }
    let mut text = pipeline.feature_names().join(",");
    text.push_str(",label\n");
    for (sample, values) in samples.iter().zip(&rows) {
        let row: Vec<String> = values.iter().map(f64::to_string).collect();
        let _ = writeln!(text, "{},{}", row.join(","), sample.label);
    }
    Ok(text)
}

fn cmd_extract(data: &Path, pipeline: FeaturePipeline, out: &Path) -> Result<String, CliError> {
    let samples = load_dataset(data)?;
    let text = features_csv(&samples, &pipeline)?;
    write_file(out, &text)?;
    Ok(format!(
        "wrote {} rows of {} features to {}\n",
        samples.len(),
        pipeline.feature_names().len(),
        out.display()
    ))
}
