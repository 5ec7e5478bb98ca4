//! Command-line definitions. Field names double as config-file keys.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use occ_core::{DualForm, ModelKind, ScalerMode};
use occ_imageprep::{NoiseKind, Stage};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "occ",
    version,
    about = "One-class classification with OCSVM, SVDD and the pinball-loss OCSVM",
    after_help = "Exit codes: 0 success, 1 I/O error, 2 invalid input or parameters, 3 solver did not converge.\n\
                  Set OCC_LOG (error, warn, info, debug, trace) to control logging."
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GlobalArgs {
    /// Master seed; every random step derives from it
    #[arg(long, global = true, default_value_t = 42, display_order = 100)]
    pub seed: u64,

    /// Worker threads [default: all cores]
    #[arg(long, global = true, display_order = 101)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,

    /// TOML file with default values; command-line flags take precedence
    #[arg(long, global = true, display_order = 102)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Directory for output files
    #[arg(long, global = true, default_value = ".", display_order = 103)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mask, inpaint, enhance and resize images
    Preprocess(PreprocessArgs),
    /// Train a model and write model.json and diagnostics.json
    Train(TrainArgs),
    /// Score a CSV with a trained model
    Predict(PredictArgs),
    /// Compute accuracy, CIs and AUC for a model or a scores file
    Eval(EvalArgs),
    /// Grid search on one labelled dataset
    Gridsearch(GridArgs),
    /// Run the UCI suite or a noise-robustness sweep
    Benchmark(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageArg {
    Mask,
    Inpaint,
    Enhance,
    Resize,
    Full,
}

impl From<StageArg> for Stage {
    fn from(s: StageArg) -> Stage {
        match s {
            StageArg::Mask => Stage::Mask,
            StageArg::Inpaint => Stage::Inpaint,
            StageArg::Enhance => Stage::Enhance,
            StageArg::Resize => Stage::Resize,
            StageArg::Full => Stage::Full,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PreprocessArgs {
    /// Image file, or a directory of PNG/PGM images
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,

    /// Last stage to run
    #[arg(long, value_enum, default_value = "full")]
    pub stage: StageArg,

    /// Add noise after resizing (overrides [noise].kind)
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseKind>,

    /// Noise standard deviation as a fraction of the dynamic range
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_scale: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DataArgs {
    /// Label column name (or 0-based index for headerless files) [default: `label` when present]
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_column: Option<String>,

    /// Label value of the target class; every other value is an outlier
    #[arg(long, default_value = "target")]
    pub target_label: String,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SplitArgs {
    /// Train on this fraction of the target rows (split seeded by --seed) and evaluate on the rest
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train_fraction: Option<f64>,

    /// Keep the training targets in the test set
    #[arg(long)]
    #[serde(default)]
    pub test_includes_train: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelArg {
    Linear,
    Rbf,
    Poly,
}

/// RBF width: a number, or `scale` for 1/(d·var) of the training data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Gamma {
    Value(f64),
    Named(GammaName),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GammaName {
    Scale,
}

impl FromStr for Gamma {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "scale" {
            return Ok(Gamma::Named(GammaName::Scale));
        }
        s.parse::<f64>()
            .map(Gamma::Value)
            .map_err(|_| format!("expected a number or `scale`, got `{s}`"))
    }
}

impl fmt::Display for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gamma::Value(v) => write!(f, "{v}"),
            Gamma::Named(_) => f.write_str("scale"),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ModelArgs {
    /// Model: ocsvm, svdd or pb_ocsvm
    #[arg(long, default_value = "pb_ocsvm")]
    pub model: ModelKind,

    /// Upper bound on the outlier fraction, in (0, 1]
    #[arg(long, default_value_t = 0.1)]
    pub nu: f64,

    /// Pinball slope for negative margins, in [0, 1] (pb_ocsvm only)
    #[arg(long, default_value_t = 0.5)]
    pub tau: f64,

    /// SVDD trade-off [default: 1/(nu·N)]
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,

    /// Kernel family
    #[arg(long, value_enum, default_value = "rbf")]
    pub kernel: KernelArg,

    /// RBF gamma, or `scale`
    #[arg(long, default_value = "scale")]
    pub gamma: Gamma,

    /// Polynomial degree
    #[arg(long, default_value_t = 3)]
    pub degree: u32,

    /// Polynomial offset
    #[arg(long, default_value_t = 1.0)]
    pub coef0: f64,

    /// KKT tolerance of the solver
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,

    /// Solver iteration cap [default: min(10000·N, 10^7)]
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,

    /// Enable working-set shrinking
    #[arg(long)]
    #[serde(default)]
    pub shrinking: bool,

    /// Pinball dual: rederived (default) or zero_sum (degenerate, for comparison)
    #[arg(long, default_value = "rederived")]
    pub dual_form: DualForm,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TrainArgs {
    /// Training CSV
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,

    #[command(flatten)]
    #[serde(flatten)]
    pub data_args: DataArgs,

    #[command(flatten)]
    #[serde(flatten)]
    pub split: SplitArgs,

    /// Feature scaling fitted on the training targets: minmax, zscore or none
    #[arg(long, default_value = "minmax")]
    pub scaler: ScalerMode,

    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PredictArgs {
    /// Model file written by `train`
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<PathBuf>,

    /// CSV to score
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,

    #[command(flatten)]
    #[serde(flatten)]
    pub data_args: DataArgs,

    /// Output CSV (index,score,label) [default: <out-dir>/predictions.csv]
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EvalArgs {
    /// Labelled CSV holding the ground truth
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,

    /// Model file to score the data with
    #[arg(long, conflicts_with = "scores")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<PathBuf>,

    /// Scores CSV written by `predict`, aligned with --data
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scores: Option<PathBuf>,

    #[command(flatten)]
    #[serde(flatten)]
    pub data_args: DataArgs,

    #[command(flatten)]
    #[serde(flatten)]
    pub split: SplitArgs,

    /// Sample count used in the confidence intervals [default: evaluated rows]
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_for_ci: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionArg {
    /// Pick the cell with the best test AUC (optimistic)
    Test,
    /// Pick on a stratified validation part of the test set
    Validation,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GridOptions {
    /// Models to search
    #[arg(long, value_delimiter = ',', default_value = "ocsvm,pb_ocsvm")]
    pub models: Vec<ModelKind>,

    /// nu values [default: 0.01,0.05,0.1,0.2,0.3,0.5]
    #[arg(long = "nu", value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<Vec<f64>>,

    /// tau values [default: 0,0.1,0.3,0.5,0.8,1]
    #[arg(long = "tau", value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<Vec<f64>>,

    /// Kernel family
    #[arg(long, value_enum, default_value = "rbf")]
    pub kernel: KernelArg,

    /// RBF gammas as multiples of the `scale` gamma [default: 2^-3..2^3]
    #[arg(long = "gamma", value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<f64>>,

    /// Treat --gamma values as absolute instead of multiples of `scale`
    #[arg(long)]
    #[serde(default)]
    pub absolute_gamma: bool,

    /// Polynomial degrees
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    pub degree: Vec<u32>,

    /// Polynomial offsets
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub coef0: Vec<f64>,

    /// How the winning cell is chosen
    #[arg(long, value_enum, default_value = "test")]
    pub selection: SelectionArg,

    /// Validation share of the test set when --selection validation
    #[arg(long, default_value_t = 0.5)]
    pub validation_fraction: f64,

    /// Feature scaling fitted on the training targets: minmax, zscore or none
    #[arg(long, default_value = "minmax")]
    pub scaler: ScalerMode,

    /// KKT tolerance of the solver
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,

    /// Pinball dual: rederived or zero_sum
    #[arg(long, default_value = "rederived")]
    pub dual_form: DualForm,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GridArgs {
    /// Labelled CSV
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,

    #[command(flatten)]
    #[serde(flatten)]
    pub data_args: DataArgs,

    /// Fraction of the target rows used for training
    #[arg(long, default_value_t = 0.8)]
    pub train_fraction: f64,

    /// Keep the training targets in the test set
    #[arg(long)]
    #[serde(default)]
    pub test_includes_train: bool,

    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// UCI datasets under --data-dir
    Uci,
    /// Noise sweep over the images under --images
    Noise,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BenchArgs {
    /// Which benchmark to run
    #[arg(long, value_enum, default_value = "uci")]
    pub suite: Suite,

    /// Directory with <name>.csv files (see scripts/fetch_uci.py)
    #[arg(long, default_value = "data/uci")]
    pub data_dir: PathBuf,

    /// Restrict the UCI suite to these datasets
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub datasets: Option<Vec<String>>,

    /// Repetitions; seeds are --seed, --seed+1, ...
    #[arg(long, default_value_t = 5)]
    pub repetitions: u64,

    /// Fraction of the target rows used for training
    #[arg(long, default_value_t = 0.8)]
    pub train_fraction: f64,

    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridOptions,

    /// Image directory with target/ and outlier/ subdirectories (noise suite)
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub images: Option<PathBuf>,

    /// Noise kinds for the sweep
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "gaussian,laplacian,uniform"
    )]
    pub noise_kinds: Vec<NoiseKind>,

    /// Noise scales for the sweep; 0 is the clean baseline
    #[arg(long, value_delimiter = ',', default_value = "0,0.05,0.1,0.2")]
    pub noise_scales: Vec<f64>,

    /// Images are resized to this square size before flattening (noise suite)
    #[arg(long, default_value_t = 16)]
    pub feature_size: usize,
}
