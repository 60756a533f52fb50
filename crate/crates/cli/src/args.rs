use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use frkan::heads::{HeadSpec, DEFAULT_SPLINE_DEGREE};
use frkan::{Precision, TrainConfig};

#[derive(Debug, Parser)]
#[command(
    name = "frkan",
    version,
    about = "Classification heads over frozen embeddings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train one head, evaluate it on the test set and write a JSON report.
    Train(TrainArgs),
    /// Train one KAN or FR-KAN head per grid size and tabulate test metrics.
    Ablate(AblateArgs),
    /// Truncation error of a built-in function's Fourier series versus grid size.
    FourierScan(ScanArgs),
    /// Generate a synthetic dataset and write stratified train/val/test files.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HeadKind {
    Mlp1,
    Mlp2,
    Kan,
    Frkan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrecisionArg {
    F32,
    F64,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::F32 => Precision::F32,
            PrecisionArg::F64 => Precision::F64,
        }
    }
}

/// Input files and optimiser settings shared by `train` and `ablate`.
#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Training set (EMB1, or CSV when the extension is .csv).
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub val: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    /// Keep at most this many rows of each input set.
    #[arg(long)]
    pub limit: Option<usize>,

    #[arg(long, default_value_t = 5)]
    pub epochs: usize,
    #[arg(long, default_value_t = 2e-5)]
    pub lr: f64,
    #[arg(long, default_value_t = 64)]
    pub batch: usize,
    #[arg(long, default_value_t = 0.9)]
    pub beta1: f64,
    #[arg(long, default_value_t = 0.999)]
    pub beta2: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub eps: f64,
    /// Seeds both parameter initialisation and shuffling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub no_shuffle: bool,
    #[arg(long, value_enum, default_value_t = PrecisionArg::F64)]
    pub precision: PrecisionArg,
}

impl DataArgs {
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            learning_rate: self.lr,
            batch_size: self.batch,
            epochs: self.epochs,
            beta1: self.beta1,
            beta2: self.beta2,
            epsilon: self.eps,
            seed: self.seed,
            shuffle: !self.no_shuffle,
            precision: self.precision.into(),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[arg(long, value_enum)]
    pub head: HeadKind,
    /// Grid size (kan default 1, frkan default 5).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Hidden width, required for mlp2.
    #[arg(long)]
    pub hidden: Option<usize>,
    /// B-spline degree for kan.
    #[arg(long)]
    pub degree: Option<usize>,
    #[command(flatten)]
    pub data: DataArgs,
    /// Where to write the JSON report.
    #[arg(long)]
    pub out: PathBuf,
}

impl TrainArgs {
    /// Resolves the head flags, rejecting ones that do not apply to the head kind.
    pub fn head_spec(&self) -> Result<HeadSpec, String> {
        let reject = |flag: &str| Err(format!("--{flag} does not apply to {:?} heads", self.head));
        match self.head {
            HeadKind::Mlp1 | HeadKind::Mlp2 if self.grid.is_some() => reject("grid"),
            HeadKind::Mlp1 | HeadKind::Mlp2 | HeadKind::Frkan if self.degree.is_some() => {
                reject("degree")
            }
            HeadKind::Mlp1 | HeadKind::Kan | HeadKind::Frkan if self.hidden.is_some() => {
                reject("hidden")
            }
            HeadKind::Mlp1 => Ok(HeadSpec::Mlp1),
            HeadKind::Mlp2 => match self.hidden {
                Some(hidden) => Ok(HeadSpec::Mlp2 { hidden }),
                None => Err("mlp2 heads need --hidden".into()),
            },
            HeadKind::Kan => Ok(HeadSpec::Kan {
                grid: self.grid.unwrap_or(1),
                degree: self.degree.unwrap_or(DEFAULT_SPLINE_DEGREE),
            }),
            HeadKind::Frkan => Ok(HeadSpec::Frkan {
                grid: self.grid.unwrap_or(5),
            }),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct AblateArgs {
    /// kan or frkan.
    #[arg(long, value_enum)]
    pub head: HeadKind,
    /// Comma-separated grid sizes.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    pub grids: Vec<usize>,
    #[arg(long)]
    pub degree: Option<usize>,
    #[command(flatten)]
    pub data: DataArgs,
    /// Output table; JSON when the extension is .json, CSV otherwise. Stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    /// One of sin3x, exp_sin, sawtooth, square.
    #[arg(long = "fn")]
    pub function: String,
    #[arg(long)]
    pub gmax: usize,
    /// sup or l2.
    #[arg(long, default_value = "sup")]
    pub norm: String,
    /// CSV destination; stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthKind {
    Clusters,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FileFormat {
    Emb,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub kind: SynthKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    /// Class count (clusters only).
    #[arg(long, default_value_t = 2)]
    pub classes: usize,
    /// Norm of the class means (clusters only).
    #[arg(long, default_value_t = 4.0)]
    pub sep: f64,
    /// Label frequency (periodic only).
    #[arg(long, default_value_t = 3.0)]
    pub freq: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Train, validation and test fractions.
    #[arg(long, value_delimiter = ',', default_value = "0.7,0.15,0.15")]
    pub fractions: Vec<f64>,
    #[arg(long, value_enum, default_value_t = FileFormat::Emb)]
    pub format: FileFormat,
    /// Directory receiving train/val/test files.
    #[arg(long)]
    pub out_dir: PathBuf,
}
