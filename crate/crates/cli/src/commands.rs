use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use frkan::data::{self, csv, emb, EmbeddingSet};
use frkan::fourier::{BuiltinFunction, ErrorCurve, Norm};
use frkan::heads::{Head, HeadSpec, DEFAULT_SPLINE_DEGREE};
use frkan::training::{self, LossHistory};
use frkan::{MetricsReport, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::args::{
    AblateArgs, Cli, Command, DataArgs, FileFormat, HeadKind, ScanArgs, SynthArgs, SynthKind,
    TrainArgs,
};

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Train(args) => cmd_train(args).map(|_| ()),
        Command::Ablate(args) => cmd_ablate(args).map(|_| ()),
        Command::FourierScan(args) => cmd_fourier_scan(args).map(|_| ()),
        Command::Synth(args) => cmd_synth(args).map(|_| ()),
    }
}

/// Loads EMB1, or CSV when the file extension is `.csv`.
pub fn load_set(path: &Path, limit: Option<usize>) -> Result<EmbeddingSet> {
    ensure!(path.is_file(), "input file not found: {}", path.display());
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let mut set = if is_csv {
        csv::load_csv(path, None)
    } else {
        emb::load_emb(path)
    }
    .with_context(|| format!("failed to load {}", path.display()))?;
    if let Some(limit) = limit {
        set.truncate(limit);
    }
    Ok(set)
}

/// Train, validation and test sets with their common width and class count.
pub struct Splits {
    pub train: EmbeddingSet,
    pub val: EmbeddingSet,
    pub test: EmbeddingSet,
    pub n_classes: usize,
}

impl Splits {
    pub fn new(train: EmbeddingSet, val: EmbeddingSet, test: EmbeddingSet) -> Result<Self> {
        for (name, set) in [("validation", &val), ("test", &test)] {
            ensure!(
                set.dim() == train.dim(),
                "{name} set has dimension {}, training set has {}",
                set.dim(),
                train.dim()
            );
        }
        let n_classes = train.n_classes().max(val.n_classes()).max(test.n_classes());
        Ok(Splits {
            train,
            val,
            test,
            n_classes,
        })
    }

    pub fn load(data: &DataArgs) -> Result<Self> {
        Splits::new(
            load_set(&data.train, data.limit)?,
            load_set(&data.val, data.limit)?,
            load_set(&data.test, data.limit)?,
        )
    }
}

/// A trained head with its loss curve and test metrics.
pub struct Outcome {
    pub head: Head,
    pub history: LossHistory,
    pub metrics: MetricsReport,
}

/// Initialises a head from `cfg.seed`, trains it and scores the test split.
pub fn train_and_evaluate(spec: HeadSpec, splits: &Splits, cfg: &TrainConfig) -> Result<Outcome> {
    let head = Head::init(spec, splits.train.dim(), splits.n_classes, cfg.seed)?;
    let (head, history) = training::train(head, &splits.train, &splits.val, cfg)?;
    let metrics = training::evaluate(&head, &splits.test)?;
    Ok(Outcome {
        head,
        history,
        metrics,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeadInfo {
    #[serde(flatten)]
    pub spec: HeadSpec,
    pub in_dim: usize,
    pub out_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub train: String,
    pub val: String,
    pub test: String,
    pub limit: Option<usize>,
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
    pub training: TrainConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochLoss {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
}

pub fn loss_rows(history: &LossHistory) -> Vec<EpochLoss> {
    history
        .train
        .iter()
        .zip(&history.val)
        .enumerate()
        .map(|(i, (&train_loss, &val_loss))| EpochLoss {
            epoch: i + 1,
            train_loss,
            val_loss,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub head: HeadInfo,
    pub param_count: usize,
    pub config: RunConfig,
    pub loss_history: Vec<EpochLoss>,
    pub metrics: MetricsReport,
}

fn write_output(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("failed to write {}", path.display()))
}

pub fn cmd_train(args: &TrainArgs) -> Result<TrainReport> {
    let spec = args.head_spec().map_err(anyhow::Error::msg)?;
    let cfg = args.data.train_config();
    let splits = Splits::load(&args.data)?;
    let outcome = train_and_evaluate(spec, &splits, &cfg)?;
    let report = TrainReport {
        head: HeadInfo {
            spec,
            in_dim: outcome.head.in_dim(),
            out_dim: outcome.head.out_dim(),
        },
        param_count: outcome.head.param_count(),
        config: RunConfig {
            train: args.data.train.display().to_string(),
            val: args.data.val.display().to_string(),
            test: args.data.test.display().to_string(),
            limit: args.data.limit,
            n_train: splits.train.len(),
            n_val: splits.val.len(),
            n_test: splits.test.len(),
            training: cfg,
        },
        loss_history: loss_rows(&outcome.history),
        metrics: outcome.metrics,
    };
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    write_output(&args.out, &json)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub grid: usize,
    pub param_count: usize,
    pub accuracy: f64,
    pub macro_f1: f64,
}

fn grid_spec(kind: HeadKind, grid: usize, degree: Option<usize>) -> Result<HeadSpec> {
    match kind {
        HeadKind::Frkan => {
            ensure!(degree.is_none(), "--degree does not apply to frkan heads");
            Ok(HeadSpec::Frkan { grid })
        }
        HeadKind::Kan => Ok(HeadSpec::Kan {
            grid,
            degree: degree.unwrap_or(DEFAULT_SPLINE_DEGREE),
        }),
        other => bail!("grid ablation needs a kan or frkan head, got {other:?}"),
    }
}

/// One training run per grid size with the same data and seed.
pub fn ablation_table(
    kind: HeadKind,
    degree: Option<usize>,
    grids: &[usize],
    splits: &Splits,
    cfg: &TrainConfig,
) -> Result<Vec<AblationRow>> {
    ensure!(!grids.is_empty(), "no grid sizes given");
    grids
        .iter()
        .map(|&grid| {
            let spec = grid_spec(kind, grid, degree)?;
            let outcome =
                train_and_evaluate(spec, splits, cfg).with_context(|| format!("grid {grid}"))?;
            Ok(AblationRow {
                grid,
                param_count: outcome.head.param_count(),
                accuracy: outcome.metrics.accuracy,
                macro_f1: outcome.metrics.macro_f1,
            })
        })
        .collect()
}

pub fn ablation_csv(rows: &[AblationRow]) -> String {
    let mut out = String::from("grid,param_count,accuracy,macro_f1\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.grid, r.param_count, r.accuracy, r.macro_f1
        ));
    }
    out
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_output(path, text),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

pub fn cmd_ablate(args: &AblateArgs) -> Result<Vec<AblationRow>> {
    // fail on the head kind before touching any files
    grid_spec(args.head, 1, args.degree)?;
    let splits = Splits::load(&args.data)?;
    let rows = ablation_table(
        args.head,
        args.degree,
        &args.grids,
        &splits,
        &args.data.train_config(),
    )?;
    let as_json = args
        .out
        .as_deref()
        .and_then(Path::extension)
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let text = if as_json {
        serde_json::to_string_pretty(&rows)? + "\n"
    } else {
        ablation_csv(&rows)
    };
    emit(args.out.as_deref(), &text)?;
    Ok(rows)
}

pub fn cmd_fourier_scan(args: &ScanArgs) -> Result<ErrorCurve> {
    let function: BuiltinFunction = args.function.parse()?;
    let norm: Norm = args.norm.parse()?;
    let curve = function.scan(args.gmax, norm)?;
    emit(args.out.as_deref(), &curve.to_csv())?;
    Ok(curve)
}

pub fn cmd_synth(args: &SynthArgs) -> Result<Vec<PathBuf>> {
    let fractions: [f64; 3] = args.fractions.as_slice().try_into().map_err(|_| {
        anyhow::anyhow!(
            "--fractions needs exactly three values, got {:?}",
            args.fractions
        )
    })?;
    let set = match args.kind {
        SynthKind::Clusters => {
            data::synth_gaussian_clusters(args.n, args.d, args.classes, args.sep, args.seed)?
        }
        SynthKind::Periodic => data::synth_periodic(args.n, args.d, args.freq, args.seed)?,
    };
    let (train, val, test) = data::stratified_split(&set, fractions, args.seed)?;
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("failed to create {}", args.out_dir.display()))?;
    let ext = match args.format {
        FileFormat::Emb => "emb",
        FileFormat::Csv => "csv",
    };
    let mut written = Vec::new();
    for (name, part) in [("train", &train), ("val", &val), ("test", &test)] {
        let path = args.out_dir.join(format!("{name}.{ext}"));
        match args.format {
            FileFormat::Emb => emb::save_emb(part, &path),
            FileFormat::Csv => csv::save_csv(part, &path),
        }
        .with_context(|| format!("failed to write {}", path.display()))?;
        written.push(path);
    }
    Ok(written)
}
