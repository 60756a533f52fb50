//! Softmax cross-entropy training of a head with mini-batch Adam.

mod adam;
mod loss;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::EmbeddingSet;
use crate::error::{Error, Result};
use crate::heads::Head;
use crate::metrics::{confusion_matrix, MetricsReport};

pub use adam::{adam_step, AdamState};
pub use loss::{cross_entropy, softmax, LOG_PROB_FLOOR};

/// Storage precision of trainable parameters during training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    /// Parameters are rounded to the nearest `f32` after every update.
    F32,
    #[default]
    F64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub shuffle: bool,
    pub precision: Precision,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 2e-5,
            batch_size: 64,
            epochs: 5,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            seed: 0,
            shuffle: true,
            precision: Precision::F64,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            ));
        }
        if self.batch_size == 0 {
            return bad("batch size must be positive".into());
        }
        if !(self.beta1 > 0.0 && self.beta1 < 1.0 && self.beta2 > 0.0 && self.beta2 < 1.0) {
            return bad(format!(
                "Adam betas must lie in (0, 1), got {} and {}",
                self.beta1, self.beta2
            ));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        Ok(())
    }
}

/// Mean training loss and validation loss, one entry per epoch.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LossHistory {
    pub train: Vec<f64>,
    pub val: Vec<f64>,
}

fn check_set(head: &Head, set: &EmbeddingSet, what: &'static str) -> Result<()> {
    if set.is_empty() {
        return Err(Error::EmptyDataset(what));
    }
    if set.dim() != head.in_dim() {
        return Err(Error::DimensionMismatch {
            what,
            expected: head.in_dim(),
            got: set.dim(),
        });
    }
    if let Some((row, &label)) = set
        .labels()
        .iter()
        .enumerate()
        .find(|(_, &l)| l >= head.out_dim())
    {
        return Err(Error::LabelOutOfRange {
            row,
            label,
            n_classes: head.out_dim(),
        });
    }
    Ok(())
}

/// Trains `head` for `cfg.epochs` epochs of `⌈n / batch_size⌉` Adam steps
/// each, minimising the mean per-sample cross-entropy of every batch.
///
/// Epoch `e` shuffles with seed `cfg.seed + e`; the last partial batch is
/// kept. The recorded training loss of an epoch is the mean of the
/// per-sample losses seen during that epoch (before each step's update);
/// the validation loss is measured over the whole validation set after the
/// epoch ends.
pub fn train(
    mut head: Head,
    train_set: &EmbeddingSet,
    val_set: &EmbeddingSet,
    cfg: &TrainConfig,
) -> Result<(Head, LossHistory)> {
    cfg.validate()?;
    check_set(&head, train_set, "training set")?;
    check_set(&head, val_set, "validation set")?;

    let mut history = LossHistory::default();
    let mut state = AdamState::new(&head);
    let mut grads = head.zero_gradients();
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut logits = vec![0.0; head.out_dim()];

    if cfg.precision == Precision::F32 {
        round_to_f32(&mut head);
    }

    for epoch in 0..cfg.epochs {
        if cfg.shuffle {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(epoch as u64));
            order.shuffle(&mut rng);
        }
        let mut epoch_loss = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            grads.reset();
            let scale = 1.0 / batch.len() as f64;
            for &i in batch {
                let x = train_set.row(i);
                let label = train_set.labels()[i];
                head.forward_into(x, &mut logits);
                let mut probs = softmax(&logits)?;
                epoch_loss += cross_entropy(&probs, label)?;
                // d(mean CE)/d logits = (p - onehot) / |batch|
                probs[label] -= 1.0;
                probs.iter_mut().for_each(|p| *p *= scale);
                head.accumulate_backward(x, &probs, &mut grads);
            }
            adam_step(&mut head, &grads, &mut state, cfg)?;
            if cfg.precision == Precision::F32 {
                round_to_f32(&mut head);
            }
        }
        history.train.push(epoch_loss / train_set.len() as f64);
        history.val.push(mean_loss(&head, val_set)?);
    }
    Ok((head, history))
}

fn round_to_f32(head: &mut Head) {
    for p in head.parameters_mut() {
        p.data.iter_mut().for_each(|v| *v = *v as f32 as f64);
    }
}

/// Mean cross-entropy of `head` over `set`.
pub fn mean_loss(head: &Head, set: &EmbeddingSet) -> Result<f64> {
    check_set(head, set, "evaluation set")?;
    let mut logits = vec![0.0; head.out_dim()];
    let mut total = 0.0;
    for (x, &label) in set.rows().zip(set.labels()) {
        head.forward_into(x, &mut logits);
        total += cross_entropy(&softmax(&logits)?, label)?;
    }
    Ok(total / set.len() as f64)
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Predicted class for one embedding: the argmax of the logits.
pub fn predict(head: &Head, x: &[f64]) -> Result<usize> {
    Ok(argmax(&head.forward(x)?))
}

pub fn predict_all(head: &Head, set: &EmbeddingSet) -> Result<Vec<usize>> {
    if set.dim() != head.in_dim() {
        return Err(Error::DimensionMismatch {
            what: "evaluation set",
            expected: head.in_dim(),
            got: set.dim(),
        });
    }
    let mut logits = vec![0.0; head.out_dim()];
    Ok(set
        .rows()
        .map(|x| {
            head.forward_into(x, &mut logits);
            argmax(&logits)
        })
        .collect())
}

/// Predicts every row of `set` and scores the predictions.
pub fn evaluate(head: &Head, set: &EmbeddingSet) -> Result<MetricsReport> {
    let preds = predict_all(head, set)?;
    let n_classes = head.out_dim().max(set.n_classes());
    confusion_matrix(&preds, set.labels(), n_classes)?.report()
}
