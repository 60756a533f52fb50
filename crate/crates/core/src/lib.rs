//! Classification heads for linear probing over frozen contextual embeddings.
//!
//! Three head families share one interface ([`Head`]): plain perceptrons
//! ([`Mlp1Head`], [`Mlp2Head`]), a single B-spline Kolmogorov-Arnold layer
//! ([`SplineKanHead`]) and a single Fourier Kolmogorov-Arnold layer
//! ([`FourierKanHead`]). Every head has a hand-written backward pass; there is
//! no autodiff.
//!
//! Around the heads sit a mini-batch Adam training loop ([`training`]),
//! classification metrics ([`metrics`]), the EMB1/CSV embedding formats and
//! synthetic generators ([`data`]), and a small toolkit for measuring Fourier
//! truncation error ([`fourier`]).

pub mod data;
pub mod error;
pub mod fourier;
pub mod heads;
pub mod metrics;
pub mod training;

pub use error::{Error, Result};
pub use heads::{
    FourierKanHead, GradientBundle, Head, HeadSpec, Mlp1Head, Mlp2Head, SplineKanHead,
};

pub use data::EmbeddingSet;
pub use metrics::{ConfusionMatrix, MetricsReport};
pub use training::{LossHistory, Precision, TrainConfig};
