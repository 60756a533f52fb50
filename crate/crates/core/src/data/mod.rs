//! Embedding sets: in-memory representation, on-disk formats, synthetic
//! generators and stratified splitting.

pub mod csv;
pub mod emb;
mod split;
mod synth;

use crate::error::{Error, Result};

pub use split::stratified_split;
pub use synth::{synth_gaussian_clusters, synth_periodic};

/// An `n × dim` matrix of frozen embeddings with one class label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    name: String,
    dim: usize,
    n_classes: usize,
    /// Row-major `[n][dim]`.
    x: Vec<f64>,
    y: Vec<usize>,
}

impl EmbeddingSet {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        n_classes: usize,
        x: Vec<f64>,
        y: Vec<usize>,
    ) -> Result<Self> {
        if n_classes == 0 {
            return Err(Error::InvalidArgument("n_classes must be positive".into()));
        }
        if x.len() != y.len() * dim {
            return Err(Error::DimensionMismatch {
                what: "embedding matrix",
                expected: y.len() * dim,
                got: x.len(),
            });
        }
        if let Some(row) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite embedding in row {}",
                row / dim.max(1)
            )));
        }
        if let Some((row, &label)) = y.iter().enumerate().find(|(_, &l)| l >= n_classes) {
            return Err(Error::LabelOutOfRange {
                row,
                label,
                n_classes,
            });
        }
        Ok(EmbeddingSet {
            name: name.into(),
            dim,
            n_classes,
            x,
            y,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.len()).map(move |i| self.row(i))
    }

    pub fn features(&self) -> &[f64] {
        &self.x
    }

    pub fn labels(&self) -> &[usize] {
        &self.y
    }

    /// Rows at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize], name: impl Into<String>) -> EmbeddingSet {
        let mut x = Vec::with_capacity(indices.len() * self.dim);
        let mut y = Vec::with_capacity(indices.len());
        for &i in indices {
            x.extend_from_slice(self.row(i));
            y.push(self.y[i]);
        }
        EmbeddingSet {
            name: name.into(),
            dim: self.dim,
            n_classes: self.n_classes,
            x,
            y,
        }
    }

    /// Keeps at most the first `n` rows.
    pub fn truncate(&mut self, n: usize) {
        if n < self.len() {
            self.y.truncate(n);
            self.x.truncate(n * self.dim);
        }
    }

    /// Rounds every embedding through `f32`, the on-disk precision.
    pub fn quantize_f32(&mut self) {
        self.x.iter_mut().for_each(|v| *v = *v as f32 as f64);
    }
}
