//! Classification heads: forward logits, analytic gradients and parameter counts.
//!
//! Every head maps an embedding `x ∈ R^in_dim` to pre-softmax logits in
//! `R^out_dim`. The KAN heads are a single layer of the form
//! `out_j = Σ_i φ_ij(x_i) (+ bias_j)`.

pub mod activation;
pub mod bspline;
mod fourier_kan;
mod mlp;
mod spline_kan;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use activation::{sigmoid, silu, silu_derivative};
pub use bspline::bspline_basis;
pub use fourier_kan::FourierKanHead;
pub use mlp::{Mlp1Head, Mlp2Head};
pub use spline_kan::SplineKanHead;

/// Default B-spline degree for [`SplineKanHead`].
pub const DEFAULT_SPLINE_DEGREE: usize = 3;

/// Architecture of a head, without its dimensions or weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HeadSpec {
    Mlp1,
    Mlp2 { hidden: usize },
    Kan { grid: usize, degree: usize },
    Frkan { grid: usize },
}

impl HeadSpec {
    pub fn name(&self) -> &'static str {
        match self {
            HeadSpec::Mlp1 => "mlp1",
            HeadSpec::Mlp2 { .. } => "mlp2",
            HeadSpec::Kan { .. } => "kan",
            HeadSpec::Frkan { .. } => "frkan",
        }
    }
}

/// Read-only view of one parameter tensor.
#[derive(Debug, Clone)]
pub struct ParamRef<'a> {
    pub name: &'static str,
    pub shape: Vec<usize>,
    pub data: &'a [f64],
}

/// Mutable view of one parameter tensor.
#[derive(Debug)]
pub struct ParamMut<'a> {
    pub name: &'static str,
    pub data: &'a mut [f64],
}

/// Gradient of one parameter tensor, shaped like its owner.
#[derive(Debug, Clone, PartialEq)]
pub struct GradTensor {
    pub name: &'static str,
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

/// Per-parameter gradients plus the gradient with respect to the input.
///
/// Tensors appear in the same order as [`Head::parameters`].
#[derive(Debug, Clone, PartialEq)]
pub struct GradientBundle {
    pub tensors: Vec<GradTensor>,
    pub grad_input: Vec<f64>,
}

impl GradientBundle {
    pub fn get(&self, name: &str) -> Option<&GradTensor> {
        self.tensors.iter().find(|t| t.name == name)
    }

    pub fn scale(&mut self, factor: f64) {
        for t in &mut self.tensors {
            t.data.iter_mut().for_each(|v| *v *= factor);
        }
        self.grad_input.iter_mut().for_each(|v| *v *= factor);
    }

    pub fn is_finite(&self) -> bool {
        self.tensors
            .iter()
            .flat_map(|t| t.data.iter())
            .chain(self.grad_input.iter())
            .all(|v| v.is_finite())
    }

    pub fn reset(&mut self) {
        for t in &mut self.tensors {
            t.data.iter_mut().for_each(|v| *v = 0.0);
        }
        self.grad_input.iter_mut().for_each(|v| *v = 0.0);
    }
}

/// A trainable classifier over embeddings.
#[derive(Debug, Clone, PartialEq)]
pub enum Head {
    Mlp1(Mlp1Head),
    Mlp2(Mlp2Head),
    Kan(SplineKanHead),
    Frkan(FourierKanHead),
}

macro_rules! dispatch {
    ($self:expr, $h:ident => $body:expr) => {
        match $self {
            Head::Mlp1($h) => $body,
            Head::Mlp2($h) => $body,
            Head::Kan($h) => $body,
            Head::Frkan($h) => $body,
        }
    };
}

impl Head {
    /// Builds a head with deterministically seeded parameters.
    ///
    /// Fourier coefficients are drawn from `N(0, 1/(in_dim·grid))`, spline
    /// coefficients from `N(0, 0.1²)`, the spline residual weights and MLP
    /// weights from `U(±√(1/fan_in))`. Biases start at zero.
    pub fn init(spec: HeadSpec, in_dim: usize, out_dim: usize, seed: u64) -> Result<Head> {
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::InvalidArgument(format!(
                "head dimensions must be positive (in_dim {in_dim}, out_dim {out_dim})"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(match spec {
            HeadSpec::Mlp1 => Head::Mlp1(Mlp1Head::init(in_dim, out_dim, &mut rng)),
            HeadSpec::Mlp2 { hidden } => {
                if hidden < 1 {
                    return Err(Error::InvalidArgument("hidden width must be >= 1".into()));
                }
                Head::Mlp2(Mlp2Head::init(in_dim, hidden, out_dim, &mut rng))
            }
            HeadSpec::Kan { grid, degree } => {
                if grid < 1 {
                    return Err(Error::InvalidArgument("grid size must be >= 1".into()));
                }
                Head::Kan(SplineKanHead::init(in_dim, out_dim, grid, degree, &mut rng))
            }
            HeadSpec::Frkan { grid } => {
                if grid < 1 {
                    return Err(Error::InvalidArgument("grid size must be >= 1".into()));
                }
                Head::Frkan(FourierKanHead::init(in_dim, out_dim, grid, &mut rng))
            }
        })
    }

    pub fn spec(&self) -> HeadSpec {
        match self {
            Head::Mlp1(_) => HeadSpec::Mlp1,
            Head::Mlp2(h) => HeadSpec::Mlp2 { hidden: h.hidden() },
            Head::Kan(h) => HeadSpec::Kan {
                grid: h.grid(),
                degree: h.degree(),
            },
            Head::Frkan(h) => HeadSpec::Frkan { grid: h.grid() },
        }
    }

    pub fn in_dim(&self) -> usize {
        dispatch!(self, h => h.in_dim())
    }

    pub fn out_dim(&self) -> usize {
        dispatch!(self, h => h.out_dim())
    }

    /// Exact number of trainable scalars.
    pub fn param_count(&self) -> usize {
        self.parameters().iter().map(|p| p.data.len()).sum()
    }

    pub fn parameters(&self) -> Vec<ParamRef<'_>> {
        dispatch!(self, h => h.parameters())
    }

    pub fn parameters_mut(&mut self) -> Vec<ParamMut<'_>> {
        dispatch!(self, h => h.parameters_mut())
    }

    /// Pre-softmax logits for one embedding.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let mut out = vec![0.0; self.out_dim()];
        self.forward_into(x, &mut out);
        Ok(out)
    }

    /// Gradients of `grad_logits · logits(x)` with respect to every parameter and `x`.
    pub fn backward(&self, x: &[f64], grad_logits: &[f64]) -> Result<GradientBundle> {
        self.check_input(x)?;
        self.check_grad(grad_logits)?;
        let mut bundle = self.zero_gradients();
        self.accumulate_backward(x, grad_logits, &mut bundle);
        Ok(bundle)
    }

    /// A zeroed bundle congruent with this head.
    pub fn zero_gradients(&self) -> GradientBundle {
        GradientBundle {
            tensors: self
                .parameters()
                .into_iter()
                .map(|p| GradTensor {
                    name: p.name,
                    shape: p.shape,
                    data: vec![0.0; p.data.len()],
                })
                .collect(),
            grad_input: vec![0.0; self.in_dim()],
        }
    }

    /// Writes logits into `out`; dimensions are the caller's responsibility.
    pub(crate) fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        dispatch!(self, h => h.forward_into(x, out))
    }

    /// Adds the gradients for one sample into `bundle`. `grad_input` is overwritten.
    pub(crate) fn accumulate_backward(
        &self,
        x: &[f64],
        grad_logits: &[f64],
        bundle: &mut GradientBundle,
    ) {
        bundle.grad_input.iter_mut().for_each(|v| *v = 0.0);
        dispatch!(self, h => h.accumulate_backward(x, grad_logits, bundle))
    }

    pub(crate) fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.in_dim() {
            return Err(Error::DimensionMismatch {
                what: "head input",
                expected: self.in_dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    fn check_grad(&self, g: &[f64]) -> Result<()> {
        if g.len() != self.out_dim() {
            return Err(Error::DimensionMismatch {
                what: "logit gradient",
                expected: self.out_dim(),
                got: g.len(),
            });
        }
        Ok(())
    }
}

pub(crate) fn check_len(what: &'static str, data: &[f64], expected: usize) -> Result<()> {
    if data.len() != expected {
        return Err(Error::DimensionMismatch {
            what,
            expected,
            got: data.len(),
        });
    }
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("{what} must be finite")));
    }
    Ok(())
}
