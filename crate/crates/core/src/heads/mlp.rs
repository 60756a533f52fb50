use rand::Rng;

use super::activation::sigmoid;
use super::{check_len, GradientBundle, ParamMut, ParamRef};
use crate::error::{Error, Result};

fn uniform_weights(n: usize, fan_in: usize, rng: &mut impl Rng) -> Vec<f64> {
    let bound = (1.0 / fan_in as f64).sqrt();
    (0..n).map(|_| rng.gen_range(-bound..bound)).collect()
}

/// Single affine layer `W0·x + b0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp1Head {
    in_dim: usize,
    out_dim: usize,
    /// `[out_dim][in_dim]`
    w0: Vec<f64>,
    b0: Vec<f64>,
}

impl Mlp1Head {
    pub fn from_parts(in_dim: usize, out_dim: usize, w0: Vec<f64>, b0: Vec<f64>) -> Result<Self> {
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::InvalidArgument(
                "mlp1 needs positive dimensions".into(),
            ));
        }
        check_len("w0", &w0, out_dim * in_dim)?;
        check_len("b0", &b0, out_dim)?;
        Ok(Mlp1Head {
            in_dim,
            out_dim,
            w0,
            b0,
        })
    }

    pub(super) fn init(in_dim: usize, out_dim: usize, rng: &mut impl Rng) -> Self {
        Mlp1Head {
            in_dim,
            out_dim,
            w0: uniform_weights(in_dim * out_dim, in_dim, rng),
            b0: vec![0.0; out_dim],
        }
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.w0
    }

    pub fn bias(&self) -> &[f64] {
        &self.b0
    }

    pub(super) fn parameters(&self) -> Vec<ParamRef<'_>> {
        vec![
            ParamRef {
                name: "w0",
                shape: vec![self.out_dim, self.in_dim],
                data: &self.w0,
            },
            ParamRef {
                name: "b0",
                shape: vec![self.out_dim],
                data: &self.b0,
            },
        ]
    }

    pub(super) fn parameters_mut(&mut self) -> Vec<ParamMut<'_>> {
        vec![
            ParamMut {
                name: "w0",
                data: &mut self.w0,
            },
            ParamMut {
                name: "b0",
                data: &mut self.b0,
            },
        ]
    }

    pub(super) fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        affine(&self.w0, &self.b0, x, out);
    }

    pub(super) fn accumulate_backward(&self, x: &[f64], g: &[f64], bundle: &mut GradientBundle) {
        let [gw, gb] = &mut bundle.tensors[..] else {
            unreachable!("mlp1 bundle has two tensors")
        };
        affine_backward(
            &self.w0,
            x,
            g,
            &mut gw.data,
            &mut gb.data,
            &mut bundle.grad_input,
        );
    }
}

/// `W1·σ(W0·x + b0) + b1` with a logistic hidden layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp2Head {
    in_dim: usize,
    hidden: usize,
    out_dim: usize,
    /// `[hidden][in_dim]`
    w0: Vec<f64>,
    b0: Vec<f64>,
    /// `[out_dim][hidden]`
    w1: Vec<f64>,
    b1: Vec<f64>,
}

impl Mlp2Head {
    pub fn from_parts(
        in_dim: usize,
        hidden: usize,
        out_dim: usize,
        w0: Vec<f64>,
        b0: Vec<f64>,
        w1: Vec<f64>,
        b1: Vec<f64>,
    ) -> Result<Self> {
        if in_dim == 0 || hidden == 0 || out_dim == 0 {
            return Err(Error::InvalidArgument(
                "mlp2 needs positive dimensions".into(),
            ));
        }
        check_len("w0", &w0, hidden * in_dim)?;
        check_len("b0", &b0, hidden)?;
        check_len("w1", &w1, out_dim * hidden)?;
        check_len("b1", &b1, out_dim)?;
        Ok(Mlp2Head {
            in_dim,
            hidden,
            out_dim,
            w0,
            b0,
            w1,
            b1,
        })
    }

    pub(super) fn init(in_dim: usize, hidden: usize, out_dim: usize, rng: &mut impl Rng) -> Self {
        let w0 = uniform_weights(hidden * in_dim, in_dim, rng);
        let w1 = uniform_weights(out_dim * hidden, hidden, rng);
        Mlp2Head {
            in_dim,
            hidden,
            out_dim,
            w0,
            b0: vec![0.0; hidden],
            w1,
            b1: vec![0.0; out_dim],
        }
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub(super) fn parameters(&self) -> Vec<ParamRef<'_>> {
        vec![
            ParamRef {
                name: "w0",
                shape: vec![self.hidden, self.in_dim],
                data: &self.w0,
            },
            ParamRef {
                name: "b0",
                shape: vec![self.hidden],
                data: &self.b0,
            },
            ParamRef {
                name: "w1",
                shape: vec![self.out_dim, self.hidden],
                data: &self.w1,
            },
            ParamRef {
                name: "b1",
                shape: vec![self.out_dim],
                data: &self.b1,
            },
        ]
    }

    pub(super) fn parameters_mut(&mut self) -> Vec<ParamMut<'_>> {
        vec![
            ParamMut {
                name: "w0",
                data: &mut self.w0,
            },
            ParamMut {
                name: "b0",
                data: &mut self.b0,
            },
            ParamMut {
                name: "w1",
                data: &mut self.w1,
            },
            ParamMut {
                name: "b1",
                data: &mut self.b1,
            },
        ]
    }

    fn hidden_activations(&self, x: &[f64]) -> Vec<f64> {
        let mut h = vec![0.0; self.hidden];
        affine(&self.w0, &self.b0, x, &mut h);
        h.iter_mut().for_each(|v| *v = sigmoid(*v));
        h
    }

    pub(super) fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        let h = self.hidden_activations(x);
        affine(&self.w1, &self.b1, &h, out);
    }

    pub(super) fn accumulate_backward(&self, x: &[f64], g: &[f64], bundle: &mut GradientBundle) {
        let h = self.hidden_activations(x);
        let [gw0, gb0, gw1, gb1] = &mut bundle.tensors[..] else {
            unreachable!("mlp2 bundle has four tensors")
        };
        let mut grad_h = vec![0.0; self.hidden];
        affine_backward(&self.w1, &h, g, &mut gw1.data, &mut gb1.data, &mut grad_h);
        for (gz, hv) in grad_h.iter_mut().zip(&h) {
            *gz *= hv * (1.0 - hv);
        }
        affine_backward(
            &self.w0,
            x,
            &grad_h,
            &mut gw0.data,
            &mut gb0.data,
            &mut bundle.grad_input,
        );
    }
}

fn affine(w: &[f64], b: &[f64], x: &[f64], out: &mut [f64]) {
    let n = x.len();
    for (j, o) in out.iter_mut().enumerate() {
        *o = b[j]
            + w[j * n..(j + 1) * n]
                .iter()
                .zip(x)
                .map(|(w, x)| w * x)
                .sum::<f64>();
    }
}

/// Accumulates dW += g·xᵀ and db += g; adds Wᵀ·g into `grad_x`.
fn affine_backward(
    w: &[f64],
    x: &[f64],
    g: &[f64],
    gw: &mut [f64],
    gb: &mut [f64],
    grad_x: &mut [f64],
) {
    let n = x.len();
    for (j, &gj) in g.iter().enumerate() {
        if gj == 0.0 {
            continue;
        }
        gb[j] += gj;
        let row = j * n..(j + 1) * n;
        for ((dw, &wv), (&xv, gx)) in gw[row.clone()]
            .iter_mut()
            .zip(&w[row])
            .zip(x.iter().zip(grad_x.iter_mut()))
        {
            *dw += gj * xv;
            *gx += gj * wv;
        }
    }
}
