use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{check_len, GradientBundle, ParamMut, ParamRef};
use crate::error::{Error, Result};

/// One Fourier KAN layer: `out_j = bias_j + Σ_i Σ_{k=1..G} a[j,i,k]·cos(k·x_i) + b[j,i,k]·sin(k·x_i)`.
///
/// The constant harmonic lives in `bias` (one per output), so each edge
/// carries `2·G` coefficients. Coefficient tensors are row-major
/// `[out_dim][in_dim][grid]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierKanHead {
    in_dim: usize,
    out_dim: usize,
    grid: usize,
    cos_coef: Vec<f64>,
    sin_coef: Vec<f64>,
    bias: Vec<f64>,
}

impl FourierKanHead {
    pub fn from_parts(
        in_dim: usize,
        out_dim: usize,
        grid: usize,
        cos_coef: Vec<f64>,
        sin_coef: Vec<f64>,
        bias: Vec<f64>,
    ) -> Result<Self> {
        if in_dim == 0 || out_dim == 0 || grid == 0 {
            return Err(Error::InvalidArgument(
                "fourier head needs positive in_dim, out_dim and grid".into(),
            ));
        }
        let edges = in_dim * out_dim * grid;
        check_len("cosine coefficients", &cos_coef, edges)?;
        check_len("sine coefficients", &sin_coef, edges)?;
        check_len("bias", &bias, out_dim)?;
        Ok(FourierKanHead {
            in_dim,
            out_dim,
            grid,
            cos_coef,
            sin_coef,
            bias,
        })
    }

    pub(super) fn init(in_dim: usize, out_dim: usize, grid: usize, rng: &mut impl Rng) -> Self {
        let std = 1.0 / ((in_dim as f64).sqrt() * (grid as f64).sqrt());
        let normal = Normal::new(0.0, std).expect("positive std");
        let n = in_dim * out_dim * grid;
        let cos_coef = (0..n).map(|_| normal.sample(rng)).collect();
        let sin_coef = (0..n).map(|_| normal.sample(rng)).collect();
        FourierKanHead {
            in_dim,
            out_dim,
            grid,
            cos_coef,
            sin_coef,
            bias: vec![0.0; out_dim],
        }
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn cos_coef(&self) -> &[f64] {
        &self.cos_coef
    }

    pub fn sin_coef(&self) -> &[f64] {
        &self.sin_coef
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    /// The univariate edge function φ_ji(x), without the bias.
    pub fn phi(&self, x: f64, j: usize, i: usize) -> Result<f64> {
        if j >= self.out_dim {
            return Err(Error::IndexOutOfRange {
                index: j,
                len: self.out_dim,
            });
        }
        if i >= self.in_dim {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.in_dim,
            });
        }
        let base = (j * self.in_dim + i) * self.grid;
        let mut acc = 0.0;
        for k in 0..self.grid {
            let (s, c) = ((k + 1) as f64 * x).sin_cos();
            acc += self.cos_coef[base + k] * c + self.sin_coef[base + k] * s;
        }
        Ok(acc)
    }

    pub(super) fn parameters(&self) -> Vec<ParamRef<'_>> {
        let shape = vec![self.out_dim, self.in_dim, self.grid];
        vec![
            ParamRef {
                name: "cos_coef",
                shape: shape.clone(),
                data: &self.cos_coef,
            },
            ParamRef {
                name: "sin_coef",
                shape,
                data: &self.sin_coef,
            },
            ParamRef {
                name: "bias",
                shape: vec![self.out_dim],
                data: &self.bias,
            },
        ]
    }

    pub(super) fn parameters_mut(&mut self) -> Vec<ParamMut<'_>> {
        vec![
            ParamMut {
                name: "cos_coef",
                data: &mut self.cos_coef,
            },
            ParamMut {
                name: "sin_coef",
                data: &mut self.sin_coef,
            },
            ParamMut {
                name: "bias",
                data: &mut self.bias,
            },
        ]
    }

    /// cos(k·x_i), sin(k·x_i) for k = 1..=grid, laid out `[in_dim][grid]`.
    fn harmonics(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut cos = Vec::with_capacity(self.in_dim * self.grid);
        let mut sin = Vec::with_capacity(self.in_dim * self.grid);
        for &xi in x {
            for k in 1..=self.grid {
                let (s, c) = (k as f64 * xi).sin_cos();
                cos.push(c);
                sin.push(s);
            }
        }
        (cos, sin)
    }

    pub(super) fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        let (cos, sin) = self.harmonics(x);
        let row = self.in_dim * self.grid;
        for (j, o) in out.iter_mut().enumerate() {
            let a = &self.cos_coef[j * row..(j + 1) * row];
            let b = &self.sin_coef[j * row..(j + 1) * row];
            let mut acc = self.bias[j];
            for e in 0..row {
                acc += a[e] * cos[e] + b[e] * sin[e];
            }
            *o = acc;
        }
    }

    pub(super) fn accumulate_backward(&self, x: &[f64], g: &[f64], bundle: &mut GradientBundle) {
        let (cos, sin) = self.harmonics(x);
        let row = self.in_dim * self.grid;
        let [ga, gb, gbias] = &mut bundle.tensors[..] else {
            unreachable!("fourier bundle has three tensors")
        };
        for (j, &gj) in g.iter().enumerate() {
            if gj == 0.0 {
                continue;
            }
            gbias.data[j] += gj;
            let span = j * row..(j + 1) * row;
            let (a, b) = (&self.cos_coef[span.clone()], &self.sin_coef[span.clone()]);
            let (da, db) = (&mut ga.data[span.clone()], &mut gb.data[span]);
            for i in 0..self.in_dim {
                let mut dphi = 0.0;
                for k in 0..self.grid {
                    let e = i * self.grid + k;
                    da[e] += gj * cos[e];
                    db[e] += gj * sin[e];
                    dphi += (k + 1) as f64 * (b[e] * cos[e] - a[e] * sin[e]);
                }
                bundle.grad_input[i] += gj * dphi;
            }
        }
    }
}
