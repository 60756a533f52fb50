use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::activation::{silu, silu_derivative};
use super::bspline::{basis_count, clamped_uniform_knots, eval_bases};
use super::{check_len, GradientBundle, ParamMut, ParamRef};
use crate::error::{Error, Result};

const SPAN_LO: f64 = -1.0;
const SPAN_HI: f64 = 1.0;

/// One B-spline KAN layer with residual edges
/// `φ_ji(x) = w_base[j,i]·silu(x) + w_spline[j,i]·Σ_k coef[j,i,k]·B_k(clamp(x))`.
///
/// The knot vector is clamped with `grid` uniform intervals on `[-1, 1]`,
/// giving `grid + degree` bases per edge. Only the spline path sees the
/// clamped input.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineKanHead {
    in_dim: usize,
    out_dim: usize,
    grid: usize,
    degree: usize,
    knots: Vec<f64>,
    /// `[out_dim][in_dim][grid + degree]`
    coef: Vec<f64>,
    /// `[out_dim][in_dim]`
    w_base: Vec<f64>,
    /// `[out_dim][in_dim]`
    w_spline: Vec<f64>,
}

impl SplineKanHead {
    pub fn from_parts(
        in_dim: usize,
        out_dim: usize,
        grid: usize,
        degree: usize,
        coef: Vec<f64>,
        w_base: Vec<f64>,
        w_spline: Vec<f64>,
    ) -> Result<Self> {
        if in_dim == 0 || out_dim == 0 || grid == 0 {
            return Err(Error::InvalidArgument(
                "spline head needs positive in_dim, out_dim and grid".into(),
            ));
        }
        let edges = in_dim * out_dim;
        check_len("spline coefficients", &coef, edges * (grid + degree))?;
        check_len("w_base", &w_base, edges)?;
        check_len("w_spline", &w_spline, edges)?;
        Ok(SplineKanHead {
            in_dim,
            out_dim,
            grid,
            degree,
            knots: clamped_uniform_knots(grid, degree, SPAN_LO, SPAN_HI),
            coef,
            w_base,
            w_spline,
        })
    }

    pub(super) fn init(
        in_dim: usize,
        out_dim: usize,
        grid: usize,
        degree: usize,
        rng: &mut impl Rng,
    ) -> Self {
        let edges = in_dim * out_dim;
        let normal = Normal::new(0.0, 0.1).expect("positive std");
        let coef = (0..edges * (grid + degree))
            .map(|_| normal.sample(rng))
            .collect();
        let bound = (1.0 / in_dim as f64).sqrt();
        let w_base = (0..edges).map(|_| rng.gen_range(-bound..bound)).collect();
        let w_spline = (0..edges).map(|_| rng.gen_range(-bound..bound)).collect();
        SplineKanHead {
            in_dim,
            out_dim,
            grid,
            degree,
            knots: clamped_uniform_knots(grid, degree, SPAN_LO, SPAN_HI),
            coef,
            w_base,
            w_spline,
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

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn n_basis(&self) -> usize {
        basis_count(&self.knots, self.degree)
    }

    /// The residual edge function φ_ji(x).
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
        let nb = self.n_basis();
        let mut basis = vec![0.0; nb];
        eval_bases(
            x.clamp(SPAN_LO, SPAN_HI),
            &self.knots,
            self.degree,
            &mut basis,
            None,
        );
        let e = j * self.in_dim + i;
        let spline: f64 = self.coef[e * nb..(e + 1) * nb]
            .iter()
            .zip(&basis)
            .map(|(c, b)| c * b)
            .sum();
        Ok(self.w_base[e] * silu(x) + self.w_spline[e] * spline)
    }

    pub(super) fn parameters(&self) -> Vec<ParamRef<'_>> {
        vec![
            ParamRef {
                name: "coef",
                shape: vec![self.out_dim, self.in_dim, self.n_basis()],
                data: &self.coef,
            },
            ParamRef {
                name: "w_base",
                shape: vec![self.out_dim, self.in_dim],
                data: &self.w_base,
            },
            ParamRef {
                name: "w_spline",
                shape: vec![self.out_dim, self.in_dim],
                data: &self.w_spline,
            },
        ]
    }

    pub(super) fn parameters_mut(&mut self) -> Vec<ParamMut<'_>> {
        vec![
            ParamMut {
                name: "coef",
                data: &mut self.coef,
            },
            ParamMut {
                name: "w_base",
                data: &mut self.w_base,
            },
            ParamMut {
                name: "w_spline",
                data: &mut self.w_spline,
            },
        ]
    }

    /// Basis values (and x-derivatives when requested) per input, `[in_dim][n_basis]`.
    fn bases(&self, x: &[f64], with_derivs: bool) -> (Vec<f64>, Vec<f64>) {
        let nb = self.n_basis();
        let mut vals = vec![0.0; self.in_dim * nb];
        let mut derivs = vec![0.0; if with_derivs { self.in_dim * nb } else { 0 }];
        for (i, &xi) in x.iter().enumerate() {
            let inside = (SPAN_LO..=SPAN_HI).contains(&xi);
            let v = &mut vals[i * nb..(i + 1) * nb];
            if with_derivs && inside {
                let d = &mut derivs[i * nb..(i + 1) * nb];
                eval_bases(xi, &self.knots, self.degree, v, Some(d));
            } else {
                // clamped inputs have zero derivative on the spline path
                eval_bases(
                    xi.clamp(SPAN_LO, SPAN_HI),
                    &self.knots,
                    self.degree,
                    v,
                    None,
                );
            }
        }
        (vals, derivs)
    }

    pub(super) fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        let nb = self.n_basis();
        let (basis, _) = self.bases(x, false);
        let base: Vec<f64> = x.iter().map(|&v| silu(v)).collect();
        for (j, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for i in 0..self.in_dim {
                let e = j * self.in_dim + i;
                let spline: f64 = self.coef[e * nb..(e + 1) * nb]
                    .iter()
                    .zip(&basis[i * nb..(i + 1) * nb])
                    .map(|(c, b)| c * b)
                    .sum();
                acc += self.w_base[e] * base[i] + self.w_spline[e] * spline;
            }
            *o = acc;
        }
    }

    pub(super) fn accumulate_backward(&self, x: &[f64], g: &[f64], bundle: &mut GradientBundle) {
        let nb = self.n_basis();
        let (basis, dbasis) = self.bases(x, true);
        let [gc, gwb, gws] = &mut bundle.tensors[..] else {
            unreachable!("spline bundle has three tensors")
        };
        for (j, &gj) in g.iter().enumerate() {
            if gj == 0.0 {
                continue;
            }
            for i in 0..self.in_dim {
                let e = j * self.in_dim + i;
                let c = &self.coef[e * nb..(e + 1) * nb];
                let b = &basis[i * nb..(i + 1) * nb];
                let db = &dbasis[i * nb..(i + 1) * nb];
                let spline: f64 = c.iter().zip(b).map(|(c, b)| c * b).sum();
                let dspline: f64 = c.iter().zip(db).map(|(c, d)| c * d).sum();
                let ws = self.w_spline[e];
                for (gck, bk) in gc.data[e * nb..(e + 1) * nb].iter_mut().zip(b) {
                    *gck += gj * ws * bk;
                }
                gwb.data[e] += gj * silu(x[i]);
                gws.data[e] += gj * spline;
                bundle.grad_input[i] +=
                    gj * (self.w_base[e] * silu_derivative(x[i]) + ws * dspline);
            }
        }
    }
}
