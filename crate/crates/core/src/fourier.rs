//! Truncated Fourier series of univariate functions and their truncation error.
//!
//! Functions on `[lo, hi]` are mapped affinely onto `[-π, π]` and their
//! coefficients are computed with the composite trapezoid rule on the
//! periodic extension, which is spectrally accurate for smooth periodic
//! integrands. A function with `f(lo) != f(hi)` is fitted as-is: its periodic
//! extension jumps at the boundary and the trapezoid rule uses the mean of
//! the two one-sided values there.

use std::f64::consts::PI;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Quadrature nodes used by [`fit_function`] unless told otherwise.
pub const DEFAULT_SAMPLES: usize = 4096;
/// Uniformly spaced points at which [`truncation_error`] compares `f` and `f_G`.
pub const EVAL_POINTS: usize = 1024;

/// `f_G(t) = a[0] + Σ_{k=1..G} a[k]·cos(kt) + b[k-1]·sin(kt)` on the mapped domain.
///
/// `a[0]` is the mean of `f` (half the classical `a_0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierFit {
    pub grid: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
}

impl FourierFit {
    fn to_angle(&self, x: f64) -> f64 {
        -PI + 2.0 * PI * (x - self.lo) / (self.hi - self.lo)
    }

    /// Partial sum at `x` in the original domain.
    pub fn eval(&self, x: f64) -> f64 {
        let t = self.to_angle(x);
        let mut acc = self.a[0];
        for k in 1..=self.grid {
            let (s, c) = (k as f64 * t).sin_cos();
            acc += self.a[k] * c + self.b[k - 1] * s;
        }
        acc
    }

    /// The same series cut after `grid` harmonics.
    pub fn truncated(&self, grid: usize) -> FourierFit {
        let grid = grid.min(self.grid);
        FourierFit {
            grid,
            a: self.a[..=grid].to_vec(),
            b: self.b[..grid].to_vec(),
            lo: self.lo,
            hi: self.hi,
        }
    }

    /// `(1/π)∫ f_G²` over one period: `a_0²/2 + Σ (a_k² + b_k²)` with the classical `a_0`.
    pub fn parseval_energy(&self) -> f64 {
        let a0 = 2.0 * self.a[0];
        a0 * a0 / 2.0
            + self.a[1..].iter().map(|v| v * v).sum::<f64>()
            + self.b.iter().map(|v| v * v).sum::<f64>()
    }

    /// `Σ_{k > grid} (|a_k| + |b_k|)` over the harmonics this fit carries.
    pub fn tail_sum(&self, grid: usize) -> f64 {
        (grid + 1..=self.grid)
            .map(|k| self.a[k].abs() + self.b[k - 1].abs())
            .sum()
    }
}

fn check_domain(lo: f64, hi: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "invalid domain [{lo}, {hi}]"
        )));
    }
    Ok(())
}

/// Fits `grid` harmonics to `samples` taken at the `m` periodic nodes
/// `x_j = lo + (hi - lo)·j/m`, `j = 0..m`.
pub fn fourier_coefficients(samples: &[f64], grid: usize, lo: f64, hi: f64) -> Result<FourierFit> {
    check_domain(lo, hi)?;
    let m = samples.len();
    if m < 4 * grid + 4 {
        return Err(Error::InvalidArgument(format!(
            "{m} samples are too few for grid {grid} (need at least {})",
            4 * grid + 4
        )));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("samples must be finite".into()));
    }
    let mf = m as f64;
    let mut a = Vec::with_capacity(grid + 1);
    let mut b = Vec::with_capacity(grid);
    a.push(samples.iter().sum::<f64>() / mf);
    for k in 1..=grid {
        let (mut ca, mut sb) = (0.0, 0.0);
        for (j, &s) in samples.iter().enumerate() {
            let t = -PI + 2.0 * PI * j as f64 / mf;
            let (sin, cos) = (k as f64 * t).sin_cos();
            ca += s * cos;
            sb += s * sin;
        }
        a.push(2.0 * ca / mf);
        b.push(2.0 * sb / mf);
    }
    Ok(FourierFit { grid, a, b, lo, hi })
}

/// Samples `f` at `m` periodic nodes on `[lo, hi]` and fits `grid` harmonics.
pub fn fit_function(
    f: impl Fn(f64) -> f64,
    grid: usize,
    lo: f64,
    hi: f64,
    m: usize,
) -> Result<FourierFit> {
    check_domain(lo, hi)?;
    let samples: Vec<f64> = (0..m)
        .map(|j| {
            if j == 0 {
                0.5 * (f(lo) + f(hi))
            } else {
                f(lo + (hi - lo) * j as f64 / m as f64)
            }
        })
        .collect();
    fourier_coefficients(&samples, grid, lo, hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    Sup,
    L2,
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sup" => Ok(Norm::Sup),
            "l2" => Ok(Norm::L2),
            other => Err(Error::InvalidArgument(format!(
                "unknown norm {other:?} (expected sup or l2)"
            ))),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::Sup => "sup",
            Norm::L2 => "l2",
        })
    }
}

/// `‖f - f_G‖` over [`EVAL_POINTS`] cell midpoints of the fit's domain.
/// The L2 norm is the root mean square.
pub fn truncation_error(f: impl Fn(f64) -> f64, fit: &FourierFit, norm: Norm) -> f64 {
    let width = fit.hi - fit.lo;
    let diffs = (0..EVAL_POINTS).map(|j| {
        let x = fit.lo + width * (j as f64 + 0.5) / EVAL_POINTS as f64;
        f(x) - fit.eval(x)
    });
    match norm {
        Norm::Sup => diffs.fold(0.0, |m, d| m.max(d.abs())),
        Norm::L2 => (diffs.map(|d| d * d).sum::<f64>() / EVAL_POINTS as f64).sqrt(),
    }
}

/// Truncation error for each grid size `1..=g_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    pub grids: Vec<usize>,
    pub errors: Vec<f64>,
    pub norm: Norm,
}

impl ErrorCurve {
    /// `grid,error` rows under a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("grid,error\n");
        for (g, e) in self.grids.iter().zip(&self.errors) {
            let _ = writeln!(out, "{g},{e:e}");
        }
        out
    }
}

/// Fits `f` once with `g_max` harmonics and measures every truncation.
pub fn convergence_scan(
    f: impl Fn(f64) -> f64,
    g_max: usize,
    norm: Norm,
    lo: f64,
    hi: f64,
) -> Result<ErrorCurve> {
    if g_max < 1 {
        return Err(Error::InvalidArgument("g_max must be at least 1".into()));
    }
    let m = DEFAULT_SAMPLES.max(4 * g_max + 4);
    let full = fit_function(&f, g_max, lo, hi, m)?;
    let grids: Vec<usize> = (1..=g_max).collect();
    let errors = grids
        .iter()
        .map(|&g| truncation_error(&f, &full.truncated(g), norm))
        .collect();
    Ok(ErrorCurve {
        grids,
        errors,
        norm,
    })
}

/// Functions on `[-π, π]` available to the scan tooling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinFunction {
    /// `sin 3x`
    Sin3x,
    /// `exp(sin x)`, analytic and periodic
    ExpSin,
    /// `x`, which jumps by 2π across the period boundary
    Sawtooth,
    /// `sign(x)` on `(-π, π)`, jump height 2
    Square,
}

impl BuiltinFunction {
    pub const ALL: [BuiltinFunction; 4] = [
        BuiltinFunction::Sin3x,
        BuiltinFunction::ExpSin,
        BuiltinFunction::Sawtooth,
        BuiltinFunction::Square,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BuiltinFunction::Sin3x => "sin3x",
            BuiltinFunction::ExpSin => "exp_sin",
            BuiltinFunction::Sawtooth => "sawtooth",
            BuiltinFunction::Square => "square",
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            BuiltinFunction::Sin3x => (3.0 * x).sin(),
            BuiltinFunction::ExpSin => x.sin().exp(),
            BuiltinFunction::Sawtooth => x,
            BuiltinFunction::Square => {
                if x > 0.0 && x < PI {
                    1.0
                } else if x < 0.0 && x > -PI {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Largest jump of the periodic extension (0 for continuous functions).
    pub fn jump_height(&self) -> f64 {
        match self {
            BuiltinFunction::Sin3x | BuiltinFunction::ExpSin => 0.0,
            BuiltinFunction::Sawtooth => 2.0 * PI,
            BuiltinFunction::Square => 2.0,
        }
    }

    pub fn scan(&self, g_max: usize, norm: Norm) -> Result<ErrorCurve> {
        convergence_scan(|x| self.eval(x), g_max, norm, -PI, PI)
    }
}

impl FromStr for BuiltinFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BuiltinFunction::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = BuiltinFunction::ALL.iter().map(|f| f.name()).collect();
                Error::InvalidArgument(format!(
                    "unknown function {s:?}; available: {}",
                    names.join(", ")
                ))
            })
    }
}
