//! B-spline bases via the Cox-de Boor recursion.
//!
//! Intervals are half-open `[t_i, t_{i+1})`, except that `x` equal to the
//! last knot is assigned to the last non-empty interval so that clamped
//! knot vectors keep the partition of unity on the closed span. Terms with a
//! zero-width denominator are dropped (the usual `0/0 = 0` convention).

use crate::error::{Error, Result};

/// Knot vector with `grid` uniform intervals on `[lo, hi]` and end knots
/// repeated `degree + 1` times. Yields `grid + degree` basis functions.
pub fn clamped_uniform_knots(grid: usize, degree: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut knots = Vec::with_capacity(grid + 2 * degree + 1);
    knots.extend(std::iter::repeat_n(lo, degree));
    for i in 0..=grid {
        if i == grid {
            knots.push(hi);
        } else {
            knots.push(lo + (hi - lo) * i as f64 / grid as f64);
        }
    }
    knots.extend(std::iter::repeat_n(hi, degree));
    knots
}

/// Number of degree-`degree` basis functions carried by `knots`.
pub fn basis_count(knots: &[f64], degree: usize) -> usize {
    knots.len().saturating_sub(degree + 1)
}

pub(crate) fn validate_knots(knots: &[f64], degree: usize) -> Result<()> {
    if knots.len() < degree + 2 {
        return Err(Error::InvalidArgument(format!(
            "{} knots cannot carry a degree-{degree} basis",
            knots.len()
        )));
    }
    if knots.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument("knots must be finite".into()));
    }
    if knots.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument(
            "knots must be non-decreasing".into(),
        ));
    }
    Ok(())
}

/// Value of the `i`-th B-spline basis of the given degree at `x`.
pub fn bspline_basis(x: f64, knots: &[f64], degree: usize, i: usize) -> Result<f64> {
    validate_knots(knots, degree)?;
    let count = basis_count(knots, degree);
    if i >= count {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: count,
        });
    }
    let mut values = vec![0.0; count];
    eval_bases(x, knots, degree, &mut values, None);
    Ok(values[i])
}

/// Evaluates every basis function at `x` into `values`, and optionally their
/// derivatives with respect to `x` into `derivs`. Both slices must hold
/// [`basis_count`] entries; knots are assumed validated.
pub fn eval_bases(
    x: f64,
    knots: &[f64],
    degree: usize,
    values: &mut [f64],
    derivs: Option<&mut [f64]>,
) {
    let m = knots.len();
    debug_assert_eq!(values.len(), basis_count(knots, degree));

    // row holds N_{i,p} for i in 0..m-1-p
    let mut row = vec![0.0; m - 1];
    let last = *knots.last().expect("validated knots");
    for i in 0..m - 1 {
        if knots[i] <= x && x < knots[i + 1] {
            row[i] = 1.0;
        }
    }
    if x == last {
        if let Some(i) = (0..m - 1).rev().find(|&i| knots[i] < knots[i + 1]) {
            row[i] = 1.0;
        }
    }

    let mut lower = Vec::new();
    for p in 1..=degree {
        if p == degree {
            lower.clear();
            lower.extend_from_slice(&row[..m - p]);
        }
        for i in 0..m - 1 - p {
            let left_den = knots[i + p] - knots[i];
            let right_den = knots[i + p + 1] - knots[i + 1];
            let mut v = 0.0;
            if left_den > 0.0 {
                v += (x - knots[i]) / left_den * row[i];
            }
            if right_den > 0.0 {
                v += (knots[i + p + 1] - x) / right_den * row[i + 1];
            }
            row[i] = v;
        }
    }
    values.copy_from_slice(&row[..values.len()]);

    if let Some(derivs) = derivs {
        if degree == 0 {
            derivs.iter_mut().for_each(|d| *d = 0.0);
            return;
        }
        let p = degree as f64;
        for (i, d) in derivs.iter_mut().enumerate() {
            let left_den = knots[i + degree] - knots[i];
            let right_den = knots[i + degree + 1] - knots[i + 1];
            let mut v = 0.0;
            if left_den > 0.0 {
                v += p / left_den * lower[i];
            }
            if right_den > 0.0 {
                v -= p / right_den * lower[i + 1];
            }
            *d = v;
        }
    }
}
