use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::EmbeddingSet;
use crate::error::{Error, Result};

/// Class means of norm `sep`.
///
/// Two classes sit at `±sep·(1,…,1)/√d`. Otherwise the means are the first
/// `n_classes` Walsh sign patterns truncated to `d` coordinates, which are
/// pairwise distinct (and orthogonal when `d` is a power of two); when there
/// are more classes than patterns, seeded Gaussian directions are used.
fn class_means(d: usize, n_classes: usize, sep: f64, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let walsh = |c: usize| -> Vec<f64> {
        (0..d)
            .map(|i| {
                if (c & i).count_ones().is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect()
    };
    let directions: Vec<Vec<f64>> = if n_classes == 2 {
        let u = walsh(0);
        vec![u.clone(), u.iter().map(|v| -v).collect()]
    } else if n_classes <= d.next_power_of_two() {
        (0..n_classes).map(walsh).collect()
    } else {
        (0..n_classes)
            .map(|_| (0..d).map(|_| StandardNormal.sample(rng)).collect())
            .collect()
    };
    directions
        .into_iter()
        .map(|v: Vec<f64>| {
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let scale = if norm > 0.0 { sep / norm } else { 0.0 };
            v.into_iter().map(|x| x * scale).collect()
        })
        .collect()
}

/// Class-balanced isotropic unit-variance Gaussian blobs. Row `i` has label
/// `i % n_classes`.
pub fn synth_gaussian_clusters(
    n: usize,
    d: usize,
    n_classes: usize,
    sep: f64,
    seed: u64,
) -> Result<EmbeddingSet> {
    if n_classes == 0 || d == 0 {
        return Err(Error::InvalidArgument(
            "clusters need positive dimension and class count".into(),
        ));
    }
    if n < n_classes {
        return Err(Error::InvalidArgument(format!(
            "n ({n}) must be at least n_classes ({n_classes})"
        )));
    }
    if !sep.is_finite() || sep < 0.0 {
        return Err(Error::InvalidArgument(format!("invalid separation {sep}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let means = class_means(d, n_classes, sep, &mut rng);
    let mut x = Vec::with_capacity(n * d);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % n_classes;
        for &m in &means[c] {
            let noise: f64 = StandardNormal.sample(&mut rng);
            x.push(m + noise);
        }
        y.push(c);
    }
    EmbeddingSet::new("clusters", d, n_classes, x, y)
}

/// `x ~ U[-π, π]^d` with binary label `sin(freq·x_0) > 0`.
pub fn synth_periodic(n: usize, d: usize, freq: f64, seed: u64) -> Result<EmbeddingSet> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument(
            "periodic set needs n > 0 and d >= 1".into(),
        ));
    }
    if !freq.is_finite() {
        return Err(Error::InvalidArgument(format!("invalid frequency {freq}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::with_capacity(n * d);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let start = x.len();
        x.extend((0..d).map(|_| rng.gen_range(-PI..PI)));
        y.push(usize::from((freq * x[start]).sin() > 0.0));
    }
    EmbeddingSet::new("periodic", d, 2, x, y)
}
