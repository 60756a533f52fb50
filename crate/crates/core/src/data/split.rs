use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::EmbeddingSet;
use crate::error::{Error, Result};

/// Per-class allocation of `count` samples over `fractions` by largest
/// remainder. Remainder ties are ordered by `(split + rotate) % 3`, so
/// consecutive classes alternate which split receives the spare sample.
fn allocate(count: usize, fractions: &[f64; 3], rotate: usize) -> [usize; 3] {
    let exact: Vec<f64> = fractions.iter().map(|f| f * count as f64).collect();
    let mut alloc = [0usize; 3];
    for (a, e) in alloc.iter_mut().zip(&exact) {
        *a = e.floor() as usize;
    }
    let mut left = count - alloc.iter().sum::<usize>().min(count);
    let mut order: Vec<usize> = (0..3).filter(|&s| fractions[s] > 0.0).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (exact[a] - exact[a].floor(), exact[b] - exact[b].floor());
        rb.total_cmp(&ra)
            .then(((a + rotate) % 3).cmp(&((b + rotate) % 3)))
    });
    for &s in order.iter().cycle() {
        if left == 0 {
            break;
        }
        alloc[s] += 1;
        left -= 1;
    }
    alloc
}

/// Splits `set` into (train, val, test) with per-class proportional counts.
///
/// Each class's rows are shuffled with a seeded RNG before allocation; every
/// split keeps its rows in their original order. Splits with fraction 0 are
/// empty. Fails if a class has fewer rows than there are non-empty splits.
pub fn stratified_split(
    set: &EmbeddingSet,
    fractions: [f64; 3],
    seed: u64,
) -> Result<(EmbeddingSet, EmbeddingSet, EmbeddingSet)> {
    if fractions.iter().any(|f| !f.is_finite() || *f < 0.0) {
        return Err(Error::InvalidArgument(format!(
            "split fractions must be non-negative, got {fractions:?}"
        )));
    }
    let total: f64 = fractions.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "split fractions must sum to 1, got {total}"
        )));
    }
    let active = fractions.iter().filter(|&&f| f > 0.0).count();

    let mut by_class = vec![Vec::new(); set.n_classes()];
    for (i, &l) in set.labels().iter().enumerate() {
        by_class[l].push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parts: [Vec<usize>; 3] = Default::default();
    for (class, mut rows) in by_class.into_iter().enumerate() {
        if rows.is_empty() {
            continue;
        }
        if rows.len() < active {
            return Err(Error::InvalidArgument(format!(
                "class {class} has {} samples, fewer than the {active} splits",
                rows.len()
            )));
        }
        rows.shuffle(&mut rng);
        let alloc = allocate(rows.len(), &fractions, class);
        let mut start = 0;
        for (part, n) in parts.iter_mut().zip(alloc) {
            part.extend_from_slice(&rows[start..start + n]);
            start += n;
        }
    }
    for part in &mut parts {
        part.sort_unstable();
    }
    let base = set.name();
    let name = |suffix: &str| {
        if base.is_empty() {
            suffix.to_string()
        } else {
            format!("{base}-{suffix}")
        }
    };
    Ok((
        set.subset(&parts[0], name("train")),
        set.subset(&parts[1], name("val")),
        set.subset(&parts[2], name("test")),
    ))
}
