use crate::error::{Error, Result};

/// Probabilities below this are clamped before taking the log.
pub const LOG_PROB_FLOOR: f64 = 1e-12;

/// Numerically stable softmax (the maximum is subtracted first).
pub fn softmax(z: &[f64]) -> Result<Vec<f64>> {
    if z.is_empty() {
        return Err(Error::InvalidArgument("softmax of an empty vector".into()));
    }
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = out.iter().sum();
    out.iter_mut().for_each(|v| *v /= sum);
    Ok(out)
}

/// `-ln(probs[label])`, with the probability floored at [`LOG_PROB_FLOOR`].
pub fn cross_entropy(probs: &[f64], label: usize) -> Result<f64> {
    let p = probs.get(label).ok_or(Error::IndexOutOfRange {
        index: label,
        len: probs.len(),
    })?;
    Ok(-p.max(LOG_PROB_FLOOR).ln())
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn uniform_softmax() {
        let p = softmax(&[0.0, 0.0, 0.0]).unwrap();
        assert!(p.iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn softmax_does_not_overflow() {
        let p = softmax(&[1000.0, 0.0]).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-15);
        assert!(p[1] >= 0.0 && p[1] < 1e-300);
    }

    #[test]
    fn softmax_one_two_three() {
        // e^k / (e + e^2 + e^3)
        let e = std::f64::consts::E;
        let sum = e + e * e + e * e * e;
        let p = softmax(&[1.0, 2.0, 3.0]).unwrap();
        let expected = [e / sum, e * e / sum, e * e * e / sum];
        for (a, b) in p.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((p[0] - 0.090_030_573_170_380_46).abs() < 1e-15);
        assert!((p[1] - 0.244_728_471_054_797_64).abs() < 1e-15);
        assert!((p[2] - 0.665_240_955_774_821_9).abs() < 1e-15);
    }

    #[test]
    fn softmax_empty_is_an_error() {
        assert!(softmax(&[]).is_err());
    }

    #[test]
    fn cross_entropy_examples() {
        assert_eq!(cross_entropy(&[0.0, 1.0, 0.0], 1).unwrap(), 0.0);
        assert!((cross_entropy(&[0.25; 4], 2).unwrap() - 4f64.ln()).abs() < 1e-15);
        assert!((cross_entropy(&[0.25; 4], 2).unwrap() - 1.386_294_361_119_890_6).abs() < 1e-15);
        assert!(
            (cross_entropy(&[0.7, 0.2, 0.1], 1).unwrap() - 1.609_437_912_434_100_3).abs() < 1e-15
        );
        assert!((cross_entropy(&[1.0, 0.0], 1).unwrap() - 1e12f64.ln()).abs() < 1e-12);
        assert!(cross_entropy(&[1.0], 1).is_err());
    }

    proptest! {
        #[test]
        fn softmax_sums_to_one(z in prop::collection::vec(-1e3f64..1e3, 1..16)) {
            let p = softmax(&z).unwrap();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(p.iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }
}
