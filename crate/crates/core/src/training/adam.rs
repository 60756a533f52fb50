use super::TrainConfig;
use crate::error::{Error, Result};
use crate::heads::{GradientBundle, Head};

/// First and second moment estimates, congruent with a head's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub t: u64,
}

impl AdamState {
    pub fn new(head: &Head) -> Self {
        let zeros: Vec<Vec<f64>> = head
            .parameters()
            .iter()
            .map(|p| vec![0.0; p.data.len()])
            .collect();
        AdamState {
            m: zeros.clone(),
            v: zeros,
            t: 0,
        }
    }
}

/// One bias-corrected Adam update of every parameter of `head`.
///
/// Gradients are checked before anything is modified: a non-finite entry
/// leaves head and state untouched.
pub fn adam_step(
    head: &mut Head,
    grads: &GradientBundle,
    state: &mut AdamState,
    cfg: &TrainConfig,
) -> Result<()> {
    let params = head.parameters_mut();
    if params.len() != grads.tensors.len() || params.len() != state.m.len() {
        return Err(Error::DimensionMismatch {
            what: "parameter tensors",
            expected: params.len(),
            got: grads.tensors.len(),
        });
    }
    for ((p, g), m) in params.iter().zip(&grads.tensors).zip(&state.m) {
        if p.data.len() != g.data.len() || p.data.len() != m.len() || p.name != g.name {
            return Err(Error::DimensionMismatch {
                what: p.name,
                expected: p.data.len(),
                got: g.data.len(),
            });
        }
        if g.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteGradient { tensor: g.name });
        }
    }

    state.t += 1;
    let t = state.t as i32;
    let (b1, b2) = (cfg.beta1, cfg.beta2);
    let correct1 = 1.0 - b1.powi(t);
    let correct2 = 1.0 - b2.powi(t);
    for (((p, g), m), v) in params
        .into_iter()
        .zip(&grads.tensors)
        .zip(&mut state.m)
        .zip(&mut state.v)
    {
        for k in 0..p.data.len() {
            let gk = g.data[k];
            m[k] = b1 * m[k] + (1.0 - b1) * gk;
            v[k] = b2 * v[k] + (1.0 - b2) * gk * gk;
            let m_hat = m[k] / correct1;
            let v_hat = v[k] / correct2;
            p.data[k] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
        }
    }
    Ok(())
}
