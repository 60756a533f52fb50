//! Scalar activations used by the heads.

/// Logistic sigmoid, evaluated without overflow for large `|x|`.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `x / (1 + e^-x)`, the residual basis of the spline KAN edge.
pub fn silu(x: f64) -> f64 {
    x * sigmoid(x)
}

/// d/dx silu(x) = σ(x)·(1 + x·(1 − σ(x))).
pub fn silu_derivative(x: f64) -> f64 {
    let s = sigmoid(x);
    s * (1.0 + x * (1.0 - s))
}
