use super::{cast, Scalar};
use crate::{Error, Result};

/// Mean squared error and its gradient with respect to the prediction:
/// L = (1/N)·Σ(pᵢ − tᵢ)², ∇L = (2/N)(p − t).
pub fn mse_loss<T: Scalar>(pred: &[T], truth: &[T]) -> Result<(T, Vec<T>)> {
    if pred.len() != truth.len() || pred.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "mse inputs of length {} and {}",
            pred.len(),
            truth.len()
        )));
    }
    let n = cast::<T>(pred.len() as f64);
    let mut acc = T::zero();
    let grad: Vec<T> = pred
        .iter()
        .zip(truth)
        .map(|(&p, &t)| {
            let d = p - t;
            acc = acc + d * d;
            (cast::<T>(2.0) / n) * d
        })
        .collect();
    Ok((acc / n, grad))
}
