use super::{cast, Scalar};
use crate::{Error, Result};

/// Adam optimizer state over one flat parameter vector.
#[derive(Debug, Clone)]
pub struct AdamState<T> {
    pub t: u64,
    pub m: Vec<T>,
    pub v: Vec<T>,
    pub lr: T,
    pub beta1: T,
    pub beta2: T,
    pub eps: T,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(len: usize, lr: f64) -> Self {
        AdamState {
            t: 0,
            m: vec![T::zero(); len],
            v: vec![T::zero(); len],
            lr: cast(lr),
            beta1: cast(0.9),
            beta2: cast(0.999),
            eps: cast(1e-8),
        }
    }

    /// p ← p − lr·(m̂)/(√v̂ + eps) with bias-corrected moments.
    pub fn step(&mut self, params: &mut [T], grads: &[T]) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::DimensionMismatch(format!(
                "adam state holds {} parameters, got {}/{}",
                self.m.len(),
                params.len(),
                grads.len()
            )));
        }
        self.t += 1;
        let t = self.t as i32;
        let one = T::one();
        let bc1 = one - self.beta1.powi(t);
        let bc2 = one - self.beta2.powi(t);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = self.beta1 * self.m[i] + (one - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (one - self.beta2) * g * g;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] = params[i] - self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_parameters_unchanged() {
        let mut state = AdamState::<f64>::new(3, 0.001);
        let mut p = vec![1.0, -2.0, 0.5];
        state.step(&mut p, &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(p, vec![1.0, -2.0, 0.5]);
    }

    #[test]
    fn first_step_matches_closed_form() {
        // Fresh state, g = 1: m̂ = v̂ = 1, Δp = −lr/(1 + eps).
        let mut state = AdamState::<f64>::new(1, 0.001);
        let mut p = vec![0.0];
        state.step(&mut p, &[1.0]).unwrap();
        let expected = -0.001 / (1.0 + 1e-8);
        assert!((p[0] - expected).abs() < 1e-15, "{}", p[0]);
        assert!((p[0] + 0.000999999990).abs() < 1e-12);
    }

    /// Independent scalar reference for repeated unit gradients.
    fn scalar_adam_reference(steps: usize, lr: f64) -> f64 {
        let (b1, b2, eps): (f64, f64, f64) = (0.9, 0.999, 1e-8);
        let (mut m, mut v, mut p) = (0.0, 0.0, 0.0);
        for t in 1..=steps {
            m = b1 * m + (1.0 - b1) * 1.0;
            v = b2 * v + (1.0 - b2) * 1.0;
            let m_hat = m / (1.0 - b1.powi(t as i32));
            let v_hat = v / (1.0 - b2.powi(t as i32));
            p -= lr * m_hat / (v_hat.sqrt() + eps);
        }
        p
    }

    #[test]
    fn two_steps_match_scalar_reference() {
        let mut state = AdamState::<f64>::new(1, 0.001);
        let mut p = vec![0.0];
        state.step(&mut p, &[1.0]).unwrap();
        state.step(&mut p, &[1.0]).unwrap();
        let reference = scalar_adam_reference(2, 0.001);
        assert!((p[0] - reference).abs() < 1e-12, "{} vs {reference}", p[0]);
    }

    #[test]
    fn length_mismatch_rejected() {
        let mut state = AdamState::<f64>::new(2, 0.001);
        let mut p = vec![0.0; 3];
        assert!(state.step(&mut p, &[0.0; 3]).is_err());
    }
}
