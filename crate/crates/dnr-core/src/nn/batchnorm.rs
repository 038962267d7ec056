use super::{cast, Scalar, Tensor4};
use crate::{Error, Result};

/// Per-channel batch normalization over (batch, height, width).
///
/// Running statistics start at (mean 0, var 1) and follow
/// running ← momentum·running + (1−momentum)·batch after every train-mode
/// forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchNorm<T> {
    pub channels: usize,
    pub gamma: Vec<T>,
    pub beta: Vec<T>,
    pub running_mean: Vec<T>,
    pub running_var: Vec<T>,
    pub momentum: T,
    pub eps: T,
}

/// Forward-pass cache consumed by the backward pass.
#[derive(Debug, Clone)]
pub struct BnCtx<T> {
    pub xhat: Tensor4<T>,
    pub inv_std: Vec<T>,
}

#[derive(Debug, Clone)]
pub struct BnGrads<T> {
    pub gamma: Vec<T>,
    pub beta: Vec<T>,
}

impl<T: Scalar> BatchNorm<T> {
    pub fn new(channels: usize) -> Self {
        BatchNorm {
            channels,
            gamma: vec![T::one(); channels],
            beta: vec![T::zero(); channels],
            running_mean: vec![T::zero(); channels],
            running_var: vec![T::one(); channels],
            momentum: cast(0.9),
            eps: cast(1e-5),
        }
    }

    fn check(&self, x: &Tensor4<T>) -> Result<()> {
        if x.c != self.channels {
            return Err(Error::DimensionMismatch(format!(
                "batch norm expects {} channels, got {}",
                self.channels, x.c
            )));
        }
        Ok(())
    }

    /// Normalize by batch statistics and update the running statistics.
    pub fn forward_train(&mut self, x: &Tensor4<T>) -> Result<(Tensor4<T>, BnCtx<T>)> {
        self.check(x)?;
        let count = x.b * x.h * x.w;
        if count < 2 {
            return Err(Error::InvalidInput(
                "batch norm train mode needs at least 2 values per channel".into(),
            ));
        }
        let m = cast::<T>(count as f64);
        let mut out = Tensor4::zeros(x.b, x.c, x.h, x.w);
        let mut xhat = Tensor4::zeros(x.b, x.c, x.h, x.w);
        let mut inv_std = vec![T::zero(); self.channels];
        for c in 0..self.channels {
            let mut sum = T::zero();
            for b in 0..x.b {
                for &v in x.plane(b, c) {
                    sum = sum + v;
                }
            }
            let mean = sum / m;
            let mut ss = T::zero();
            for b in 0..x.b {
                for &v in x.plane(b, c) {
                    let d = v - mean;
                    ss = ss + d * d;
                }
            }
            let var = ss / m;
            let is = T::one() / (var + self.eps).sqrt();
            inv_std[c] = is;
            let (gamma, beta) = (self.gamma[c], self.beta[c]);
            for b in 0..x.b {
                let xp = x.plane(b, c);
                let plane_len = xp.len();
                let start = (b * x.c + c) * plane_len;
                for (i, &v) in xp.iter().enumerate() {
                    let hat = (v - mean) * is;
                    xhat.data[start + i] = hat;
                    out.data[start + i] = gamma * hat + beta;
                }
            }
            self.running_mean[c] =
                self.momentum * self.running_mean[c] + (T::one() - self.momentum) * mean;
            self.running_var[c] =
                self.momentum * self.running_var[c] + (T::one() - self.momentum) * var;
        }
        Ok((out, BnCtx { xhat, inv_std }))
    }

    /// Normalize by running statistics only.
    pub fn forward_eval(&self, x: &Tensor4<T>) -> Result<Tensor4<T>> {
        self.check(x)?;
        if self.running_var.iter().all(|v| *v == T::zero()) {
            return Err(Error::InvalidInput(
                "batch norm running statistics are uninitialized (running_var = 0)".into(),
            ));
        }
        let mut out = Tensor4::zeros(x.b, x.c, x.h, x.w);
        for c in 0..self.channels {
            let is = T::one() / (self.running_var[c] + self.eps).sqrt();
            let (mean, gamma, beta) = (self.running_mean[c], self.gamma[c], self.beta[c]);
            for b in 0..x.b {
                let plane_len = x.plane_len();
                let start = (b * x.c + c) * plane_len;
                for (i, &v) in x.plane(b, c).iter().enumerate() {
                    out.data[start + i] = gamma * (v - mean) * is + beta;
                }
            }
        }
        Ok(out)
    }

    /// Exact gradients through the batch statistics.
    pub fn backward_train(
        &self,
        ctx: &BnCtx<T>,
        grad_out: &Tensor4<T>,
    ) -> Result<(Tensor4<T>, BnGrads<T>)> {
        if grad_out.shape() != ctx.xhat.shape() {
            return Err(Error::DimensionMismatch(
                "batch norm backward shape mismatch".into(),
            ));
        }
        let x = &ctx.xhat;
        let m = cast::<T>((x.b * x.h * x.w) as f64);
        let mut gx = Tensor4::zeros(x.b, x.c, x.h, x.w);
        let mut ggamma = vec![T::zero(); self.channels];
        let mut gbeta = vec![T::zero(); self.channels];
        for c in 0..self.channels {
            let mut sum_dy = T::zero();
            let mut sum_dy_xhat = T::zero();
            for b in 0..x.b {
                let plane_len = x.plane_len();
                let start = (b * x.c + c) * plane_len;
                for i in 0..plane_len {
                    let dy = grad_out.data[start + i];
                    sum_dy = sum_dy + dy;
                    sum_dy_xhat = sum_dy_xhat + dy * x.data[start + i];
                }
            }
            ggamma[c] = sum_dy_xhat;
            gbeta[c] = sum_dy;
            let scale = self.gamma[c] * ctx.inv_std[c];
            let mean_dy = sum_dy / m;
            let mean_dy_xhat = sum_dy_xhat / m;
            for b in 0..x.b {
                let plane_len = x.plane_len();
                let start = (b * x.c + c) * plane_len;
                for i in 0..plane_len {
                    let dy = grad_out.data[start + i];
                    let hat = x.data[start + i];
                    gx.data[start + i] = scale * (dy - mean_dy - hat * mean_dy_xhat);
                }
            }
        }
        Ok((
            gx,
            BnGrads {
                gamma: ggamma,
                beta: gbeta,
            },
        ))
    }
}
