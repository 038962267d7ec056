use rand::Rng;
use rayon::prelude::*;

use super::{cast, Scalar, Tensor4};
use crate::{Error, Result};

pub const KERNEL: usize = 3;
const PAD: isize = 1;

/// 3×3 convolution (cross-correlation), stride 1, zero padding 1, so the
/// spatial size is preserved. Weight layout: (out, in, 3, 3), row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvLayer<T> {
    pub in_channels: usize,
    pub out_channels: usize,
    pub weight: Vec<T>,
    pub bias: Vec<T>,
}

/// Gradients of a conv layer's parameters, congruent to weight/bias.
#[derive(Debug, Clone)]
pub struct ConvGrads<T> {
    pub weight: Vec<T>,
    pub bias: Vec<T>,
}

/// Valid output index range (lo, hi) such that 0 <= i + d < len.
#[inline]
fn shifted_range(len: usize, d: isize) -> (usize, usize) {
    let lo = if d < 0 { (-d) as usize } else { 0 };
    let hi = if d > 0 { len - d as usize } else { len };
    (lo, hi)
}

impl<T: Scalar> ConvLayer<T> {
    pub fn zeros(in_channels: usize, out_channels: usize) -> Self {
        ConvLayer {
            in_channels,
            out_channels,
            weight: vec![T::zero(); out_channels * in_channels * KERNEL * KERNEL],
            bias: vec![T::zero(); out_channels],
        }
    }

    /// Kaiming fan-in uniform init for LeakyReLU stacks, zero bias.
    pub fn kaiming(in_channels: usize, out_channels: usize, slope: f64, rng: &mut impl Rng) -> Self {
        let fan_in = (in_channels * KERNEL * KERNEL) as f64;
        let bound = (6.0 / ((1.0 + slope * slope) * fan_in)).sqrt();
        let weight = (0..out_channels * in_channels * KERNEL * KERNEL)
            .map(|_| cast::<T>(rng.gen_range(-bound..bound)))
            .collect();
        ConvLayer {
            in_channels,
            out_channels,
            weight,
            bias: vec![T::zero(); out_channels],
        }
    }

    #[inline]
    fn w(&self, oc: usize, ic: usize, ky: usize, kx: usize) -> T {
        self.weight[((oc * self.in_channels + ic) * KERNEL + ky) * KERNEL + kx]
    }

    pub fn forward(&self, x: &Tensor4<T>) -> Result<Tensor4<T>> {
        if x.c != self.in_channels {
            return Err(Error::DimensionMismatch(format!(
                "conv expects {} input channels, got {}",
                self.in_channels, x.c
            )));
        }
        let (bsz, h, w) = (x.b, x.h, x.w);
        let mut out = Tensor4::zeros(bsz, self.out_channels, h, w);
        let plane = h * w;
        out.data
            .par_chunks_mut(plane)
            .enumerate()
            .for_each(|(p, dst)| {
                let b = p / self.out_channels;
                let oc = p % self.out_channels;
                dst.fill(self.bias[oc]);
                for ic in 0..self.in_channels {
                    let xp = x.plane(b, ic);
                    for ky in 0..KERNEL {
                        let dy = ky as isize - PAD;
                        let (y_lo, y_hi) = shifted_range(h, dy);
                        for kx in 0..KERNEL {
                            let dx = kx as isize - PAD;
                            let (x_lo, x_hi) = shifted_range(w, dx);
                            let wv = self.w(oc, ic, ky, kx);
                            for y in y_lo..y_hi {
                                let src_row = ((y as isize + dy) as usize) * w;
                                let dst_row = y * w;
                                for xi in x_lo..x_hi {
                                    let src = xp[src_row + (xi as isize + dx) as usize];
                                    dst[dst_row + xi] = dst[dst_row + xi] + wv * src;
                                }
                            }
                        }
                    }
                }
            });
        Ok(out)
    }

    /// Exact gradients of the forward map: (grad_input, parameter grads).
    pub fn backward(
        &self,
        x: &Tensor4<T>,
        grad_out: &Tensor4<T>,
    ) -> Result<(Tensor4<T>, ConvGrads<T>)> {
        if x.c != self.in_channels
            || grad_out.c != self.out_channels
            || x.b != grad_out.b
            || x.h != grad_out.h
            || x.w != grad_out.w
        {
            return Err(Error::DimensionMismatch(
                "conv backward shapes inconsistent with forward".into(),
            ));
        }
        let (bsz, h, w) = (x.b, x.h, x.w);

        let grad_bias: Vec<T> = (0..self.out_channels)
            .map(|oc| {
                let mut acc = T::zero();
                for b in 0..bsz {
                    for &g in grad_out.plane(b, oc) {
                        acc = acc + g;
                    }
                }
                acc
            })
            .collect();

        let kk = self.in_channels * KERNEL * KERNEL;
        let mut grad_weight = vec![T::zero(); self.out_channels * kk];
        grad_weight
            .par_chunks_mut(kk)
            .enumerate()
            .for_each(|(oc, gw)| {
                for b in 0..bsz {
                    let gp = grad_out.plane(b, oc);
                    for ic in 0..self.in_channels {
                        let xp = x.plane(b, ic);
                        for ky in 0..KERNEL {
                            let dy = ky as isize - PAD;
                            let (y_lo, y_hi) = shifted_range(h, dy);
                            for kx in 0..KERNEL {
                                let dx = kx as isize - PAD;
                                let (x_lo, x_hi) = shifted_range(w, dx);
                                let mut acc = T::zero();
                                for y in y_lo..y_hi {
                                    let src_row = ((y as isize + dy) as usize) * w;
                                    let g_row = y * w;
                                    for xi in x_lo..x_hi {
                                        acc = acc
                                            + gp[g_row + xi]
                                                * xp[src_row + (xi as isize + dx) as usize];
                                    }
                                }
                                let idx = (ic * KERNEL + ky) * KERNEL + kx;
                                gw[idx] = gw[idx] + acc;
                            }
                        }
                    }
                }
            });

        let mut grad_x = Tensor4::zeros(bsz, self.in_channels, h, w);
        let plane = h * w;
        grad_x
            .data
            .par_chunks_mut(plane)
            .enumerate()
            .for_each(|(p, gx)| {
                let b = p / self.in_channels;
                let ic = p % self.in_channels;
                for oc in 0..self.out_channels {
                    let gp = grad_out.plane(b, oc);
                    for ky in 0..KERNEL {
                        let dy = ky as isize - PAD;
                        let (y_lo, y_hi) = shifted_range(h, dy);
                        for kx in 0..KERNEL {
                            let dx = kx as isize - PAD;
                            let (x_lo, x_hi) = shifted_range(w, dx);
                            let wv = self.w(oc, ic, ky, kx);
                            for y in y_lo..y_hi {
                                let in_row = ((y as isize + dy) as usize) * w;
                                let g_row = y * w;
                                for xi in x_lo..x_hi {
                                    let t = (xi as isize + dx) as usize;
                                    gx[in_row + t] = gx[in_row + t] + wv * gp[g_row + xi];
                                }
                            }
                        }
                    }
                }
            });

        Ok((
            grad_x,
            ConvGrads {
                weight: grad_weight,
                bias: grad_bias,
            },
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rand_tensor(b: usize, c: usize, h: usize, w: usize, rng: &mut impl Rng) -> Tensor4<f64> {
        Tensor4::from_data(
            b,
            c,
            h,
            w,
            (0..b * c * h * w).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn identity_kernel_reproduces_input() {
        let mut layer = ConvLayer::<f64>::zeros(1, 1);
        layer.weight[4] = 1.0; // center tap
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = rand_tensor(2, 1, 5, 5, &mut rng);
        let y = layer.forward(&x).unwrap();
        assert_eq!(x.data, y.data);
    }

    #[test]
    fn ones_kernel_spreads_a_one_hot() {
        let mut layer = ConvLayer::<f64>::zeros(1, 1);
        layer.weight.iter_mut().for_each(|w| *w = 1.0);
        let mut x = Tensor4::<f64>::zeros(1, 1, 5, 5);
        x.data[2 * 5 + 2] = 1.0;
        let y = layer.forward(&x).unwrap();
        for row in 0..5 {
            for col in 0..5 {
                let expected = if (1..=3).contains(&row) && (1..=3).contains(&col) {
                    1.0
                } else {
                    0.0
                };
                assert_eq!(y.data[row * 5 + col], expected, "({row},{col})");
            }
        }
    }

    #[test]
    fn zero_kernel_outputs_bias() {
        let mut layer = ConvLayer::<f64>::zeros(2, 3);
        layer.bias = vec![0.5, -1.0, 2.0];
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = rand_tensor(1, 2, 4, 4, &mut rng);
        let y = layer.forward(&x).unwrap();
        for oc in 0..3 {
            for &v in y.plane(0, oc) {
                assert_eq!(v, layer.bias[oc]);
            }
        }
    }

    #[test]
    fn zero_grad_out_gives_zero_grads() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let layer = ConvLayer::<f64>::kaiming(2, 2, 0.01, &mut rng);
        let x = rand_tensor(1, 2, 4, 4, &mut rng);
        let gout = Tensor4::<f64>::zeros(1, 2, 4, 4);
        let (gx, grads) = layer.backward(&x, &gout).unwrap();
        assert!(gx.data.iter().all(|&v| v == 0.0));
        assert!(grads.weight.iter().all(|&v| v == 0.0));
        assert!(grads.bias.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_pixel_case_matches_product_rule() {
        // 1×1 image: out = w_center·x + bias, all other taps see padding.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let layer = ConvLayer::<f64>::kaiming(1, 1, 0.01, &mut rng);
        let x = Tensor4::from_data(1, 1, 1, 1, vec![0.7]).unwrap();
        let gout = Tensor4::from_data(1, 1, 1, 1, vec![1.3]).unwrap();
        let (gx, grads) = layer.backward(&x, &gout).unwrap();
        assert!((gx.data[0] - layer.weight[4] * 1.3).abs() < 1e-15);
        assert!((grads.weight[4] - 0.7 * 1.3).abs() < 1e-15);
        assert!((grads.bias[0] - 1.3).abs() < 1e-15);
        for (i, &gw) in grads.weight.iter().enumerate() {
            if i != 4 {
                assert_eq!(gw, 0.0);
            }
        }
    }

    /// Scalar loss Σ out²/2 so that dL/dout = out; gradients then checked by
    /// central finite differences.
    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..5 {
            let layer = ConvLayer::<f64>::kaiming(2, 2, 0.01, &mut rng);
            let x = rand_tensor(1, 2, 8, 8, &mut rng);
            let out = layer.forward(&x).unwrap();
            let loss =
                |o: &Tensor4<f64>| -> f64 { o.data.iter().map(|v| v * v).sum::<f64>() / 2.0 };
            let gout = out.clone();
            let (gx, grads) = layer.backward(&x, &gout).unwrap();

            let check = |analytic: f64, fd: f64, what: &str| {
                let denom = analytic.abs().max(fd.abs()).max(1e-4);
                assert!(
                    (analytic - fd).abs() / denom <= 1e-6,
                    "trial {trial} {what}: {analytic} vs {fd}"
                );
            };

            for i in 0..x.data.len() {
                let h = 1e-5 * x.data[i].abs().max(1.0);
                let mut xp = x.clone();
                xp.data[i] += h;
                let mut xm = x.clone();
                xm.data[i] -= h;
                let fd = (loss(&layer.forward(&xp).unwrap()) - loss(&layer.forward(&xm).unwrap()))
                    / (2.0 * h);
                check(gx.data[i], fd, "input");
            }
            for i in 0..layer.weight.len() {
                let h = 1e-5 * layer.weight[i].abs().max(1.0);
                let mut lp = layer.clone();
                lp.weight[i] += h;
                let mut lm = layer.clone();
                lm.weight[i] -= h;
                let fd = (loss(&lp.forward(&x).unwrap()) - loss(&lm.forward(&x).unwrap()))
                    / (2.0 * h);
                check(grads.weight[i], fd, "weight");
            }
            for i in 0..layer.bias.len() {
                let h = 1e-5f64;
                let mut lp = layer.clone();
                lp.bias[i] += h;
                let mut lm = layer.clone();
                lm.bias[i] -= h;
                let fd = (loss(&lp.forward(&x).unwrap()) - loss(&lm.forward(&x).unwrap()))
                    / (2.0 * h);
                check(grads.bias[i], fd, "bias");
            }
        }
    }

    #[test]
    fn channel_mismatch_rejected() {
        let layer = ConvLayer::<f64>::zeros(2, 1);
        let x = Tensor4::<f64>::zeros(1, 3, 4, 4);
        assert!(layer.forward(&x).is_err());
    }
}
