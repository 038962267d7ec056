use super::{Scalar, Tensor4};

/// Elementwise x if x > 0 else slope·x.
pub fn leaky_relu<T: Scalar>(x: &Tensor4<T>, slope: T) -> Tensor4<T> {
    Tensor4 {
        b: x.b,
        c: x.c,
        h: x.h,
        w: x.w,
        data: x
            .data
            .iter()
            .map(|&v| if v > T::zero() { v } else { slope * v })
            .collect(),
    }
}

/// Derivative 1 where x > 0, slope otherwise (slope at exactly 0).
pub fn leaky_relu_backward<T: Scalar>(
    x: &Tensor4<T>,
    grad_out: &Tensor4<T>,
    slope: T,
) -> Tensor4<T> {
    debug_assert_eq!(x.shape(), grad_out.shape());
    Tensor4 {
        b: x.b,
        c: x.c,
        h: x.h,
        w: x.w,
        data: x
            .data
            .iter()
            .zip(&grad_out.data)
            .map(|(&v, &g)| if v > T::zero() { g } else { slope * g })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonnegative_input_is_identity() {
        let x = Tensor4::from_data(1, 1, 1, 4, vec![0.0, 0.5, 1.0, 7.0]).unwrap();
        let y = leaky_relu(&x, 0.01);
        assert_eq!(x.data, y.data);
    }

    #[test]
    fn negative_values_scaled_by_slope() {
        let x = Tensor4::from_data(1, 1, 1, 2, vec![-2.0f64, 3.0]).unwrap();
        let y = leaky_relu(&x, 0.01);
        assert!((y.data[0] + 0.02).abs() < 1e-15);
        assert_eq!(y.data[1], 3.0);
    }

    #[test]
    fn backward_matches_finite_differences_away_from_zero() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let data: Vec<f64> = (0..64)
            .map(|_| {
                // keep |x| > 1e-3 so central differences straddle no kink
                let v: f64 = rng.gen_range(0.01..1.0);
                if rng.gen_bool(0.5) {
                    v
                } else {
                    -v
                }
            })
            .collect();
        let x = Tensor4::from_data(1, 1, 8, 8, data).unwrap();
        let slope = 0.01;
        let out = leaky_relu(&x, slope);
        let g = leaky_relu_backward(&x, &out, slope); // dL/dx for L = Σ out²/2
        let scale = g.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..x.data.len() {
            let h = 1e-6 * x.data[i].abs().max(1e-3);
            let mut xp = x.clone();
            xp.data[i] += h;
            let mut xm = x.clone();
            xm.data[i] -= h;
            let loss = |t: &Tensor4<f64>| -> f64 {
                leaky_relu(t, slope).data.iter().map(|v| v * v).sum::<f64>() / 2.0
            };
            let fd = (loss(&xp) - loss(&xm)) / (2.0 * h);
            let denom = g.data[i].abs().max(fd.abs()).max(scale);
            assert!((g.data[i] - fd).abs() / denom <= 1e-6);
        }
    }

    #[test]
    fn derivative_at_zero_is_slope() {
        let x = Tensor4::from_data(1, 1, 1, 1, vec![0.0]).unwrap();
        let gout = Tensor4::from_data(1, 1, 1, 1, vec![1.0]).unwrap();
        let g = leaky_relu_backward(&x, &gout, 0.01);
        assert_eq!(g.data[0], 0.01);
    }
}
