//! Ordered Subset Expectation Maximization baseline and the radially
//! symmetric Butterworth post-filter.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::tomo::{Image, Sinogram, SystemMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OsemConfig {
    pub iterations: usize,
    pub subsets: usize,
    pub init_value: f64,
    pub eps: f64,
}

impl Default for OsemConfig {
    fn default() -> Self {
        OsemConfig {
            iterations: 8,
            subsets: 4,
            init_value: 1.0,
            eps: 1e-12,
        }
    }
}

/// OSEM with subsets assigned by view stride (view v belongs to subset
/// v mod S), processed in order s = 0..S−1, from a uniform start.
pub fn osem_reconstruct(y: &Sinogram, a: &SystemMatrix, cfg: &OsemConfig) -> Result<Image> {
    osem_reconstruct_with(y, a, cfg, |_, _| {})
}

/// OSEM from an explicit starting image (warm start).
pub fn osem_reconstruct_from(
    y: &Sinogram,
    a: &SystemMatrix,
    cfg: &OsemConfig,
    init: &Image,
) -> Result<Image> {
    if init.n != a.geometry.n {
        return Err(Error::DimensionMismatch(
            "initial image does not match geometry".into(),
        ));
    }
    if init.data.iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidInput(
            "OSEM initial image must be nonnegative".into(),
        ));
    }
    run_osem(y, a, cfg, init.data.clone(), |_, _| {})
}

/// OSEM variant invoking `callback(iteration, image)` after every full
/// iteration (iteration 0 reports the initial image).
pub fn osem_reconstruct_with<F>(
    y: &Sinogram,
    a: &SystemMatrix,
    cfg: &OsemConfig,
    callback: F,
) -> Result<Image>
where
    F: FnMut(usize, &Image),
{
    if !(cfg.init_value > 0.0) {
        return Err(Error::Config("OSEM init_value must be positive".into()));
    }
    run_osem(y, a, cfg, vec![cfg.init_value; a.n_pixels()], callback)
}

fn run_osem<F>(
    y: &Sinogram,
    a: &SystemMatrix,
    cfg: &OsemConfig,
    start: Vec<f64>,
    mut callback: F,
) -> Result<Image>
where
    F: FnMut(usize, &Image),
{
    if cfg.iterations == 0 {
        return Err(Error::Config("OSEM needs iterations >= 1".into()));
    }
    if cfg.subsets == 0 || cfg.subsets > a.geometry.views {
        return Err(Error::Config(format!(
            "OSEM subsets {} must be in 1..={}",
            cfg.subsets, a.geometry.views
        )));
    }
    if y.views != a.geometry.views || y.bins != a.geometry.bins {
        return Err(Error::DimensionMismatch(
            "sinogram does not match geometry".into(),
        ));
    }
    if y.data.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidInput(
            "sinogram counts must be finite and >= 0".into(),
        ));
    }

    let n_pixels = a.n_pixels();
    let bins = a.geometry.bins;
    // Ray indices and column sums per subset.
    let mut subset_rays: Vec<Vec<usize>> = vec![Vec::new(); cfg.subsets];
    for v in 0..a.geometry.views {
        let s = v % cfg.subsets;
        subset_rays[s].extend((v * bins)..((v + 1) * bins));
    }
    let subset_sums: Vec<Vec<f64>> = subset_rays
        .iter()
        .map(|rays| {
            let mut sums = vec![0.0; n_pixels];
            for &i in rays {
                for &(j, w) in &a.rows[i] {
                    sums[j as usize] += w;
                }
            }
            sums
        })
        .collect();

    let mut f = start;
    callback(
        0,
        &Image {
            n: a.geometry.n,
            data: f.clone(),
            pixel_size: 1.0,
        },
    );
    let mut update = vec![0.0; n_pixels];
    for iteration in 1..=cfg.iterations {
        for (rays, sums) in subset_rays.iter().zip(subset_sums.iter()) {
            update.iter_mut().for_each(|u| *u = 0.0);
            for &i in rays {
                let row = &a.rows[i];
                let projected: f64 = row.iter().map(|&(j, w)| w * f[j as usize]).sum();
                let ratio = y.data[i] / projected.max(cfg.eps);
                if ratio == 0.0 {
                    continue;
                }
                for &(j, w) in row {
                    update[j as usize] += w * ratio;
                }
            }
            for j in 0..n_pixels {
                if sums[j] > 0.0 {
                    f[j] *= update[j] / sums[j];
                }
            }
        }
        callback(
            iteration,
            &Image {
                n: a.geometry.n,
                data: f.clone(),
                pixel_size: 1.0,
            },
        );
    }
    Ok(Image {
        n: a.geometry.n,
        data: f,
        pixel_size: 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ButterworthConfig {
    pub order: usize,
    /// Cut-off frequency in cycles per pixel, in (0, 0.5].
    pub cutoff: f64,
}

impl Default for ButterworthConfig {
    fn default() -> Self {
        ButterworthConfig {
            order: 3,
            cutoff: 0.3,
        }
    }
}

/// Multiply the 2D DFT by H(ρ) = (1 + (ρ/f_c)^{2·order})⁻¹ with ρ the radial
/// frequency in cycles per pixel, then invert and keep the real part.
pub fn butterworth_filter(f: &Image, cfg: &ButterworthConfig) -> Result<Image> {
    if cfg.order == 0 {
        return Err(Error::Config("Butterworth order must be >= 1".into()));
    }
    if !(cfg.cutoff > 0.0 && cfg.cutoff <= 0.5) {
        return Err(Error::Config(format!(
            "Butterworth cutoff {} must be in (0, 0.5]",
            cfg.cutoff
        )));
    }
    let n = f.n;
    if n < 2 {
        return Err(Error::InvalidInput("filter needs n >= 2".into()));
    }

    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);

    let mut buf: Vec<Complex<f64>> = f
        .data
        .iter()
        .map(|&v| Complex::new(v, 0.0))
        .collect();

    let transform_rows = |buf: &mut Vec<Complex<f64>>, fft: &std::sync::Arc<dyn rustfft::Fft<f64>>| {
        for row in buf.chunks_mut(n) {
            fft.process(row);
        }
    };
    let transpose = |buf: &Vec<Complex<f64>>| -> Vec<Complex<f64>> {
        let mut out = vec![Complex::new(0.0, 0.0); n * n];
        for r in 0..n {
            for c in 0..n {
                out[c * n + r] = buf[r * n + c];
            }
        }
        out
    };

    transform_rows(&mut buf, &fwd);
    let mut buf = transpose(&buf);
    transform_rows(&mut buf, &fwd);
    // buf[kx*n + ky] now holds the 2D spectrum.
    let freq = |k: usize| -> f64 {
        let signed = if k <= n / 2 {
            k as f64
        } else {
            k as f64 - n as f64
        };
        signed / n as f64
    };
    for kx in 0..n {
        for ky in 0..n {
            let rho = freq(kx).hypot(freq(ky));
            let gain = 1.0 / (1.0 + (rho / cfg.cutoff).powi(2 * cfg.order as i32));
            buf[kx * n + ky] *= gain;
        }
    }
    transform_rows(&mut buf, &inv);
    let mut buf = transpose(&buf);
    transform_rows(&mut buf, &inv);

    let scale = 1.0 / (n * n) as f64;
    Ok(Image {
        n,
        data: buf.iter().map(|c| c.re * scale).collect(),
        pixel_size: f.pixel_size,
    })
}
