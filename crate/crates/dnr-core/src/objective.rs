//! Poisson data-fidelity term U(F|Y), its analytic gradient, and the exact
//! Jacobian action of the gradient — the fixed linear operator inside every
//! unrolled reconstruction block.
//!
//! The image is clamped at zero before projection (Poisson means must be
//! nonnegative; network iterates may be negative), and projected values are
//! guarded by `eps_y` where the data term would otherwise divide by zero.

use crate::tomo::{back_project, forward_project, Image, Sinogram, SystemMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveConfig {
    /// Denominator guard replacing zero ray sums.
    pub eps_y: f64,
    /// Include the ln(yᵢ!) term, constant in F.
    pub include_constant: bool,
}

impl Default for ObjectiveConfig {
    fn default() -> Self {
        ObjectiveConfig {
            eps_y: 1e-12,
            include_constant: true,
        }
    }
}

fn check_counts(y: &Sinogram) -> Result<()> {
    if y.data.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidInput(
            "sinogram counts must be finite and >= 0".into(),
        ));
    }
    Ok(())
}

fn clamped(f: &Image) -> Image {
    Image {
        n: f.n,
        data: f.data.iter().map(|&v| v.max(0.0)).collect(),
        pixel_size: f.pixel_size,
    }
}

/// U = Σᵢ (ỹᵢ − yᵢ ln max(ỹᵢ, eps) + ln yᵢ!), with 0·ln(·) = 0 when yᵢ = 0.
pub fn neg_loglik(f: &Image, y: &Sinogram, a: &SystemMatrix, cfg: &ObjectiveConfig) -> Result<f64> {
    check_counts(y)?;
    let projected = forward_project(a, &clamped(f))?;
    if projected.views != y.views || projected.bins != y.bins {
        return Err(Error::DimensionMismatch(
            "sinogram does not match geometry".into(),
        ));
    }
    let mut total = 0.0;
    for (&yt, &yi) in projected.data.iter().zip(y.data.iter()) {
        total += yt;
        if yi > 0.0 {
            total -= yi * yt.max(cfg.eps_y).ln();
        }
        if cfg.include_constant {
            total += libm::lgamma(yi + 1.0);
        }
    }
    Ok(total)
}

/// ∇Uⱼ = Σᵢ Aᵢⱼ (1 − yᵢ / max(ỹᵢ, eps)) = col_sums − Aᵀ(y ⊘ ỹ).
///
/// The caller's image is not modified; clamping applies only to the ỹ
/// computation.
pub fn grad_neg_loglik(
    f: &Image,
    y: &Sinogram,
    a: &SystemMatrix,
    cfg: &ObjectiveConfig,
) -> Result<Image> {
    check_counts(y)?;
    let projected = forward_project(a, &clamped(f))?;
    if projected.views != y.views || projected.bins != y.bins {
        return Err(Error::DimensionMismatch(
            "sinogram does not match geometry".into(),
        ));
    }
    let ratio = Sinogram {
        views: y.views,
        bins: y.bins,
        data: y
            .data
            .iter()
            .zip(projected.data.iter())
            .map(|(&yi, &yt)| yi / yt.max(cfg.eps_y))
            .collect(),
    };
    let bp = back_project(a, &ratio)?;
    Ok(Image {
        n: f.n,
        data: a
            .col_sums
            .iter()
            .zip(bp.data.iter())
            .map(|(&s, &b)| s - b)
            .collect(),
        pixel_size: f.pixel_size,
    })
}

/// The unrolled blocks consume −∇U directly.
pub fn neg_grad(
    f: &Image,
    y: &Sinogram,
    a: &SystemMatrix,
    cfg: &ObjectiveConfig,
) -> Result<Image> {
    let mut g = grad_neg_loglik(f, y, a, cfg)?;
    for v in &mut g.data {
        *v = -*v;
    }
    Ok(g)
}

/// Vector-Jacobian product of the operator f ↦ −∇U(f): for upstream weights
/// w this is −Aᵀ diag(yᵢ/ỹᵢ²)·A·w, masked by the zero-clamp on f and by the
/// eps guard on ỹ.
pub fn neg_grad_vjp(
    f: &Image,
    y: &Sinogram,
    a: &SystemMatrix,
    cfg: &ObjectiveConfig,
    w: &Image,
) -> Result<Image> {
    check_counts(y)?;
    if w.n != f.n {
        return Err(Error::DimensionMismatch(
            "weight image does not match input image".into(),
        ));
    }
    let projected = forward_project(a, &clamped(f))?;
    let aw = forward_project(a, w)?;
    let scaled = Sinogram {
        views: y.views,
        bins: y.bins,
        data: y
            .data
            .iter()
            .zip(projected.data.iter())
            .zip(aw.data.iter())
            .map(|((&yi, &yt), &t)| {
                if yt > cfg.eps_y {
                    yi / (yt * yt) * t
                } else {
                    0.0
                }
            })
            .collect(),
    };
    let bp = back_project(a, &scaled)?;
    Ok(Image {
        n: f.n,
        data: bp
            .data
            .iter()
            .zip(f.data.iter())
            .map(|(&b, &fj)| if fj > 0.0 { -b } else { 0.0 })
            .collect(),
        pixel_size: f.pixel_size,
    })
}
