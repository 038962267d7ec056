//! The unrolled Newton reconstruction network: a fixed number of unit blocks,
//! each pairing the analytic Poisson-likelihood descent direction with two
//! trainable ResNet operators (a learned regularizer and a learned Newton
//! direction estimator), trained end to end.

mod checkpoint;
mod dataset;
mod train;

pub use checkpoint::{load_model, save_model};
pub use dataset::{generate_dataset, Dataset, Sample};
pub use train::{train, EpochStats, TrainConfig, TrainingReport};

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::nn::{Mode, ResNetCtx, ResNetGrads, ResNetOperator, Scalar, Tensor4};
use crate::objective::{neg_grad, neg_grad_vjp, ObjectiveConfig};
use crate::tomo::{Image, Sinogram, SystemMatrix};
use crate::{Error, Result};

/// One unrolled Newton iteration: f ← f + B(−∇U(f|y) + A(f)) with trainable
/// operators A (regularizer) and B (Newton direction estimator).
#[derive(Debug, Clone)]
pub struct UnitBlock<T> {
    pub reg_net: ResNetOperator<T>,
    pub newton_net: ResNetOperator<T>,
}

/// The full unrolled model. Blocks share one system matrix; weights are not
/// shared across blocks.
#[derive(Debug, Clone)]
pub struct DnrNet<T> {
    pub blocks: Vec<UnitBlock<T>>,
    pub matrix: Arc<SystemMatrix>,
    pub objective: ObjectiveConfig,
    pub slope: f64,
}

/// Per-block cache from a training forward pass.
pub struct BlockCtx<T> {
    f_in: Tensor4<T>,
    reg_ctx: ResNetCtx<T>,
    newton_ctx: ResNetCtx<T>,
}

/// Parameter gradients, mirroring the block structure.
pub struct BlockGrads<T> {
    pub reg: ResNetGrads<T>,
    pub newton: ResNetGrads<T>,
}

pub struct DnrGrads<T> {
    pub blocks: Vec<BlockGrads<T>>,
}

impl<T: Scalar> DnrNet<T> {
    /// Seeded Kaiming initialization of all blocks.
    pub fn new(
        matrix: Arc<SystemMatrix>,
        n_blocks: usize,
        channels: usize,
        slope: f64,
        seed: u64,
    ) -> Result<Self> {
        if n_blocks == 0 || channels == 0 {
            return Err(Error::Config(
                "model needs n_blocks >= 1 and channels >= 1".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let blocks = (0..n_blocks)
            .map(|_| UnitBlock {
                reg_net: ResNetOperator::new(channels, slope, &mut rng),
                newton_net: ResNetOperator::new(channels, slope, &mut rng),
            })
            .collect();
        Ok(DnrNet {
            blocks,
            matrix,
            objective: ObjectiveConfig::default(),
            slope,
        })
    }

    pub fn n(&self) -> usize {
        self.matrix.geometry.n
    }

    pub fn channels(&self) -> usize {
        self.blocks[0].reg_net.channels()
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    fn check_batch(&self, f: &Tensor4<T>, ys: &[&Sinogram]) -> Result<()> {
        let n = self.n();
        if f.c != 1 || f.h != n || f.w != n {
            return Err(Error::DimensionMismatch(format!(
                "batch tensor {:?} does not match model grid {n}",
                f.shape()
            )));
        }
        if f.b != ys.len() {
            return Err(Error::DimensionMismatch(format!(
                "batch size {} != sinogram count {}",
                f.b,
                ys.len()
            )));
        }
        for y in ys {
            if y.views != self.matrix.geometry.views || y.bins != self.matrix.geometry.bins {
                return Err(Error::GeometryMismatch(format!(
                    "sinogram {}x{} does not match geometry {}x{}",
                    y.views, y.bins, self.matrix.geometry.views, self.matrix.geometry.bins
                )));
            }
        }
        Ok(())
    }

    /// −∇U per batch sample, evaluated in f64 and cast back to T.
    fn neg_grad_batch(&self, f: &Tensor4<T>, ys: &[&Sinogram]) -> Result<Tensor4<T>> {
        let mut out = Tensor4::zeros(f.b, 1, f.h, f.w);
        for b in 0..f.b {
            let img = plane_to_image(f, b);
            let g = neg_grad(&img, ys[b], &self.matrix, &self.objective)?;
            let dst = out.plane_mut(b, 0);
            for (d, &v) in dst.iter_mut().zip(&g.data) {
                *d = T::from(v).expect("finite cast");
            }
        }
        Ok(out)
    }

    /// VJP of −∇U per batch sample for upstream weights `w`.
    fn neg_grad_vjp_batch(
        &self,
        f: &Tensor4<T>,
        ys: &[&Sinogram],
        w: &Tensor4<T>,
    ) -> Result<Tensor4<T>> {
        let mut out = Tensor4::zeros(f.b, 1, f.h, f.w);
        for b in 0..f.b {
            let img = plane_to_image(f, b);
            let wimg = plane_to_image(w, b);
            let g = neg_grad_vjp(&img, ys[b], &self.matrix, &self.objective, &wimg)?;
            let dst = out.plane_mut(b, 0);
            for (d, &v) in dst.iter_mut().zip(&g.data) {
                *d = T::from(v).expect("finite cast");
            }
        }
        Ok(out)
    }

    /// Train-mode forward over a batch; returns per-block caches for backward.
    pub fn forward_train(
        &mut self,
        f0: &Tensor4<T>,
        ys: &[&Sinogram],
    ) -> Result<(Tensor4<T>, Vec<BlockCtx<T>>)> {
        self.check_batch(f0, ys)?;
        let mut f = f0.clone();
        let mut ctxs = Vec::with_capacity(self.blocks.len());
        for i in 0..self.blocks.len() {
            let g = self.neg_grad_batch(&f, ys)?;
            let block = &mut self.blocks[i];
            let (r, reg_ctx) = block.reg_net.forward_train(&f)?;
            let sum_in = g.add(&r)?;
            let (d, newton_ctx) = block.newton_net.forward_train(&sum_in)?;
            let f_out = f.add(&d)?;
            ctxs.push(BlockCtx {
                f_in: f,
                reg_ctx,
                newton_ctx,
            });
            f = f_out;
        }
        Ok((f, ctxs))
    }

    /// Eval-mode forward over a batch (running BN statistics, no caches).
    pub fn forward_eval(&self, f0: &Tensor4<T>, ys: &[&Sinogram]) -> Result<Tensor4<T>> {
        self.check_batch(f0, ys)?;
        let mut f = f0.clone();
        for block in &self.blocks {
            let g = self.neg_grad_batch(&f, ys)?;
            let r = block.reg_net.forward_eval(&f)?;
            let sum_in = g.add(&r)?;
            let d = block.newton_net.forward_eval(&sum_in)?;
            f = f.add(&d)?;
        }
        Ok(f)
    }

    /// Backpropagate through every block including the linear operator.
    ///
    /// Returns the gradient with respect to the initial image and all
    /// parameter gradients.
    pub fn backward(
        &self,
        ctxs: &[BlockCtx<T>],
        ys: &[&Sinogram],
        grad_out: &Tensor4<T>,
    ) -> Result<(Tensor4<T>, DnrGrads<T>)> {
        if ctxs.len() != self.blocks.len() {
            return Err(Error::DimensionMismatch(
                "context count does not match block count".into(),
            ));
        }
        let mut grad = grad_out.clone();
        let mut block_grads: Vec<Option<BlockGrads<T>>> =
            (0..self.blocks.len()).map(|_| None).collect();
        for (i, block) in self.blocks.iter().enumerate().rev() {
            let ctx = &ctxs[i];
            let (g_sum_in, newton_grads) = block.newton_net.backward(&ctx.newton_ctx, &grad)?;
            let (g_f_reg, reg_grads) = block.reg_net.backward(&ctx.reg_ctx, &g_sum_in)?;
            // Chain through −∇U's dependence on f_in, plus the additive skip
            // path f_out = f_in + d.
            let g_f_obj = self.neg_grad_vjp_batch(&ctx.f_in, ys, &g_sum_in)?;
            let mut g_f = grad;
            g_f.add_assign(&g_f_reg)?;
            g_f.add_assign(&g_f_obj)?;
            block_grads[i] = Some(BlockGrads {
                reg: reg_grads,
                newton: newton_grads,
            });
            grad = g_f;
        }
        Ok((
            grad,
            DnrGrads {
                blocks: block_grads.into_iter().map(|g| g.unwrap()).collect(),
            },
        ))
    }

    /// Flat trainable-parameter count.
    pub fn param_count(&self) -> usize {
        let mut count = 0;
        for block in &self.blocks {
            for net in [&block.reg_net, &block.newton_net] {
                net.for_each_param(&mut |s| count += s.len());
            }
        }
        count
    }

    /// Copy all trainable parameters into one flat vector (canonical order:
    /// per block, regularizer net then Newton net).
    pub fn gather_params(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.param_count());
        for block in &self.blocks {
            for net in [&block.reg_net, &block.newton_net] {
                net.for_each_param(&mut |s| out.extend_from_slice(s));
            }
        }
        out
    }

    pub fn set_params(&mut self, values: &[T]) -> Result<()> {
        if values.len() != self.param_count() {
            return Err(Error::DimensionMismatch(format!(
                "parameter vector length {} != {}",
                values.len(),
                self.param_count()
            )));
        }
        let mut offset = 0;
        for block in &mut self.blocks {
            for net in [&mut block.reg_net, &mut block.newton_net] {
                net.for_each_param_mut(&mut |s| {
                    s.copy_from_slice(&values[offset..offset + s.len()]);
                    offset += s.len();
                });
            }
        }
        Ok(())
    }
}

impl<T: Scalar> DnrGrads<T> {
    /// Flatten in the same canonical order as `DnrNet::gather_params`.
    pub fn flatten(&self) -> Vec<T> {
        let mut out = Vec::new();
        for block in &self.blocks {
            for grads in [&block.reg, &block.newton] {
                grads.for_each(&mut |s| out.extend_from_slice(s));
            }
        }
        out
    }
}

/// Count-matched uniform activity level fed through the linear operator:
/// F₀ = −∇U(c·1 | y) with c = Σy / Σⱼ col_sums (c = 1 when Σy = 0).
pub fn init_input(y: &Sinogram, a: &SystemMatrix) -> Result<Image> {
    if y.views != a.geometry.views || y.bins != a.geometry.bins {
        return Err(Error::GeometryMismatch(
            "sinogram does not match geometry".into(),
        ));
    }
    let sens: f64 = a.col_sums.iter().sum();
    if !(sens > 0.0) {
        return Err(Error::InvalidInput("system matrix has zero sensitivity".into()));
    }
    let total = y.sum();
    let c = if total > 0.0 { total / sens } else { 1.0 };
    neg_grad(
        &Image::uniform(a.geometry.n, c),
        y,
        a,
        &ObjectiveConfig::default(),
    )
}

/// Run the full unroll on one sinogram (BN in eval mode).
pub fn reconstruct<T: Scalar>(model: &DnrNet<T>, y: &Sinogram, mode: Mode) -> Result<Image> {
    let f0 = init_input(y, &model.matrix)?;
    let f0_t = image_to_tensor::<T>(&f0);
    let out = match mode {
        Mode::Eval => model.forward_eval(&f0_t, &[y])?,
        Mode::Train => {
            let mut m = model.clone();
            m.forward_train(&f0_t, &[y])?.0
        }
    };
    Ok(plane_to_image(&out, 0))
}

pub(crate) fn image_to_tensor<T: Scalar>(img: &Image) -> Tensor4<T> {
    Tensor4 {
        b: 1,
        c: 1,
        h: img.n,
        w: img.n,
        data: img
            .data
            .iter()
            .map(|&v| T::from(v).expect("finite cast"))
            .collect(),
    }
}

pub(crate) fn images_to_tensor<T: Scalar>(imgs: &[&Image]) -> Tensor4<T> {
    let n = imgs[0].n;
    let mut t = Tensor4::zeros(imgs.len(), 1, n, n);
    for (b, img) in imgs.iter().enumerate() {
        let dst = t.plane_mut(b, 0);
        for (d, &v) in dst.iter_mut().zip(&img.data) {
            *d = T::from(v).expect("finite cast");
        }
    }
    t
}

pub(crate) fn plane_to_image<T: Scalar>(t: &Tensor4<T>, b: usize) -> Image {
    Image {
        n: t.h,
        data: t
            .plane(b, 0)
            .iter()
            .map(|&v| v.to_f64().expect("finite cast"))
            .collect(),
        pixel_size: 1.0,
    }
}
