use rand::Rng;

use super::{
    cast, leaky_relu, leaky_relu_backward, BatchNorm, BnCtx, BnGrads, ConvGrads, ConvLayer, Mode,
    Scalar, Tensor4,
};
use crate::Result;

/// Residual block: out = LeakyReLU(x + BN(conv₂(LeakyReLU(conv₁(x))))).
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualBlock<T> {
    pub conv1: ConvLayer<T>,
    pub conv2: ConvLayer<T>,
    pub bn: BatchNorm<T>,
}

#[derive(Debug, Clone)]
pub struct ResBlockCtx<T> {
    x: Tensor4<T>,
    h1: Tensor4<T>,
    a1: Tensor4<T>,
    pre: Tensor4<T>,
    bn: BnCtx<T>,
}

#[derive(Debug, Clone)]
pub struct ResBlockGrads<T> {
    pub conv1: ConvGrads<T>,
    pub conv2: ConvGrads<T>,
    pub bn: BnGrads<T>,
}

impl<T: Scalar> ResidualBlock<T> {
    pub fn new(channels: usize, slope: f64, rng: &mut impl Rng) -> Self {
        ResidualBlock {
            conv1: ConvLayer::kaiming(channels, channels, slope, rng),
            conv2: ConvLayer::kaiming(channels, channels, slope, rng),
            bn: BatchNorm::new(channels),
        }
    }

    pub fn forward_train(
        &mut self,
        x: &Tensor4<T>,
        slope: T,
    ) -> Result<(Tensor4<T>, ResBlockCtx<T>)> {
        let h1 = self.conv1.forward(x)?;
        let a1 = leaky_relu(&h1, slope);
        let h2 = self.conv2.forward(&a1)?;
        let (bn_out, bn_ctx) = self.bn.forward_train(&h2)?;
        let pre = x.add(&bn_out)?;
        let out = leaky_relu(&pre, slope);
        Ok((
            out,
            ResBlockCtx {
                x: x.clone(),
                h1,
                a1,
                pre,
                bn: bn_ctx,
            },
        ))
    }

    pub fn forward_eval(&self, x: &Tensor4<T>, slope: T) -> Result<Tensor4<T>> {
        let h1 = self.conv1.forward(x)?;
        let a1 = leaky_relu(&h1, slope);
        let h2 = self.conv2.forward(&a1)?;
        let bn_out = self.bn.forward_eval(&h2)?;
        let pre = x.add(&bn_out)?;
        Ok(leaky_relu(&pre, slope))
    }

    pub fn backward(
        &self,
        ctx: &ResBlockCtx<T>,
        grad_out: &Tensor4<T>,
        slope: T,
    ) -> Result<(Tensor4<T>, ResBlockGrads<T>)> {
        let g_pre = leaky_relu_backward(&ctx.pre, grad_out, slope);
        let (g_h2, bn_grads) = self.bn.backward_train(&ctx.bn, &g_pre)?;
        let (g_a1, conv2_grads) = self.conv2.backward(&ctx.a1, &g_h2)?;
        let g_h1 = leaky_relu_backward(&ctx.h1, &g_a1, slope);
        let (mut g_x, conv1_grads) = self.conv1.backward(&ctx.x, &g_h1)?;
        g_x.add_assign(&g_pre)?; // skip connection
        Ok((
            g_x,
            ResBlockGrads {
                conv1: conv1_grads,
                conv2: conv2_grads,
                bn: bn_grads,
            },
        ))
    }
}

/// Single-channel-in, single-channel-out operator: a 1→C lift convolution,
/// two residual blocks at width C, and a C→1 projection convolution.
#[derive(Debug, Clone, PartialEq)]
pub struct ResNetOperator<T> {
    pub lift: ConvLayer<T>,
    pub block1: ResidualBlock<T>,
    pub block2: ResidualBlock<T>,
    pub project: ConvLayer<T>,
    pub slope: T,
}

#[derive(Debug, Clone)]
pub struct ResNetCtx<T> {
    x: Tensor4<T>,
    b2_out: Tensor4<T>,
    b1: ResBlockCtx<T>,
    b2: ResBlockCtx<T>,
}

#[derive(Debug, Clone)]
pub struct ResNetGrads<T> {
    pub lift: ConvGrads<T>,
    pub block1: ResBlockGrads<T>,
    pub block2: ResBlockGrads<T>,
    pub project: ConvGrads<T>,
}

impl<T: Scalar> ResNetOperator<T> {
    pub fn new(channels: usize, slope: f64, rng: &mut impl Rng) -> Self {
        ResNetOperator {
            lift: ConvLayer::kaiming(1, channels, slope, rng),
            block1: ResidualBlock::new(channels, slope, rng),
            block2: ResidualBlock::new(channels, slope, rng),
            project: ConvLayer::kaiming(channels, 1, slope, rng),
            slope: cast(slope),
        }
    }

    pub fn channels(&self) -> usize {
        self.lift.out_channels
    }

    pub fn forward_train(&mut self, x: &Tensor4<T>) -> Result<(Tensor4<T>, ResNetCtx<T>)> {
        let lifted = self.lift.forward(x)?;
        let (b1_out, c1) = self.block1.forward_train(&lifted, self.slope)?;
        let (b2_out, c2) = self.block2.forward_train(&b1_out, self.slope)?;
        let out = self.project.forward(&b2_out)?;
        Ok((
            out,
            ResNetCtx {
                x: x.clone(),
                b2_out,
                b1: c1,
                b2: c2,
            },
        ))
    }

    pub fn forward_eval(&self, x: &Tensor4<T>) -> Result<Tensor4<T>> {
        let lifted = self.lift.forward(x)?;
        let b1 = self.block1.forward_eval(&lifted, self.slope)?;
        let b2 = self.block2.forward_eval(&b1, self.slope)?;
        self.project.forward(&b2)
    }

    /// Spec-level entry point: train mode updates BN running statistics.
    pub fn apply(&mut self, x: &Tensor4<T>, mode: Mode) -> Result<Tensor4<T>> {
        match mode {
            Mode::Train => Ok(self.forward_train(x)?.0),
            Mode::Eval => self.forward_eval(x),
        }
    }

    pub fn backward(
        &self,
        ctx: &ResNetCtx<T>,
        grad_out: &Tensor4<T>,
    ) -> Result<(Tensor4<T>, ResNetGrads<T>)> {
        let (g_b2, project_grads) = self.project.backward(&ctx.b2_out, grad_out)?;
        let (g_b1, block2_grads) = self.block2.backward(&ctx.b2, &g_b2, self.slope)?;
        let (g_lift, block1_grads) = self.block1.backward(&ctx.b1, &g_b1, self.slope)?;
        let (g_x, lift_grads) = self.lift.backward(&ctx.x, &g_lift)?;
        Ok((
            g_x,
            ResNetGrads {
                lift: lift_grads,
                block1: block1_grads,
                block2: block2_grads,
                project: project_grads,
            },
        ))
    }

    /// Trainable tensors in canonical order (checkpoints add running stats).
    pub fn for_each_param(&self, f: &mut impl FnMut(&[T])) {
        f(&self.lift.weight);
        f(&self.lift.bias);
        for rb in [&self.block1, &self.block2] {
            f(&rb.conv1.weight);
            f(&rb.conv1.bias);
            f(&rb.conv2.weight);
            f(&rb.conv2.bias);
            f(&rb.bn.gamma);
            f(&rb.bn.beta);
        }
        f(&self.project.weight);
        f(&self.project.bias);
    }

    pub fn for_each_param_mut(&mut self, f: &mut impl FnMut(&mut [T])) {
        f(&mut self.lift.weight);
        f(&mut self.lift.bias);
        for rb in [&mut self.block1, &mut self.block2] {
            f(&mut rb.conv1.weight);
            f(&mut rb.conv1.bias);
            f(&mut rb.conv2.weight);
            f(&mut rb.conv2.bias);
            f(&mut rb.bn.gamma);
            f(&mut rb.bn.beta);
        }
        f(&mut self.project.weight);
        f(&mut self.project.bias);
    }
}

impl<T: Scalar> ResNetGrads<T> {
    /// Same canonical order as `ResNetOperator::for_each_param`.
    pub fn for_each(&self, f: &mut impl FnMut(&[T])) {
        f(&self.lift.weight);
        f(&self.lift.bias);
        for rb in [&self.block1, &self.block2] {
            f(&rb.conv1.weight);
            f(&rb.conv1.bias);
            f(&rb.conv2.weight);
            f(&rb.conv2.bias);
            f(&rb.bn.gamma);
            f(&rb.bn.beta);
        }
        f(&self.project.weight);
        f(&self.project.bias);
    }
}
