//! Minimal trainable convolutional stack with exact backpropagation.
//!
//! Everything is generic over the scalar type: training runs in f32, the
//! finite-difference gradient checks instantiate the same code in f64.

mod activation;
mod adam;
mod batchnorm;
mod conv;
mod loss;
mod resnet;
mod tensor;

pub use activation::{leaky_relu, leaky_relu_backward};
pub use adam::AdamState;
pub use batchnorm::{BatchNorm, BnCtx, BnGrads};
pub use conv::{ConvGrads, ConvLayer};
pub use loss::mse_loss;
pub use resnet::{ResBlockCtx, ResBlockGrads, ResNetCtx, ResNetGrads, ResNetOperator, ResidualBlock};
pub use tensor::Tensor4;

/// Scalar type for network math.
pub trait Scalar:
    num_traits::Float + Send + Sync + std::fmt::Debug + std::fmt::Display + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Forward-pass mode: train uses batch statistics and updates running stats,
/// eval uses running statistics only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

#[inline]
pub(crate) fn cast<T: Scalar>(x: f64) -> T {
    T::from(x).expect("scalar conversion")
}
