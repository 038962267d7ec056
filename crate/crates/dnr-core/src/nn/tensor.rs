use super::Scalar;
use crate::{Error, Result};

/// Dense (batch, channels, height, width) tensor, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4<T> {
    pub b: usize,
    pub c: usize,
    pub h: usize,
    pub w: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> Tensor4<T> {
    pub fn zeros(b: usize, c: usize, h: usize, w: usize) -> Self {
        Tensor4 {
            b,
            c,
            h,
            w,
            data: vec![T::zero(); b * c * h * w],
        }
    }

    pub fn from_data(b: usize, c: usize, h: usize, w: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != b * c * h * w {
            return Err(Error::DimensionMismatch(format!(
                "tensor data length {} != {b}x{c}x{h}x{w}",
                data.len()
            )));
        }
        Ok(Tensor4 { b, c, h, w, data })
    }

    pub fn shape(&self) -> (usize, usize, usize, usize) {
        (self.b, self.c, self.h, self.w)
    }

    pub fn numel(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn plane_len(&self) -> usize {
        self.h * self.w
    }

    #[inline]
    pub fn plane(&self, b: usize, c: usize) -> &[T] {
        let start = (b * self.c + c) * self.plane_len();
        &self.data[start..start + self.plane_len()]
    }

    #[inline]
    pub fn plane_mut(&mut self, b: usize, c: usize) -> &mut [T] {
        let len = self.plane_len();
        let start = (b * self.c + c) * len;
        &mut self.data[start..start + len]
    }

    pub fn add(&self, other: &Tensor4<T>) -> Result<Tensor4<T>> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch(format!(
                "tensor shapes {:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(Tensor4 {
            b: self.b,
            c: self.c,
            h: self.h,
            w: self.w,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        })
    }

    pub fn add_assign(&mut self, other: &Tensor4<T>) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch("tensor add shapes differ".into()));
        }
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + b;
        }
        Ok(())
    }
}
