//! Desk-scale emission tomography pipeline: phantom simulation, a trainable
//! unrolled-Newton reconstructor, an OSEM baseline, and image-quality
//! scoring, with a CLI tying the stages together.

pub mod io;
pub mod objective;
pub mod osem;
pub mod phantom;
pub mod tomo;

pub mod nn;

mod error;
pub use error::{Error, Result};
