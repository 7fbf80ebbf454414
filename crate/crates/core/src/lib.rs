//! Steganography with feed-forward networks.
//!
//! The crate provides exact LSB substitution and Hamming matrix coding, small
//! dense networks trained to reproduce those embedders (by hill climbing or
//! backpropagation), and exhaustive verification of trained networks against
//! the exact codes. Grayscale PGM images can be used as covers.

pub mod bits;
pub mod classic;
pub mod cli;
pub mod codec;
pub mod error;
pub mod fnn;
pub mod image;
pub mod task;
pub mod training;

pub use bits::BitVector;
pub use classic::{
    embed_stream, extract_stream, lsb_embed, lsb_extract, mc_embed, mc_extract, mc_stats,
    mc_syndrome, CodeStats, MatrixCode, Scheme,
};
pub use codec::{CodecReport, NeuralCodec};
pub use error::{Error, Result};
pub use fnn::{threshold_output, Activation, DenseNetwork, LayerSpec, OutputThreshold};
pub use image::GrayImage;
pub use task::{Task, TaskSpec};
