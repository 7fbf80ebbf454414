//! Classical LSB substitution and Hamming matrix coding.
//!
//! These are exact reference embedders. Training data labels and every
//! neural-codec verification are computed from them.

use crate::bits::BitVector;
use crate::error::{Error, Result};

/// Replaces the least significant bit of `x` with `m`.
#[inline]
pub fn lsb_embed(x: u32, m: u8) -> u32 {
    x - (x & 1) + (m & 1) as u32
}

#[inline]
pub fn lsb_extract(y: u32) -> u8 {
    (y & 1) as u8
}

/// Matrix code embedding `k` bits into blocks of `n = 2^k - 1` cover bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MatrixCode {
    k: u32,
}

impl MatrixCode {
    pub const MAX_K: u32 = 24;

    pub fn new(k: u32) -> Result<Self> {
        if k == 0 || k > Self::MAX_K {
            return Err(Error::Invalid(format!(
                "matrix code parameter k={} outside 1..={}",
                k,
                Self::MAX_K
            )));
        }
        Ok(MatrixCode { k })
    }

    pub fn k(self) -> usize {
        self.k as usize
    }

    pub fn n(self) -> usize {
        (1usize << self.k) - 1
    }

    /// XOR of the 1-based positions of the set bits of `x`.
    pub fn syndrome(self, x: &[u8]) -> Result<usize> {
        self.check_cover(x.len())?;
        Ok(x.iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .fold(0, |acc, (i, _)| acc ^ (i + 1)))
    }

    /// Flips at most one bit of `x` so that its syndrome equals the message
    /// integer `M = sum m_j 2^(j-1)`.
    pub fn embed(self, x: &[u8], m: &[u8]) -> Result<Vec<u8>> {
        if m.len() != self.k() {
            return Err(Error::shape("matrix-coding message", self.k(), m.len()));
        }
        let s = self.syndrome(x)? ^ message_integer(m);
        let mut y = x.to_vec();
        if s != 0 {
            y[s - 1] ^= 1;
        }
        Ok(y)
    }

    pub fn extract(self, y: &[u8]) -> Result<Vec<u8>> {
        let s = self.syndrome(y)?;
        Ok((0..self.k()).map(|j| ((s >> j) & 1) as u8).collect())
    }

    pub fn stats(self) -> CodeStats {
        let k = self.k as f64;
        let two_k = (1u64 << self.k) as f64;
        CodeStats {
            embedding_rate: k / (two_k - 1.0),
            avg_distortion: 1.0 / two_k,
            efficiency: k * two_k / (two_k - 1.0),
        }
    }

    fn check_cover(self, len: usize) -> Result<()> {
        if len != self.n() {
            return Err(Error::shape("matrix-coding cover block", self.n(), len));
        }
        Ok(())
    }
}

/// `m_1` is the least significant bit.
pub fn message_integer(m: &[u8]) -> usize {
    m.iter()
        .enumerate()
        .fold(0, |acc, (j, &b)| acc | ((b as usize & 1) << j))
}

pub fn mc_syndrome(x: &BitVector, code: MatrixCode) -> Result<usize> {
    code.syndrome(x.as_slice())
}

pub fn mc_embed(x: &BitVector, m: &BitVector, code: MatrixCode) -> Result<BitVector> {
    code.embed(x.as_slice(), m.as_slice())
        .and_then(BitVector::new)
}

pub fn mc_extract(y: &BitVector, code: MatrixCode) -> Result<BitVector> {
    code.extract(y.as_slice()).and_then(BitVector::new)
}

pub fn mc_stats(code: MatrixCode) -> CodeStats {
    code.stats()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodeStats {
    /// Message bits per cover element.
    pub embedding_rate: f64,
    /// Expected changed elements per cover element.
    pub avg_distortion: f64,
    /// Message bits per change.
    pub efficiency: f64,
}

/// A per-block embedding rule that can be applied across a bit stream.
pub trait BlockEmbedder {
    fn cover_len(&self) -> usize;
    fn message_len(&self) -> usize;
    fn embed_block(&self, cover: &[u8], message: &[u8]) -> Result<Vec<u8>>;

    /// Filler for message positions past the end of the message in the last
    /// block.
    fn pad_bit(&self, _cover: &[u8], _position: usize) -> u8 {
        0
    }
}

pub trait BlockExtractor {
    fn cover_len(&self) -> usize;
    fn message_len(&self) -> usize;
    fn extract_block(&self, stego: &[u8]) -> Result<Vec<u8>>;
}

/// Size of a block: cover bits consumed and message bits carried.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockLayout {
    pub cover_len: usize,
    pub message_len: usize,
}

impl BlockLayout {
    pub fn capacity(&self, cover_bits: usize) -> usize {
        (cover_bits / self.cover_len) * self.message_len
    }

    pub fn blocks_for(&self, message_bits: usize) -> usize {
        message_bits.div_ceil(self.message_len)
    }

    pub fn check_capacity(&self, cover_bits: usize, message_bits: usize) -> Result<usize> {
        let available = self.capacity(cover_bits);
        if message_bits > available {
            return Err(Error::Capacity {
                required: message_bits,
                available,
            });
        }
        Ok(self.blocks_for(message_bits))
    }
}

/// LSB substitution over blocks of `n1` bits. At bit level the stego block is
/// the message block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LsbBlock {
    pub n1: usize,
}

impl BlockEmbedder for LsbBlock {
    fn cover_len(&self) -> usize {
        self.n1
    }

    fn message_len(&self) -> usize {
        self.n1
    }

    fn embed_block(&self, cover: &[u8], message: &[u8]) -> Result<Vec<u8>> {
        check_block(cover.len(), message.len(), self.n1, self.n1)?;
        Ok(cover
            .iter()
            .zip(message)
            .map(|(&x, &m)| lsb_embed(x as u32, m) as u8)
            .collect())
    }

    fn pad_bit(&self, cover: &[u8], position: usize) -> u8 {
        cover[position]
    }
}

impl BlockExtractor for LsbBlock {
    fn cover_len(&self) -> usize {
        self.n1
    }

    fn message_len(&self) -> usize {
        self.n1
    }

    fn extract_block(&self, stego: &[u8]) -> Result<Vec<u8>> {
        if stego.len() != self.n1 {
            return Err(Error::shape("LSB stego block", self.n1, stego.len()));
        }
        Ok(stego.iter().map(|&y| lsb_extract(y as u32)).collect())
    }
}

impl BlockEmbedder for MatrixCode {
    fn cover_len(&self) -> usize {
        self.n()
    }

    fn message_len(&self) -> usize {
        self.k()
    }

    fn embed_block(&self, cover: &[u8], message: &[u8]) -> Result<Vec<u8>> {
        self.embed(cover, message)
    }
}

impl BlockExtractor for MatrixCode {
    fn cover_len(&self) -> usize {
        self.n()
    }

    fn message_len(&self) -> usize {
        self.k()
    }

    fn extract_block(&self, stego: &[u8]) -> Result<Vec<u8>> {
        self.extract(stego)
    }
}

fn check_block(cover: usize, message: usize, cover_len: usize, message_len: usize) -> Result<()> {
    if cover != cover_len {
        return Err(Error::shape("cover block", cover_len, cover));
    }
    if message != message_len {
        return Err(Error::shape("message block", message_len, message));
    }
    Ok(())
}

/// Embeds `message` into consecutive disjoint blocks of `cover`. Cover bits
/// after the last used block are copied unchanged.
pub fn embed_blocks<E: BlockEmbedder + ?Sized>(
    embedder: &E,
    cover: &BitVector,
    message: &BitVector,
) -> Result<BitVector> {
    let layout = BlockLayout {
        cover_len: embedder.cover_len(),
        message_len: embedder.message_len(),
    };
    let blocks = layout.check_capacity(cover.len(), message.len())?;
    let mut out = cover.as_slice().to_vec();
    let msg = message.as_slice();
    let mut chunk = vec![0u8; layout.message_len];
    for b in 0..blocks {
        let cover_block = &cover.as_slice()[b * layout.cover_len..(b + 1) * layout.cover_len];
        for (p, slot) in chunk.iter_mut().enumerate() {
            let idx = b * layout.message_len + p;
            *slot = if idx < msg.len() {
                msg[idx]
            } else {
                embedder.pad_bit(cover_block, p)
            };
        }
        let stego = embedder.embed_block(cover_block, &chunk)?;
        if stego.len() != layout.cover_len {
            return Err(Error::shape(
                "embedded block",
                layout.cover_len,
                stego.len(),
            ));
        }
        out[b * layout.cover_len..(b + 1) * layout.cover_len].copy_from_slice(&stego);
    }
    BitVector::new(out)
}

/// Recovers `message_bits` bits from the leading blocks of `stego`.
pub fn extract_blocks<X: BlockExtractor + ?Sized>(
    extractor: &X,
    stego: &BitVector,
    message_bits: usize,
) -> Result<BitVector> {
    let layout = BlockLayout {
        cover_len: extractor.cover_len(),
        message_len: extractor.message_len(),
    };
    let blocks = layout.check_capacity(stego.len(), message_bits)?;
    let mut bits = Vec::with_capacity(blocks * layout.message_len);
    for b in 0..blocks {
        let block = &stego.as_slice()[b * layout.cover_len..(b + 1) * layout.cover_len];
        let m = extractor.extract_block(block)?;
        if m.len() != layout.message_len {
            return Err(Error::shape("extracted block", layout.message_len, m.len()));
        }
        bits.extend(m);
    }
    bits.truncate(message_bits);
    BitVector::new(bits)
}

/// Classical embedding schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Lsb { n1: usize },
    Matrix(MatrixCode),
}

impl Scheme {
    pub fn lsb() -> Self {
        Scheme::Lsb { n1: 1 }
    }

    pub fn matrix(k: u32) -> Result<Self> {
        MatrixCode::new(k).map(Scheme::Matrix)
    }

    pub fn layout(&self) -> BlockLayout {
        match *self {
            Scheme::Lsb { n1 } => BlockLayout {
                cover_len: n1,
                message_len: n1,
            },
            Scheme::Matrix(code) => BlockLayout {
                cover_len: code.n(),
                message_len: code.k(),
            },
        }
    }

    pub fn embedder(&self) -> Box<dyn BlockEmbedder> {
        match *self {
            Scheme::Lsb { n1 } => Box::new(LsbBlock { n1 }),
            Scheme::Matrix(code) => Box::new(code),
        }
    }

    pub fn extractor(&self) -> Box<dyn BlockExtractor> {
        match *self {
            Scheme::Lsb { n1 } => Box::new(LsbBlock { n1 }),
            Scheme::Matrix(code) => Box::new(code),
        }
    }
}

pub fn embed_stream(cover: &BitVector, message: &BitVector, scheme: Scheme) -> Result<BitVector> {
    if let Scheme::Lsb { n1: 0 } = scheme {
        return Err(Error::Invalid("LSB block length must be positive".into()));
    }
    embed_blocks(scheme.embedder().as_ref(), cover, message)
}

pub fn extract_stream(stego: &BitVector, message_bits: usize, scheme: Scheme) -> Result<BitVector> {
    if let Scheme::Lsb { n1: 0 } = scheme {
        return Err(Error::Invalid("LSB block length must be positive".into()));
    }
    extract_blocks(scheme.extractor().as_ref(), stego, message_bits)
}
