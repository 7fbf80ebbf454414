//! Bit vectors for cover, message and stego data.
//!
//! Bits are kept one per byte (`0` or `1`). Position 0 is the first element
//! `x_1` of the vector; text forms are written in that order.

use std::fmt;
use std::ops::Index;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct BitVector(Vec<u8>);

impl BitVector {
    /// Builds a vector, rejecting any element other than 0 or 1.
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::Invalid(format!(
                "bit {} has value {}, expected 0 or 1",
                pos, bits[pos]
            )));
        }
        Ok(BitVector(bits))
    }

    pub fn zeros(len: usize) -> Self {
        BitVector(vec![0; len])
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        BitVector(bits.iter().map(|&b| b as u8).collect())
    }

    /// The `width` low bits of `value`, most significant first.
    ///
    /// Enumerating `0..2^width` with this gives the lexicographic order of
    /// `{0,1}^width`.
    pub fn from_index(value: u64, width: usize) -> Self {
        BitVector(
            (0..width)
                .map(|j| ((value >> (width - 1 - j)) & 1) as u8)
                .collect(),
        )
    }

    /// Inverse of [`BitVector::from_index`].
    pub fn to_index(&self) -> u64 {
        self.0.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    /// Parses `0`/`1` text with whitespace ignored, or `0x`-prefixed hex
    /// expanded most significant bit first.
    pub fn parse(text: &str) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(hex) = compact
            .strip_prefix("0x")
            .or_else(|| compact.strip_prefix("0X"))
        {
            let mut bits = Vec::with_capacity(hex.len() * 4);
            for (i, c) in hex.chars().enumerate() {
                let nibble = c.to_digit(16).ok_or_else(|| {
                    Error::Invalid(format!("invalid hex digit {:?} at offset {}", c, i + 2))
                })?;
                bits.extend((0..4).rev().map(|s| ((nibble >> s) & 1) as u8));
            }
            return Ok(BitVector(bits));
        }
        compact
            .chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Invalid(format!(
                    "invalid bit character {:?} at offset {}",
                    other, i
                ))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(BitVector)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.0.iter().copied()
    }

    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut bits = Vec::with_capacity(self.len() + other.len());
        bits.extend_from_slice(&self.0);
        bits.extend_from_slice(&other.0);
        BitVector(bits)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&b| b as f64).collect()
    }

    pub fn hamming_distance(&self, other: &BitVector) -> Result<usize> {
        if self.len() != other.len() {
            return Err(Error::shape(
                "hamming distance operand",
                self.len(),
                other.len(),
            ));
        }
        Ok(self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count())
    }
}

impl Index<usize> for BitVector {
    type Output = u8;

    fn index(&self, index: usize) -> &u8 {
        &self.0[index]
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl TryFrom<Vec<u8>> for BitVector {
    type Error = Error;

    fn try_from(bits: Vec<u8>) -> Result<Self> {
        BitVector::new(bits)
    }
}
