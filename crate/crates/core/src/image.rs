//! Grayscale images, their LSB plane, and block partitioning of that plane.

use crate::bits::BitVector;
use crate::classic::{
    embed_blocks, extract_blocks, lsb_embed, BlockEmbedder, BlockExtractor, BlockLayout, Scheme,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    /// Row-major pixels.
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Invalid(format!(
                "image dimensions {}x{} must be positive",
                width, height
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::shape("image pixels", width * height, pixels.len()));
        }
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixel_count(&self) -> usize {
        self.pixels.len()
    }
}

/// Reads a binary PGM (`P5`, maxval 255). Comments are allowed between
/// header fields.
pub fn read_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut pos = 0usize;
    let magic = next_token(bytes, &mut pos).ok_or_else(|| Error::Pgm("empty file".into()))?;
    if magic != b"P5" {
        return Err(Error::Pgm(format!(
            "unsupported magic {:?}, expected P5",
            String::from_utf8_lossy(magic)
        )));
    }
    let mut field = |name: &str| -> Result<usize> {
        let tok =
            next_token(bytes, &mut pos).ok_or_else(|| Error::Pgm(format!("missing {}", name)))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Pgm(format!("bad {} {:?}", name, String::from_utf8_lossy(tok))))
    };
    let width = field("width")?;
    let height = field("height")?;
    let maxval = field("maxval")?;
    if maxval != 255 {
        return Err(Error::Pgm(format!(
            "unsupported maxval {}, expected 255",
            maxval
        )));
    }
    if width == 0 || height == 0 {
        return Err(Error::Pgm(format!("bad dimensions {}x{}", width, height)));
    }
    // Exactly one whitespace byte separates the header from the raster.
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::Pgm("missing whitespace after maxval".into())),
    }
    let needed = width
        .checked_mul(height)
        .ok_or_else(|| Error::Pgm("dimensions overflow".into()))?;
    let data = &bytes[pos..];
    if data.len() < needed {
        return Err(Error::Pgm(format!(
            "truncated pixel data: {} bytes, expected {}",
            data.len(),
            needed
        )));
    }
    GrayImage::new(width, height, data[..needed].to_vec())
}

fn next_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Option<&'a [u8]> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() && bytes[*pos] != b'#' {
        *pos += 1;
    }
    (start < *pos).then(|| &bytes[start..*pos])
}

pub fn write_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.pixels);
    out
}

/// Row-major least significant bits.
pub fn lsb_plane(img: &GrayImage) -> BitVector {
    BitVector::new(img.pixels.iter().map(|p| p & 1).collect()).expect("LSBs are bits")
}

pub fn apply_lsb_plane(img: &GrayImage, plane: &BitVector) -> Result<GrayImage> {
    if plane.len() != img.pixel_count() {
        return Err(Error::shape("LSB plane", img.pixel_count(), plane.len()));
    }
    let pixels = img
        .pixels
        .iter()
        .zip(plane.iter())
        .map(|(&p, b)| lsb_embed(p as u32, b) as u8)
        .collect();
    GrayImage::new(img.width, img.height, pixels)
}

/// Sequential partition of the pixels into disjoint blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockPlan {
    pub block_len: usize,
    pub usable_blocks: usize,
    /// Pixels after the last used block; left untouched.
    pub tail_len: usize,
}

impl BlockPlan {
    pub fn for_layout(
        pixel_count: usize,
        layout: BlockLayout,
        message_bits: usize,
    ) -> Result<Self> {
        let usable_blocks = layout.check_capacity(pixel_count, message_bits)?;
        Ok(BlockPlan {
            block_len: layout.cover_len,
            usable_blocks,
            tail_len: pixel_count - usable_blocks * layout.cover_len,
        })
    }

    /// Pixel index range of block `b`.
    pub fn block_range(&self, b: usize) -> std::ops::Range<usize> {
        b * self.block_len..(b + 1) * self.block_len
    }
}

pub fn plan_blocks(img: &GrayImage, scheme: Scheme, message_bits: usize) -> Result<BlockPlan> {
    if let Scheme::Lsb { n1: 0 } = scheme {
        return Err(Error::Invalid("LSB block length must be positive".into()));
    }
    BlockPlan::for_layout(img.pixel_count(), scheme.layout(), message_bits)
}

pub fn capacity(img: &GrayImage, layout: BlockLayout) -> usize {
    layout.capacity(img.pixel_count())
}

/// Embeds into the image's LSB plane block by block.
pub fn embed_image<E: BlockEmbedder + ?Sized>(
    img: &GrayImage,
    message: &BitVector,
    embedder: &E,
) -> Result<GrayImage> {
    let stego = embed_blocks(embedder, &lsb_plane(img), message)?;
    apply_lsb_plane(img, &stego)
}

pub fn extract_image<X: BlockExtractor + ?Sized>(
    img: &GrayImage,
    message_bits: usize,
    extractor: &X,
) -> Result<BitVector> {
    extract_blocks(extractor, &lsb_plane(img), message_bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pgm_round_trip() {
        let img = GrayImage::new(2, 2, vec![0, 255, 128, 7]).unwrap();
        assert_eq!(read_pgm(&write_pgm(&img)).unwrap(), img);
    }

    #[test]
    fn pgm_errors() {
        let err = read_pgm(b"P5 2 2 65535\n\0\0\0\0\0\0\0\0").unwrap_err();
        assert!(err.to_string().contains("maxval"), "{err}");
        assert!(read_pgm(b"P2 2 2 255\n0 0 0 0")
            .unwrap_err()
            .to_string()
            .contains("magic"));
        assert!(read_pgm(b"P5 2 2 255\n\x01\x02")
            .unwrap_err()
            .to_string()
            .contains("truncated"));
        assert!(read_pgm(b"").is_err());
        assert!(read_pgm(b"P5 2").is_err());
    }

    #[test]
    fn pgm_comments_are_skipped() {
        let bytes = b"P5\n# made by hand\n3 # width\n# height next\n1\n255\n\x0a\x14\x1e";
        let img = read_pgm(bytes).unwrap();
        assert_eq!((img.width(), img.height()), (3, 1));
        assert_eq!(img.pixels(), &[10, 20, 30]);
    }

    #[test]
    fn plane_examples() {
        let img = GrayImage::new(2, 2, vec![4, 5, 6, 7]).unwrap();
        assert_eq!(lsb_plane(&img).to_string(), "0101");
        let out = apply_lsb_plane(&img, &BitVector::parse("1111").unwrap()).unwrap();
        assert_eq!(out.pixels(), &[5, 5, 7, 7]);
        assert_eq!(apply_lsb_plane(&img, &lsb_plane(&img)).unwrap(), img);
        assert!(apply_lsb_plane(&img, &BitVector::zeros(3)).is_err());
    }

    #[test]
    fn plan_examples() {
        let img = GrayImage::new(512, 512, vec![0; 512 * 512]).unwrap();
        let m2 = Scheme::matrix(2).unwrap();
        assert_eq!(capacity(&img, m2.layout()), 174_762);
        assert!(plan_blocks(&img, m2, 174_762).is_ok());
        assert!(matches!(
            plan_blocks(&img, m2, 174_763),
            Err(Error::Capacity {
                required: 174_763,
                available: 174_762
            })
        ));
        let plan = plan_blocks(&img, m2, 0).unwrap();
        assert_eq!((plan.usable_blocks, plan.tail_len), (0, 512 * 512));

        let tiny = GrayImage::new(3, 1, vec![1, 2, 3]).unwrap();
        assert!(matches!(
            plan_blocks(&tiny, Scheme::Lsb { n1: 4 }, 4),
            Err(Error::Capacity { .. })
        ));
    }

    proptest! {
        #[test]
        fn plan_covers_every_pixel_once(w in 1usize..40, h in 1usize..40, k in 1u32..=4, frac in 0.0f64..=1.0) {
            let img = GrayImage::new(w, h, vec![0; w * h]).unwrap();
            let scheme = Scheme::matrix(k).unwrap();
            let bits = (capacity(&img, scheme.layout()) as f64 * frac) as usize;
            let plan = plan_blocks(&img, scheme, bits).unwrap();
            let mut hits = vec![0u8; w * h];
            for b in 0..plan.usable_blocks {
                for i in plan.block_range(b) { hits[i] += 1; }
            }
            for hit in hits.iter_mut().skip(plan.usable_blocks * plan.block_len) { *hit += 1; }
            prop_assert!(hits.iter().all(|&c| c == 1));
            prop_assert_eq!(plan.usable_blocks * plan.block_len + plan.tail_len, w * h);
        }

        #[test]
        fn image_round_trip_and_distortion(pixels in proptest::collection::vec(any::<u8>(), 64..300),
                                           msg in proptest::collection::vec(0u8..=1, 0..300),
                                           k in 0u32..=3) {
            let img = GrayImage::new(pixels.len(), 1, pixels).unwrap();
            let scheme = if k == 0 { Scheme::lsb() } else { Scheme::matrix(k).unwrap() };
            let cap = capacity(&img, scheme.layout());
            let msg = BitVector::new(msg.into_iter().take(cap).collect()).unwrap();
            let stego = embed_image(&img, &msg, scheme.embedder().as_ref()).unwrap();
            prop_assert!(stego.pixels().iter().zip(img.pixels()).all(|(a, b)| a.abs_diff(*b) <= 1));
            prop_assert_eq!(extract_image(&stego, msg.len(), scheme.extractor().as_ref()).unwrap(), msg);
        }
    }
}
