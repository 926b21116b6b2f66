//! MNIST IDX parsing, image binarization and PGM rendering.
//!
//! Only uncompressed IDX files are understood; gunzip the published archives
//! before loading them.

use std::io::{self, Write};

use thiserror::Error;

use crate::dynamics::StateVector;
use crate::patterns::BipolarPattern;

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;
pub const DEFAULT_THRESHOLD: u8 = 127;

#[derive(Debug, Error)]
pub enum MnistError {
    #[error("bad magic number: expected {expected:#010x}, found {found:#010x}")]
    BadMagic { expected: u32, found: u32 },

    #[error(
        "truncated input: needed {needed} bytes at offset {offset}, only {available} available"
    )]
    Truncated {
        offset: usize,
        needed: usize,
        available: usize,
    },

    #[error("label {value} at index {index} is not a digit")]
    LabelOutOfRange { index: usize, value: u8 },

    #[error("{images} images but {labels} labels")]
    CountMismatch { images: usize, labels: usize },

    #[error("state has {len} entries, image is {width}x{height}")]
    DimensionMismatch {
        len: usize,
        width: usize,
        height: usize,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl MnistError {
    /// True for malformed input, as opposed to I/O or caller errors.
    pub fn is_format_error(&self) -> bool {
        matches!(
            self,
            Self::BadMagic { .. }
                | Self::Truncated { .. }
                | Self::LabelOutOfRange { .. }
                | Self::CountMismatch { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, MnistError>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(MnistError::DimensionMismatch {
                len: pixels.len(),
                width,
                height,
            });
        }
        Ok(Self {
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

    /// Row-major intensities.
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxDataset {
    pub images: Vec<GrayImage>,
    pub labels: Option<Vec<u8>>,
}

impl IdxDataset {
    pub fn parse(image_bytes: &[u8], label_bytes: Option<&[u8]>) -> Result<Self> {
        let images = parse_idx_images(image_bytes)?;
        let labels = label_bytes.map(parse_idx_labels).transpose()?;
        if let Some(l) = &labels {
            if l.len() != images.len() {
                return Err(MnistError::CountMismatch {
                    images: images.len(),
                    labels: l.len(),
                });
            }
        }
        Ok(Self { images, labels })
    }

    /// Index of the first image of each digit class, in class order.
    /// Classes missing from the dataset are skipped.
    pub fn first_of_each_class(&self) -> Vec<usize> {
        let Some(labels) = &self.labels else {
            return Vec::new();
        };
        (0u8..10)
            .filter_map(|class| labels.iter().position(|&l| l == class))
            .collect()
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    offset: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, needed: usize) -> Result<&'a [u8]> {
        let available = self.bytes.len() - self.offset;
        if needed > available {
            return Err(MnistError::Truncated {
                offset: self.offset,
                needed,
                available,
            });
        }
        let out = &self.bytes[self.offset..self.offset + needed];
        self.offset += needed;
        Ok(out)
    }

    fn u32_be(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn magic(&mut self, expected: u32) -> Result<()> {
        let found = self.u32_be()?;
        if found != expected {
            return Err(MnistError::BadMagic { expected, found });
        }
        Ok(())
    }
}

pub fn parse_idx_images(bytes: &[u8]) -> Result<Vec<GrayImage>> {
    let mut r = Reader { bytes, offset: 0 };
    r.magic(IMAGE_MAGIC)?;
    let count = r.u32_be()? as usize;
    let rows = r.u32_be()? as usize;
    let cols = r.u32_be()? as usize;
    let mut images = Vec::with_capacity(count.min(bytes.len()));
    for _ in 0..count {
        let pixels = r.take(rows * cols)?.to_vec();
        images.push(GrayImage {
            width: cols,
            height: rows,
            pixels,
        });
    }
    Ok(images)
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    let mut r = Reader { bytes, offset: 0 };
    r.magic(LABEL_MAGIC)?;
    let count = r.u32_be()? as usize;
    let labels = r.take(count)?.to_vec();
    if let Some(index) = labels.iter().position(|&l| l > 9) {
        return Err(MnistError::LabelOutOfRange {
            index,
            value: labels[index],
        });
    }
    Ok(labels)
}

/// Serializes images as an IDX image file. All images must share the
/// dimensions of the first one; an empty list is written as 0×0.
pub fn write_idx_images(images: &[GrayImage], out: &mut impl Write) -> Result<()> {
    let (rows, cols) = images.first().map_or((0, 0), |i| (i.height, i.width));
    out.write_all(&IMAGE_MAGIC.to_be_bytes())?;
    for dim in [images.len(), rows, cols] {
        out.write_all(&(dim as u32).to_be_bytes())?;
    }
    for img in images {
        if img.height != rows || img.width != cols {
            return Err(MnistError::DimensionMismatch {
                len: img.pixels.len(),
                width: cols,
                height: rows,
            });
        }
        out.write_all(&img.pixels)?;
    }
    Ok(())
}

pub fn write_idx_labels(labels: &[u8], out: &mut impl Write) -> Result<()> {
    out.write_all(&LABEL_MAGIC.to_be_bytes())?;
    out.write_all(&(labels.len() as u32).to_be_bytes())?;
    out.write_all(labels)?;
    Ok(())
}

/// Pixels strictly brighter than `threshold` become active (+1), the rest
/// inactive (-1).
pub fn binarize_image(img: &GrayImage, threshold: u8) -> BipolarPattern {
    let values = img
        .pixels
        .iter()
        .map(|&p| if p > threshold { 1 } else { -1 })
        .collect();
    BipolarPattern::new(values).expect("entries are ±1 by construction")
}

/// Neuron outputs outside this range saturate to black or white.
pub const PGM_RANGE: (f64, f64) = (-1.5, 1.5);

fn to_gray(v: f64) -> u8 {
    let (lo, hi) = PGM_RANGE;
    let t = (v.clamp(lo, hi) - lo) / (hi - lo);
    // round half up
    (t * 255.0 + 0.5).floor() as u8
}

/// Renders a state as a binary PGM (P5, maxval 255), inactive dark and
/// active light.
pub fn write_pgm(
    state: &StateVector,
    width: usize,
    height: usize,
    out: &mut impl Write,
) -> Result<()> {
    if state.len() != width * height {
        return Err(MnistError::DimensionMismatch {
            len: state.len(),
            width,
            height,
        });
    }
    write!(out, "P5\n{width} {height}\n255\n")?;
    let body: Vec<u8> = state.as_slice().iter().map(|&v| to_gray(v)).collect();
    out.write_all(&body)?;
    Ok(())
}
