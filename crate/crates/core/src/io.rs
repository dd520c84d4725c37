//! Mask and eye-crop file I/O.
//!
//! Reads PGM and PNG through the `image` crate. Masks are foreground where the
//! gray value is at least 128. Color inputs are reduced to gray with
//! `0.299 R + 0.587 G + 0.114 B`, rounded. Masks are written as binary PGM
//! (P5, maxval 255) with values 0 and 255.

use std::path::{Path, PathBuf};

use image::DynamicImage;
use thiserror::Error;

use crate::raster::{BinaryMask, GrayImage, RasterError};

pub const MASK_THRESHOLD: u8 = 128;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: cannot decode image: {message}")]
    Decode { path: PathBuf, message: String },
    #[error(transparent)]
    Raster(#[from] RasterError),
}

fn luma(r: u8, g: u8, b: u8) -> u8 {
    (0.299 * f64::from(r) + 0.587 * f64::from(g) + 0.114 * f64::from(b))
        .round()
        .clamp(0.0, 255.0) as u8
}

fn to_gray(img: DynamicImage) -> Result<GrayImage, RasterError> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data: Vec<u8> = match img {
        DynamicImage::ImageLuma8(buf) => buf.into_raw(),
        DynamicImage::ImageLumaA8(buf) => buf.pixels().map(|p| p.0[0]).collect(),
        DynamicImage::ImageLuma16(buf) => buf
            .pixels()
            .map(|p| (f64::from(p.0[0]) / 257.0).round() as u8)
            .collect(),
        DynamicImage::ImageLumaA16(buf) => buf
            .pixels()
            .map(|p| (f64::from(p.0[0]) / 257.0).round() as u8)
            .collect(),
        other => other
            .to_rgb8()
            .pixels()
            .map(|p| luma(p.0[0], p.0[1], p.0[2]))
            .collect(),
    };
    GrayImage::from_vec(w, h, data)
}

pub fn decode_gray(bytes: &[u8], path: &Path) -> Result<GrayImage, IoError> {
    let img = image::load_from_memory(bytes).map_err(|e| IoError::Decode {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    Ok(to_gray(img)?)
}

pub fn gray_to_mask(img: &GrayImage) -> BinaryMask {
    BinaryMask::from_vec(
        img.width(),
        img.height(),
        img.as_slice()
            .iter()
            .map(|&v| v >= MASK_THRESHOLD)
            .collect(),
    )
    .expect("dimensions come from a valid image")
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, IoError> {
    std::fs::read(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    std::fs::write(path, bytes).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_gray(path: &Path) -> Result<GrayImage, IoError> {
    decode_gray(&read_bytes(path)?, path)
}

pub fn read_mask(path: &Path) -> Result<BinaryMask, IoError> {
    Ok(gray_to_mask(&read_gray(path)?))
}

pub fn encode_pgm(width: usize, height: usize, pixels: &[u8]) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(pixels);
    out
}

pub fn encode_mask_pgm(mask: &BinaryMask) -> Vec<u8> {
    let pixels: Vec<u8> = mask
        .as_slice()
        .iter()
        .map(|&v| if v { 255 } else { 0 })
        .collect();
    encode_pgm(mask.width(), mask.height(), &pixels)
}

fn is_png(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("png"))
}

fn write_gray_bytes(path: &Path, w: usize, h: usize, pixels: Vec<u8>) -> Result<(), IoError> {
    if is_png(path) {
        let buf = image::GrayImage::from_raw(w as u32, h as u32, pixels)
            .expect("buffer length matches dimensions");
        buf.save_with_format(path, image::ImageFormat::Png)
            .map_err(|e| IoError::Decode {
                path: path.to_path_buf(),
                message: e.to_string(),
            })
    } else {
        write_bytes(path, &encode_pgm(w, h, &pixels))
    }
}

/// Writes a mask as PNG when the extension says so, otherwise as P5 PGM.
pub fn write_mask(path: &Path, mask: &BinaryMask) -> Result<(), IoError> {
    let pixels = mask
        .as_slice()
        .iter()
        .map(|&v| if v { 255 } else { 0 })
        .collect();
    write_gray_bytes(path, mask.width(), mask.height(), pixels)
}

pub fn write_gray(path: &Path, img: &GrayImage) -> Result<(), IoError> {
    write_gray_bytes(path, img.width(), img.height(), img.as_slice().to_vec())
}
