//! Reading and writing 8-bit grayscale images (PGM P5 and PNG).
//!
//! Loading produces real-valued intensities on the 0–255 scale; color PNG
//! inputs are reduced to luma (`0.299R + 0.587G + 0.114B`) without rounding.
//! Export clamps to `[0, 255]` and rounds half-to-even.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::{Image, ValueRange};

/// Quantizes intensities to 8-bit: rescale to 0–255, clamp, round ties to even.
pub fn quantize_u8(img: &Image) -> Vec<u8> {
    let scale = 255.0 / img.range().max_value();
    img.pixels()
        .iter()
        .map(|v| (v * scale).clamp(0.0, 255.0).round_ties_even() as u8)
        .collect()
}

/// Reads a binary (P5) PGM file with maxval up to 255.
pub fn read_pgm(path: &Path) -> Result<Image> {
    let display = path.display().to_string();
    let data = fs::read(path).map_err(|e| Error::io(&display, e))?;
    let bad = |reason: &str| Error::format(&display, reason);

    // Header tokens: magic, width, height, maxval; '#' starts a comment.
    let mut pos = 0usize;
    let mut next_token = |data: &[u8]| -> Result<String> {
        let mut tok = Vec::new();
        while pos < data.len() {
            let b = data[pos];
            if b == b'#' {
                while pos < data.len() && data[pos] != b'\n' {
                    pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                if !tok.is_empty() {
                    break;
                }
                pos += 1;
            } else {
                tok.push(b);
                pos += 1;
            }
        }
        if tok.is_empty() {
            return Err(Error::format(&display, "truncated header"));
        }
        Ok(String::from_utf8_lossy(&tok).into_owned())
    };

    if next_token(&data)? != "P5" {
        return Err(bad("not a binary PGM (P5) file"));
    }
    let width: usize = next_token(&data)?.parse().map_err(|_| bad("bad width"))?;
    let height: usize = next_token(&data)?.parse().map_err(|_| bad("bad height"))?;
    let maxval: usize = next_token(&data)?.parse().map_err(|_| bad("bad maxval"))?;
    if maxval == 0 || maxval > 255 {
        return Err(bad("only 8-bit PGM (maxval <= 255) is supported"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;
    let expected = width * height;
    if data.len() < pos + expected {
        return Err(bad("raster shorter than width*height"));
    }
    let pixels: Vec<f64> = data[pos..pos + expected].iter().map(|b| *b as f64).collect();
    Image::new(width, height, pixels, ValueRange::EightBit)
}

/// Writes a binary (P5) PGM file with maxval 255.
pub fn write_pgm(img: &Image, path: &Path) -> Result<()> {
    let display = path.display().to_string();
    let mut data = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    data.extend_from_slice(&quantize_u8(img));
    fs::write(path, data).map_err(|e| Error::io(&display, e))
}

/// Reads an 8-bit grayscale PNG; color inputs are converted by luma.
pub fn read_png(path: &Path) -> Result<Image> {
    let display = path.display().to_string();
    let dynamic = image::open(path).map_err(|e| Error::Codec {
        path: display.clone(),
        source: e,
    })?;
    let (width, height) = (dynamic.width() as usize, dynamic.height() as usize);
    let pixels: Vec<f64> = match dynamic {
        image::DynamicImage::ImageLuma8(gray) => {
            gray.into_raw().into_iter().map(|b| b as f64).collect()
        }
        other => {
            let rgb = other.to_rgb8();
            rgb.pixels()
                .map(|p| 0.299 * p.0[0] as f64 + 0.587 * p.0[1] as f64 + 0.114 * p.0[2] as f64)
                .collect()
        }
    };
    Image::new(width, height, pixels, ValueRange::EightBit)
}

/// Writes an 8-bit grayscale PNG.
pub fn write_png(img: &Image, path: &Path) -> Result<()> {
    let display = path.display().to_string();
    let buf = image::GrayImage::from_raw(img.width() as u32, img.height() as u32, quantize_u8(img))
        .expect("buffer length matches dimensions");
    buf.save(path).map_err(|e| Error::Codec {
        path: display,
        source: e,
    })
}

/// Loads a PGM or PNG file, dispatching on the extension.
pub fn load_image(path: &Path) -> Result<Image> {
    match extension(path).as_deref() {
        Some("pgm") => read_pgm(path),
        Some("png") => read_png(path),
        _ => Err(Error::format(
            path.display().to_string(),
            "unsupported image extension (use .pgm or .png)",
        )),
    }
}

/// Saves as PGM or PNG, dispatching on the extension.
pub fn save_image(img: &Image, path: &Path) -> Result<()> {
    match extension(path).as_deref() {
        Some("pgm") => write_pgm(img, path),
        Some("png") => write_png(img, path),
        _ => Err(Error::format(
            path.display().to_string(),
            "unsupported image extension (use .pgm or .png)",
        )),
    }
}

fn extension(path: &Path) -> Option<String> {
    path.extension().map(|e| e.to_string_lossy().to_lowercase())
}
