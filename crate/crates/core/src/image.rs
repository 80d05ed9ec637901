//! Grayscale image container, noise synthesis and quality metrics.
//!
//! Images are stored as row-major `f64` intensities together with a declared
//! nominal range (0–255 or 0–1). Intensities may leave the nominal range
//! (noisy images are kept unclipped); clamping happens only when exporting
//! to 8-bit files.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::linalg;

/// Declared nominal intensity range of an image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueRange {
    /// Intensities nominally in `[0, 1]`.
    Unit,
    /// Intensities nominally in `[0, 255]`.
    EightBit,
}

impl ValueRange {
    /// Upper end of the nominal range.
    pub fn max_value(self) -> f64 {
        match self {
            ValueRange::Unit => 1.0,
            ValueRange::EightBit => 255.0,
        }
    }
}

/// A 2-D grid of real-valued intensities.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
    range: ValueRange,
}

impl Image {
    /// Builds an image from row-major pixel data.
    ///
    /// Fails when the buffer length does not match the dimensions, a
    /// dimension is zero, or any intensity is non-finite.
    pub fn new(width: usize, height: usize, pixels: Vec<f64>, range: ValueRange) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid(format!(
                "image dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::dims(format!(
                "pixel buffer has {} entries, expected {}x{} = {}",
                pixels.len(),
                width,
                height,
                width * height
            )));
        }
        if let Some(bad) = pixels.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite intensity {bad}")));
        }
        Ok(Image {
            width,
            height,
            pixels,
            range,
        })
    }

    /// Constant-valued image.
    pub fn constant(width: usize, height: usize, value: f64, range: ValueRange) -> Result<Self> {
        Image::new(width, height, vec![value; width * height], range)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Number of pixels.
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn range(&self) -> ValueRange {
        self.range
    }

    /// Row-major intensities.
    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    /// Intensity at (row, col); panics when out of bounds.
    pub fn at(&self, row: usize, col: usize) -> f64 {
        assert!(row < self.height && col < self.width);
        self.pixels[row * self.width + col]
    }

    /// Pixel intensities divided by the nominal range maximum.
    ///
    /// This is an affine rescale by the declared maximum, not a min-max
    /// normalization, so noisy intensities may fall outside `[0, 1]`.
    pub fn normalized(&self) -> Vec<f64> {
        let scale = 1.0 / self.range.max_value();
        self.pixels.iter().map(|v| v * scale).collect()
    }

    /// Same pixel grid with a different declared range, rescaling values.
    pub fn convert_range(&self, range: ValueRange) -> Image {
        if range == self.range {
            return self.clone();
        }
        let scale = range.max_value() / self.range.max_value();
        Image {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|v| v * scale).collect(),
            range,
        }
    }

    /// Replaces the pixel buffer, keeping dimensions and range.
    pub fn with_pixels(&self, pixels: Vec<f64>) -> Result<Image> {
        Image::new(self.width, self.height, pixels, self.range)
    }

    /// Population standard deviation of the intensities.
    pub fn intensity_std(&self) -> f64 {
        let n = self.pixels.len() as f64;
        let mean = linalg::sum(&self.pixels) / n;
        let var = self
            .pixels
            .iter()
            .map(|v| {
                let d = v - mean;
                d * d
            })
            .sum::<f64>()
            / n;
        var.sqrt()
    }
}

/// Additive white Gaussian noise, pinned to a seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    /// Standard deviation in intensity units.
    pub sigma: f64,
    /// Seed for the deterministic generator.
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(sigma: f64, seed: u64) -> Result<Self> {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::invalid(format!(
                "noise sigma must be finite and non-negative, got {sigma}"
            )));
        }
        Ok(NoiseModel { sigma, seed })
    }
}

/// Adds i.i.d. zero-mean Gaussian noise to every pixel.
///
/// The generator is ChaCha8 seeded with `noise.seed`, sampled through the
/// ziggurat normal sampler, so outputs are bit-reproducible for a fixed
/// dependency set. The result is not clipped to the nominal range; clipping
/// is deferred to 8-bit export.
pub fn add_gaussian_noise(img: &Image, noise: &NoiseModel) -> Result<Image> {
    if !noise.sigma.is_finite() || noise.sigma < 0.0 {
        return Err(Error::invalid(format!(
            "noise sigma must be finite and non-negative, got {}",
            noise.sigma
        )));
    }
    if noise.sigma == 0.0 {
        return Ok(img.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let normal = Normal::new(0.0, noise.sigma).expect("validated sigma");
    let pixels = img
        .pixels
        .iter()
        .map(|v| v + normal.sample(&mut rng))
        .collect();
    img.with_pixels(pixels)
}

/// Noise standard deviation that realizes a target signal-to-noise ratio.
///
/// SNR is defined as the ratio of the population standard deviation of the
/// clean intensities to the noise standard deviation.
pub fn sigma_for_snr(img: &Image, snr: f64) -> Result<f64> {
    if img.len() < 2 {
        return Err(Error::invalid(
            "sigma_for_snr needs at least 2 pixels".to_string(),
        ));
    }
    if !(snr > 0.0) {
        return Err(Error::invalid(format!("snr must be positive, got {snr}")));
    }
    let std = img.intensity_std();
    if std == 0.0 {
        return Err(Error::DegenerateImage);
    }
    Ok(std / snr)
}

/// How the peak signal-to-noise ratio normalizes the squared error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsnrMode {
    /// `20·log10(255/√MSE)` with `MSE = (1/n)·Σ|a−b|²`. The default for all
    /// experiments.
    Standard,
    /// `20·log10(255/√(Σ|a−b|²))` over the raw (unnormalized) sum of squared
    /// differences.
    Unnormalized,
}

/// Peak signal-to-noise ratio in decibels, on the 0–255 scale.
///
/// Both images must share dimensions and declared range; intensities are
/// rescaled to 0–255 before the formula. Identical images yield
/// `f64::INFINITY` as a distinguished value.
pub fn psnr(a: &Image, b: &Image, mode: PsnrMode) -> Result<f64> {
    if a.width != b.width || a.height != b.height {
        return Err(Error::dims(format!(
            "psnr needs equal dimensions, got {}x{} vs {}x{}",
            a.width, a.height, b.width, b.height
        )));
    }
    if a.range != b.range {
        return Err(Error::dims(
            "psnr needs identical declared ranges".to_string(),
        ));
    }
    let scale = 255.0 / a.range.max_value();
    let mut sum_sq = 0.0;
    for (x, y) in a.pixels.iter().zip(b.pixels.iter()) {
        let d = (x - y) * scale;
        sum_sq += d * d;
    }
    if sum_sq == 0.0 {
        return Ok(f64::INFINITY);
    }
    let denom_sq = match mode {
        PsnrMode::Standard => sum_sq / a.len() as f64,
        PsnrMode::Unnormalized => sum_sq,
    };
    Ok(20.0 * (255.0 / denom_sq.sqrt()).log10())
}

/// Reflects an index into `0..n` with symmetric (edge-repeating) padding.
pub(crate) fn mirror_index(idx: isize, n: usize) -> usize {
    debug_assert!(n >= 1);
    let period = 2 * n as isize;
    let mut m = idx.rem_euclid(period);
    if m >= n as isize {
        m = period - 1 - m;
    }
    m as usize
}

/// Vectorizes the `p`×`p` window centered at linear pixel index `i`.
///
/// `p` must be odd. Out-of-image samples use mirror (symmetric) padding; the
/// result is row-major with `p²` entries.
pub fn extract_patch_vector(img: &Image, i: usize, p: usize) -> Result<Vec<f64>> {
    if p == 0 || p % 2 == 0 {
        return Err(Error::invalid(format!(
            "patch side must be odd and positive, got {p}"
        )));
    }
    if i >= img.len() {
        return Err(Error::invalid(format!(
            "pixel index {i} out of range for {} pixels",
            img.len()
        )));
    }
    let row = (i / img.width) as isize;
    let col = (i % img.width) as isize;
    let r = (p / 2) as isize;
    let mut out = Vec::with_capacity(p * p);
    for dr in -r..=r {
        let rr = mirror_index(row + dr, img.height);
        for dc in -r..=r {
            let cc = mirror_index(col + dc, img.width);
            out.push(img.pixels[rr * img.width + cc]);
        }
    }
    Ok(out)
}
