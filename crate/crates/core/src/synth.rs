//! Synthetic grayscale test textures.
//!
//! Deterministic generators for patch-repetitive images (checkerboards,
//! gratings, stripes, blob lattices, band-limited noise) so experiments and
//! tests run without downloading external test sets. All textures are pure
//! functions of `(width, height, seed)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::image::{mirror_index, Image, ValueRange};

/// Names accepted by [`generate_texture`], in the fixed standard-set order.
pub const TEXTURE_NAMES: [&str; 7] = [
    "checker",
    "stripes",
    "grating",
    "rings",
    "blobs",
    "smooth-noise",
    "ramp",
];

/// Generates one named texture on the 0–255 scale.
pub fn generate_texture(name: &str, width: usize, height: usize, seed: u64) -> Result<Image> {
    if width == 0 || height == 0 {
        return Err(Error::invalid("texture dimensions must be positive"));
    }
    let pixels = match name {
        "checker" => checker(width, height),
        "stripes" => stripes(width, height),
        "grating" => grating(width, height),
        "rings" => rings(width, height),
        "blobs" => blobs(width, height),
        "smooth-noise" => smooth_noise(width, height, seed),
        "ramp" => ramp(width, height),
        other => {
            return Err(Error::invalid(format!(
                "unknown texture `{other}`; known: {}",
                TEXTURE_NAMES.join(", ")
            )))
        }
    };
    Image::new(width, height, pixels, ValueRange::EightBit)
}

/// The full set of standard textures with fixed per-texture seeds.
pub fn standard_set(width: usize, height: usize) -> Vec<(String, Image)> {
    TEXTURE_NAMES
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let img = generate_texture(name, width, height, 1000 + i as u64)
                .expect("standard textures are valid");
            (name.to_string(), img)
        })
        .collect()
}

fn checker(w: usize, h: usize) -> Vec<f64> {
    let cell = (w.min(h) / 8).max(2);
    (0..w * h)
        .map(|i| {
            let (r, c) = (i / w, i % w);
            if (r / cell + c / cell) % 2 == 0 {
                64.0
            } else {
                192.0
            }
        })
        .collect()
}

fn stripes(w: usize, h: usize) -> Vec<f64> {
    let period = (w.min(h) / 6).max(3);
    (0..w * h)
        .map(|i| {
            let (r, c) = (i / w, i % w);
            if (r + c) % period < period / 2 {
                50.0
            } else {
                205.0
            }
        })
        .collect()
}

fn grating(w: usize, h: usize) -> Vec<f64> {
    let fx = 5.0 / w as f64;
    let fy = 2.0 / h as f64;
    (0..w * h)
        .map(|i| {
            let (r, c) = (i / w, i % w);
            let phase = std::f64::consts::TAU * (fx * c as f64 + fy * r as f64);
            128.0 + 96.0 * phase.sin()
        })
        .collect()
}

fn rings(w: usize, h: usize) -> Vec<f64> {
    let (cx, cy) = (w as f64 / 2.0, h as f64 / 2.0);
    let period = (w.min(h) as f64 / 7.0).max(2.0);
    (0..w * h)
        .map(|i| {
            let (r, c) = (i / w, i % w);
            let dist = ((c as f64 - cx).powi(2) + (r as f64 - cy).powi(2)).sqrt();
            128.0 + 96.0 * (std::f64::consts::TAU * dist / period).cos()
        })
        .collect()
}

fn blobs(w: usize, h: usize) -> Vec<f64> {
    let spacing = (w.min(h) as f64 / 5.0).max(3.0);
    let radius = spacing / 2.8;
    let mut px = vec![40.0f64; w * h];
    let cols = (w as f64 / spacing).ceil() as isize + 1;
    let rows = (h as f64 / spacing).ceil() as isize + 1;
    for br in 0..rows {
        for bc in 0..cols {
            let cx = (bc as f64 + 0.5 * (br % 2) as f64) * spacing;
            let cy = (br as f64 + 0.5) * spacing;
            for r in 0..h {
                for c in 0..w {
                    let d2 = (c as f64 - cx).powi(2) + (r as f64 - cy).powi(2);
                    px[r * w + c] += 180.0 * (-d2 / (radius * radius)).exp();
                }
            }
        }
    }
    px.into_iter().map(|v| v.min(255.0)).collect()
}

fn smooth_noise(w: usize, h: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut px: Vec<f64> = (0..w * h).map(|_| rng.gen_range(0.0..1.0)).collect();
    // A few separable box-blur passes band-limit the noise.
    let radius = (w.min(h) / 20).max(1) as isize;
    for _ in 0..3 {
        px = box_blur(&px, w, h, radius);
    }
    // Stretch to a fixed 16-240 range for healthy contrast.
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in &px {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let span = (hi - lo).max(1e-12);
    px.into_iter()
        .map(|v| 16.0 + 224.0 * (v - lo) / span)
        .collect()
}

fn box_blur(px: &[f64], w: usize, h: usize, radius: isize) -> Vec<f64> {
    let k = (2 * radius + 1) as f64;
    let mut mid = vec![0.0f64; w * h];
    for r in 0..h {
        for c in 0..w {
            let mut acc = 0.0;
            for d in -radius..=radius {
                acc += px[r * w + mirror_index(c as isize + d, w)];
            }
            mid[r * w + c] = acc / k;
        }
    }
    let mut out = vec![0.0f64; w * h];
    for r in 0..h {
        for c in 0..w {
            let mut acc = 0.0;
            for d in -radius..=radius {
                acc += mid[mirror_index(r as isize + d, h) * w + c];
            }
            out[r * w + c] = acc / k;
        }
    }
    out
}

fn ramp(w: usize, h: usize) -> Vec<f64> {
    (0..w * h)
        .map(|i| {
            let (r, c) = (i / w, i % w);
            let t = (c as f64 / (w.max(2) - 1) as f64 + r as f64 / (h.max(2) - 1) as f64) / 2.0;
            16.0 + 224.0 * t
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_textures_generate_and_are_deterministic() {
        for name in TEXTURE_NAMES {
            let a = generate_texture(name, 24, 24, 7).unwrap();
            let b = generate_texture(name, 24, 24, 7).unwrap();
            assert_eq!(a.pixels(), b.pixels(), "{name} not deterministic");
            assert!(a.intensity_std() > 10.0, "{name} has too little contrast");
            for v in a.pixels() {
                assert!((0.0..=255.0).contains(v), "{name} out of range: {v}");
            }
        }
    }

    #[test]
    fn seed_changes_noise_texture() {
        let a = generate_texture("smooth-noise", 16, 16, 1).unwrap();
        let b = generate_texture("smooth-noise", 16, 16, 2).unwrap();
        assert_ne!(a.pixels(), b.pixels());
    }

    #[test]
    fn unknown_texture_is_rejected() {
        assert!(generate_texture("nope", 8, 8, 0).is_err());
    }

    #[test]
    fn standard_set_has_all_names() {
        let set = standard_set(12, 12);
        assert_eq!(set.len(), TEXTURE_NAMES.len());
        for ((name, img), expected) in set.iter().zip(TEXTURE_NAMES) {
            assert_eq!(name, expected);
            assert_eq!(img.len(), 144);
        }
    }
}
