//! Bicubic image resizing.
//!
//! Separable convolution with the Keys cubic kernel (a = −0.5), the common
//! "bicubic" default. Sample positions use the half-pixel center convention
//! so that resizing to the same dimensions reproduces the input, and
//! out-of-image taps are mirrored symmetrically.

use crate::error::Result;
use crate::image::{mirror_index, Image};

const KEYS_A: f64 = -0.5;

/// Keys cubic interpolation kernel.
fn keys_kernel(t: f64) -> f64 {
    let t = t.abs();
    if t <= 1.0 {
        ((KEYS_A + 2.0) * t - (KEYS_A + 3.0)) * t * t + 1.0
    } else if t < 2.0 {
        KEYS_A * (((t - 5.0) * t + 8.0) * t - 4.0)
    } else {
        0.0
    }
}

/// Resamples one scanline of length `src_n` to `dst_n` samples.
///
/// `src` is read with stride `src_stride`, `dst` written with `dst_stride`.
fn resample_line(
    src: &[f64],
    src_n: usize,
    src_stride: usize,
    dst: &mut [f64],
    dst_n: usize,
    dst_stride: usize,
) {
    let ratio = src_n as f64 / dst_n as f64;
    for j in 0..dst_n {
        // Half-pixel centers: output center j+1/2 maps to input coordinate space.
        let x = (j as f64 + 0.5) * ratio - 0.5;
        let base = x.floor() as isize;
        let frac = x - base as f64;
        let mut acc = 0.0;
        let mut wsum = 0.0;
        for tap in -1..=2isize {
            let w = keys_kernel(frac - tap as f64);
            let idx = mirror_index(base + tap, src_n);
            acc += w * src[idx * src_stride];
            wsum += w;
        }
        // The Keys kernel sums to 1 on integer grids; renormalize to absorb
        // rounding so constant images stay exactly constant.
        dst[j * dst_stride] = acc / wsum;
    }
}

/// Resizes by separable bicubic interpolation (Keys kernel, a = −0.5).
pub fn resize_bicubic(img: &Image, new_w: usize, new_h: usize) -> Result<Image> {
    // Validate target dimensions through the Image constructor contract.
    if new_w == 0 || new_h == 0 {
        return Image::new(new_w, new_h, vec![], img.range());
    }
    let (w, h) = (img.width(), img.height());
    // Horizontal pass: h rows of length w -> new_w.
    let mut mid = vec![0.0f64; new_w * h];
    for row in 0..h {
        resample_line(
            &img.pixels()[row * w..(row + 1) * w],
            w,
            1,
            &mut mid[row * new_w..(row + 1) * new_w],
            new_w,
            1,
        );
    }
    // Vertical pass: new_w columns of length h -> new_h.
    let mut out = vec![0.0f64; new_w * new_h];
    for col in 0..new_w {
        resample_line(
            &mid[col..],
            h,
            new_w,
            &mut out[col..],
            new_h,
            new_w,
        );
    }
    Image::new(new_w, new_h, out, img.range())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::ValueRange;

    #[test]
    fn kernel_is_interpolating() {
        assert_eq!(keys_kernel(0.0), 1.0);
        assert_eq!(keys_kernel(1.0), 0.0);
        assert_eq!(keys_kernel(2.0), 0.0);
        assert_eq!(keys_kernel(-1.0), 0.0);
    }

    #[test]
    fn same_size_resize_is_identity() {
        let pixels: Vec<f64> = (0..48).map(|i| ((i * 37) % 251) as f64).collect();
        let img = Image::new(8, 6, pixels, ValueRange::EightBit).unwrap();
        let out = resize_bicubic(&img, 8, 6).unwrap();
        for (a, b) in img.pixels().iter().zip(out.pixels()) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn constant_image_stays_constant() {
        let img = Image::constant(7, 5, 42.5, ValueRange::EightBit).unwrap();
        for (w, h) in [(3, 3), (13, 9), (1, 1), (60, 60)] {
            let out = resize_bicubic(&img, w, h).unwrap();
            for v in out.pixels() {
                assert!((v - 42.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn downscale_preserves_linear_ramp_in_interior() {
        // Bicubic reproduces degree-1 polynomials exactly away from borders.
        let (w, h) = (32, 32);
        let pixels: Vec<f64> = (0..w * h)
            .map(|i| {
                let (r, c) = (i / w, i % w);
                2.0 * c as f64 + 3.0 * r as f64
            })
            .collect();
        let img = Image::new(w, h, pixels, ValueRange::EightBit).unwrap();
        let out = resize_bicubic(&img, 16, 16).unwrap();
        // Output pixel (r, c) maps to input coordinate (2r + 0.5, 2c + 0.5).
        for r in 2..14 {
            for c in 2..14 {
                let expected = 2.0 * (2.0 * c as f64 + 0.5) + 3.0 * (2.0 * r as f64 + 0.5);
                let got = out.at(r, c);
                assert!(
                    (got - expected).abs() < 1e-9,
                    "({r},{c}): {got} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn rejects_zero_dimensions() {
        let img = Image::constant(4, 4, 1.0, ValueRange::EightBit).unwrap();
        assert!(resize_bicubic(&img, 0, 4).is_err());
    }
}
