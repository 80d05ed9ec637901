//! End-to-end denoising schemes.
//!
//! Four pipelines over the same operator machinery:
//!
//! - `denoise_nlm`: plain application of `A = D⁻¹W`;
//! - `denoise_nlm_eig`: rank-`k` truncated eigendecomposition of `A`
//!   (exact oracle backend, capped in size);
//! - `denoise_nlm_sb`: slanted-Butterworth filtering of `A` evaluated by the
//!   Chebyshev–Clenshaw recursion (no eigendecomposition);
//! - `denoise_nlm_sb2`: two slanted-Butterworth stages with the intermediate
//!   estimate mixed back toward the noisy input.
//!
//! Pipelines operate on unclipped real-valued images; quantization happens
//! only at export.

use std::path::Path;

use crate::chebyshev::{clenshaw_matvec, ChebyshevExpansion};
use crate::error::{Error, Result};
use crate::filters::FilterSpec;
use crate::image::Image;
use crate::operator::{BuildOptions, NlmOperator, DEFAULT_DENSE_CAP};
use crate::spectral::{decompose_nlm_with_cap, DEFAULT_ORACLE_CAP};

/// Capacity guards threaded through the pipelines.
#[derive(Debug, Clone, Copy)]
pub struct Limits {
    /// Cap on the dense operator dimension.
    pub dense_cap: usize,
    /// Cap on eigendecomposition size (NLM-Eig backend).
    pub oracle_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            dense_cap: DEFAULT_DENSE_CAP,
            oracle_cap: DEFAULT_ORACLE_CAP,
        }
    }
}

fn build_operator(img: &Image, p: usize, h: f64, limits: &Limits) -> Result<NlmOperator> {
    let opts = BuildOptions {
        dense_cap: limits.dense_cap,
        ..BuildOptions::default()
    };
    NlmOperator::build_with_options(img, p, h, &opts)
}

/// Plain NLM: builds `A` from the image and returns `A·y` reshaped.
pub fn denoise_nlm(img: &Image, p: usize, h: f64) -> Result<Image> {
    denoise_nlm_limited(img, p, h, &Limits::default())
}

pub fn denoise_nlm_limited(img: &Image, p: usize, h: f64, limits: &Limits) -> Result<Image> {
    let op = build_operator(img, p, h, limits)?;
    img.with_pixels(op.apply(img.pixels())?)
}

/// Truncated-eigendecomposition denoising: keeps the `k` leading eigenpairs.
pub fn denoise_nlm_eig(img: &Image, p: usize, h: f64, k: usize) -> Result<Image> {
    denoise_nlm_eig_limited(img, p, h, k, &Limits::default())
}

pub fn denoise_nlm_eig_limited(
    img: &Image,
    p: usize,
    h: f64,
    k: usize,
    limits: &Limits,
) -> Result<Image> {
    let op = build_operator(img, p, h, limits)?;
    let dec = decompose_nlm_with_cap(&op, limits.oracle_cap)?;
    img.with_pixels(dec.apply_rank_truncated(k, img.pixels())?)
}

/// Slanted-Butterworth denoising through the Chebyshev–Clenshaw recursion.
pub fn denoise_nlm_sb(
    img: &Image,
    p: usize,
    h: f64,
    omega: f64,
    d: u32,
    n_cheb: usize,
) -> Result<Image> {
    denoise_nlm_sb_limited(img, p, h, omega, d, n_cheb, &Limits::default())
}

pub fn denoise_nlm_sb_limited(
    img: &Image,
    p: usize,
    h: f64,
    omega: f64,
    d: u32,
    n_cheb: usize,
    limits: &Limits,
) -> Result<Image> {
    let filter = FilterSpec::slanted_butterworth(omega, d)?;
    let coeffs = ChebyshevExpansion::of_filter(&filter, n_cheb)?;
    let op = build_operator(img, p, h, limits)?;
    img.with_pixels(clenshaw_matvec(&op, &coeffs, img.pixels())?)
}

/// Parameters of the two-stage slanted-Butterworth scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sb2Config {
    /// Patch side, shared by both stages.
    pub p: usize,
    /// Kernel widths of stages 1 and 2.
    pub h1: f64,
    pub h2: f64,
    /// Filter cutoffs of stages 1 and 2.
    pub omega1: f64,
    pub omega2: f64,
    /// Filter orders of stages 1 and 2.
    pub d1: u32,
    pub d2: u32,
    /// Mixing weight toward the original noisy image, in `[0, 1]`.
    pub gamma: f64,
    /// Chebyshev truncation degree for both stages.
    pub n_cheb: usize,
}

impl Sb2Config {
    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.p % 2 == 0 {
            return Err(Error::invalid(format!(
                "patch side must be odd and positive, got {}",
                self.p
            )));
        }
        if !(self.h1 > 0.0) || !(self.h2 > 0.0) {
            return Err(Error::invalid("kernel widths must be positive"));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::invalid(format!(
                "gamma must lie in [0, 1], got {}",
                self.gamma
            )));
        }
        if self.n_cheb < 1 {
            return Err(Error::invalid("n_cheb must be at least 1"));
        }
        FilterSpec::slanted_butterworth(self.omega1, self.d1)?;
        FilterSpec::slanted_butterworth(self.omega2, self.d2)?;
        Ok(())
    }

    /// Published parameter presets keyed by SNR level (0.5, 0.75, 1.0).
    pub fn preset_for_snr(snr: f64) -> Option<Sb2Config> {
        let base = Sb2Config {
            p: 5,
            h1: 0.0,
            h2: 0.0,
            omega1: 0.3,
            omega2: 0.3,
            d1: 0,
            d2: 0,
            gamma: 0.0,
            n_cheb: 150,
        };
        if snr == 0.5 {
            Some(Sb2Config {
                h1: 1.5,
                h2: 1.0,
                d1: 50,
                d2: 50,
                gamma: 0.5,
                ..base
            })
        } else if snr == 0.75 {
            Some(Sb2Config {
                h1: 1.05,
                h2: 0.35,
                d1: 15,
                d2: 15,
                gamma: 0.15,
                ..base
            })
        } else if snr == 1.0 {
            Some(Sb2Config {
                h1: 0.5,
                h2: 0.3,
                d1: 4,
                d2: 4,
                gamma: 0.15,
                ..base
            })
        } else {
            None
        }
    }

    /// Parses flat `key=value` text with keys `p, h1, h2, omega1, omega2,
    /// d1, d2, gamma, n`. Lines starting with `#` are comments.
    pub fn from_key_values(text: &str) -> Result<Sb2Config> {
        let mut cfg = Sb2Config {
            p: 0,
            h1: 0.0,
            h2: 0.0,
            omega1: f64::NAN,
            omega2: f64::NAN,
            d1: 0,
            d2: 0,
            gamma: f64::NAN,
            n_cheb: 0,
        };
        let mut seen = [false; 9];
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::invalid(format!("config line {} is not key=value", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad =
                |what: &str| Error::invalid(format!("config line {}: bad {what}", lineno + 1));
            match key {
                "p" => {
                    cfg.p = value.parse().map_err(|_| bad("p"))?;
                    seen[0] = true;
                }
                "h1" => {
                    cfg.h1 = value.parse().map_err(|_| bad("h1"))?;
                    seen[1] = true;
                }
                "h2" => {
                    cfg.h2 = value.parse().map_err(|_| bad("h2"))?;
                    seen[2] = true;
                }
                "omega1" => {
                    cfg.omega1 = value.parse().map_err(|_| bad("omega1"))?;
                    seen[3] = true;
                }
                "omega2" => {
                    cfg.omega2 = value.parse().map_err(|_| bad("omega2"))?;
                    seen[4] = true;
                }
                "d1" => {
                    cfg.d1 = value.parse().map_err(|_| bad("d1"))?;
                    seen[5] = true;
                }
                "d2" => {
                    cfg.d2 = value.parse().map_err(|_| bad("d2"))?;
                    seen[6] = true;
                }
                "gamma" => {
                    cfg.gamma = value.parse().map_err(|_| bad("gamma"))?;
                    seen[7] = true;
                }
                "n" | "N" => {
                    cfg.n_cheb = value.parse().map_err(|_| bad("n"))?;
                    seen[8] = true;
                }
                other => {
                    return Err(Error::invalid(format!(
                        "config line {}: unknown key `{other}`",
                        lineno + 1
                    )))
                }
            }
        }
        const KEYS: [&str; 9] = [
            "p", "h1", "h2", "omega1", "omega2", "d1", "d2", "gamma", "n",
        ];
        for (i, &present) in seen.iter().enumerate() {
            if !present {
                return Err(Error::invalid(format!("config is missing key `{}`", KEYS[i])));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Sb2Config> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::from_key_values(&text)
    }
}

/// Two-stage scheme: filter, mix the estimate back toward the noisy input
/// with weight `gamma`, then filter the mixed image with the second
/// parameter set (the second operator is built from the mixed image).
pub fn denoise_nlm_sb2(img: &Image, cfg: &Sb2Config) -> Result<Image> {
    denoise_nlm_sb2_limited(img, cfg, &Limits::default())
}

pub fn denoise_nlm_sb2_limited(img: &Image, cfg: &Sb2Config, limits: &Limits) -> Result<Image> {
    cfg.validate()?;
    let stage1 = denoise_nlm_sb_limited(img, cfg.p, cfg.h1, cfg.omega1, cfg.d1, cfg.n_cheb, limits)?;
    let mixed_pixels: Vec<f64> = stage1
        .pixels()
        .iter()
        .zip(img.pixels())
        .map(|(est, noisy)| (1.0 - cfg.gamma) * est + cfg.gamma * noisy)
        .collect();
    let mixed = img.with_pixels(mixed_pixels)?;
    denoise_nlm_sb_limited(
        &mixed, cfg.p, cfg.h2, cfg.omega2, cfg.d2, cfg.n_cheb, limits,
    )
}
