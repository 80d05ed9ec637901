//! Non-Local Means denoising with low-rank spectral filtering.
//!
//! The NLM operator of a noisy image is a row-stochastic matrix `A = D⁻¹W`
//! whose weights are Gaussian-kernel similarities between image patches.
//! Replacing `A` by `f(A)` for a scalar filter `f` that suppresses the small
//! eigenvalues yields a low-rank operator that is less sensitive to noise
//! while keeping the row-stochastic structure (`f(A)·1 = 1`, spectrum in
//! `[0,1]`). The filtered operator is never formed explicitly: `f(A)y` is
//! evaluated with a truncated Chebyshev expansion and a matrix Clenshaw
//! recursion that only needs matrix-vector products.
//!
//! Modules:
//! - [`image`]: grayscale image container, noise synthesis, PSNR/SNR metrics,
//!   patch extraction, bicubic resizing.
//! - [`io`]: PGM/PNG reading and writing.
//! - [`operator`]: construction and application of the dense NLM operator.
//! - [`filters`]: hard-threshold, Butterworth and slanted-Butterworth scalar
//!   spectral filters.
//! - [`chebyshev`]: expansion coefficients, scalar evaluation, the matrix
//!   Clenshaw recursion and truncation error bounds.
//! - [`spectral`]: exact eigendecomposition oracle via the symmetric
//!   conjugate `S = D^{-1/2} W D^{-1/2}` (cyclic Jacobi).
//! - [`pipelines`]: the end-to-end denoising schemes (plain NLM, truncated
//!   eigendecomposition, slanted-Butterworth filtering, two-stage).
//! - [`synth`]: synthetic grayscale test textures.

pub mod chebyshev;
pub mod error;
pub mod filters;
pub mod image;
pub mod io;
mod linalg;
pub mod operator;
pub mod pipelines;
pub mod resize;
pub mod spectral;
pub mod synth;

pub use error::{Error, Result};
pub use filters::FilterSpec;
pub use image::{Image, NoiseModel, PsnrMode, ValueRange};
pub use operator::{LinearOperator, NlmOperator};
pub use pipelines::Sb2Config;
pub use spectral::SpectralDecomposition;
