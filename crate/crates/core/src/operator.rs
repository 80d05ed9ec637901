//! Construction and application of the dense Non-Local Means operator.
//!
//! For an image with `n` pixels, the weight matrix holds Gaussian-kernel
//! similarities between the `p`×`p` patches around every pixel pair:
//! `W_ij = exp(−‖v_i − v_j‖² / (2h²p²))` on intensities rescaled to `[0, 1]`.
//! The denoising operator is `A = D⁻¹W` with `D` the diagonal of row sums.
//! `A` is row-stochastic and conjugate to a symmetric positive definite
//! matrix, so its spectrum lies in `(0, 1]` with `A·1 = 1`.
//!
//! `W` is materialized dense; truncating small weights would perturb `D` and
//! break exact row-stochasticity, so no sparsification is applied. The
//! squared patch distance is divided by the patch pixel count `p²` so the
//! kernel width `h` stays comparable across patch sizes; the raw-distance
//! variant is available through [`BuildOptions`].

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::{extract_patch_vector, Image, ValueRange};
use crate::linalg;

/// Default cap on the dense operator dimension (512 MB of f64 weights).
pub const DEFAULT_DENSE_CAP: usize = 8192;

const MAGIC: &[u8; 8] = b"NLMWOP01";

/// Anything that can apply itself to a vector.
///
/// The Chebyshev machinery only ever needs matrix-vector products, so it is
/// written against this trait instead of a concrete matrix.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    /// Writes `self · x` into `out`; both slices have length [`dim`](Self::dim).
    fn apply_into(&self, x: &[f64], out: &mut [f64]);

    fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.apply_into(x, &mut out);
        out
    }
}

/// Options for operator construction.
#[derive(Debug, Clone, Copy)]
pub struct BuildOptions {
    /// Maximum allowed `n = width × height`.
    pub dense_cap: usize,
    /// Divide squared patch distances by `p²` (default). Disabling uses the
    /// raw squared distance, which makes `h` depend on the patch size.
    pub normalize_by_patch_len: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            dense_cap: DEFAULT_DENSE_CAP,
            normalize_by_patch_len: true,
        }
    }
}

/// The row-stochastic NLM operator `A = D⁻¹W`.
#[derive(Debug, Clone, PartialEq)]
pub struct NlmOperator {
    n: usize,
    weights: Array2<f64>,
    degrees: Vec<f64>,
    patch_side: usize,
    kernel_width: f64,
}

impl NlmOperator {
    /// Builds the operator with default [`BuildOptions`].
    pub fn build(img: &Image, p: usize, h: f64) -> Result<Self> {
        Self::build_with_options(img, p, h, &BuildOptions::default())
    }

    /// Builds the operator, checking the dense cap and kernel parameters.
    pub fn build_with_options(img: &Image, p: usize, h: f64, opts: &BuildOptions) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::invalid(format!(
                "kernel width h must be positive, got {h}"
            )));
        }
        if p == 0 || p % 2 == 0 {
            return Err(Error::invalid(format!(
                "patch side must be odd and positive, got {p}"
            )));
        }
        let n = img.len();
        if n > opts.dense_cap {
            return Err(Error::CapacityExceeded {
                n,
                cap: opts.dense_cap,
            });
        }

        // Patch vectors of the [0,1]-rescaled image, flattened to n rows of p².
        let normalized = Image::new(img.width(), img.height(), img.normalized(), ValueRange::Unit)?;
        let plen = p * p;
        let mut patches = vec![0.0f64; n * plen];
        for i in 0..n {
            let v = extract_patch_vector(&normalized, i, p)?;
            patches[i * plen..(i + 1) * plen].copy_from_slice(&v);
        }

        let denom = if opts.normalize_by_patch_len {
            2.0 * h * h * plen as f64
        } else {
            2.0 * h * h
        };
        let inv_denom = 1.0 / denom;

        // Upper triangle (incl. diagonal) in parallel: each task owns one row.
        let mut weights = Array2::<f64>::zeros((n, n));
        let flat = weights.as_slice_mut().expect("freshly allocated row-major");
        flat.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            let pi = &patches[i * plen..(i + 1) * plen];
            row[i] = 1.0;
            for j in i + 1..n {
                let pj = &patches[j * plen..(j + 1) * plen];
                let d2 = linalg::squared_distance(pi, pj);
                row[j] = (-d2 * inv_denom).exp();
            }
        });
        // Mirror pass: each unordered pair was computed exactly once above,
        // so W is symmetric bit-for-bit.
        for i in 0..n {
            for j in i + 1..n {
                flat[j * n + i] = flat[i * n + j];
            }
        }

        let degrees: Vec<f64> = flat.chunks(n).map(linalg::sum).collect();
        Ok(NlmOperator {
            n,
            weights,
            degrees,
            patch_side: p,
            kernel_width: h,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn patch_side(&self) -> usize {
        self.patch_side
    }

    pub fn kernel_width(&self) -> f64 {
        self.kernel_width
    }

    /// The symmetric weight matrix `W`.
    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    /// Row sums of `W` (the diagonal of `D`).
    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// Applies `A = D⁻¹W` to a vector.
    ///
    /// Row reductions use a fixed summation order, so the result does not
    /// depend on thread count.
    pub fn apply(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.n {
            return Err(Error::dims(format!(
                "operator is {}x{} but vector has length {}",
                self.n,
                self.n,
                y.len()
            )));
        }
        Ok(self.apply_vec(y))
    }

    /// Condition numbers of `D^{1/2}`: the spectral one
    /// `max√D / min√D` and the Frobenius one `√(ΣD / ΣD⁻¹)`.
    pub fn condition_numbers(&self) -> (f64, f64) {
        condition_numbers_of_degrees(&self.degrees)
    }

    /// Writes the operator to a flat binary file: 8 magic bytes, `n` (u64),
    /// `p` (u32), `h` (f64), then the row-major weights, all little-endian.
    pub fn save(&self, path: &Path) -> Result<()> {
        let display = path.display().to_string();
        let file = File::create(path).map_err(|e| Error::io(&display, e))?;
        let mut out = BufWriter::new(file);
        let io_err = |e| Error::io(&display, e);
        out.write_all(MAGIC).map_err(io_err)?;
        out.write_all(&(self.n as u64).to_le_bytes()).map_err(io_err)?;
        out.write_all(&(self.patch_side as u32).to_le_bytes())
            .map_err(io_err)?;
        out.write_all(&self.kernel_width.to_le_bytes()).map_err(io_err)?;
        for v in self.weights.as_slice().expect("row-major") {
            out.write_all(&v.to_le_bytes()).map_err(io_err)?;
        }
        out.flush().map_err(io_err)
    }

    /// Reads an operator written by [`save`](Self::save), recomputing the
    /// degrees from row sums and re-validating the weight invariants.
    pub fn load(path: &Path) -> Result<Self> {
        let display = path.display().to_string();
        let file = File::open(path).map_err(|e| Error::io(&display, e))?;
        let mut input = BufReader::new(file);
        let io_err = |e| Error::io(&display, e);

        let mut magic = [0u8; 8];
        input.read_exact(&mut magic).map_err(io_err)?;
        if &magic != MAGIC {
            return Err(Error::format(&display, "bad magic bytes"));
        }
        let mut b8 = [0u8; 8];
        input.read_exact(&mut b8).map_err(io_err)?;
        let n = u64::from_le_bytes(b8) as usize;
        let mut b4 = [0u8; 4];
        input.read_exact(&mut b4).map_err(io_err)?;
        let p = u32::from_le_bytes(b4) as usize;
        input.read_exact(&mut b8).map_err(io_err)?;
        let h = f64::from_le_bytes(b8);
        if n == 0 {
            return Err(Error::format(&display, "dimension is zero"));
        }
        let mut flat = vec![0.0f64; n * n];
        let mut buf = vec![0u8; n * 8];
        for row in flat.chunks_mut(n) {
            input.read_exact(&mut buf).map_err(io_err)?;
            for (v, chunk) in row.iter_mut().zip(buf.chunks_exact(8)) {
                *v = f64::from_le_bytes(chunk.try_into().unwrap());
            }
        }
        let mut trailing = [0u8; 1];
        if input.read(&mut trailing).map_err(io_err)? != 0 {
            return Err(Error::format(&display, "trailing bytes after weights"));
        }

        for i in 0..n {
            if flat[i * n + i] != 1.0 {
                return Err(Error::format(&display, format!("W[{i},{i}] != 1")));
            }
            for j in 0..n {
                let v = flat[i * n + j];
                if !v.is_finite() || v <= 0.0 || v > 1.0 {
                    return Err(Error::format(&display, format!("W[{i},{j}] = {v} outside (0,1]")));
                }
                if flat[i * n + j] != flat[j * n + i] {
                    return Err(Error::format(&display, "weights are not symmetric"));
                }
            }
        }
        let degrees: Vec<f64> = flat.chunks(n).map(linalg::sum).collect();
        let weights = Array2::from_shape_vec((n, n), flat).expect("validated shape");
        Ok(NlmOperator {
            n,
            weights,
            degrees,
            patch_side: p,
            kernel_width: h,
        })
    }
}

impl LinearOperator for NlmOperator {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(out.len(), self.n);
        let flat = self.weights.as_slice().expect("row-major");
        out.par_iter_mut().enumerate().for_each(|(i, o)| {
            *o = linalg::dot(&flat[i * self.n..(i + 1) * self.n], x) / self.degrees[i];
        });
    }
}

/// Plain dense square matrices act as operators too (used by tests and the
/// Chebyshev engine on synthetic matrices).
impl LinearOperator for Array2<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.nrows();
        assert_eq!(self.ncols(), n);
        assert_eq!(x.len(), n);
        let flat = self.as_slice().expect("row-major");
        out.par_iter_mut().enumerate().for_each(|(i, o)| {
            *o = linalg::dot(&flat[i * n..(i + 1) * n], x);
        });
    }
}

pub(crate) fn condition_numbers_of_degrees(degrees: &[f64]) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    let mut sum_inv = 0.0;
    for &d in degrees {
        min = min.min(d);
        max = max.max(d);
        sum += d;
        sum_inv += 1.0 / d;
    }
    ((max / min).sqrt(), (sum / sum_inv).sqrt())
}
