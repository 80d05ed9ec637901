//! Exact eigendecomposition oracle for NLM operators.
//!
//! `A = D⁻¹W` is conjugate to the symmetric matrix
//! `S = D^{-1/2} W D^{-1/2}` via `A = D^{-1/2} S D^{1/2}`, so an orthogonal
//! eigendecomposition `S = O Λ Oᵀ` yields `A = (D^{-1/2}O) Λ (D^{-1/2}O)⁻¹`
//! with the same eigenvalues. The eigensolver is a deterministic cyclic
//! Jacobi iteration; it is dense and `O(n³)` per sweep, which is fine for
//! the oracle's job (baselines and validation at moderate `n`), not for
//! production-size operators.
//!
//! The decomposition powers the exact filtered application
//! `f(A)y = D^{-1/2} O f(Λ) Oᵀ D^{1/2} y`, the truncated-eigenvalue
//! baseline, and the seeded random-operator generator used by the
//! approximation-error experiments.

use std::io::Write;
use std::path::Path;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::filters::FilterSpec;
use crate::image::{Image, ValueRange};
use crate::linalg;
use crate::operator::NlmOperator;

/// Default cap on the eigendecomposition dimension.
pub const DEFAULT_ORACLE_CAP: usize = 2000;

/// Maximum tolerated input asymmetry for [`jacobi_eigh`].
const SYMMETRY_TOL: f64 = 1e-12;

/// Convergence threshold relative to the Frobenius norm of the input.
const OFFDIAG_TOL: f64 = 1e-12;

/// Maximum number of Jacobi sweeps.
const MAX_SWEEPS: usize = 30;

/// Eigenvalue clamping beyond this magnitude is logged as suspicious drift.
const CLAMP_LOG_THRESHOLD: f64 = 1e-9;

/// The symmetric conjugate `S_ij = W_ij / √(D_ii·D_jj)`.
///
/// Each unordered pair is computed once and mirrored, so the result is
/// symmetric bit-for-bit.
pub fn symmetrize(op: &NlmOperator) -> Array2<f64> {
    let n = op.n();
    let w = op.weights().as_slice().expect("row-major");
    let inv_sqrt: Vec<f64> = op.degrees().iter().map(|d| 1.0 / d.sqrt()).collect();
    let mut s = Array2::<f64>::zeros((n, n));
    let flat = s.as_slice_mut().expect("row-major");
    for i in 0..n {
        for j in i..n {
            let v = w[i * n + j] * inv_sqrt[i] * inv_sqrt[j];
            flat[i * n + j] = v;
            flat[j * n + i] = v;
        }
    }
    s
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix, with the default
/// dimension cap.
///
/// Returns eigenvalues sorted descending (ties broken by ascending original
/// index) and the orthogonal matrix whose columns are the matching
/// eigenvectors. Rotations run in a fixed cyclic order until the
/// off-diagonal Frobenius norm drops below `1e-12·‖S‖_F` or 30 sweeps.
pub fn jacobi_eigh(s: &Array2<f64>) -> Result<(Vec<f64>, Array2<f64>)> {
    jacobi_eigh_with_cap(s, DEFAULT_ORACLE_CAP)
}

/// [`jacobi_eigh`] with an explicit dimension cap.
pub fn jacobi_eigh_with_cap(s: &Array2<f64>, cap: usize) -> Result<(Vec<f64>, Array2<f64>)> {
    let n = s.nrows();
    if s.ncols() != n {
        return Err(Error::dims(format!(
            "eigensolver needs a square matrix, got {}x{}",
            s.nrows(),
            s.ncols()
        )));
    }
    if n > cap {
        return Err(Error::CapacityExceeded { n, cap });
    }
    let flat = s.as_slice().expect("row-major");
    let mut max_asym = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            max_asym = max_asym.max((flat[i * n + j] - flat[j * n + i]).abs());
        }
    }
    if max_asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric {
            max_asymmetry: max_asym,
        });
    }

    // Rotations maintain only the strict upper triangle; the lower half of
    // the working copy goes stale and is never read. Eigenvectors accumulate
    // transposed (one per row) so their rotations touch contiguous memory.
    let mut a = flat.to_vec();
    let mut vt = vec![0.0f64; n * n];
    for p in 0..n {
        vt[p * n + p] = 1.0;
    }
    let mut d: Vec<f64> = (0..n).map(|p| a[p * n + p]).collect();
    let mut b = d.clone();
    let mut z = vec![0.0f64; n];

    let norm_f = linalg::dot(flat, flat).sqrt();
    let stop = OFFDIAG_TOL * norm_f;

    for sweep in 0..MAX_SWEEPS {
        let mut off_sq = 0.0;
        let mut sm = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                off_sq += apq * apq;
                sm += apq.abs();
            }
        }
        if (2.0 * off_sq).sqrt() <= stop {
            break;
        }
        // Threshold scheduling from the classical cyclic scheme: skip tiny
        // rotations in the first sweeps, then rotate everything.
        let tresh = if sweep < 3 {
            0.2 * sm / (n * n) as f64
        } else {
            0.0
        };

        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let g = 100.0 * apq.abs();
                if sweep > 3 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                    a[p * n + q] = 0.0;
                } else if apq.abs() > tresh {
                    let mut h = d[q] - d[p];
                    let t = if h.abs() + g == h.abs() {
                        apq / h
                    } else {
                        let theta = 0.5 * h / apq;
                        let mut t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                        if theta < 0.0 {
                            t = -t;
                        }
                        t
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let sn = t * c;
                    let tau = sn / (1.0 + c);
                    h = t * apq;
                    z[p] -= h;
                    z[q] += h;
                    d[p] -= h;
                    d[q] += h;
                    a[p * n + q] = 0.0;
                    let rot = |x: f64, y: f64| (x - sn * (y + tau * x), y + sn * (x - tau * y));
                    for j in 0..p {
                        let (x, y) = rot(a[j * n + p], a[j * n + q]);
                        a[j * n + p] = x;
                        a[j * n + q] = y;
                    }
                    for j in p + 1..q {
                        let (x, y) = rot(a[p * n + j], a[j * n + q]);
                        a[p * n + j] = x;
                        a[j * n + q] = y;
                    }
                    for j in q + 1..n {
                        let (x, y) = rot(a[p * n + j], a[q * n + j]);
                        a[p * n + j] = x;
                        a[q * n + j] = y;
                    }
                    let (head, tail) = vt.split_at_mut(q * n);
                    let row_p = &mut head[p * n..p * n + n];
                    let row_q = &mut tail[..n];
                    for j in 0..n {
                        let (x, y) = rot(row_p[j], row_q[j]);
                        row_p[j] = x;
                        row_q[j] = y;
                    }
                }
            }
        }
        for p in 0..n {
            b[p] += z[p];
            d[p] = b[p];
            z[p] = 0.0;
        }
    }

    // Sort eigenpairs by descending eigenvalue; the stable sort keeps ties in
    // ascending original-index order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].partial_cmp(&d[i]).expect("finite eigenvalues"));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut vectors = vec![0.0f64; n * n];
    for (new_col, &old_row) in order.iter().enumerate() {
        for r in 0..n {
            vectors[r * n + new_col] = vt[old_row * n + r];
        }
    }
    Ok((
        values,
        Array2::from_shape_vec((n, n), vectors).expect("square"),
    ))
}

/// Exact eigensystem of an NLM operator, stored through its symmetric
/// conjugate.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    n: usize,
    eigenvalues: Vec<f64>,
    /// Orthogonal eigenvector matrix of the symmetric conjugate (columns).
    vectors: Array2<f64>,
    d_sqrt: Vec<f64>,
}

/// Eigendecomposition via the symmetric conjugate, with the default cap.
pub fn decompose_nlm(op: &NlmOperator) -> Result<SpectralDecomposition> {
    decompose_nlm_with_cap(op, DEFAULT_ORACLE_CAP)
}

/// [`decompose_nlm`] with an explicit dimension cap.
pub fn decompose_nlm_with_cap(op: &NlmOperator, cap: usize) -> Result<SpectralDecomposition> {
    let s = symmetrize(op);
    let (eigenvalues, vectors) = jacobi_eigh_with_cap(&s, cap)?;
    Ok(SpectralDecomposition {
        n: op.n(),
        eigenvalues,
        vectors,
        d_sqrt: op.degrees().iter().map(|d| d.sqrt()).collect(),
    })
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Eigenvalues sorted descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthogonal eigenvector matrix of the symmetric conjugate.
    pub fn vectors(&self) -> &Array2<f64> {
        &self.vectors
    }

    pub fn d_sqrt(&self) -> &[f64] {
        &self.d_sqrt
    }

    fn check_len(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.n {
            return Err(Error::dims(format!(
                "decomposition is for dimension {}, vector has length {}",
                self.n,
                y.len()
            )));
        }
        Ok(())
    }

    /// Applies `D^{-1/2} O g(Λ) Oᵀ D^{1/2}` to `y` for per-eigenvalue gains
    /// `g(λ_i)` already evaluated into `gains`.
    fn apply_gains(&self, gains: &[f64], y: &[f64]) -> Vec<f64> {
        let n = self.n;
        let o = self.vectors.as_slice().expect("row-major");
        let u: Vec<f64> = y
            .iter()
            .zip(&self.d_sqrt)
            .map(|(v, d)| v * d)
            .collect();
        // z = Oᵀ u, accumulated row by row for cache friendliness.
        let mut z = vec![0.0f64; n];
        for r in 0..n {
            let row = &o[r * n..(r + 1) * n];
            let ur = u[r];
            for k in 0..n {
                z[k] += row[k] * ur;
            }
        }
        for (zk, g) in z.iter_mut().zip(gains) {
            *zk *= g;
        }
        // out = D^{-1/2} (O z).
        (0..n)
            .map(|r| linalg::dot(&o[r * n..(r + 1) * n], &z) / self.d_sqrt[r])
            .collect()
    }

    /// Keeps the `k` largest eigenvalues and applies the truncated operator.
    pub fn apply_rank_truncated(&self, k: usize, y: &[f64]) -> Result<Vec<f64>> {
        self.check_len(y)?;
        if k < 1 || k > self.n {
            return Err(Error::RankOutOfRange { k, n: self.n });
        }
        let gains: Vec<f64> = self
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(i, &l)| if i < k { l } else { 0.0 })
            .collect();
        Ok(self.apply_gains(&gains, y))
    }

    /// Applies `f(A)` exactly through the eigensystem.
    ///
    /// Eigenvalues are clamped to `[0, 1]` before evaluating the filter; a
    /// clamp larger than `1e-9` indicates numerical drift and is logged.
    pub fn apply_filtered_exact(&self, filter: &FilterSpec, y: &[f64]) -> Result<Vec<f64>> {
        self.check_len(y)?;
        let gains: Vec<f64> = self
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                let clamped = l.clamp(0.0, 1.0);
                if (l - clamped).abs() > CLAMP_LOG_THRESHOLD {
                    log::warn!("eigenvalue {i} = {l} clamped to [0,1] before filtering");
                }
                filter.eval_unchecked(clamped)
            })
            .collect();
        Ok(self.apply_gains(&gains, y))
    }

    /// Applies an arbitrary spectral map `λ ↦ g(λ)` without clamping.
    pub fn apply_spectral_fn(&self, g: impl Fn(f64) -> f64, y: &[f64]) -> Result<Vec<f64>> {
        self.check_len(y)?;
        let gains: Vec<f64> = self.eigenvalues.iter().map(|&l| g(l)).collect();
        Ok(self.apply_gains(&gains, y))
    }

    /// Writes the spectrum as `index,eigenvalue` CSV rows.
    pub fn write_spectrum_csv(&self, path: &Path) -> Result<()> {
        let display = path.display().to_string();
        let mut out = std::io::BufWriter::new(
            std::fs::File::create(path).map_err(|e| Error::io(&display, e))?,
        );
        let mut text = String::from("index,eigenvalue\n");
        for (i, l) in self.eigenvalues.iter().enumerate() {
            text.push_str(&format!("{i},{l:.17e}\n"));
        }
        out.write_all(text.as_bytes())
            .map_err(|e| Error::io(&display, e))
    }
}

/// A genuine NLM operator of a seeded white-noise image.
///
/// `n` must be a perfect square; the image is `√n`×`√n` with intensities
/// i.i.d. uniform on `[0, 1]`. Construction guarantees every operator
/// invariant (row-stochastic, positive diagonalizable, non-symmetric).
pub fn random_nlm_operator(n: usize, seed: u64, p: usize, h: f64) -> Result<NlmOperator> {
    let side = (n as f64).sqrt().round() as usize;
    if side * side != n {
        return Err(Error::invalid(format!(
            "random operator size must be a perfect square, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pixels: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    let img = Image::new(side, side, pixels, ValueRange::Unit)?;
    NlmOperator::build(&img, p, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::Image;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn textured_image(side: usize, scale: u64) -> Image {
        let pixels: Vec<f64> = (0..side * side)
            .map(|i| ((i as u64 * scale) % 256) as f64)
            .collect();
        Image::new(side, side, pixels, ValueRange::EightBit).unwrap()
    }

    #[test]
    fn symmetrize_identity_weights() {
        let img = Image::constant(1, 2, 0.0, ValueRange::EightBit).unwrap();
        // Constant image: W = ones(2), D = 2I, S = ones/2.
        let op = NlmOperator::build(&img, 1, 0.5).unwrap();
        let s = symmetrize(&op);
        for v in s.iter() {
            assert_abs_diff_eq!(*v, 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn symmetrize_two_pixel_example() {
        let img = Image::new(1, 2, vec![0.0, 255.0], ValueRange::EightBit).unwrap();
        let op = NlmOperator::build(&img, 1, 0.5).unwrap();
        let s = symmetrize(&op);
        let e2 = (-2.0f64).exp();
        // D_11 = D_22 = 1 + e^{-2}; S_12 = e^{-2}/(1+e^{-2}).
        assert_abs_diff_eq!(s[[0, 1]], e2 / (1.0 + e2), epsilon = 1e-15);
        assert_eq!(s[[0, 1]], s[[1, 0]]);
    }

    #[test]
    fn jacobi_diagonal_input() {
        let s = Array2::from_diag(&ndarray::arr1(&[0.5, 2.0, -1.0, 1.0]));
        let (vals, vecs) = jacobi_eigh(&s).unwrap();
        assert_eq!(vals, vec![2.0, 1.0, 0.5, -1.0]);
        // Eigenvectors are signed unit basis vectors in permuted order.
        let expected_cols = [1usize, 3, 0, 2];
        for (col, &src) in expected_cols.iter().enumerate() {
            for r in 0..4 {
                let want = if r == src { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(vecs[[r, col]].abs(), want, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn jacobi_two_by_two_closed_form() {
        let s = array![[0.8, 0.2], [0.2, 0.8]];
        let (vals, vecs) = jacobi_eigh(&s).unwrap();
        assert_abs_diff_eq!(vals[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(vals[1], 0.6, epsilon = 1e-14);
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        // First column ∝ (1,1)/√2, second ∝ (1,−1)/√2.
        assert_abs_diff_eq!(vecs[[0, 0]].abs(), inv_sqrt2, epsilon = 1e-14);
        assert_abs_diff_eq!((vecs[[0, 0]] - vecs[[1, 0]]).abs(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!((vecs[[0, 1]] + vecs[[1, 1]]).abs(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn jacobi_residual_on_random_symmetric() {
        let n = 50;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut s = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in i..n {
                let v = rng.gen_range(-1.0..1.0);
                s[[i, j]] = v;
                s[[j, i]] = v;
            }
        }
        let (vals, vecs) = jacobi_eigh(&s).unwrap();
        // Residual ‖S·V − V·Λ‖_max and orthogonality check.
        let sv = s.dot(&vecs);
        for k in 0..n {
            for r in 0..n {
                let resid = sv[[r, k]] - vecs[[r, k]] * vals[k];
                assert!(resid.abs() < 1e-10, "residual {resid} at ({r},{k})");
            }
        }
        let gram = vecs.t().dot(&vecs);
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((gram[[i, j]] - want).abs() < 1e-9);
            }
        }
        // Sorted descending.
        for k in 1..n {
            assert!(vals[k - 1] >= vals[k]);
        }
    }

    #[test]
    fn jacobi_rejects_asymmetry_and_cap() {
        let s = array![[1.0, 0.1], [0.2, 1.0]];
        assert!(matches!(
            jacobi_eigh(&s),
            Err(Error::NotSymmetric { .. })
        ));
        let ok = array![[1.0, 0.1], [0.1, 1.0]];
        assert!(matches!(
            jacobi_eigh_with_cap(&ok, 1),
            Err(Error::CapacityExceeded { .. })
        ));
    }

    #[test]
    fn decompose_single_pixel() {
        let img = Image::constant(1, 1, 3.0, ValueRange::EightBit).unwrap();
        let op = NlmOperator::build(&img, 1, 1.0).unwrap();
        let dec = decompose_nlm(&op).unwrap();
        assert_eq!(dec.eigenvalues().len(), 1);
        assert_abs_diff_eq!(dec.eigenvalues()[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn decompose_constant_image_is_rank_one() {
        let img = Image::constant(2, 2, 77.0, ValueRange::EightBit).unwrap();
        let op = NlmOperator::build(&img, 1, 0.5).unwrap();
        let dec = decompose_nlm(&op).unwrap();
        assert_abs_diff_eq!(dec.eigenvalues()[0], 1.0, epsilon = 1e-12);
        for &l in &dec.eigenvalues()[1..] {
            assert_abs_diff_eq!(l, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn decompose_matches_operator_action() {
        let img = textured_image(6, 53);
        let op = NlmOperator::build(&img, 3, 0.6).unwrap();
        let dec = decompose_nlm(&op).unwrap();
        assert_abs_diff_eq!(dec.eigenvalues()[0], 1.0, epsilon = 1e-10);
        assert!(*dec.eigenvalues().last().unwrap() > 0.0);
        // Identity spectral map reproduces A y.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let y: Vec<f64> = (0..op.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let via_dec = dec.apply_spectral_fn(|l| l, &y).unwrap();
            let direct = op.apply(&y).unwrap();
            let scale = linalg::norm2(&direct).max(1e-300);
            for (a, b) in via_dec.iter().zip(&direct) {
                assert!((a - b).abs() / scale < 1e-8, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn rank_truncation_limits() {
        let img = textured_image(5, 91);
        let op = NlmOperator::build(&img, 3, 0.5).unwrap();
        let dec = decompose_nlm(&op).unwrap();
        let y: Vec<f64> = (0..25).map(|i| (i as f64 * 0.37).sin()).collect();
        // k = n reproduces the full operator.
        let full = dec.apply_rank_truncated(25, &y).unwrap();
        let direct = op.apply(&y).unwrap();
        for (a, b) in full.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-8);
        }
        // The all-ones vector survives any k.
        let ones = vec![1.0; 25];
        for k in [1, 3, 25] {
            let out = dec.apply_rank_truncated(k, &ones).unwrap();
            for v in &out {
                assert!((v - 1.0).abs() < 1e-8);
            }
        }
        assert!(dec.apply_rank_truncated(0, &y).is_err());
        assert!(dec.apply_rank_truncated(26, &y).is_err());
    }

    #[test]
    fn rank_one_on_constant_operator_is_mean() {
        let img = Image::constant(2, 2, 5.0, ValueRange::EightBit).unwrap();
        let op = NlmOperator::build(&img, 1, 0.5).unwrap();
        let dec = decompose_nlm(&op).unwrap();
        let y = vec![1.0, 2.0, 3.0, 6.0];
        let out = dec.apply_rank_truncated(1, &y).unwrap();
        for v in &out {
            assert_abs_diff_eq!(*v, 3.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn hard_threshold_above_second_eigenvalue_equals_rank_one() {
        let img = textured_image(4, 37);
        let op = NlmOperator::build(&img, 3, 0.5).unwrap();
        let dec = decompose_nlm(&op).unwrap();
        let l2 = dec.eigenvalues()[1];
        assert!(l2 < 1.0 - 1e-6, "need a spectral gap, λ2 = {l2}");
        let omega = (1.0 + l2) / 2.0;
        let filter = FilterSpec::hard_threshold(omega).unwrap();
        let y: Vec<f64> = (0..16).map(|i| ((i * 7) % 5) as f64).collect();
        let a = dec.apply_filtered_exact(&filter, &y).unwrap();
        let b = dec.apply_rank_truncated(1, &y).unwrap();
        for (x, z) in a.iter().zip(&b) {
            assert!((x - z).abs() < 1e-12);
        }
    }

    #[test]
    fn filtered_exact_preserves_ones() {
        let img = textured_image(5, 29);
        let op = NlmOperator::build(&img, 3, 0.4).unwrap();
        let dec = decompose_nlm(&op).unwrap();
        let filter = FilterSpec::slanted_butterworth(0.6, 8).unwrap();
        let out = dec.apply_filtered_exact(&filter, &vec![1.0; 25]).unwrap();
        for v in &out {
            assert!((v - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn random_operator_is_deterministic_and_valid() {
        let a = random_nlm_operator(64, 5, 3, 0.7).unwrap();
        let b = random_nlm_operator(64, 5, 3, 0.7).unwrap();
        assert_eq!(a, b);
        let c = random_nlm_operator(64, 6, 3, 0.7).unwrap();
        assert_ne!(a, c);
        // Invariants: row-stochastic, spectrum in (0, 1].
        let ones = vec![1.0; 64];
        for v in a.apply(&ones).unwrap() {
            assert!((v - 1.0).abs() < 1e-10);
        }
        let dec = decompose_nlm(&a).unwrap();
        assert_abs_diff_eq!(dec.eigenvalues()[0], 1.0, epsilon = 1e-10);
        assert!(*dec.eigenvalues().last().unwrap() > 0.0);
        assert!(random_nlm_operator(50, 1, 3, 0.7).is_err());
    }

    #[test]
    fn spectrum_csv_round_trips_by_eye() {
        let img = textured_image(3, 41);
        let op = NlmOperator::build(&img, 1, 0.9).unwrap();
        let dec = decompose_nlm(&op).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("spec.csv");
        dec.write_spectrum_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("index,eigenvalue"));
        assert_eq!(lines.count(), 9);
    }
}
