//! Chebyshev expansion of scalar filters and its matrix-free evaluation.
//!
//! A filter defined on `[0, 1]` is mapped to `[−1, 1]` through `y = 2z − 1`
//! and expanded in Chebyshev polynomials of the first kind. Coefficients come
//! from the `(N+1)`-point Gauss–Chebyshev quadrature, which is exact for the
//! discrete inner products up to the truncation degree. The coefficient of
//! `T_0` is stored pre-halved, i.e. `coeffs[0]` is the actual `T_0`
//! coefficient of the series, so evaluation sums `Σ coeffs[j]·T_j` directly.
//!
//! The matrix form `S_N(f, A)·y = Σ coeffs[j]·T_j(2A − I)·y` is evaluated by
//! a backward Clenshaw recursion that only performs matrix-vector products
//! with `T = 2A − I`; no matrix-matrix product or explicit `f(A)` is ever
//! formed. Because `coeffs[0]` is pre-halved at build time, the final
//! Clenshaw step adds `coeffs[0]·y` directly instead of halving a raw inner
//! product; the equivalence with the explicit three-term recursion is pinned
//! by the oracle tests.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::filters::FilterSpec;
use crate::linalg;
use crate::operator::LinearOperator;
use crate::spectral::SpectralDecomposition;

/// Seed for the fixed probe ensemble of [`relative_truncation_error`].
const PROBE_SEED: u64 = 0x0c4e_b5ee_d001;

/// Number of random probe vectors used by [`relative_truncation_error`].
const PROBE_COUNT: usize = 16;

/// A truncated Chebyshev expansion of a scalar function on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevExpansion {
    coeffs: Vec<f64>,
    source: String,
    residual_at_one: f64,
}

impl ChebyshevExpansion {
    /// Expands an arbitrary scalar function on `[0, 1]` to degree `n`.
    ///
    /// Fails when the function is non-finite at any quadrature node.
    pub fn of_fn(f: impl Fn(f64) -> f64, n: usize, source: impl Into<String>) -> Result<Self> {
        if n < 1 {
            return Err(Error::invalid(
                "expansion degree must be at least 1".to_string(),
            ));
        }
        let m = n + 1;
        // Samples of the mapped function g(y) = f((y+1)/2) at the Chebyshev
        // nodes y_k = cos(π(k−½)/M).
        let mut samples = Vec::with_capacity(m);
        let mut angles = Vec::with_capacity(m);
        for k in 0..m {
            let theta = PI * (k as f64 + 0.5) / m as f64;
            let y = theta.cos();
            let z = 0.5 * (y + 1.0);
            let v = f(z);
            if !v.is_finite() {
                return Err(Error::NonFiniteSample {
                    node: k,
                    x: z,
                    value: v,
                });
            }
            samples.push(v);
            angles.push(theta);
        }
        let scale = 2.0 / m as f64;
        let mut coeffs = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let mut acc = 0.0;
            for k in 0..m {
                acc += samples[k] * (j as f64 * angles[k]).cos();
            }
            coeffs.push(scale * acc);
        }
        coeffs[0] *= 0.5;

        let mut exp = ChebyshevExpansion {
            coeffs,
            source: source.into(),
            residual_at_one: 0.0,
        };
        exp.residual_at_one = (exp.eval(1.0)? - f(1.0)).abs();
        Ok(exp)
    }

    /// Expands a [`FilterSpec`] to degree `n`.
    pub fn of_filter(filter: &FilterSpec, n: usize) -> Result<Self> {
        Self::of_fn(|x| filter.eval_unchecked(x), n, filter.to_string())
    }

    /// Coefficients `coeffs[0..=N]`; `coeffs[0]` is the pre-halved `T_0` term.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Truncation degree `N`.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Description of the expanded function.
    pub fn source(&self) -> &str {
        &self.source
    }

    /// `|S_N(1) − f(1)|` measured when the expansion was built.
    pub fn residual_at_one(&self) -> f64 {
        self.residual_at_one
    }

    /// Evaluates the truncated series at `x ∈ [0, 1]` by scalar Clenshaw
    /// recursion on `y = 2x − 1`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::FilterDomain { x });
        }
        let y = 2.0 * x - 1.0;
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coeffs[1..].iter().rev() {
            let next = 2.0 * y * b1 - b2 + c;
            b2 = b1;
            b1 = next;
        }
        Ok(y * b1 - b2 + self.coeffs[0])
    }

    /// Writes `index,coefficient` CSV rows (full precision, for inspection
    /// and cross-implementation comparison).
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let display = path.display().to_string();
        let mut out = std::io::BufWriter::new(
            std::fs::File::create(path).map_err(|e| Error::io(&display, e))?,
        );
        let mut text = format!("# source: {}\n", self.source);
        text.push_str(&format!("# residual_at_one: {:.17e}\n", self.residual_at_one));
        text.push_str("index,coefficient\n");
        for (i, c) in self.coeffs.iter().enumerate() {
            text.push_str(&format!("{i},{c:.17e}\n"));
        }
        out.write_all(text.as_bytes())
            .map_err(|e| Error::io(&display, e))
    }

    /// Reads an expansion written by [`write_csv`](Self::write_csv).
    pub fn read_csv(path: &Path) -> Result<Self> {
        let display = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(&display, e))?;
        let mut source = String::new();
        let mut residual_at_one = 0.0;
        let mut coeffs = Vec::new();
        let mut saw_header = false;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(s) = rest.strip_prefix("source:") {
                    source = s.trim().to_string();
                } else if let Some(r) = rest.strip_prefix("residual_at_one:") {
                    residual_at_one = r.trim().parse().map_err(|_| {
                        Error::format(&display, format!("bad residual on line {}", lineno + 1))
                    })?;
                }
                continue;
            }
            if !saw_header {
                if line != "index,coefficient" {
                    return Err(Error::format(&display, "missing `index,coefficient` header"));
                }
                saw_header = true;
                continue;
            }
            let (idx_str, coeff_str) = line.split_once(',').ok_or_else(|| {
                Error::format(&display, format!("malformed row on line {}", lineno + 1))
            })?;
            let idx: usize = idx_str.trim().parse().map_err(|_| {
                Error::format(&display, format!("bad index on line {}", lineno + 1))
            })?;
            if idx != coeffs.len() {
                return Err(Error::format(
                    &display,
                    format!("row index {idx} out of order on line {}", lineno + 1),
                ));
            }
            let c: f64 = coeff_str.trim().parse().map_err(|_| {
                Error::format(&display, format!("bad coefficient on line {}", lineno + 1))
            })?;
            coeffs.push(c);
        }
        if coeffs.len() < 2 {
            return Err(Error::format(&display, "expansion needs at least 2 coefficients"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::format(&display, "non-finite coefficient"));
        }
        Ok(ChebyshevExpansion {
            coeffs,
            source,
            residual_at_one,
        })
    }
}

/// Evaluates `S_N(f, A)·y` by the matrix Clenshaw recursion.
///
/// Maintains two carry vectors and iterates the coefficients from highest to
/// lowest; every step costs one product with `T = 2A − I`, i.e. one operator
/// matvec plus vector updates.
pub fn clenshaw_matvec(
    op: &impl LinearOperator,
    exp: &ChebyshevExpansion,
    y: &[f64],
) -> Result<Vec<f64>> {
    let n = op.dim();
    if y.len() != n {
        return Err(Error::dims(format!(
            "operator dimension {n} does not match vector length {}",
            y.len()
        )));
    }
    let coeffs = exp.coeffs();
    let mut d = vec![0.0f64; n];
    let mut dd = vec![0.0f64; n];
    let mut av = vec![0.0f64; n];
    for &c in coeffs[1..].iter().rev() {
        op.apply_into(&d, &mut av);
        // (d, dd) <- (2·(2A − I)·d − dd + c·y, d), updated in place.
        for i in 0..n {
            let t_d = 2.0 * av[i] - d[i];
            let next = 2.0 * t_d - dd[i] + c * y[i];
            dd[i] = d[i];
            d[i] = next;
        }
    }
    op.apply_into(&d, &mut av);
    let mut out = vec![0.0f64; n];
    for i in 0..n {
        let t_d = 2.0 * av[i] - d[i];
        out[i] = t_d - dd[i] + coeffs[0] * y[i];
    }
    Ok(out)
}

/// Truncation error bound in the spectral norm:
/// `(2/(π·m))·deriv_norm / (N − m)^m · kappa`.
///
/// `deriv_norm` is the Chebyshev-weighted L1 norm of the `(m+1)`-th
/// derivative of the mapped function on `[−1, 1]`; `kappa` is the spectral
/// condition number of `D^{1/2}`.
pub fn truncation_error_bound(deriv_norm: f64, m: u32, n_terms: usize, kappa: f64) -> Result<f64> {
    if m < 1 {
        return Err(Error::invalid("smoothness order m must be >= 1"));
    }
    if n_terms <= m as usize {
        return Err(Error::invalid(format!(
            "degree N = {n_terms} must exceed smoothness order m = {m}"
        )));
    }
    if !(deriv_norm >= 0.0) {
        return Err(Error::invalid(format!(
            "derivative norm must be non-negative, got {deriv_norm}"
        )));
    }
    if !(kappa >= 1.0) {
        return Err(Error::invalid(format!(
            "condition number must be at least 1, got {kappa}"
        )));
    }
    let c = 2.0 / (PI * m as f64) * deriv_norm;
    Ok(c / ((n_terms - m as usize) as f64).powi(m as i32) * kappa)
}

/// Frobenius-norm variant of [`truncation_error_bound`]: multiplies by `√n`
/// and takes the Frobenius condition number of `D^{1/2}`.
pub fn truncation_error_bound_frobenius(
    deriv_norm: f64,
    m: u32,
    n_terms: usize,
    kappa_frobenius: f64,
    n_dim: usize,
) -> Result<f64> {
    Ok((n_dim as f64).sqrt() * truncation_error_bound(deriv_norm, m, n_terms, kappa_frobenius)?)
}

/// How probe errors are combined in [`relative_truncation_error`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeAggregate {
    Max,
    Mean,
}

/// Relative error of the degree-`n_terms` expansion against the exact
/// filtered operator, probed on a fixed set of seeded random unit vectors.
///
/// For each probe `v` the error is `‖S_N(f,A)v − f(A)v‖₂ / ‖f(A)v‖₂` with
/// `f(A)v` from the eigendecomposition oracle; probes are combined by max or
/// mean. This vector-probe measurement is a lower bound for the matrix-norm
/// ratio and converges identically in `N`.
pub fn relative_truncation_error(
    op: &impl LinearOperator,
    dec: &SpectralDecomposition,
    filter: &FilterSpec,
    n_terms: usize,
    aggregate: ProbeAggregate,
) -> Result<f64> {
    if op.dim() != dec.n() {
        return Err(Error::dims(format!(
            "operator dimension {} does not match decomposition dimension {}",
            op.dim(),
            dec.n()
        )));
    }
    let exp = ChebyshevExpansion::of_filter(filter, n_terms)?;
    let n = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let mut errors = Vec::with_capacity(PROBE_COUNT);
    for _ in 0..PROBE_COUNT {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = linalg::norm2(&v);
        if norm == 0.0 {
            continue;
        }
        for x in &mut v {
            *x /= norm;
        }
        let exact = dec.apply_filtered_exact(filter, &v)?;
        let exact_norm = linalg::norm2(&exact);
        if exact_norm == 0.0 {
            continue;
        }
        let approx = clenshaw_matvec(op, &exp, &v)?;
        let diff_norm = {
            let mut acc = 0.0;
            for (a, b) in approx.iter().zip(&exact) {
                let d = a - b;
                acc += d * d;
            }
            acc.sqrt()
        };
        errors.push(diff_norm / exact_norm);
    }
    if errors.is_empty() {
        return Err(Error::DegenerateOperator);
    }
    Ok(match aggregate {
        ProbeAggregate::Max => errors.iter().fold(0.0f64, |m, e| m.max(*e)),
        ProbeAggregate::Mean => errors.iter().sum::<f64>() / errors.len() as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::{Image, ValueRange};
    use crate::operator::NlmOperator;
    use crate::spectral::decompose_nlm;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn constant_function_expansion() {
        let exp = ChebyshevExpansion::of_fn(|_| 1.0, 12, "one").unwrap();
        assert_abs_diff_eq!(exp.coeffs()[0], 1.0, epsilon = 1e-14);
        for &c in &exp.coeffs()[1..] {
            assert!(c.abs() < 1e-14);
        }
        for x in [0.0, 0.3, 0.77, 1.0] {
            assert_abs_diff_eq!(exp.eval(x).unwrap(), 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn identity_function_expansion() {
        let exp = ChebyshevExpansion::of_fn(|z| z, 8, "z").unwrap();
        assert_abs_diff_eq!(exp.coeffs()[0], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(exp.coeffs()[1], 0.5, epsilon = 1e-14);
        for &c in &exp.coeffs()[2..] {
            assert!(c.abs() < 1e-14);
        }
        assert_abs_diff_eq!(exp.eval(0.25).unwrap(), 0.25, epsilon = 1e-14);
    }

    #[test]
    fn slanted_butterworth_reconstruction() {
        let filter = FilterSpec::slanted_butterworth(0.7, 4).unwrap();
        let exp = ChebyshevExpansion::of_filter(&filter, 150).unwrap();
        let mut max_err = 0.0f64;
        for i in 0..=1000 {
            let x = i as f64 / 1000.0;
            let err = (exp.eval(x).unwrap() - filter.eval_unchecked(x)).abs();
            max_err = max_err.max(err);
        }
        assert!(max_err < 1e-6, "max reconstruction error {max_err}");
        // Cutoff value of the underlying filter.
        assert_abs_diff_eq!(
            exp.eval(0.7).unwrap(),
            0.7 * std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-6
        );
        assert!(exp.residual_at_one() < 1e-10);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert!(ChebyshevExpansion::of_fn(|z| z, 0, "z").is_err());
        let err = ChebyshevExpansion::of_fn(|z| (z - 0.5).ln(), 16, "log").unwrap_err();
        assert!(matches!(err, Error::NonFiniteSample { .. }));
        let exp = ChebyshevExpansion::of_fn(|z| z, 4, "z").unwrap();
        assert!(exp.eval(1.5).is_err());
    }

    #[test]
    fn clenshaw_on_identity_operator() {
        let n = 7;
        let mut ident = ndarray::Array2::<f64>::zeros((n, n));
        for i in 0..n {
            ident[[i, i]] = 1.0;
        }
        let filter = FilterSpec::slanted_butterworth(0.5, 4).unwrap();
        let exp = ChebyshevExpansion::of_filter(&filter, 150).unwrap();
        let y: Vec<f64> = (0..n).map(|i| (i as f64) - 3.0).collect();
        let out = clenshaw_matvec(&ident, &exp, &y).unwrap();
        for (a, b) in out.iter().zip(&y) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn clenshaw_on_constant_image_operator() {
        let img = Image::constant(3, 3, 50.0, ValueRange::EightBit).unwrap();
        let op = NlmOperator::build(&img, 3, 0.7).unwrap();
        let filter = FilterSpec::slanted_butterworth(0.6, 8).unwrap();
        let exp = ChebyshevExpansion::of_filter(&filter, 150).unwrap();
        let y: Vec<f64> = (0..9).map(|i| (i as f64 * 1.3).cos()).collect();
        let mean = y.iter().sum::<f64>() / 9.0;
        let out = clenshaw_matvec(&op, &exp, &y).unwrap();
        for v in &out {
            assert!((v - mean).abs() < 1e-6, "{v} vs {mean}");
        }
    }

    #[test]
    fn clenshaw_matches_two_by_two_eigendecomposition() {
        // Eigenvalues 1 and 0.6 with eigenvectors (1,1) and (1,−1).
        let a = array![[0.8, 0.2], [0.2, 0.8]];
        let filter = FilterSpec::slanted_butterworth(0.5, 4).unwrap();
        let exp = ChebyshevExpansion::of_filter(&filter, 150).unwrap();
        let out = clenshaw_matvec(&a, &exp, &[1.0, 0.0]).unwrap();
        let f06 = 0.6 * (1.0 + 0.8f64.powi(8)).powf(-0.5);
        let expected = [0.5 + 0.5 * f06, 0.5 - 0.5 * f06];
        for (a, b) in out.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn clenshaw_preserves_constants() {
        let pixels: Vec<f64> = (0..16).map(|i| ((i * 61) % 256) as f64).collect();
        let img = Image::new(4, 4, pixels, ValueRange::EightBit).unwrap();
        let op = NlmOperator::build(&img, 3, 0.5).unwrap();
        let filter = FilterSpec::slanted_butterworth(0.3, 15).unwrap();
        let exp = ChebyshevExpansion::of_filter(&filter, 150).unwrap();
        let out = clenshaw_matvec(&op, &exp, &vec![1.0; 16]).unwrap();
        let tol = exp.residual_at_one().max(1e-12) * 10.0;
        for v in &out {
            assert!((v - 1.0).abs() < tol, "{v}, tol {tol}");
        }
    }

    #[test]
    fn clenshaw_rejects_length_mismatch() {
        let a = array![[1.0, 0.0], [0.0, 1.0]];
        let exp = ChebyshevExpansion::of_fn(|z| z, 4, "z").unwrap();
        assert!(clenshaw_matvec(&a, &exp, &[1.0]).is_err());
    }

    #[test]
    fn bound_arithmetic() {
        assert_eq!(truncation_error_bound(0.0, 1, 10, 1.0).unwrap(), 0.0);
        // m=1, N=11, deriv_norm=π/2, kappa=1 -> (2/π)(π/2)/10 = 0.1.
        assert_abs_diff_eq!(
            truncation_error_bound(PI / 2.0, 1, 11, 1.0).unwrap(),
            0.1,
            epsilon = 1e-15
        );
        let b1 = truncation_error_bound(3.0, 2, 40, 1.5).unwrap();
        let b2 = truncation_error_bound(3.0, 2, 40, 3.0).unwrap();
        assert_abs_diff_eq!(b2, 2.0 * b1, epsilon = 1e-15);
        assert!(truncation_error_bound(1.0, 1, 1, 1.0).is_err());
        assert!(truncation_error_bound(1.0, 0, 5, 1.0).is_err());
        let f = truncation_error_bound_frobenius(PI / 2.0, 1, 11, 1.0, 16).unwrap();
        assert_abs_diff_eq!(f, 0.4, epsilon = 1e-15);
    }

    #[test]
    fn relative_error_for_identity_filter_is_tiny() {
        // The degree-1 expansion of f(z)=z is exact, so the only residue is
        // the oracle's own accuracy; a 2-pixel operator keeps that at
        // machine precision.
        let img = Image::new(1, 2, vec![0.0, 255.0], ValueRange::EightBit).unwrap();
        let op = NlmOperator::build(&img, 1, 0.5).unwrap();
        let dec = decompose_nlm(&op).unwrap();
        let identity = FilterSpec::hard_threshold(0.0).unwrap();
        for n_terms in [1, 5, 50] {
            let err =
                relative_truncation_error(&op, &dec, &identity, n_terms, ProbeAggregate::Max)
                    .unwrap();
            assert!(err < 1e-13, "N = {n_terms}: err = {err}");
        }
    }

    #[test]
    fn identity_expansion_reproduces_the_operator_action() {
        // Oracle-free check at larger n: clenshaw with the exact degree-1
        // expansion of f(z)=z equals a plain matvec.
        let pixels: Vec<f64> = (0..16).map(|i| ((i * 37) % 256) as f64).collect();
        let img = Image::new(4, 4, pixels, ValueRange::EightBit).unwrap();
        let op = NlmOperator::build(&img, 3, 0.6).unwrap();
        let identity = FilterSpec::hard_threshold(0.0).unwrap();
        let exp = ChebyshevExpansion::of_filter(&identity, 5).unwrap();
        let y: Vec<f64> = (0..16).map(|i| ((i as f64) * 0.7).sin()).collect();
        let via_clenshaw = clenshaw_matvec(&op, &exp, &y).unwrap();
        let direct = op.apply(&y).unwrap();
        for (a, b) in via_clenshaw.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
    }

    #[test]
    fn relative_error_converges_and_orders_by_d() {
        let op = crate::spectral::random_nlm_operator(100, 21, 3, 0.7).unwrap();
        let dec = decompose_nlm(&op).unwrap();
        let f = FilterSpec::slanted_butterworth(0.7, 4).unwrap();
        let err_big =
            relative_truncation_error(&op, &dec, &f, 300, ProbeAggregate::Max).unwrap();
        assert!(err_big < 1e-8, "converged error {err_big}");
        // At fixed N = 50 the error grows with the filter order.
        let mut prev = 0.0;
        for d in [4u32, 8, 16] {
            let f = FilterSpec::slanted_butterworth(0.7, d).unwrap();
            let err =
                relative_truncation_error(&op, &dec, &f, 50, ProbeAggregate::Mean).unwrap();
            assert!(err >= prev, "d = {d}: {err} < {prev}");
            prev = err;
        }
    }

    #[test]
    fn expansion_csv_round_trip() {
        let filter = FilterSpec::slanted_butterworth(0.7, 4).unwrap();
        let exp = ChebyshevExpansion::of_filter(&filter, 32).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("exp.csv");
        exp.write_csv(&path).unwrap();
        let back = ChebyshevExpansion::read_csv(&path).unwrap();
        assert_eq!(back.coeffs(), exp.coeffs());
        assert_eq!(back.source(), exp.source());
        assert!(ChebyshevExpansion::read_csv(&dir.path().join("nope.csv")).is_err());
    }
}
