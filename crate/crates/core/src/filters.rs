//! Scalar spectral filters applied to operator eigenvalues.
//!
//! A filter is admissible for row-stochastic NLM operators when `f(1) = 1`
//! and `f([0,1]) ⊆ [0,1]`: the filtered operator then keeps the all-ones
//! stationary vector and a spectrum inside `[0,1]`. Three families are
//! provided:
//!
//! - hard threshold: zero below the cutoff, identity above;
//! - Butterworth gain: `(1 + ((1−x)/(1−ω))^{2d})^{−1/2}`;
//! - slanted Butterworth: `x` times the Butterworth gain, a smooth surrogate
//!   for hard eigenvalue thresholding that still fixes `x = 1`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Filter family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterKind {
    HardThreshold,
    Butterworth,
    SlantedButterworth,
}

/// A scalar spectral filter with cutoff `omega` and order `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    kind: FilterKind,
    omega: f64,
    d: u32,
}

/// Exponent size beyond which `ratio^{2d}` is evaluated in log space.
const LOG_SPACE_THRESHOLD: f64 = 300.0;

/// Butterworth-style gain `(1 + ratio^{2d})^{−1/2}` without overflow.
///
/// For large `2d·ln(ratio)` the power term overflows f64, so the gain is
/// evaluated as `exp(−ln1p(ratio^{2d})/2)` with the exponent taken directly
/// in log space once it exceeds [`LOG_SPACE_THRESHOLD`].
fn gain(ratio: f64, d: u32) -> f64 {
    debug_assert!(ratio >= 0.0);
    if ratio == 0.0 {
        return 1.0;
    }
    let log_power = 2.0 * d as f64 * ratio.ln();
    if log_power > LOG_SPACE_THRESHOLD {
        // ln1p(e^t) = t + ln1p(e^{-t}) and e^{-t} underflows to 0 here.
        (-0.5 * log_power).exp()
    } else {
        (-0.5 * log_power.exp().ln_1p()).exp()
    }
}

fn check_domain(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::FilterDomain { x });
    }
    Ok(())
}

/// Hard spectral threshold: `0` for `x < omega`, `x` otherwise.
pub fn eval_hard_threshold(x: f64, omega: f64) -> Result<f64> {
    check_domain(x)?;
    Ok(if x < omega { 0.0 } else { x })
}

/// Butterworth gain with cutoff `omega < 1` and order `d`.
pub fn eval_butterworth(x: f64, omega: f64, d: u32) -> Result<f64> {
    check_domain(x)?;
    if omega >= 1.0 {
        return Err(Error::SingularCutoff);
    }
    Ok(gain((1.0 - x) / (1.0 - omega), d))
}

/// Slanted Butterworth: `x` times the Butterworth gain.
pub fn eval_slanted_butterworth(x: f64, omega: f64, d: u32) -> Result<f64> {
    Ok(x * eval_butterworth(x, omega, d)?)
}

impl FilterSpec {
    fn validated(kind: FilterKind, omega: f64, d: u32) -> Result<Self> {
        if !omega.is_finite() || !(0.0..=1.0).contains(&omega) {
            return Err(Error::invalid(format!(
                "cutoff omega must lie in [0, 1], got {omega}"
            )));
        }
        if kind != FilterKind::HardThreshold {
            if omega >= 1.0 {
                return Err(Error::SingularCutoff);
            }
            if d < 1 {
                return Err(Error::invalid("filter order d must be at least 1"));
            }
        }
        Ok(FilterSpec { kind, omega, d })
    }

    pub fn hard_threshold(omega: f64) -> Result<Self> {
        Self::validated(FilterKind::HardThreshold, omega, 1)
    }

    pub fn butterworth(omega: f64, d: u32) -> Result<Self> {
        Self::validated(FilterKind::Butterworth, omega, d)
    }

    pub fn slanted_butterworth(omega: f64, d: u32) -> Result<Self> {
        Self::validated(FilterKind::SlantedButterworth, omega, d)
    }

    pub fn kind(&self) -> FilterKind {
        self.kind
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn order(&self) -> u32 {
        self.d
    }

    /// Evaluates the filter at `x ∈ [0, 1]`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        match self.kind {
            FilterKind::HardThreshold => eval_hard_threshold(x, self.omega),
            FilterKind::Butterworth => eval_butterworth(x, self.omega, self.d),
            FilterKind::SlantedButterworth => eval_slanted_butterworth(x, self.omega, self.d),
        }
    }

    /// Infallible evaluation for pre-validated arguments in hot loops.
    ///
    /// The caller guarantees `x ∈ [0, 1]`; the spec itself was validated at
    /// construction, so no error path remains.
    pub fn eval_unchecked(&self, x: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&x));
        match self.kind {
            FilterKind::HardThreshold => {
                if x < self.omega {
                    0.0
                } else {
                    x
                }
            }
            FilterKind::Butterworth => gain((1.0 - x) / (1.0 - self.omega), self.d),
            FilterKind::SlantedButterworth => x * gain((1.0 - x) / (1.0 - self.omega), self.d),
        }
    }
}

impl fmt::Display for FilterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FilterKind::HardThreshold => write!(f, "hard:omega={}", self.omega),
            FilterKind::Butterworth => write!(f, "bw:omega={},d={}", self.omega, self.d),
            FilterKind::SlantedButterworth => write!(f, "sb:omega={},d={}", self.omega, self.d),
        }
    }
}

impl FromStr for FilterSpec {
    type Err = Error;

    /// Parses `sb:omega=0.7,d=4`, `bw:omega=0.5,d=8` or `hard:omega=0.5`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::invalid(format!("filter spec `{s}`: {why}"));
        let (kind_str, rest) = s
            .split_once(':')
            .ok_or_else(|| bad("expected `<kind>:<params>`"))?;
        let mut omega: Option<f64> = None;
        let mut d: Option<u32> = None;
        for part in rest.split(',') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| bad("expected `key=value` parameters"))?;
            match key.trim() {
                "omega" => {
                    omega = Some(
                        value
                            .trim()
                            .parse()
                            .map_err(|_| bad("omega is not a number"))?,
                    )
                }
                "d" => {
                    d = Some(
                        value
                            .trim()
                            .parse()
                            .map_err(|_| bad("d is not a positive integer"))?,
                    )
                }
                other => return Err(bad(&format!("unknown parameter `{other}`"))),
            }
        }
        let omega = omega.ok_or_else(|| bad("missing omega"))?;
        match kind_str.trim() {
            "hard" => FilterSpec::hard_threshold(omega),
            "bw" => FilterSpec::butterworth(omega, d.ok_or_else(|| bad("missing d"))?),
            "sb" => FilterSpec::slanted_butterworth(omega, d.ok_or_else(|| bad("missing d"))?),
            other => Err(bad(&format!("unknown filter kind `{other}`"))),
        }
    }
}

/// Outcome of checking the admissibility conditions on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterConditionReport {
    /// Whether both conditions held everywhere.
    pub passed: bool,
    /// Value of the filter at 1.
    pub value_at_one: f64,
    /// First violation found, if any.
    pub violation: Option<ConditionViolation>,
    /// Number of grid points examined.
    pub grid_size: usize,
}

/// The first admissibility violation encountered.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionViolation {
    /// Argument where the violation occurred.
    pub x: f64,
    /// Offending filter value.
    pub value: f64,
    /// Which condition failed.
    pub condition: Condition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// `f(1) = 1` within tolerance.
    FixesOne,
    /// `0 ≤ f(x) ≤ 1` on the grid.
    RangeInUnitInterval,
}

/// Checks `|f(1) − 1| ≤ tol` first, then `0 ≤ f(x) ≤ 1` on a uniform
/// `grid_size`-point grid over `[0, 1]`, reporting the first violation.
pub fn verify_filter_conditions(
    f: impl Fn(f64) -> f64,
    grid_size: usize,
    tol: f64,
) -> FilterConditionReport {
    assert!(grid_size >= 2, "grid must have at least 2 points");
    let value_at_one = f(1.0);
    if !((value_at_one - 1.0).abs() <= tol) {
        return FilterConditionReport {
            passed: false,
            value_at_one,
            violation: Some(ConditionViolation {
                x: 1.0,
                value: value_at_one,
                condition: Condition::FixesOne,
            }),
            grid_size,
        };
    }
    for i in 0..grid_size {
        let x = i as f64 / (grid_size - 1) as f64;
        let y = f(x);
        if !(-tol..=1.0 + tol).contains(&y) {
            return FilterConditionReport {
                passed: false,
                value_at_one,
                violation: Some(ConditionViolation {
                    x,
                    value: y,
                    condition: Condition::RangeInUnitInterval,
                }),
                grid_size,
            };
        }
    }
    FilterConditionReport {
        passed: true,
        value_at_one,
        violation: None,
        grid_size,
    }
}

/// Convenience wrapper checking a [`FilterSpec`].
pub fn verify_filter_spec(
    spec: &FilterSpec,
    grid_size: usize,
    tol: f64,
) -> FilterConditionReport {
    verify_filter_conditions(|x| spec.eval_unchecked(x), grid_size, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn hard_threshold_values() {
        assert_eq!(eval_hard_threshold(0.3, 0.5).unwrap(), 0.0);
        assert_eq!(eval_hard_threshold(0.7, 0.5).unwrap(), 0.7);
        assert_eq!(eval_hard_threshold(1.0, 1.0).unwrap(), 1.0);
        assert_eq!(eval_hard_threshold(0.5, 0.5).unwrap(), 0.5);
        assert!(eval_hard_threshold(1.5, 0.5).is_err());
        assert!(eval_hard_threshold(-0.1, 0.5).is_err());
    }

    #[test]
    fn butterworth_values() {
        assert_abs_diff_eq!(eval_butterworth(1.0, 0.5, 4).unwrap(), 1.0, epsilon = 0.0);
        for d in [1, 4, 15, 50] {
            assert_abs_diff_eq!(
                eval_butterworth(0.5, 0.5, d).unwrap(),
                std::f64::consts::FRAC_1_SQRT_2,
                epsilon = 1e-15
            );
        }
        // (0, 0.5, 1): ratio = 2, gain = 1/sqrt(5).
        assert_abs_diff_eq!(
            eval_butterworth(0.0, 0.5, 1).unwrap(),
            1.0 / 5.0f64.sqrt(),
            epsilon = 1e-15
        );
        assert!(matches!(
            eval_butterworth(0.5, 1.0, 4),
            Err(Error::SingularCutoff)
        ));
    }

    #[test]
    fn slanted_butterworth_values() {
        assert_eq!(eval_slanted_butterworth(1.0, 0.7, 4).unwrap(), 1.0);
        for d in [1, 4, 15, 50] {
            assert_abs_diff_eq!(
                eval_slanted_butterworth(0.7, 0.7, d).unwrap(),
                0.7 * std::f64::consts::FRAC_1_SQRT_2,
                epsilon = 1e-15
            );
        }
        // (0.5, 0.7, 1): 0.5·(1 + (0.5/0.3)²)^{-1/2} = 1.5/sqrt(34).
        assert_abs_diff_eq!(
            eval_slanted_butterworth(0.5, 0.7, 1).unwrap(),
            1.5 / 34.0f64.sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn large_order_does_not_overflow() {
        // ratio^{2d} overflows f64 for omega close to 1; the log-space path
        // must return a finite value in [0, x].
        for omega in [0.9, 0.99, 0.999] {
            let y = eval_slanted_butterworth(0.01, omega, 50).unwrap();
            assert!(y.is_finite());
            assert!((0.0..=0.01).contains(&y), "y = {y}");
        }
        let tiny = eval_butterworth(0.0, 0.999, 50).unwrap();
        assert!(tiny.is_finite() && tiny >= 0.0);
    }

    #[test]
    fn log_space_path_is_continuous() {
        // Straddle the threshold with a pair of nearby orders.
        let x = 0.01f64;
        let omega = 0.99f64;
        let ratio: f64 = (1.0 - x) / (1.0 - omega);
        // Order where 2d·ln(ratio) crosses 300.
        let d_star = (300.0 / (2.0 * ratio.ln())).ceil() as u32;
        let below = gain(ratio, d_star - 1);
        let above = gain(ratio, d_star);
        assert!(below > above);
        assert!(above / below > 1e-6, "jump at threshold: {below} -> {above}");
    }

    #[test]
    fn slanted_is_bounded_by_identity() {
        for &omega in &[0.1, 0.3, 0.5, 0.7, 0.9] {
            for &d in &[1u32, 2, 5, 15, 50] {
                for i in 0..=1000 {
                    let x = i as f64 / 1000.0;
                    let y = eval_slanted_butterworth(x, omega, d).unwrap();
                    assert!(y >= 0.0 && y <= x + 1e-15, "f({x}) = {y}");
                }
            }
        }
    }

    #[test]
    fn slanted_is_monotone_on_parameter_grid() {
        for &omega in &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9] {
            for &d in &[1u32, 4, 15, 50] {
                let spec = FilterSpec::slanted_butterworth(omega, d).unwrap();
                let mut prev = -1.0;
                for i in 0..=10_000 {
                    let x = i as f64 / 10_000.0;
                    let y = spec.eval_unchecked(x);
                    assert!(y >= prev - 1e-13, "not monotone at x={x} (omega={omega}, d={d})");
                    prev = y;
                }
            }
        }
    }

    #[test]
    fn order_sharpens_toward_hard_threshold() {
        // Above the cutoff the gap to the identity shrinks with d; below it,
        // the value itself shrinks toward 0.
        for &omega in &[0.3, 0.5, 0.7] {
            for &(x_above, x_below) in &[(omega + 0.15, omega - 0.15)] {
                let mut prev_above = f64::INFINITY;
                let mut prev_below = f64::INFINITY;
                for &d in &[1u32, 2, 4, 8, 16, 32, 50] {
                    let above = (eval_slanted_butterworth(x_above, omega, d).unwrap() - x_above)
                        .abs();
                    let below = eval_slanted_butterworth(x_below, omega, d).unwrap();
                    assert!(above <= prev_above + 1e-15);
                    assert!(below <= prev_below + 1e-15);
                    prev_above = above;
                    prev_below = below;
                }
                // Large-d limits match the hard threshold.
                let hard_above = eval_hard_threshold(x_above, omega).unwrap();
                let hard_below = eval_hard_threshold(x_below, omega).unwrap();
                assert!(
                    (eval_slanted_butterworth(x_above, omega, 50).unwrap() - hard_above).abs()
                        < 1e-3
                );
                assert!(
                    (eval_slanted_butterworth(x_below, omega, 50).unwrap() - hard_below).abs()
                        < 1e-3
                );
            }
        }
        // At the cutoff the limit is omega/sqrt(2).
        assert_abs_diff_eq!(
            eval_slanted_butterworth(0.5, 0.5, 50).unwrap(),
            0.5 * std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn conditions_pass_for_admissible_filters() {
        let sb = FilterSpec::slanted_butterworth(0.7, 4).unwrap();
        let report = verify_filter_spec(&sb, 10_000, 1e-12);
        assert!(report.passed, "{report:?}");

        let hard = FilterSpec::hard_threshold(0.5).unwrap();
        assert!(verify_filter_spec(&hard, 1000, 1e-12).passed);
    }

    #[test]
    fn conditions_fail_for_doubling_filter() {
        // f(x) = 2x breaks the fixed point at 1 first: report x=1, value 2.
        let report = verify_filter_conditions(|x| 2.0 * x, 1000, 1e-12);
        assert!(!report.passed);
        let v = report.violation.unwrap();
        assert_eq!(v.condition, Condition::FixesOne);
        assert_eq!(v.x, 1.0);
        assert_eq!(v.value, 2.0);
    }

    #[test]
    fn composition_of_admissible_filters_is_admissible() {
        let f = FilterSpec::slanted_butterworth(0.5, 4).unwrap();
        let g = FilterSpec::butterworth(0.3, 8).unwrap();
        let composed = |x: f64| f.eval_unchecked(g.eval_unchecked(x).clamp(0.0, 1.0));
        assert!(verify_filter_conditions(composed, 10_000, 1e-12).passed);
    }

    #[test]
    fn parses_cli_strings() {
        let sb: FilterSpec = "sb:omega=0.7,d=4".parse().unwrap();
        assert_eq!(sb, FilterSpec::slanted_butterworth(0.7, 4).unwrap());
        let bw: FilterSpec = "bw:omega=0.5,d=8".parse().unwrap();
        assert_eq!(bw, FilterSpec::butterworth(0.5, 8).unwrap());
        let hard: FilterSpec = "hard:omega=0.5".parse().unwrap();
        assert_eq!(hard, FilterSpec::hard_threshold(0.5).unwrap());
        // Round trip through Display.
        assert_eq!(sb.to_string().parse::<FilterSpec>().unwrap(), sb);

        assert!("sb:omega=0.7".parse::<FilterSpec>().is_err());
        assert!("sb:omega=1.0,d=4".parse::<FilterSpec>().is_err());
        assert!("nope:omega=0.5".parse::<FilterSpec>().is_err());
        assert!("sb".parse::<FilterSpec>().is_err());
    }

    #[test]
    fn omega_one_rejected_for_butterworth_family() {
        assert!(FilterSpec::butterworth(1.0, 4).is_err());
        assert!(FilterSpec::slanted_butterworth(1.0, 4).is_err());
        // The hard threshold still accepts omega = 1.
        assert!(FilterSpec::hard_threshold(1.0).is_ok());
    }
}
