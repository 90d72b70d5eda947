//! Convergence analysis: operator norms, truncation of infinite standard
//! maps, residual sweeps over growing truncation ranks, and standard-part
//! estimation.
//!
//! The central question these tools answer is "does this residual vanish as
//! the truncation rank grows?". A [`sweep_residual`] run measures a residual
//! on an ascending parameter grid, fits a power-law decay rate, and issues a
//! three-valued [`Verdict`] that is robust to two numerical realities: exact
//! zeros (which carry no decay information) and the floating-point noise
//! floor (where genuine decay bottoms out near machine epsilon).

use std::io::Write;

use num_complex::Complex;
use serde::Serialize;

use crate::category::{Morphism, TruncObject};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::Scalar;

/// Largest singular value of the underlying matrix: the norm of the morphism
/// as a linear map between the Euclidean-normed truncated spaces.
pub fn operator_norm<T: Scalar>(f: &Morphism<T>) -> T {
    f.mat().op_norm()
}

/// An entrywise description of an operator on the untruncated space:
/// `entry(m, n)` is the amplitude from the `n`-th to the `m`-th chosen basis
/// vector, defined for all indices from 1 upward, together with an optional
/// declared bound on the operator norm of every truncation.
pub struct StandardMapGenerator<'a, T: Scalar> {
    entry: Box<dyn Fn(usize, usize) -> Complex<T> + 'a>,
    declared_bound: Option<T>,
}

impl<'a, T: Scalar> StandardMapGenerator<'a, T> {
    /// Wraps an entry function `f(m, n)` (1-based row, column).
    pub fn new(entry: impl Fn(usize, usize) -> Complex<T> + 'a) -> Self {
        StandardMapGenerator {
            entry: Box::new(entry),
            declared_bound: None,
        }
    }

    /// Declares a uniform bound on the operator norm of every truncation.
    pub fn with_bound(self, bound: T) -> Self {
        StandardMapGenerator {
            declared_bound: Some(bound),
            ..self
        }
    }

    /// 1-based entry access.
    pub fn entry(&self, m: usize, n: usize) -> Complex<T> {
        (self.entry)(m, n)
    }

    /// The declared norm bound, if any.
    pub fn declared_bound(&self) -> Option<T> {
        self.declared_bound
    }
}

/// Truncates a standard map to finite rank: the morphism `dom -> cod` whose
/// `(m, n)` entry is `gen.entry(m, n)` for `m <= cod.kappa()`,
/// `n <= dom.kappa()`. This is compression by the truncating projectors on
/// both sides.
pub fn truncate_standard<T: Scalar>(
    gen: &StandardMapGenerator<'_, T>,
    dom: &TruncObject<T>,
    cod: &TruncObject<T>,
) -> Morphism<T> {
    Morphism::from_fn(dom.clone(), cod.clone(), |m, n| gen.entry(m, n))
}

/// Outcome of a residual sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// The residual decays along the tail of the grid and ends below the
    /// threshold: consistent with vanishing in the large-rank limit.
    Infinitesimal,
    /// The residual neither decays along the tail nor ends below the
    /// threshold: consistent with a genuinely non-vanishing obstruction.
    NotInfinitesimal,
    /// Mixed evidence; widen the grid or adjust the thresholds.
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Infinitesimal => "Infinitesimal",
            Verdict::NotInfinitesimal => "NotInfinitesimal",
            Verdict::Inconclusive => "Inconclusive",
        };
        f.write_str(s)
    }
}

/// Thresholds steering a sweep's verdict.
#[derive(Debug, Clone, Copy)]
pub struct SweepConfig<T: Scalar> {
    /// A residual below this at the largest parameter counts as "small".
    pub threshold: T,
    /// A step counts as decaying when it shrinks by at least this relative
    /// margin (guards against flat sequences passing on rounding jitter).
    pub decay_margin: T,
    /// Residuals at or below this are treated as numerically zero; a step
    /// between two such values counts as decaying even if it moves upward
    /// inside the noise floor.
    pub zero_floor: T,
}

impl<T: Scalar> Default for SweepConfig<T> {
    fn default() -> Self {
        SweepConfig {
            threshold: T::from_f64(1e-6),
            decay_margin: T::from_f64(0.01),
            zero_floor: T::from_f64(1e-13),
        }
    }
}

/// Result of a residual sweep over an ascending parameter grid.
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport<T: Scalar> {
    /// The parameter grid, strictly ascending.
    pub parameter_values: Vec<u64>,
    /// Measured residuals, aligned with `parameter_values`; finite and
    /// non-negative.
    pub residuals: Vec<T>,
    /// Least-squares slope of `ln residual` against `ln parameter`: the
    /// fitted power-law decay exponent (negative means decay). Exact zeros
    /// are clamped to the smallest positive scalar for the fit.
    pub fitted_rate: T,
    /// Three-valued convergence verdict.
    pub verdict: Verdict,
    /// The threshold the verdict was issued against.
    pub threshold: T,
}

fn validate_grid(params: &[u64], min_len: usize) -> Result<()> {
    if params.len() < min_len {
        return Err(Error::ConfigInvalid(format!(
            "sweep grid needs at least {min_len} points, got {}",
            params.len()
        )));
    }
    for w in params.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::ConfigInvalid(format!(
                "sweep grid must be strictly ascending, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

fn check_residual<T: Scalar>(parameter: u64, r: T) -> Result<T> {
    if !r.is_finite() || r < T::zero() {
        return Err(Error::ResidualNotFinite {
            parameter,
            value: r.to_f64(),
        });
    }
    Ok(r)
}

fn fit_rate<T: Scalar>(params: &[u64], residuals: &[T]) -> T {
    let n = T::from_usize(params.len());
    let xs: Vec<T> = params.iter().map(|&p| T::from_f64(p as f64).ln()).collect();
    let ys: Vec<T> = residuals
        .iter()
        .map(|&r| r.max(T::min_positive_value()).ln())
        .collect();
    let xbar = xs.iter().copied().sum::<T>() / n;
    let ybar = ys.iter().copied().sum::<T>() / n;
    let mut num = T::zero();
    let mut den = T::zero();
    for (x, y) in xs.iter().zip(ys.iter()) {
        num += (*x - xbar) * (*y - ybar);
        den += (*x - xbar) * (*x - xbar);
    }
    if den > T::zero() {
        num / den
    } else {
        T::zero()
    }
}

fn issue_verdict<T: Scalar>(residuals: &[T], config: &SweepConfig<T>) -> Verdict {
    let k = residuals.len();
    let step_down = |a: T, b: T| -> bool {
        (b <= a * (T::one() - config.decay_margin))
            || (a <= config.zero_floor && b <= config.zero_floor)
    };
    let tail_decays = step_down(residuals[k - 3], residuals[k - 2])
        && step_down(residuals[k - 2], residuals[k - 1]);
    let final_small = residuals[k - 1] < config.threshold;
    if tail_decays && final_small {
        Verdict::Infinitesimal
    } else if !tail_decays && !final_small {
        Verdict::NotInfinitesimal
    } else {
        Verdict::Inconclusive
    }
}

/// Measures `residual_fn` on a strictly ascending grid of at least three
/// parameters and reports decay statistics with the default thresholds.
pub fn sweep_residual<T: Scalar>(
    residual_fn: impl FnMut(u64) -> T,
    params: &[u64],
) -> Result<SweepReport<T>> {
    sweep_residual_with(residual_fn, params, &SweepConfig::default())
}

/// [`sweep_residual`] with explicit thresholds.
pub fn sweep_residual_with<T: Scalar>(
    mut residual_fn: impl FnMut(u64) -> T,
    params: &[u64],
    config: &SweepConfig<T>,
) -> Result<SweepReport<T>> {
    validate_grid(params, 3)?;
    let mut residuals = Vec::with_capacity(params.len());
    for &p in params {
        residuals.push(check_residual(p, residual_fn(p))?);
    }
    Ok(SweepReport {
        fitted_rate: fit_rate(params, &residuals),
        verdict: issue_verdict(&residuals, config),
        parameter_values: params.to_vec(),
        residuals,
        threshold: config.threshold,
    })
}

/// Estimates the large-rank limit of a family of morphisms `f_at(kappa)` by
/// measuring how much each step changes the part already visible at the
/// previous rank: the residual at step `i` is the operator norm of
/// (top-left block of `f_at(kappa[i+1])`) minus `f_at(kappa[i])`.
///
/// Needs at least four ranks (three successive differences). Each morphism's
/// dimensions must dominate its predecessor's entrywise. Returns the morphism
/// at the largest rank as the estimate, together with a sweep report over the
/// successive differences (whose grid is `kappas[1..]`).
pub fn standard_part_estimate<T: Scalar>(
    mut f_at: impl FnMut(u64) -> Morphism<T>,
    kappas: &[u64],
    config: &SweepConfig<T>,
) -> Result<(Morphism<T>, SweepReport<T>)> {
    validate_grid(kappas, 4)?;
    let mut prev = f_at(kappas[0]);
    let mut residuals = Vec::with_capacity(kappas.len() - 1);
    for &kappa in &kappas[1..] {
        let next = f_at(kappa);
        if next.rows() < prev.rows() || next.cols() < prev.cols() {
            return Err(Error::ShapeMismatch {
                expected_rows: prev.rows(),
                expected_cols: prev.cols(),
                rows: next.rows(),
                cols: next.cols(),
            });
        }
        let defect = Mat::from_fn(prev.rows(), prev.cols(), |r, c| {
            next.entry(r + 1, c + 1) - prev.entry(r + 1, c + 1)
        });
        residuals.push(check_residual(kappa, defect.op_norm())?);
        prev = next;
    }
    let grid = &kappas[1..];
    let report = SweepReport {
        fitted_rate: fit_rate(grid, &residuals),
        verdict: issue_verdict(&residuals, config),
        parameter_values: grid.to_vec(),
        residuals,
        threshold: config.threshold,
    };
    Ok((prev, report))
}

/// Norm distance between two states (morphisms out of the tensor unit): the
/// Euclidean norm of the coefficient difference, which equals the operator
/// norm. Two states are equivalent in the large-rank limit when this is
/// infinitesimal.
pub fn vector_equiv<T: Scalar>(psi: &Morphism<T>, phi: &Morphism<T>) -> Result<T> {
    if !psi.dom().is_unit() || !phi.dom().is_unit() {
        return Err(Error::DomainMismatch {
            expected: "a state (domain = tensor unit)".into(),
            found: format!("{} -> {}", psi.dom(), psi.cod()),
        });
    }
    Ok(psi.sub(phi)?.frobenius_norm())
}

/// Writes a sweep's data rows as CSV with header `param,check,residual`.
pub fn write_sweep_csv<T: Scalar, W: Write>(
    report: &SweepReport<T>,
    check: &str,
    mut w: W,
) -> Result<()> {
    writeln!(w, "param,check,residual")?;
    for (p, r) in report.parameter_values.iter().zip(report.residuals.iter()) {
        writeln!(w, "{p},{check},{r}")?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepSidecar<'a, T: Scalar> {
    fitted_rate: &'a T,
    verdict: &'a Verdict,
    threshold: &'a T,
}

/// Writes the fitted-rate/verdict/threshold summary of a sweep as JSON.
pub fn write_sweep_sidecar<T: Scalar + Serialize, W: Write>(
    report: &SweepReport<T>,
    mut w: W,
) -> Result<()> {
    let sidecar = SweepSidecar {
        fitted_rate: &report.fitted_rate,
        verdict: &report.verdict,
        threshold: &report.threshold,
    };
    let text = serde_json::to_string_pretty(&sidecar)
        .expect("sidecar serialization cannot fail");
    w.write_all(text.as_bytes())?;
    w.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn operator_norm_of_a_diagonal_is_its_largest_entry() {
        let h = TruncObject::<f64>::standard(2, "h").unwrap();
        let f = Morphism::new(h.clone(), h, vec![c(3., 0.), c(0., 0.), c(0., 0.), c(1., 0.)])
            .unwrap();
        assert!((operator_norm(&f) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn operator_norm_of_every_truncated_shift_is_one() {
        // The unilateral shift e_n -> e_{n+1}: every truncation of rank >= 2
        // has operator norm exactly 1.
        let shift = StandardMapGenerator::new(|m, n| {
            if m == n + 1 {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
        .with_bound(1.0);
        for kappa in [4usize, 16, 64, 128] {
            let obj = TruncObject::<f64>::standard(kappa, "h").unwrap();
            let f = truncate_standard(&shift, &obj, &obj);
            let norm = operator_norm(&f);
            assert!(
                (norm - 1.0).abs() < 1e-12,
                "shift truncation norm {norm} at kappa={kappa}"
            );
            assert!(norm <= shift.declared_bound().unwrap() + 1e-12);
        }
    }

    #[test]
    fn sweep_of_one_over_kappa_is_infinitesimal_with_rate_near_minus_one() {
        let config = SweepConfig {
            threshold: 0.1,
            ..SweepConfig::default()
        };
        let report =
            sweep_residual_with(|k| 1.0 / k as f64, &[8, 16, 32, 64], &config).unwrap();
        assert_eq!(report.verdict, Verdict::Infinitesimal);
        assert!(
            (report.fitted_rate + 1.0).abs() < 0.05,
            "fitted rate {} should be near -1",
            report.fitted_rate
        );
    }

    #[test]
    fn sweep_of_a_constant_residual_is_not_infinitesimal() {
        let report = sweep_residual(|_| 0.5f64, &[8, 16, 32, 64]).unwrap();
        assert_eq!(report.verdict, Verdict::NotInfinitesimal);
        assert!(report.fitted_rate.abs() < 1e-12);
    }

    #[test]
    fn sweep_of_exact_zeros_is_infinitesimal() {
        let report = sweep_residual(|_| 0.0f64, &[2, 4, 8]).unwrap();
        assert_eq!(report.verdict, Verdict::Infinitesimal);
        // The fit runs on clamped logs; equal values give a slope at rounding
        // scale.
        assert!(report.fitted_rate.abs() < 1e-9);
    }

    #[test]
    fn sweep_rejects_short_or_unsorted_grids() {
        assert!(matches!(
            sweep_residual(|_| 0.0, &[2, 4]),
            Err(Error::ConfigInvalid(_))
        ));
        assert!(matches!(
            sweep_residual(|_| 0.0, &[2, 8, 4]),
            Err(Error::ConfigInvalid(_))
        ));
        assert!(matches!(
            sweep_residual(|_| 0.0, &[2, 2, 4]),
            Err(Error::ConfigInvalid(_))
        ));
    }

    #[test]
    fn sweep_rejects_nan_and_negative_residuals() {
        assert!(matches!(
            sweep_residual(|_| f64::NAN, &[2, 4, 8]),
            Err(Error::ResidualNotFinite { .. })
        ));
        assert!(matches!(
            sweep_residual(|_| -1.0, &[2, 4, 8]),
            Err(Error::ResidualNotFinite { .. })
        ));
    }

    #[test]
    fn decay_into_the_noise_floor_still_counts_as_infinitesimal() {
        // Genuine fast decay bottoms out near machine epsilon; steps inside
        // the floor must not flip the verdict.
        let rs = [1e-4, 1e-9, 0.9e-16, 1.1e-16];
        let report = sweep_residual(|k| rs[(k - 1) as usize], &[1, 2, 3, 4]).unwrap();
        assert_eq!(report.verdict, Verdict::Infinitesimal);
    }

    #[test]
    fn small_but_flat_residuals_are_inconclusive() {
        let report = sweep_residual(|_| 1e-8, &[2, 4, 8]).unwrap();
        assert_eq!(report.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn standard_part_of_the_identity_family_is_the_identity() {
        let config = SweepConfig::default();
        let (estimate, report) = standard_part_estimate(
            |k| Morphism::identity(&TruncObject::<f64>::standard(k as usize, "h").unwrap()),
            &[4, 8, 16, 32],
            &config,
        )
        .unwrap();
        assert_eq!(report.verdict, Verdict::Infinitesimal);
        assert!(report.residuals.iter().all(|&r| r == 0.0));
        assert_eq!(estimate, Morphism::identity(&TruncObject::standard(32, "h").unwrap()));
        assert_eq!(report.parameter_values, vec![8, 16, 32]);
    }

    #[test]
    fn standard_part_flags_the_flat_state_as_divergent() {
        // The uniform unit vector keeps shedding a constant fraction of its
        // weight into the newly revealed coordinates: the visible block
        // changes by a fixed amount at every doubling, so no limit exists.
        let config = SweepConfig::default();
        let flat = |k: u64| {
            let obj = TruncObject::<f64>::standard(k as usize, "h").unwrap();
            let coeff = c(1.0 / (k as f64).sqrt(), 0.0);
            Morphism::ket(&obj, &vec![coeff; k as usize]).unwrap()
        };
        let (_, report) = standard_part_estimate(flat, &[8, 16, 32, 64], &config).unwrap();
        assert_eq!(report.verdict, Verdict::NotInfinitesimal);
        // Each residual is sqrt(kappa) * (1/sqrt(kappa) - 1/sqrt(2 kappa)):
        // the constant 1 - 1/sqrt(2) ~ 0.2929.
        for &r in &report.residuals {
            assert!((r - (1.0 - 0.5f64.sqrt())).abs() < 1e-12, "residual {r}");
        }
    }

    #[test]
    fn standard_part_requires_nested_shapes() {
        let shrinking = |k: u64| {
            let obj = TruncObject::<f64>::standard((100 - k) as usize, "h").unwrap();
            Morphism::identity(&obj)
        };
        assert!(matches!(
            standard_part_estimate(shrinking, &[4, 8, 16, 32], &SweepConfig::default()),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn vector_equiv_measures_the_two_norm_gap() {
        let h = TruncObject::<f64>::standard(2, "h").unwrap();
        let a = Morphism::ket(&h, &[c(1., 0.), c(0., 0.)]).unwrap();
        let b = Morphism::ket(&h, &[c(0., 0.), c(1., 0.)]).unwrap();
        let d = vector_equiv(&a, &b).unwrap();
        assert!((d - 2.0f64.sqrt()).abs() < 1e-15);
        assert_eq!(vector_equiv(&a, &a).unwrap(), 0.0);
        // Operators are rejected.
        let id = Morphism::identity(&h);
        assert!(vector_equiv(&id, &id).is_err());
    }

    #[test]
    fn csv_and_sidecar_formats_are_frozen() {
        let report = SweepReport {
            parameter_values: vec![8, 16],
            residuals: vec![0.5, 0.25],
            fitted_rate: -1.0,
            verdict: Verdict::Infinitesimal,
            threshold: 1e-6,
        };
        let mut csv = Vec::new();
        write_sweep_csv(&report, "demo/check", &mut csv).unwrap();
        assert_eq!(
            String::from_utf8(csv).unwrap(),
            "param,check,residual\n8,demo/check,0.5\n16,demo/check,0.25\n"
        );
        let mut side = Vec::new();
        write_sweep_sidecar(&report, &mut side).unwrap();
        let text = String::from_utf8(side).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["fitted_rate"], -1.0);
        assert_eq!(v["verdict"], "Infinitesimal");
        assert_eq!(v["threshold"], 1e-6);
    }
}
