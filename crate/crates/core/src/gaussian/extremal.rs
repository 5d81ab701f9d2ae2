//! Numerical checks of the entropy-power style inequalities.
//!
//! The objective studied by the extremal inequality is
//! `f(t) = Σ λᵢ tᵢ − ½ log₂(Σ 2^{2tᵢ} + 2πeσ²)` where `tᵢ` stands for the
//! per-symbol entropy of input `i`. Under a power constraint `Pᵢ` the entropy
//! can not exceed `t*ᵢ = ½ log₂(2πe Pᵢ)`, and the inequality claims `t*`
//! maximizes `f` whenever `λᵢ ≥ Pᵢ / (ΣP + σ²)`.

use super::EntropyValue;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Grid for [`verify_extremal_inequality`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremalGrid {
    /// Search box is `t* ± half_width` in every coordinate.
    pub half_width: f64,
    pub coarse_step: f64,
    pub fine_step: f64,
    /// Refuse grids larger than this many points per pass.
    pub max_points: usize,
    /// Bound on `|∂f/∂tᵢ|` at `t*` for coordinates at the threshold.
    pub gradient_tol: f64,
}

impl Default for ExtremalGrid {
    fn default() -> Self {
        Self {
            half_width: 3.0,
            coarse_step: 0.05,
            fine_step: 0.001,
            max_points: 4_000_000,
            gradient_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport<T> {
    /// Gaussian entropies `½ log₂(2πe Pᵢ)`.
    pub expected: Vec<T>,
    /// Grid argmax after refinement.
    pub found: Vec<T>,
    /// `max |foundᵢ − expectedᵢ|`.
    pub deviation: T,
    /// Analytic gradient at `expected`.
    pub gradient: Vec<T>,
    pub f_expected: T,
    pub f_found: T,
    pub step: T,
    pub passed: bool,
}

/// `f(t)` from the module docs.
pub fn extremal_objective<T: Real>(t: &[T], lambdas: &[T], sigma2: T) -> T {
    let mut lin = T::zero();
    let mut sum = T::two_pi_e() * sigma2;
    for (&ti, &li) in t.iter().zip(lambdas) {
        lin = lin + li * ti;
        sum = sum + (T::two() * ti).exp2();
    }
    lin - T::half() * sum.log2()
}

fn gradient<T: Real>(t: &[T], lambdas: &[T], sigma2: T) -> Vec<T> {
    let pows: Vec<T> = t.iter().map(|&ti| (T::two() * ti).exp2()).collect();
    let denom = pows.iter().fold(T::two_pi_e() * sigma2, |a, &p| a + p);
    lambdas.iter().zip(&pows).map(|(&l, &p)| l - p / denom).collect()
}

/// Per-axis ranges for one grid pass.
struct Axis<T> {
    lo: T,
    step: T,
    count: usize,
}

/// Exhaustive maximization of `f` over a product grid, in lexicographic
/// order so ties resolve deterministically toward the lowest index.
fn grid_argmax<T: Real>(axes: &[Axis<T>], lambdas: &[T], sigma2: T) -> (Vec<T>, T) {
    let m = axes.len();
    let mut idx = vec![0usize; m];
    let mut t: Vec<T> = axes.iter().map(|a| a.lo).collect();
    let mut best_t = t.clone();
    let mut best_f = T::neg_infinity();
    loop {
        for (k, a) in axes.iter().enumerate() {
            t[k] = a.lo + a.step * T::of_usize(idx[k]);
        }
        let f = extremal_objective(&t, lambdas, sigma2);
        if f > best_f {
            best_f = f;
            best_t.clone_from(&t);
        }
        let mut k = 0;
        loop {
            if k == m {
                return (best_t, best_f);
            }
            idx[k] += 1;
            if idx[k] < axes[k].count {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn check_size<T>(axes: &[Axis<T>], limit: usize) -> Result<()> {
    let total = axes
        .iter()
        .try_fold(1usize, |acc, a| acc.checked_mul(a.count))
        .unwrap_or(usize::MAX);
    if total > limit {
        return Err(Error::Config(format!(
            "extremal grid has {total} points, limit is {limit}"
        )));
    }
    Ok(())
}

/// Grid search check of the extremal inequality.
///
/// Coordinates whose `λᵢ` sits exactly at the threshold are searched over the
/// full box, where `t*ᵢ` must be an interior stationary point. Coordinates
/// with larger `λᵢ` are capped at `t*ᵢ`, since the power constraint bounds the
/// entropy there and the maximizer sits on that cap.
pub fn verify_extremal_inequality<T: Real>(
    powers: &[T],
    sigma2: T,
    lambdas: &[T],
    grid: &ExtremalGrid,
) -> Result<VerificationReport<T>> {
    let m = powers.len();
    if m == 0 || lambdas.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: lambdas.len(),
        });
    }
    if sigma2 < T::zero() || powers.iter().any(|&p| p <= T::zero()) {
        return Err(Error::Precondition("powers must be positive and σ² ≥ 0".into()));
    }
    if !(grid.coarse_step > 0.0 && grid.fine_step > 0.0 && grid.half_width > 0.0) {
        return Err(Error::Config("grid steps and width must be positive".into()));
    }
    let total: T = powers.iter().fold(sigma2, |a, &p| a + p);
    let thresholds: Vec<T> = powers.iter().map(|&p| p / total).collect();
    let slack_tol = T::tol(1e-12);
    for (i, (&l, &th)) in lambdas.iter().zip(&thresholds).enumerate() {
        if l < th - slack_tol {
            return Err(Error::Precondition(format!(
                "λ[{i}] = {l} is below P[{i}]/(ΣP+σ²) = {th}"
            )));
        }
    }
    let at_threshold: Vec<bool> = lambdas
        .iter()
        .zip(&thresholds)
        .map(|(&l, &th)| (l - th).abs() <= slack_tol)
        .collect();
    let expected: Vec<T> = powers
        .iter()
        .map(|&p| T::half() * (T::two_pi_e() * p).log2())
        .collect();

    let hw = T::lit(grid.half_width);
    let coarse = T::lit(grid.coarse_step);
    let fine = T::lit(grid.fine_step);
    let per_side = (grid.half_width / grid.coarse_step).round() as usize;
    let coarse_axes: Vec<Axis<T>> = (0..m)
        .map(|i| Axis {
            lo: expected[i] - hw,
            step: coarse,
            count: if at_threshold[i] { 2 * per_side + 1 } else { per_side + 1 },
        })
        .collect();
    check_size(&coarse_axes, grid.max_points)?;
    let (c_best, _) = grid_argmax(&coarse_axes, lambdas, sigma2);

    // one refinement pass over ±coarse_step around the coarse argmax
    let fine_per_side = (grid.coarse_step / grid.fine_step).round() as usize;
    let fine_axes: Vec<Axis<T>> = (0..m)
        .map(|i| {
            let lo = c_best[i] - coarse;
            let hi_cap = if at_threshold[i] {
                expected[i] + hw
            } else {
                expected[i]
            };
            let hi = (c_best[i] + coarse).min(hi_cap);
            let count = ((hi - lo) / fine).round().to_usize().unwrap_or(0) + 1;
            Axis {
                lo,
                step: fine,
                count: count.min(2 * fine_per_side + 1),
            }
        })
        .collect();
    check_size(&fine_axes, grid.max_points)?;
    let (found, f_found) = grid_argmax(&fine_axes, lambdas, sigma2);

    let deviation = found
        .iter()
        .zip(&expected)
        .fold(T::zero(), |d, (&a, &b)| d.max((a - b).abs()));
    let grad = gradient(&expected, lambdas, sigma2);
    let gtol = T::lit(grid.gradient_tol);
    let kkt = grad.iter().zip(&at_threshold).all(|(&g, &eq)| {
        if eq {
            g.abs() <= gtol
        } else {
            g >= -gtol
        }
    });
    let f_expected = extremal_objective(&expected, lambdas, sigma2);
    // the expected point must also be at least as good as anything on the grid
    let value_ok = f_expected >= f_found - T::tol(1e-12) * f_found.abs().max(T::one());
    let passed = deviation <= fine * T::lit(1.000001) && kkt && value_ok;
    Ok(VerificationReport {
        expected,
        found,
        deviation,
        gradient: grad,
        f_expected,
        f_found,
        step: fine,
        passed,
    })
}

/// Entropy power lower bound `h(X+Z) ≥ ½ log₂(2^{2h(X)} + 2πeσ²)`.
pub fn epi_lower_bound<T: Real>(h_x: EntropyValue<T>, sigma2: T) -> Result<EntropyValue<T>> {
    if sigma2 < T::zero() || sigma2.is_nan() {
        return Err(Error::Precondition(format!("σ² = {sigma2} is negative")));
    }
    if sigma2 == T::zero() {
        return Ok(h_x);
    }
    let px = if h_x.degenerate {
        T::zero()
    } else {
        (T::two() * h_x.value).exp2()
    };
    Ok(EntropyValue::finite(
        T::half() * (px + T::two_pi_e() * sigma2).log2(),
    ))
}
