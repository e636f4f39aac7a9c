//! Closed-form and semi-analytical performance expressions: the VP harvest
//! approximation, the scaling-factor lower bound, Wishart max-eigenvalue
//! statistics, the VP-EH harvest prediction, and the outage probability with
//! its exponential high-power decay.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::gamma::{ln_gamma, reg_lower_gamma};
use crate::numerics::quadrature::tail_expectation;
use crate::precoding::{conventional_offset, precoder_r_factor, Constellation};

/// Empirical joint distribution of (symbol real part, offset real part)
/// under conventional VP, pooling real and imaginary dimensions by symmetry.
/// Offsets outside {-1, 0, +1} are tallied in an overflow cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointPerturbationTable {
    /// Per-dimension symbol alphabet (ascending), e.g. [-1, 1] for 4-QAM.
    pub symbol_levels: Vec<f64>,
    /// `probabilities[level][o]` for offsets o in {-1, 0, +1}.
    pub probabilities: Vec<[f64; 3]>,
    /// Probability mass with |offset| >= 2.
    pub overflow: f64,
    /// Number of (symbol, offset) tallies behind the estimate.
    pub samples: u64,
}

impl JointPerturbationTable {
    /// Probability of (symbol level index, offset in {-1,0,1}).
    pub fn prob(&self, level_idx: usize, offset: i64) -> f64 {
        self.probabilities[level_idx][(offset + 1) as usize]
    }

    /// Marginal probability of one symbol level (offsets in {-1,0,1} only).
    pub fn row_sum(&self, level_idx: usize) -> f64 {
        self.probabilities[level_idx].iter().sum()
    }
}

/// Runs conventional VP over random channels and uniform symbols, tallying
/// the per-dimension (symbol, offset) pairs.
pub fn estimate_joint_distribution<R: Rng + ?Sized>(
    m: usize,
    k: usize,
    cons: &Constellation,
    trials: u64,
    rng: &mut R,
) -> Result<JointPerturbationTable> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be >= 1".into()));
    }
    let levels: Vec<f64> = cons.levels().to_vec();
    let max_level = cons.max_level();
    let tau = cons.tau();
    let mut counts = vec![[0u64; 3]; levels.len()];
    let mut overflow = 0u64;
    let mut samples = 0u64;

    let level_index = |t: f64| -> usize { ((t + max_level) / 2.0).round() as usize };

    for _ in 0..trials {
        let chan = match crate::numerics::sample_channel(k, m, rng) {
            Ok(c) => c,
            // measure-zero ill-conditioned draw: skip, keep the stream moving
            Err(Error::SingularChannel { .. }) => continue,
            Err(e) => return Err(e),
        };
        let u = cons.random_vector(k, rng);
        let rf = precoder_r_factor(&chan);
        let l0 = conventional_offset(&rf, &u, tau)?;
        for i in 0..k {
            for (sym, off) in [(u[i].re, l0[i].re), (u[i].im, l0[i].im)] {
                samples += 1;
                if off.abs() <= 1 {
                    counts[level_index(sym)][(off + 1) as usize] += 1;
                } else {
                    overflow += 1;
                }
            }
        }
    }
    if samples == 0 {
        return Err(Error::NumericalInstability(
            "no usable channel draws for the joint distribution".into(),
        ));
    }
    let probabilities = counts
        .iter()
        .map(|row| {
            let mut p = [0.0; 3];
            for (dst, &c) in p.iter_mut().zip(row.iter()) {
                *dst = c as f64 / samples as f64;
            }
            p
        })
        .collect();
    Ok(JointPerturbationTable {
        symbol_levels: levels,
        probabilities,
        overflow: overflow as f64 / samples as f64,
        samples,
    })
}

/// Closed-form lower bound on the expected VP power scaling factor:
/// `E(gamma) >= K Gamma(K+1)^{1/K} / ((K+1) pi) * tau^2 *
///  prod_{j=0}^{K-1} Gamma(M - 1/K - j) / Gamma(M - j)`.
pub fn egamma_lower_bound(m: usize, k: usize, tau: f64) -> Result<f64> {
    if k == 0 || m < k {
        return Err(Error::InvalidConfig(format!(
            "bound requires M >= K >= 1, got M = {m}, K = {k}"
        )));
    }
    if !(tau > 0.0) {
        return Err(Error::InvalidConfig(format!("tau must be positive, got {tau}")));
    }
    let (mf, kf) = (m as f64, k as f64);
    // smallest gamma argument is M - 1/K - (K-1); it must stay positive
    if mf - 1.0 / kf - (kf - 1.0) <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "gamma argument M - 1/K - (K-1) = {} is not positive",
            mf - 1.0 / kf - (kf - 1.0)
        )));
    }
    let mut ln_prod = 0.0;
    for j in 0..k {
        let jf = j as f64;
        ln_prod += ln_gamma(mf - 1.0 / kf - jf) - ln_gamma(mf - jf);
    }
    let ln_front = (kf / (kf + 1.0) / std::f64::consts::PI).ln() + ln_gamma(kf + 1.0) / kf;
    Ok(tau * tau * (ln_front + ln_prod).exp())
}

/// Ratio-of-expectations approximation of the mean per-user harvested power
/// under conventional VP: `P * E(|u + tau l|^2) / E(gamma)`, with the
/// numerator read off the empirical joint table.
pub fn evp_approximation(
    table: &JointPerturbationTable,
    tau: f64,
    e_gamma: f64,
    p: f64,
) -> Result<f64> {
    if !(e_gamma > 0.0) {
        return Err(Error::InvalidInput(format!(
            "E(gamma) must be positive, got {e_gamma}"
        )));
    }
    let mut numerator = 0.0;
    for (idx, &level) in table.symbol_levels.iter().enumerate() {
        for off in -1i64..=1 {
            let v = level + tau * off as f64;
            numerator += table.prob(idx, off) * v * v;
        }
    }
    numerator *= 2.0; // real and imaginary dimensions contribute equally
    Ok(p * numerator / e_gamma)
}

/// CDF of the largest eigenvalue of a K x K complex Wishart matrix with M
/// degrees of freedom: `F(x) = phi * det(A(x))` with
/// `A_{ij} = gamma(M + K - i - j + 1, x)` (lower incomplete gamma).
pub fn wishart_max_eig_cdf(x: f64, m: usize, k: usize) -> Result<f64> {
    validate_wishart_dims(m, k)?;
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::InvalidInput(format!("x must be finite and >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let ln_entries = DMatrix::from_fn(k, k, |i, j| {
        let s = (m + k) as f64 - (i + j + 2) as f64 + 1.0;
        match reg_lower_gamma(s, x) {
            Ok(reg) if reg > 0.0 => reg.ln() + ln_gamma(s),
            _ => f64::NEG_INFINITY,
        }
    });
    let (sign, ln_det) = log_det_from_ln(&ln_entries);
    if sign == 0 {
        return Ok(0.0);
    }
    let f = sign as f64 * (ln_phi(m, k) + ln_det).exp();

    const SLACK: f64 = 1e-12;
    if f < -SLACK || f > 1.0 + SLACK {
        return Err(Error::NumericalInstability(format!(
            "Wishart CDF {f} escapes [0,1] beyond slack at x = {x}, M = {m}, K = {k}"
        )));
    }
    Ok(f.clamp(0.0, 1.0))
}

/// Mean of the largest Wishart eigenvalue via tail-expectation quadrature.
pub fn expected_max_eigenvalue(m: usize, k: usize) -> Result<f64> {
    validate_wishart_dims(m, k)?;
    let edge = ((m as f64).sqrt() + (k as f64).sqrt()).powi(2);
    tail_expectation(|x| wishart_max_eig_cdf(x, m, k), 2.0 * edge + 10.0, 1e-9)
}

/// Predicted per-user harvested power of the VP-EH scheme:
/// `P * E(lambda_1) / K`.
pub fn eeh_theory(p: f64, m: usize, k: usize) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::InvalidInput(format!("power must be positive, got {p}")));
    }
    Ok(p * expected_max_eigenvalue(m, k)? / k as f64)
}

/// Outage probability of the VP-EH equivalent channel at spectral efficiency
/// `r` bits: `P(lambda_K > x) = phi * det(B(x))` evaluated at the threshold
/// `x = P / (|c|^2 (2^r - 1))`, with `B_{ij} = Gamma(M + K - i - j + 1, x)`
/// (upper incomplete gamma). Computed in log scale: each row carries a factor
/// `e^{-x}`, leaving a polynomial matrix safe at asymptotic powers.
pub fn outage_probability(p: f64, r: f64, m: usize, k: usize, c_mag2: f64) -> Result<f64> {
    validate_wishart_dims(m, k)?;
    if !(p > 0.0) || !(r > 0.0) || !(c_mag2 > 0.0) {
        return Err(Error::InvalidInput(format!(
            "outage requires P > 0, r > 0, |c|^2 > 0; got P = {p}, r = {r}, |c|^2 = {c_mag2}"
        )));
    }
    let x = outage_threshold(p, r, c_mag2);
    // Gamma(s, x) = (s-1)! e^{-x} sum_{n=0}^{s-1} x^n / n!  for integer s
    let ln_entries = DMatrix::from_fn(k, k, |i, j| {
        let s = m + k - (i + j + 2) + 1; // integer >= M - K + 1 >= 1
        ln_gamma(s as f64) + log_sum_exp((0..s).map(|n| poly_ln_term(x, n)))
    });
    let (sign, ln_det) = log_det_from_ln(&ln_entries);
    if sign == 0 {
        return Ok(0.0);
    }
    let pout = sign as f64 * (ln_phi(m, k) - k as f64 * x + ln_det).exp();
    const SLACK: f64 = 1e-9;
    if pout < -SLACK || pout > 1.0 + SLACK {
        return Err(Error::NumericalInstability(format!(
            "outage probability {pout} escapes [0,1] at threshold {x}"
        )));
    }
    Ok(pout.clamp(0.0, 1.0))
}

/// Threshold the smallest Wishart eigenvalue is compared against in the
/// outage event: `x = P / (|c|^2 (2^r - 1))`.
pub fn outage_threshold(p: f64, r: f64, c_mag2: f64) -> f64 {
    p / (c_mag2 * (2f64.powf(r) - 1.0))
}

/// Least-squares slope of `ln(pout)` against the supplied power grid.
pub fn outage_decay_fit(p_grid: &[f64], pout_values: &[f64]) -> Result<f64> {
    if p_grid.len() != pout_values.len() || p_grid.len() < 4 {
        return Err(Error::InvalidInput(
            "decay fit needs >= 4 points with matching grids".into(),
        ));
    }
    if p_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("power grid must be increasing".into()));
    }
    if pout_values.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidInput(
            "outage values must be strictly positive and finite".into(),
        ));
    }
    let n = p_grid.len() as f64;
    let ys: Vec<f64> = pout_values.iter().map(|v| v.ln()).collect();
    let p_mean = p_grid.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (pv, y) in p_grid.iter().zip(ys.iter()) {
        num += (pv - p_mean) * (y - y_mean);
        den += (pv - p_mean) * (pv - p_mean);
    }
    Ok(num / den)
}

fn validate_wishart_dims(m: usize, k: usize) -> Result<()> {
    if k == 0 || m < k {
        return Err(Error::InvalidConfig(format!(
            "Wishart expressions require M >= K >= 1, got M = {m}, K = {k}"
        )));
    }
    Ok(())
}

// phi = 1 / prod_{i=1}^{K} (M-i)! (K-i)!
fn ln_phi(m: usize, k: usize) -> f64 {
    -(1..=k)
        .map(|i| ln_gamma((m - i + 1) as f64) + ln_gamma((k - i + 1) as f64))
        .sum::<f64>()
}

// ln(x^n / n!)
fn poly_ln_term(x: f64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        n as f64 * x.ln() - ln_gamma(n as f64 + 1.0)
    }
}

fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let ts: Vec<f64> = terms.collect();
    let max = ts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + ts.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

// Determinant of a matrix given entrywise natural logs (all entries
// non-negative). Rows are rescaled by their maxima before LU with partial
// pivoting so the factorization never overflows; returns (sign, ln|det|).
fn log_det_from_ln(ln_entries: &DMatrix<f64>) -> (i8, f64) {
    let n = ln_entries.nrows();
    let mut ln_scale = 0.0;
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        let row_max = (0..n)
            .map(|j| ln_entries[(i, j)])
            .fold(f64::NEG_INFINITY, f64::max);
        if row_max == f64::NEG_INFINITY {
            return (0, f64::NEG_INFINITY);
        }
        ln_scale += row_max;
        for j in 0..n {
            a[(i, j)] = (ln_entries[(i, j)] - row_max).exp();
        }
    }

    let mut sign = 1i8;
    let mut ln_det = ln_scale;
    for col in 0..n {
        let (piv_row, piv_abs) = (col..n)
            .map(|r| (r, a[(r, col)].abs()))
            .fold((col, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
        if piv_abs == 0.0 {
            return (0, f64::NEG_INFINITY);
        }
        if piv_row != col {
            a.swap_rows(piv_row, col);
            sign = -sign;
        }
        let d = a[(col, col)];
        ln_det += d.abs().ln();
        if d < 0.0 {
            sign = -sign;
        }
        for r in (col + 1)..n {
            let f = a[(r, col)] / d;
            for cc in col..n {
                a[(r, cc)] -= f * a[(col, cc)];
            }
        }
    }
    (sign, ln_det)
}
