//! Tail-expectation quadrature: E(X) = integral of (1 - F(x)) over [0, inf)
//! for a non-negative random variable with CDF F.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 48;
const MAX_EXTENSIONS: u32 = 60;

/// Integrates `1 - cdf(x)` from 0 to infinity by adaptive Simpson quadrature.
///
/// `upper_cutoff` is the initial truncation point; the interval is extended
/// (doubling) until the marginal tail contribution drops below `abs_tol`.
/// The CDF callback is fallible so closed-form CDFs can propagate their own
/// numerical failures.
pub fn tail_expectation<F>(mut cdf: F, upper_cutoff: f64, abs_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(upper_cutoff > 0.0) || !(abs_tol > 0.0) {
        return Err(Error::InvalidInput(
            "tail_expectation requires positive cutoff and tolerance".into(),
        ));
    }
    let mut survival = |x: f64| -> Result<f64> { Ok((1.0 - cdf(x)?).max(0.0)) };

    let mut total = adaptive_simpson(&mut survival, 0.0, upper_cutoff, abs_tol / 2.0, 0)?;
    let mut lo = upper_cutoff;
    for _ in 0..MAX_EXTENSIONS {
        let hi = lo * 2.0;
        let segment = adaptive_simpson(&mut survival, lo, hi, abs_tol / 4.0, 0)?;
        total += segment;
        // The integrand is non-increasing, so the remaining tail is bounded
        // by segment-sized continuations; stop once those are negligible.
        if segment < abs_tol / 2.0 && survival(hi)? * hi < abs_tol / 2.0 {
            return Ok(total);
        }
        lo = hi;
    }
    Err(Error::QuadratureFailure { partial: total })
}

fn adaptive_simpson<F>(f: &mut F, a: f64, b: f64, tol: f64, depth: u32) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let err = left + right - whole;
    if err.abs() <= 15.0 * tol || depth >= MAX_DEPTH {
        return Ok(left + right + err / 15.0);
    }
    let l = simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth + 1)?;
    let r = simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth + 1)?;
    Ok(l + r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gamma::reg_lower_gamma;

    #[test]
    fn exponential_mean() {
        let v = tail_expectation(|x| Ok(1.0 - (-x).exp()), 8.0, 1e-9).unwrap();
        assert!((v - 1.0).abs() < 1e-8, "got {v}");
    }

    #[test]
    fn gamma_2_mean() {
        // Gamma(2, 1) CDF is the regularized lower incomplete gamma P(2, x).
        let v = tail_expectation(|x| reg_lower_gamma(2.0, x), 10.0, 1e-8).unwrap();
        assert!((v - 2.0).abs() < 1e-6, "got {v}");
    }

    #[test]
    fn deterministic_step_cdf() {
        let v = tail_expectation(|x| Ok(if x < 5.0 { 0.0 } else { 1.0 }), 8.0, 1e-9).unwrap();
        assert!((v - 5.0).abs() < 1e-7, "got {v}");
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(tail_expectation(|_| Ok(1.0), 0.0, 1e-9).is_err());
        assert!(tail_expectation(|_| Ok(1.0), 1.0, 0.0).is_err());
    }

    #[test]
    fn propagates_cdf_errors() {
        let r = tail_expectation(
            |_| Err(crate::error::Error::InvalidInput("boom".into())),
            1.0,
            1e-9,
        );
        assert!(r.is_err());
    }
}
