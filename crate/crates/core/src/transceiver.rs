//! Receiver-side chain: channel and noise application, the modulo-tau
//! information receiver, minimum-distance detection, and harvested-power
//! bookkeeping.
//!
//! The SWIPT architecture is ideal: the same received signal feeds both the
//! decoder and the (linear, unit-efficiency) energy harvester.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::lattice::GaussianInt;
use crate::numerics::{CVec, ChannelRealization};
use crate::precoding::Constellation;

/// Result of pushing one precoded transmission through the receive chain.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    /// Detected symbols, one per user (empty for the EH-ideal beacon, which
    /// carries no data).
    pub detected: Vec<Complex64>,
    /// Number of users whose detected symbol differs from the transmitted one.
    pub symbol_errors: usize,
    /// Total harvested power across users.
    pub q_total: f64,
    /// Per-user harvested power; sums to `q_total`.
    pub q_per_user: Vec<f64>,
}

/// Draws a complex Gaussian noise vector with per-entry variance `sigma2`
/// (real part before imaginary, user order).
pub fn draw_noise<R: Rng + ?Sized>(k: usize, sigma2: f64, rng: &mut R) -> CVec {
    assert!(sigma2 >= 0.0, "noise power must be non-negative");
    let scale = (sigma2 / 2.0).sqrt();
    CVec::from_iterator(
        k,
        (0..k).map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re * scale, im * scale)
        }),
    )
}

/// `y = H x + n` with a caller-supplied noise vector, so paired comparisons
/// can reuse one draw across schemes.
pub fn apply_channel(x: &CVec, chan: &ChannelRealization, noise: &CVec) -> CVec {
    &chan.h * x + noise
}

/// `y = H x + n` with `n ~ CN(0, sigma2 I)` drawn from `rng`; `sigma2 = 0`
/// gives the noiseless channel.
pub fn apply_channel_awgn<R: Rng + ?Sized>(
    x: &CVec,
    chan: &ChannelRealization,
    sigma2: f64,
    rng: &mut R,
) -> CVec {
    let noise = draw_noise(chan.users(), sigma2, rng);
    apply_channel(x, chan, &noise)
}

/// Rescales one received sample by `sqrt(gamma / P)` and reduces each of the
/// real and imaginary parts into the centered interval `[-tau/2, tau/2)`
/// (ties at +tau/2 wrap to -tau/2).
pub fn modulo_receive(y_k: Complex64, gamma: f64, p: f64, tau: f64) -> Complex64 {
    debug_assert!(p > 0.0 && tau > 0.0);
    let v = y_k * (gamma / p).sqrt();
    Complex64::new(centered_mod(v.re, tau), centered_mod(v.im, tau))
}

fn centered_mod(t: f64, tau: f64) -> f64 {
    t - tau * (t / tau + 0.5).floor()
}

/// Nearest constellation point, rounding each real dimension independently
/// to the odd-integer alphabet and clipping to the extremes.
pub fn detect(symbol_estimate: Complex64, cons: &Constellation) -> Complex64 {
    Complex64::new(
        cons.nearest_level(symbol_estimate.re),
        cons.nearest_level(symbol_estimate.im),
    )
}

/// Harvested power from the noiseless signal term:
/// `q_k = P |u_k + tau l_k|^2 / gamma`, totalling `Q = P ||u + tau l||^2 / gamma`.
pub fn harvested_power(
    u: &CVec,
    l: &[GaussianInt],
    tau: f64,
    gamma: f64,
    p: f64,
) -> (f64, Vec<f64>) {
    debug_assert!(gamma > 0.0);
    let q_per_user: Vec<f64> = u
        .iter()
        .enumerate()
        .map(|(k, &uk)| {
            let vk = uk + Complex64::new(tau, 0.0) * l[k].to_complex();
            p * vk.norm_sqr() / gamma
        })
        .collect();
    let q_total = q_per_user.iter().sum();
    (q_total, q_per_user)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{sample_channel, CMat};
    use crate::precoding::{perturbed_symbols, vp_precode, zf_precode};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn modulo_centered_conventions() {
        // 3 mod 4 centered -> -1
        let out = modulo_receive(c(3.0, 0.0), 1.0, 1.0, 4.0);
        assert_eq!(out, c(-1.0, 0.0));
        // left endpoint included
        let out = modulo_receive(c(-2.0, 0.0), 1.0, 1.0, 4.0);
        assert_eq!(out, c(-2.0, 0.0));
        // tie at +tau/2 wraps to -tau/2
        let out = modulo_receive(c(2.0, 2.0), 1.0, 1.0, 4.0);
        assert_eq!(out, c(-2.0, -2.0));
    }

    #[test]
    fn modulo_fixes_constellation_points() {
        let cons = Constellation::new(16).unwrap();
        for &re in cons.levels() {
            for &im in cons.levels() {
                let out = modulo_receive(c(re, im), 1.0, 1.0, cons.tau());
                assert_eq!(out, c(re, im));
            }
        }
    }

    #[test]
    fn modulo_strips_every_offset_in_range() {
        // gamma = P, so the chain arithmetic is exact: u + tau l -> u
        let cons = Constellation::new(4).unwrap();
        let tau = cons.tau();
        for &re in cons.levels() {
            for &im in cons.levels() {
                for lr in -3i64..=3 {
                    for li in -3i64..=3 {
                        let v = c(re + tau * lr as f64, im + tau * li as f64);
                        let out = modulo_receive(v, 1.0, 1.0, tau);
                        assert_eq!(out, c(re, im), "offset ({lr},{li})");
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn modulo_is_tau_periodic(
            re in -50.0f64..50.0,
            im in -50.0f64..50.0,
            a in -12i64..12,
            b in -12i64..12,
        ) {
            let tau = 4.0;
            let base = modulo_receive(c(re, im), 1.0, 1.0, tau);
            let shifted = modulo_receive(
                c(re + tau * a as f64, im + tau * b as f64), 1.0, 1.0, tau);
            prop_assert!((base - shifted).norm() < 1e-9);
        }

        #[test]
        fn modulo_lands_in_centered_interval(
            re in -100.0f64..100.0,
            im in -100.0f64..100.0,
        ) {
            let tau = 4.0;
            let out = modulo_receive(c(re, im), 1.0, 1.0, tau);
            prop_assert!((-tau / 2.0..tau / 2.0).contains(&out.re));
            prop_assert!((-tau / 2.0..tau / 2.0).contains(&out.im));
        }
    }

    #[test]
    fn detect_examples() {
        let q4 = Constellation::new(4).unwrap();
        assert_eq!(detect(c(0.9, 1.2), &q4), c(1.0, 1.0));
        let q16 = Constellation::new(16).unwrap();
        assert_eq!(detect(c(3.7, -0.2), &q16), c(3.0, -1.0));
        // idempotence on exact symbols
        for &re in q16.levels() {
            for &im in q16.levels() {
                assert_eq!(detect(c(re, im), &q16), c(re, im));
            }
        }
    }

    #[test]
    fn noise_variance_is_calibrated() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let mut sum = 0.0;
        let n = 100_000;
        for _ in 0..n / 2 {
            let v = draw_noise(2, 1.0, &mut rng);
            sum += v.norm_squared();
        }
        let var = sum / n as f64;
        assert!((var - 1.0).abs() < 0.01, "empirical variance {var}");
    }

    #[test]
    fn noiseless_zf_chain_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let cons = Constellation::new(4).unwrap();
        for _ in 0..20 {
            let chan = sample_channel(2, 2, &mut rng).unwrap();
            let u = cons.random_vector(2, &mut rng);
            let out = zf_precode(&u, &chan, 10.0).unwrap();
            let y = apply_channel_awgn(&out.x, &chan, 0.0, &mut rng);
            let expect = u.map(|z| z * (out.power / out.gamma).sqrt());
            assert!((&y - &expect).camax() < 1e-9);
        }
    }

    #[test]
    fn noiseless_vp_chain_recovers_symbols() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let cons = Constellation::new(4).unwrap();
        let tau = cons.tau();
        for _ in 0..200 {
            let chan = sample_channel(2, 2, &mut rng).unwrap();
            let u = cons.random_vector(2, &mut rng);
            let out = vp_precode(&u, &chan, &cons, 10.0).unwrap();

            // received noiseless signal is sqrt(P/gamma) (u + tau l)
            let y = apply_channel_awgn(&out.x, &chan, 0.0, &mut rng);
            let pert = perturbed_symbols(&u, &out.l, tau);
            let expect = pert.map(|z| z * (out.power / out.gamma).sqrt());
            assert!((&y - &expect).camax() < 1e-9);

            // modulo + detect gives zero symbol errors
            for k in 0..2 {
                let est = modulo_receive(y[k], out.gamma, out.power, tau);
                assert!((est - u[k]).norm() < 1e-9);
                assert_eq!(detect(est, &cons), u[k]);
            }
        }
    }

    #[test]
    fn harvest_identity_channel_split() {
        let chan = ChannelRealization::from_h(CMat::identity(2, 2)).unwrap();
        let u = CVec::from_vec(vec![c(1.0, 1.0), c(1.0, -1.0)]);
        let out = zf_precode(&u, &chan, 1.0).unwrap();
        let (q, per_user) = harvested_power(&u, &out.l, 4.0, out.gamma, out.power);
        assert!((out.gamma - 4.0).abs() < 1e-12);
        assert!((q - 1.0).abs() < 1e-12);
        for v in &per_user {
            assert!((v - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn harvest_scales_linearly_in_power() {
        let u = CVec::from_vec(vec![c(1.0, -1.0), c(-1.0, -1.0)]);
        let l = vec![GaussianInt::new(1, 0), GaussianInt::new(0, -1)];
        let (q1, per1) = harvested_power(&u, &l, 4.0, 3.0, 1.0);
        let (q10, per10) = harvested_power(&u, &l, 4.0, 3.0, 10.0);
        assert!((q10 - 10.0 * q1).abs() < 1e-12);
        for (a, b) in per1.iter().zip(per10.iter()) {
            assert!((b - 10.0 * a).abs() < 1e-12);
        }
    }

    #[test]
    fn harvest_is_additive() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let cons = Constellation::new(16).unwrap();
        for _ in 0..50 {
            let chan = sample_channel(3, 3, &mut rng).unwrap();
            let u = cons.random_vector(3, &mut rng);
            let out = vp_precode(&u, &chan, &cons, 2.0).unwrap();
            let (q, per_user) = harvested_power(&u, &out.l, cons.tau(), out.gamma, out.power);
            let sum: f64 = per_user.iter().sum();
            assert!((sum - q).abs() <= 1e-9 * q.max(1.0));
        }
    }

    #[test]
    fn vp_harvest_dominates_zf_paired() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let cons = Constellation::new(4).unwrap();
        for trial in 0..1000usize {
            let chan = sample_channel(2, 2, &mut rng).unwrap();
            let u = cons.random_vector(2, &mut rng);
            let zf = zf_precode(&u, &chan, 1.0).unwrap();
            let vp = vp_precode(&u, &chan, &cons, 1.0).unwrap();
            let (q_zf, _) = harvested_power(&u, &zf.l, cons.tau(), zf.gamma, 1.0);
            let (q_vp, _) = harvested_power(&u, &vp.l, cons.tau(), vp.gamma, 1.0);
            assert!(
                q_vp >= q_zf - 1e-12,
                "trial {trial}: Q_vp {q_vp} < Q_zf {q_zf}"
            );
        }
    }
}
