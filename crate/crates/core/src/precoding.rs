//! Transmit-side construction for the five schemes: plain channel inversion
//! (ZF), conventional vector perturbation (VP), the energy-maximizing
//! variant (VP-EH), the blended VP-SWIPT variant, and the ideal
//! energy-beamforming benchmark (EH-ideal).
//!
//! All schemes emit `x = sqrt(P / gamma) F (u + tau l)` with
//! `gamma = ||F (u + tau l)||^2`; they differ only in how the Gaussian-integer
//! offset vector `l` is chosen.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, GaussianInt, IlsInstance, SearchOptions};
use crate::numerics::{CMat, CVec, ChannelRealization, EigenSystem};

/// Per-coordinate search bound for the VP-EH offset problem. The projector
/// generator is rank deficient, so the search space must be boxed to keep the
/// problem well posed; the bound matches the validation oracle's box.
pub const EH_OFFSET_BOUND: i64 = 3;

/// Square N-QAM constellation with the odd-integer per-dimension alphabet
/// `{+-1, +-3, ..., +-(sqrt(N)-1)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constellation {
    order: u32,
    levels: Vec<f64>,
}

impl Constellation {
    /// Builds an N-QAM constellation. `order` must be a square of an even
    /// integer (4, 16, 64, ...).
    pub fn new(order: u32) -> Result<Self> {
        let root = (order as f64).sqrt().round() as u32;
        if root < 2 || root * root != order || root % 2 != 0 {
            return Err(Error::InvalidConfig(format!(
                "modulation order must be the square of an even integer, got {order}"
            )));
        }
        let levels = (0..root)
            .map(|i| (2 * i as i64 - (root as i64 - 1)) as f64)
            .collect();
        Ok(Self { order, levels })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Per-dimension alphabet in ascending order.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Minimum distance per dimension.
    pub fn delta(&self) -> f64 {
        2.0
    }

    /// Largest per-dimension coordinate, `sqrt(N) - 1`.
    pub fn max_level(&self) -> f64 {
        *self.levels.last().expect("levels are non-empty")
    }

    /// Modulo base `tau = 2 max_level + delta` (4-QAM -> 4, 16-QAM -> 8).
    pub fn tau(&self) -> f64 {
        2.0 * self.max_level() + self.delta()
    }

    /// Whether both coordinates of `z` are alphabet levels.
    pub fn contains(&self, z: Complex64) -> bool {
        let is_level = |t: f64| self.levels.iter().any(|&l| (l - t).abs() < 1e-9);
        is_level(z.re) && is_level(z.im)
    }

    /// Nearest alphabet level to `t`, clipped to the extremes. Distance ties
    /// resolve toward the smaller magnitude (and to the negative level at
    /// exactly zero).
    pub fn nearest_level(&self, t: f64) -> f64 {
        let max = self.max_level();
        let lo = 2.0 * ((t - 1.0) / 2.0).floor() + 1.0;
        let hi = lo + 2.0;
        let (dl, dh) = (t - lo, hi - t);
        let cand = if dl < dh {
            lo
        } else if dh < dl {
            hi
        } else if lo.abs() <= hi.abs() {
            lo
        } else {
            hi
        };
        cand.clamp(-max, max)
    }

    /// Uniformly random symbol (real level drawn before imaginary).
    pub fn random_symbol<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        let re = self.levels[rng.random_range(0..self.levels.len())];
        let im = self.levels[rng.random_range(0..self.levels.len())];
        Complex64::new(re, im)
    }

    /// Vector of `k` uniformly random symbols.
    pub fn random_vector<R: rand::Rng + ?Sized>(&self, k: usize, rng: &mut R) -> CVec {
        CVec::from_iterator(k, (0..k).map(|_| self.random_symbol(rng)))
    }
}

/// Transmission scheme tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "ZF")]
    Zf,
    #[serde(rename = "VP")]
    Vp,
    #[serde(rename = "VP-EH")]
    VpEh,
    #[serde(rename = "VP-SWIPT")]
    VpSwipt,
    #[serde(rename = "EH-ideal")]
    EhIdeal,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::Zf,
        Scheme::Vp,
        Scheme::VpEh,
        Scheme::VpSwipt,
        Scheme::EhIdeal,
    ];

    /// EH-ideal transmits a pure energy beam with no symbols to decode.
    pub fn carries_data(self) -> bool {
        !matches!(self, Scheme::EhIdeal)
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = match self {
            Scheme::Zf => "ZF",
            Scheme::Vp => "VP",
            Scheme::VpEh => "VP-EH",
            Scheme::VpSwipt => "VP-SWIPT",
            Scheme::EhIdeal => "EH-ideal",
        };
        f.write_str(tag)
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .trim()
            .to_ascii_lowercase()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect();
        match norm.as_str() {
            "zf" => Ok(Scheme::Zf),
            "vp" => Ok(Scheme::Vp),
            "vpeh" => Ok(Scheme::VpEh),
            "vpswipt" => Ok(Scheme::VpSwipt),
            "ehideal" => Ok(Scheme::EhIdeal),
            _ => Err(Error::InvalidConfig(format!("unknown scheme '{s}'"))),
        }
    }
}

/// A constructed transmit vector together with the quantities the receiver
/// and the harvest bookkeeping need.
#[derive(Clone, Debug)]
pub struct PrecodeOutput {
    pub scheme: Scheme,
    /// Transmit signal of length M with `||x||^2 = P`.
    pub x: CVec,
    /// Gaussian-integer perturbation offsets (all zero for ZF / EH-ideal).
    pub l: Vec<GaussianInt>,
    /// Power scaling factor `||F (u + tau l)||^2`.
    pub gamma: f64,
    /// Transmit power P the output was normalized to.
    pub power: f64,
}

/// The perturbed symbol vector `u + tau l`.
pub fn perturbed_symbols(u: &CVec, l: &[GaussianInt], tau: f64) -> CVec {
    let mut v = u.clone();
    for (vi, li) in v.iter_mut().zip(l.iter()) {
        *vi += Complex64::new(tau, 0.0) * li.to_complex();
    }
    v
}

/// Upper-triangular factor R from the thin QR of F. Multiplying the VP
/// search problem by Q^H turns the tall M x K instance into an equivalent
/// K x K one without changing the minimizer.
pub fn precoder_r_factor(chan: &ChannelRealization) -> CMat {
    let qr = chan.f.clone().qr();
    qr.r()
}

/// Conventional VP offsets: the lattice point minimizing
/// `||F (u + tau l)||^2` via sphere search on the reduced instance.
pub fn conventional_offset(rf: &CMat, u: &CVec, tau: f64) -> Result<Vec<GaussianInt>> {
    let target = rf * u;
    let generator = rf.map(|z| z * (-tau));
    lattice::se_solve(&IlsInstance::new(target, generator))
}

/// VP-EH offsets: the lattice point minimizing the residual
/// `||Z (u + tau l)||^2` where `Z = I - u_EH u_EH^H` projects out the
/// harvest-optimal direction. Z is rank K-1, so the search is boxed.
pub fn eh_offset(u: &CVec, u_eh: &CVec, tau: f64) -> Result<Vec<GaussianInt>> {
    let k = u.len();
    let mut z = CMat::identity(k, k);
    for i in 0..k {
        for j in 0..k {
            z[(i, j)] -= u_eh[i] * u_eh[j].conj();
        }
    }
    let target = &z * u;
    let generator = z.map(|v| v * (-tau));
    lattice::se_solve_with(
        &IlsInstance::new(target, generator),
        SearchOptions {
            coordinate_bound: Some(EH_OFFSET_BOUND),
            ..SearchOptions::default()
        },
    )
}

/// VP-SWIPT offsets for blend parameter `eta`: the lattice point whose
/// precoded vector is closest to the convex combination
/// `delta(eta) = eta F(u + tau l0) + (1 - eta) F(u + tau l_eh)`.
/// `eta = 1` recovers the conventional VP point, `eta = 0` the VP-EH point.
pub fn swipt_offset(
    rf: &CMat,
    l0: &[GaussianInt],
    l_eh: &[GaussianInt],
    tau: f64,
    eta: f64,
) -> Result<Vec<GaussianInt>> {
    let k = l0.len();
    let comb = CVec::from_iterator(
        k,
        (0..k).map(|i| {
            l0[i].to_complex() * eta + l_eh[i].to_complex() * (1.0 - eta)
        }),
    );
    // In the reduced domain the instance collapses to
    // target = -tau R (eta l0 + (1-eta) l_eh), generator = -tau R.
    let target = (rf * comb).map(|z| z * (-tau));
    let generator = rf.map(|z| z * (-tau));
    lattice::se_solve(&IlsInstance::new(target, generator))
}

/// Normalizes `F (u + tau l)` to transmit power `p`.
pub fn assemble(
    scheme: Scheme,
    chan: &ChannelRealization,
    u: &CVec,
    l: Vec<GaussianInt>,
    tau: f64,
    p: f64,
) -> Result<PrecodeOutput> {
    if !(p > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "transmit power must be positive, got {p}"
        )));
    }
    let v = perturbed_symbols(u, &l, tau);
    let fv = &chan.f * v;
    let gamma = fv.norm_squared();
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidInput(format!(
            "degenerate scaling factor gamma = {gamma}"
        )));
    }
    let x = fv.map(|z| z * (p / gamma).sqrt());
    Ok(PrecodeOutput {
        scheme,
        x,
        l,
        gamma,
        power: p,
    })
}

fn check_symbols(u: &CVec, cons: &Constellation) -> Result<()> {
    if u.iter().all(|&z| cons.contains(z)) {
        Ok(())
    } else {
        Err(Error::InvalidInput(
            "symbol vector contains points outside the constellation".into(),
        ))
    }
}

/// Plain channel inversion: `l = 0`, `gamma = ||F u||^2`.
pub fn zf_precode(u: &CVec, chan: &ChannelRealization, p: f64) -> Result<PrecodeOutput> {
    let l = vec![GaussianInt::default(); u.len()];
    assemble(Scheme::Zf, chan, u, l, 0.0, p)
}

/// Conventional vector perturbation: offsets minimize the power scaling
/// factor, so `gamma_VP <= gamma_ZF` on every realization.
pub fn vp_precode(
    u: &CVec,
    chan: &ChannelRealization,
    cons: &Constellation,
    p: f64,
) -> Result<PrecodeOutput> {
    check_symbols(u, cons)?;
    let tau = cons.tau();
    let rf = precoder_r_factor(chan);
    let l0 = conventional_offset(&rf, u, tau)?;
    assemble(Scheme::Vp, chan, u, l0, tau, p)
}

/// Harvest-optimal unit direction: the principal eigenvector of `H H^H`.
pub fn eh_direction(chan: &ChannelRealization) -> Result<CVec> {
    let eig = crate::numerics::hermitian_eig(&chan.gram)?;
    if eig.lambda_min() <= 0.0 {
        return Err(Error::InvalidInput(
            "Gram matrix must be positive definite for energy beamforming".into(),
        ));
    }
    Ok(eig.principal_vector())
}

/// Ideal energy beamforming benchmark: transmits along `u_EH` with no data,
/// delivering total received power `P lambda_1`.
pub fn eh_ideal_precode(chan: &ChannelRealization, p: f64) -> Result<PrecodeOutput> {
    let eig = crate::numerics::hermitian_eig(&chan.gram)?;
    eh_ideal_precode_with(chan, &eig, p)
}

/// [`eh_ideal_precode`] with a precomputed eigendecomposition.
pub fn eh_ideal_precode_with(
    chan: &ChannelRealization,
    eig: &EigenSystem,
    p: f64,
) -> Result<PrecodeOutput> {
    let u_eh = eig.principal_vector();
    let l = vec![GaussianInt::default(); u_eh.len()];
    assemble(Scheme::EhIdeal, chan, &u_eh, l, 0.0, p)
}

/// Least-squares optimal complex scale of `u_eh` against `u_pert`:
/// the minimizer of `||u_pert - c u_eh||^2`.
pub fn optimal_scale(u_pert: &CVec, u_eh: &CVec) -> Complex64 {
    u_eh.dotc(u_pert) / Complex64::new(u_eh.norm_squared(), 0.0)
}

/// Energy-maximizing vector perturbation: offsets steer the perturbed
/// symbols as close as possible to the scaled harvest-optimal direction.
pub fn vp_eh_precode(
    u: &CVec,
    chan: &ChannelRealization,
    cons: &Constellation,
    p: f64,
) -> Result<PrecodeOutput> {
    check_symbols(u, cons)?;
    let u_eh = eh_direction(chan)?;
    let l_eh = eh_offset(u, &u_eh, cons.tau())?;
    assemble(Scheme::VpEh, chan, u, l_eh, cons.tau(), p)
}

/// Blended scheme trading information performance (`eta -> 1`, conventional
/// VP) against harvested energy (`eta -> 0`, VP-EH).
pub fn vp_swipt_precode(
    u: &CVec,
    chan: &ChannelRealization,
    cons: &Constellation,
    p: f64,
    eta: f64,
) -> Result<PrecodeOutput> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidConfig(format!(
            "eta must lie in [0, 1], got {eta}"
        )));
    }
    check_symbols(u, cons)?;
    let tau = cons.tau();
    let rf = precoder_r_factor(chan);
    let l0 = conventional_offset(&rf, u, tau)?;
    let u_eh = eh_direction(chan)?;
    let l_eh = eh_offset(u, &u_eh, tau)?;
    let l_sw = swipt_offset(&rf, &l0, &l_eh, tau, eta)?;
    assemble(Scheme::VpSwipt, chan, u, l_sw, tau, p)
}
