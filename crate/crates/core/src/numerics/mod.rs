//! Complex linear algebra on small dense matrices, channel sampling, and the
//! special functions used by the closed-form performance expressions.
//!
//! Everything here is sized for the downlink problem (K <= M <= 16), so the
//! implementations are plain dense algorithms without blocking or sparsity.

pub mod gamma;
pub mod quadrature;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Dense complex matrix used throughout the crate.
pub type CMat = DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVec = DVector<Complex64>;

/// Condition-number cap for the Gram matrix before channel inversion is
/// declared singular. Rayleigh fading makes exact singularity measure-zero,
/// but near-singular draws must fail loudly rather than corrupt statistics.
pub const CONDITION_CAP: f64 = 1e12;

/// Eigendecomposition of a Hermitian positive semi-definite matrix, with
/// eigenvalues sorted descending and a fixed eigenvector phase convention.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    /// Eigenvalues, descending: `values[0] >= ... >= values[k-1]`.
    pub eigenvalues: DVector<f64>,
    /// Unit-norm eigenvectors as columns, ordered to match `eigenvalues`.
    pub eigenvectors: CMat,
}

impl EigenSystem {
    /// Largest eigenvalue.
    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Smallest eigenvalue.
    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// Eigenvector of the largest eigenvalue.
    pub fn principal_vector(&self) -> CVec {
        self.eigenvectors.column(0).into_owned()
    }
}

/// One fading realization: the channel matrix together with its
/// zero-forcing pseudo-inverse and Gram matrix.
#[derive(Clone, Debug)]
pub struct ChannelRealization {
    /// K x M channel matrix.
    pub h: CMat,
    /// M x K pseudo-inverse `F = H^H (H H^H)^{-1}`, satisfying `H F = I`.
    pub f: CMat,
    /// K x K Gram matrix `H H^H` (Hermitian positive definite).
    pub gram: CMat,
}

impl ChannelRealization {
    /// Builds the derived matrices from a given channel matrix.
    pub fn from_h(h: CMat) -> Result<Self> {
        let f = zf_pseudo_inverse(&h)?;
        let gram = gram_of(&h);
        Ok(Self { h, f, gram })
    }

    /// Number of users (rows of H).
    pub fn users(&self) -> usize {
        self.h.nrows()
    }

    /// Number of transmit antennas (columns of H).
    pub fn antennas(&self) -> usize {
        self.h.ncols()
    }
}

/// Draws a K x M channel with i.i.d. circularly-symmetric complex Gaussian
/// entries of unit variance and populates the derived matrices.
pub fn sample_channel<R: Rng + ?Sized>(k: usize, m: usize, rng: &mut R) -> Result<ChannelRealization> {
    if k == 0 || k > m {
        return Err(Error::InvalidConfig(format!(
            "channel requires 1 <= K <= M, got K = {k}, M = {m}"
        )));
    }
    let h = sample_gaussian_matrix(k, m, rng);
    ChannelRealization::from_h(h)
}

/// K x M matrix of i.i.d. CN(0,1) entries (real and imaginary parts each
/// N(0, 1/2)). Entries are drawn row-major, real part before imaginary.
pub fn sample_gaussian_matrix<R: Rng + ?Sized>(k: usize, m: usize, rng: &mut R) -> CMat {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut h = CMat::zeros(k, m);
    for row in 0..k {
        for col in 0..m {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            h[(row, col)] = Complex64::new(re * scale, im * scale);
        }
    }
    h
}

/// Hermitian-symmetrized Gram matrix `H H^H`.
pub fn gram_of(h: &CMat) -> CMat {
    let g = h * h.adjoint();
    // force exact Hermitian symmetry so downstream checks are stable
    let gh = g.adjoint();
    (g + gh).map(|z| z * 0.5)
}

/// Zero-forcing pseudo-inverse `F = H^H (H H^H)^{-1}`.
///
/// Fails with a singular-channel error (carrying the condition estimate)
/// when the Gram matrix is ill-conditioned beyond [`CONDITION_CAP`].
pub fn zf_pseudo_inverse(h: &CMat) -> Result<CMat> {
    let gram = gram_of(h);
    let eig = hermitian_eig(&gram)?;
    let lmax = eig.lambda_max();
    let lmin = eig.lambda_min();
    let cond = if lmin > 0.0 { lmax / lmin } else { f64::INFINITY };
    if !(cond < CONDITION_CAP) {
        return Err(Error::SingularChannel {
            cond,
            cap: CONDITION_CAP,
        });
    }
    let inv_diag = CMat::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(1.0 / l, 0.0)));
    let gram_inv = &eig.eigenvectors * inv_diag * eig.eigenvectors.adjoint();
    let f = h.adjoint() * gram_inv;
    ensure_finite(&f, "pseudo-inverse")?;
    Ok(f)
}

/// Eigendecomposition of a Hermitian matrix with deterministic output:
/// eigenvalues descending, each eigenvector rotated so its largest-magnitude
/// component is real and positive.
pub fn hermitian_eig(g: &CMat) -> Result<EigenSystem> {
    if g.nrows() != g.ncols() {
        return Err(Error::InvalidInput(format!(
            "eigendecomposition requires a square matrix, got {}x{}",
            g.nrows(),
            g.ncols()
        )));
    }
    let scale = g.camax().max(1e-300);
    let mut dev = 0.0f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            dev = dev.max((g[(i, j)] - g[(j, i)].conj()).norm());
        }
    }
    if dev > 1e-8 * scale {
        return Err(Error::InvalidInput(format!(
            "matrix is not Hermitian: deviation {dev:.3e} at scale {scale:.3e}"
        )));
    }
    let sym = {
        let gh = g.adjoint();
        (g + gh).map(|z| z * 0.5)
    };
    let se = nalgebra::linalg::SymmetricEigen::new(sym);

    // sort descending (nalgebra returns an arbitrary order)
    let k = g.nrows();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        se.eigenvalues[b]
            .partial_cmp(&se.eigenvalues[a])
            .expect("eigenvalues are finite")
    });
    let eigenvalues = DVector::from_iterator(k, order.iter().map(|&i| se.eigenvalues[i]));
    let mut eigenvectors = CMat::zeros(k, k);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = se.eigenvectors.column(src).into_owned();
        fix_phase(&mut col);
        eigenvectors.set_column(dst, &col);
    }
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

// Rotate a unit vector so its largest-magnitude component (first such index
// on ties) is real and positive. The global phase is otherwise arbitrary.
fn fix_phase(v: &mut CVec) {
    let mut idx = 0;
    let mut best = -1.0f64;
    for (i, z) in v.iter().enumerate() {
        let n = z.norm();
        if n > best {
            best = n;
            idx = i;
        }
    }
    if best > 0.0 {
        let phase = v[idx] / Complex64::new(best, 0.0);
        let rot = phase.conj();
        for z in v.iter_mut() {
            *z *= rot;
        }
    }
}

/// Verifies every entry is finite; used at operation boundaries.
pub fn ensure_finite(m: &CMat, what: &str) -> Result<()> {
    for z in m.iter() {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NumericalInstability(format!(
                "{what} contains a non-finite entry"
            )));
        }
    }
    Ok(())
}
