//! Closest Gaussian-integer lattice point search.
//!
//! Solves `min_z ||y - A z||` over vectors of Gaussian integers via
//! Schnorr-Euchner depth-first enumeration on the real embedding, with an
//! exhaustive box oracle for validation. The sphere radius starts at the
//! Babai (successive rounding) point's residual so enumeration is finite
//! from the first node.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{CMat, CVec};

/// A Gaussian integer: complex number whose real and imaginary parts are
/// exact integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussianInt {
    pub re: i64,
    pub im: i64,
}

impl GaussianInt {
    pub fn new(re: i64, im: i64) -> Self {
        Self { re, im }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re as f64, self.im as f64)
    }

    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }
}

/// Converts a slice of Gaussian integers to a complex vector.
pub fn to_cvec(z: &[GaussianInt]) -> CVec {
    CVec::from_iterator(z.len(), z.iter().map(|g| g.to_complex()))
}

/// An integer least-squares instance: find the Gaussian-integer vector `z`
/// minimizing `||target - generator * z||`.
#[derive(Clone, Debug)]
pub struct IlsInstance {
    /// Complex target vector of length L.
    pub target: CVec,
    /// L x L complex generator matrix.
    pub generator: CMat,
}

impl IlsInstance {
    pub fn new(target: CVec, generator: CMat) -> Self {
        assert!(!target.is_empty(), "instance must have dimension >= 1");
        assert_eq!(
            target.len(),
            generator.nrows(),
            "target length must match generator rows"
        );
        assert_eq!(
            generator.nrows(),
            generator.ncols(),
            "generator must be square"
        );
        Self { target, generator }
    }

    /// Squared objective `||target - generator * z||^2`.
    pub fn objective(&self, z: &[GaussianInt]) -> f64 {
        let zc = to_cvec(z);
        (&self.target - &self.generator * zc).norm_squared()
    }
}

/// Real embedding of a complex ILS instance (dimension doubles).
#[derive(Clone, Debug)]
pub struct RealIlsInstance {
    pub target: DVector<f64>,
    pub generator: DMatrix<f64>,
}

/// Maps `min ||y - A z||` over Gaussian integers to an equivalent real
/// problem of dimension 2L: `target' = [Re y; Im y]`,
/// `generator' = [[Re A, -Im A], [Im A, Re A]]`, `z = z'[..L] + j z'[L..]`.
pub fn real_embedding(inst: &IlsInstance) -> RealIlsInstance {
    let l = inst.target.len();
    let n = 2 * l;
    let mut target = DVector::zeros(n);
    for i in 0..l {
        target[i] = inst.target[i].re;
        target[l + i] = inst.target[i].im;
    }
    let mut generator = DMatrix::zeros(n, n);
    for i in 0..l {
        for j in 0..l {
            let a = inst.generator[(i, j)];
            generator[(i, j)] = a.re;
            generator[(i, j + l)] = -a.im;
            generator[(i + l, j)] = a.im;
            generator[(i + l, j + l)] = a.re;
        }
    }
    RealIlsInstance { target, generator }
}

/// Lifts a real-embedded integer solution back to Gaussian integers.
pub fn lift_solution(z: &[i64]) -> Vec<GaussianInt> {
    let l = z.len() / 2;
    (0..l).map(|i| GaussianInt::new(z[i], z[l + i])).collect()
}

/// Search controls for the sphere solver.
#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    /// Maximum number of enumeration nodes before aborting.
    pub node_budget: u64,
    /// Optional per-coordinate bound `|Re z_k|, |Im z_k| <= bound`. A bounded
    /// search tolerates rank-deficient generators (the box keeps the
    /// enumeration finite where a singular direction would otherwise admit
    /// unbounded drift).
    pub coordinate_bound: Option<i64>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            node_budget: 10_000_000,
            coordinate_bound: None,
        }
    }
}

/// Solves the ILS instance by Schnorr-Euchner enumeration with default
/// options (unbounded coordinates, 1e7-node budget).
pub fn se_solve(inst: &IlsInstance) -> Result<Vec<GaussianInt>> {
    se_solve_with(inst, SearchOptions::default())
}

/// Schnorr-Euchner search with explicit options.
///
/// Ties in the objective are broken by lexicographic order on the
/// (Re, Im) entry sequence, matching [`brute_force_ils`].
pub fn se_solve_with(inst: &IlsInstance, opts: SearchOptions) -> Result<Vec<GaussianInt>> {
    let embedded = real_embedding(inst);
    let n = embedded.target.len();
    let l = n / 2;

    let (q, r) = positive_qr(&embedded.generator);
    let max_pivot = (0..n).map(|i| r[(i, i)].abs()).fold(0.0f64, f64::max);
    let min_pivot = (0..n).map(|i| r[(i, i)].abs()).fold(f64::INFINITY, f64::min);
    if opts.coordinate_bound.is_none() && min_pivot <= 1e-10 * max_pivot.max(1e-300) {
        return Err(Error::DegenerateLattice { pivot: min_pivot });
    }
    let pivot_guard = 1e-14 * max_pivot.max(1e-300);
    let ytilde = q.transpose() * &embedded.target;

    let (lo, hi) = match opts.coordinate_bound {
        Some(b) => (-b, b),
        None => (i64::MIN / 4, i64::MAX / 4),
    };

    // Babai point: successive rounding, top level down, clamped to bounds.
    let mut z = vec![0i64; n];
    for i in (0..n).rev() {
        let lin: f64 = ((i + 1)..n).map(|j| r[(i, j)] * z[j] as f64).sum();
        let piv = r[(i, i)];
        let c = if piv.abs() > pivot_guard {
            (ytilde[i] - lin) / piv
        } else {
            0.0
        };
        z[i] = round_clamped(c, lo, hi);
    }
    let mut best = z.clone();
    let mut best_obj = residual_cost(&r, &ytilde, &z);

    // Depth-first enumeration. Levels run from n-1 (entered first) down to 0.
    let mut nodes: u64 = 0;
    let mut lin = vec![0.0f64; n];
    let mut above = vec![0.0f64; n]; // cost of levels > i
    let mut iters: Vec<ZigZag> = (0..n).map(|_| ZigZag::empty()).collect();

    let mut level = n - 1;
    lin[level] = 0.0;
    above[level] = 0.0;
    iters[level] = ZigZag::new(center(&r, &ytilde, lin[level], level, pivot_guard), lo, hi);

    loop {
        let Some(zi) = iters[level].next() else {
            // level exhausted
            if level == n - 1 {
                break;
            }
            level += 1;
            continue;
        };
        nodes += 1;
        if nodes > opts.node_budget {
            return Err(Error::BudgetExceeded { nodes });
        }
        let term = {
            let d = ytilde[level] - lin[level] - r[(level, level)] * zi as f64;
            d * d
        };
        let cost = above[level] + term;
        if cost > best_obj {
            // candidates at this level are ordered by distance from the
            // center, so no later candidate can do better
            if level == n - 1 {
                break;
            }
            level += 1;
            continue;
        }
        z[level] = zi;
        if level == 0 {
            if cost < best_obj
                || (cost == best_obj && lex_cmp_embedded(&z, &best, l) == Ordering::Less)
            {
                best.copy_from_slice(&z);
                best_obj = cost;
            }
            // keep scanning level 0 with the tightened radius
        } else {
            level -= 1;
            lin[level] = ((level + 1)..n).map(|j| r[(level, j)] * z[j] as f64).sum();
            above[level] = cost;
            iters[level] =
                ZigZag::new(center(&r, &ytilde, lin[level], level, pivot_guard), lo, hi);
        }
    }

    Ok(lift_solution(&best))
}

/// Exhaustively scans all Gaussian-integer vectors with
/// `|Re z_k|, |Im z_k| <= box_half_width` and returns the objective minimizer
/// with the same lexicographic tie-break as [`se_solve`].
pub fn brute_force_ils(inst: &IlsInstance, box_half_width: i64) -> Result<Vec<GaussianInt>> {
    const MAX_POINTS: u128 = 40_000_000;
    if box_half_width < 0 {
        return Err(Error::InvalidInput("box_half_width must be >= 0".into()));
    }
    let l = inst.target.len();
    let side = 2 * box_half_width as u128 + 1;
    let points = side.pow(2 * l as u32);
    if points > MAX_POINTS {
        return Err(Error::BudgetExceeded {
            nodes: points.min(u64::MAX as u128) as u64,
        });
    }

    // Real coordinates ordered (Re z_0, Im z_0, Re z_1, ...): depth-first
    // ascending enumeration visits points in lexicographic order, so a
    // strict improvement rule keeps the lex-smallest minimizer. Residuals
    // are staged per depth to keep leaf evaluation exact and allocation-free.
    let cols: Vec<Vec<Complex64>> = (0..l)
        .flat_map(|j| {
            let col: Vec<Complex64> = inst.generator.column(j).iter().copied().collect();
            let icol: Vec<Complex64> = col.iter().map(|z| z * Complex64::new(0.0, 1.0)).collect();
            [col, icol]
        })
        .collect();

    struct Ctx {
        cols: Vec<Vec<Complex64>>,
        w: i64,
        best: Vec<i64>,
        best_obj: f64,
        digits: Vec<i64>,
        stack: Vec<Vec<Complex64>>,
    }
    fn recurse(ctx: &mut Ctx, depth: usize) {
        if depth == ctx.cols.len() {
            let obj: f64 = ctx.stack[depth].iter().map(|z| z.norm_sqr()).sum();
            if obj < ctx.best_obj {
                ctx.best_obj = obj;
                ctx.best.copy_from_slice(&ctx.digits);
            }
            return;
        }
        for v in -ctx.w..=ctx.w {
            ctx.digits[depth] = v;
            let (head, tail) = ctx.stack.split_at_mut(depth + 1);
            let parent = &head[depth];
            let child = &mut tail[0];
            let col = &ctx.cols[depth];
            let vf = v as f64;
            for i in 0..parent.len() {
                child[i] = parent[i] - col[i] * vf;
            }
            recurse(ctx, depth + 1);
        }
    }

    let mut ctx = Ctx {
        cols,
        w: box_half_width,
        best: vec![0; 2 * l],
        best_obj: f64::INFINITY,
        digits: vec![0; 2 * l],
        stack: vec![vec![Complex64::new(0.0, 0.0); l]; 2 * l + 1],
    };
    ctx.stack[0] = inst.target.iter().copied().collect();
    recurse(&mut ctx, 0);

    Ok((0..l)
        .map(|j| GaussianInt::new(ctx.best[2 * j], ctx.best[2 * j + 1]))
        .collect())
}

/// Lexicographic comparison on the (Re, Im) entry sequence.
pub fn lex_cmp(a: &[GaussianInt], b: &[GaussianInt]) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.re.cmp(&y.re).then(x.im.cmp(&y.im)) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

// Comparison in the embedded layout [re.., im..].
fn lex_cmp_embedded(a: &[i64], b: &[i64], l: usize) -> Ordering {
    for j in 0..l {
        match a[j].cmp(&b[j]).then(a[l + j].cmp(&b[l + j])) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

fn center(r: &DMatrix<f64>, ytilde: &DVector<f64>, lin: f64, level: usize, guard: f64) -> f64 {
    let piv = r[(level, level)];
    if piv.abs() > guard {
        (ytilde[level] - lin) / piv
    } else {
        0.0
    }
}

fn residual_cost(r: &DMatrix<f64>, ytilde: &DVector<f64>, z: &[i64]) -> f64 {
    let n = z.len();
    let mut cost = 0.0;
    for i in 0..n {
        let lin: f64 = (i..n).map(|j| r[(i, j)] * z[j] as f64).sum();
        let d = ytilde[i] - lin;
        cost += d * d;
    }
    cost
}

fn round_clamped(c: f64, lo: i64, hi: i64) -> i64 {
    let r = c.round();
    let r = if r < lo as f64 {
        lo
    } else if r > hi as f64 {
        hi
    } else {
        r as i64
    };
    r.clamp(lo, hi)
}

// QR with the diagonal of R made non-negative (rows of R / columns of Q
// flipped in tandem).
fn positive_qr(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let qr = a.clone().qr();
    let mut q = qr.q();
    let mut r = qr.r();
    for i in 0..r.nrows() {
        if r[(i, i)] < 0.0 {
            for j in 0..r.ncols() {
                r[(i, j)] = -r[(i, j)];
            }
            for j in 0..q.nrows() {
                q[(j, i)] = -q[(j, i)];
            }
        }
    }
    (q, r)
}

// Emits integer candidates in [lo, hi] ordered by distance from a real
// center, both directions interleaved. Ties prefer the smaller integer so
// the order is deterministic.
struct ZigZag {
    center: f64,
    down: i64,
    up: i64,
    lo: i64,
    hi: i64,
    first: Option<i64>,
}

impl ZigZag {
    fn empty() -> Self {
        Self {
            center: 0.0,
            down: 0,
            up: -1,
            lo: 0,
            hi: -1,
            first: None,
        }
    }

    fn new(c: f64, lo: i64, hi: i64) -> Self {
        let base = round_clamped(c, lo, hi);
        Self {
            center: c,
            down: base - 1,
            up: base + 1,
            lo,
            hi,
            first: Some(base),
        }
    }

    fn next(&mut self) -> Option<i64> {
        if let Some(v) = self.first.take() {
            return Some(v);
        }
        let down_ok = self.down >= self.lo;
        let up_ok = self.up <= self.hi;
        match (down_ok, up_ok) {
            (false, false) => None,
            (true, false) => {
                let v = self.down;
                self.down -= 1;
                Some(v)
            }
            (false, true) => {
                let v = self.up;
                self.up += 1;
                Some(v)
            }
            (true, true) => {
                let d_down = (self.center - self.down as f64).abs();
                let d_up = (self.up as f64 - self.center).abs();
                if d_down <= d_up {
                    let v = self.down;
                    self.down -= 1;
                    Some(v)
                } else {
                    let v = self.up;
                    self.up += 1;
                    Some(v)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_instance<R: Rng>(l: usize, rng: &mut R) -> IlsInstance {
        // diagonally loaded for well-conditioned generators
        loop {
            let mut a = crate::numerics::sample_gaussian_matrix(l, l, rng);
            for i in 0..l {
                a[(i, i)] += c(1.5, 0.0);
            }
            let y = CVec::from_iterator(
                l,
                (0..l).map(|_| {
                    c(
                        rng.random_range(-4.0..4.0),
                        rng.random_range(-4.0..4.0),
                    )
                }),
            );
            let inst = IlsInstance::new(y, a);
            // keep only comfortably non-degenerate draws
            let emb = real_embedding(&inst);
            let (_, r) = positive_qr(&emb.generator);
            let n = emb.target.len();
            let maxp = (0..n).map(|i| r[(i, i)].abs()).fold(0.0f64, f64::max);
            let minp = (0..n).map(|i| r[(i, i)].abs()).fold(f64::INFINITY, f64::min);
            if minp > 0.05 * maxp {
                return inst;
            }
        }
    }

    #[test]
    fn identity_generator_rounds() {
        let inst = IlsInstance::new(
            CVec::from_vec(vec![c(0.4, 0.3), c(-1.2, -0.1)]),
            CMat::identity(2, 2),
        );
        let z = se_solve(&inst).unwrap();
        assert_eq!(z, vec![GaussianInt::new(0, 0), GaussianInt::new(-1, 0)]);
    }

    #[test]
    fn zero_target_returns_origin() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut inst = random_instance(3, &mut rng);
        inst.target = CVec::zeros(3);
        let z = se_solve(&inst).unwrap();
        assert!(z.iter().all(|g| g.is_zero()));
        assert_eq!(inst.objective(&z), 0.0);
    }

    #[test]
    fn real_embedding_identity_case() {
        let inst = IlsInstance::new(
            CVec::from_vec(vec![c(1.0, 2.0)]),
            CMat::identity(1, 1),
        );
        let emb = real_embedding(&inst);
        assert_eq!(emb.target.as_slice(), &[1.0, 2.0]);
        assert_eq!(emb.generator, DMatrix::identity(2, 2));
    }

    #[test]
    fn real_embedding_preserves_objective() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let inst = random_instance(3, &mut rng);
            let emb = real_embedding(&inst);
            let z: Vec<GaussianInt> = (0..3)
                .map(|_| GaussianInt::new(rng.random_range(-3..=3), rng.random_range(-3..=3)))
                .collect();
            let obj_c = inst.objective(&z);
            let flat: Vec<i64> = (0..3)
                .map(|i| z[i].re)
                .chain((0..3).map(|i| z[i].im))
                .collect();
            let zf = DVector::from_iterator(6, flat.iter().map(|&v| v as f64));
            let obj_r = (&emb.target - &emb.generator * zf).norm_squared();
            assert!((obj_c - obj_r).abs() <= 1e-9 * obj_c.max(1.0));
        }
    }

    #[test]
    fn brute_force_component_rounding() {
        let inst = IlsInstance::new(
            CVec::from_vec(vec![c(2.6, -1.4)]),
            CMat::identity(1, 1),
        );
        let z = brute_force_ils(&inst, 3).unwrap();
        assert_eq!(z, vec![GaussianInt::new(3, -1)]);
    }

    #[test]
    fn brute_force_width_zero_returns_origin() {
        let inst = IlsInstance::new(
            CVec::from_vec(vec![c(2.6, -1.4), c(0.2, 0.9)]),
            CMat::identity(2, 2),
        );
        let z = brute_force_ils(&inst, 0).unwrap();
        assert!(z.iter().all(|g| g.is_zero()));
    }

    #[test]
    fn brute_force_budget_guard() {
        let inst = IlsInstance::new(CVec::zeros(4), CMat::identity(4, 4));
        assert!(matches!(
            brute_force_ils(&inst, 10),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    // Instance whose unconstrained optimum provably stays inside the +-3 box:
    // y = A z* + e with z* in [-1,1]^L, small e, and sigma_min(A) >= 1, so any
    // minimizer satisfies ||z - z*||_2 <= 2 ||e|| / sigma_min <= 1.5.
    fn planted_instance<R: Rng>(l: usize, rng: &mut R) -> (IlsInstance, Vec<GaussianInt>) {
        loop {
            let mut a = crate::numerics::sample_gaussian_matrix(l, l, rng);
            for i in 0..l {
                a[(i, i)] += c(1.8, 0.0);
            }
            let emb = real_embedding(&IlsInstance::new(CVec::zeros(l), a.clone()));
            let smin = emb
                .generator
                .svd(false, false)
                .singular_values
                .iter()
                .fold(f64::INFINITY, |acc, &s| acc.min(s));
            if smin < 1.0 {
                continue;
            }
            let zstar: Vec<GaussianInt> = (0..l)
                .map(|_| GaussianInt::new(rng.random_range(-1..=1), rng.random_range(-1..=1)))
                .collect();
            let e = CVec::from_iterator(
                l,
                (0..l).map(|_| c(rng.random_range(-0.25..0.25), rng.random_range(-0.25..0.25))),
            );
            let y = &a * to_cvec(&zstar) + e;
            return (IlsInstance::new(y, a), zstar);
        }
    }

    #[test]
    fn se_matches_brute_force_boxed() {
        // Same feasible set on both sides: the solvers must agree exactly.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let opts = SearchOptions {
            coordinate_bound: Some(3),
            ..SearchOptions::default()
        };
        for trial in 0..400usize {
            let inst = random_instance(2, &mut rng);
            let zs = se_solve_with(&inst, opts).unwrap();
            let zb = brute_force_ils(&inst, 3).unwrap();
            let os = inst.objective(&zs);
            let ob = inst.objective(&zb);
            assert!(
                (os - ob).abs() <= 1e-9 * ob.max(1.0),
                "trial {trial}: se {os} vs brute {ob}"
            );
        }
    }

    #[test]
    fn se_matches_brute_force_l2() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for trial in 0..900usize {
            let (inst, _) = planted_instance(2, &mut rng);
            let zs = se_solve(&inst).unwrap();
            assert!(
                zs.iter().all(|g| g.re.abs() <= 3 && g.im.abs() <= 3),
                "trial {trial}: solution escaped the oracle box"
            );
            let zb = brute_force_ils(&inst, 3).unwrap();
            assert_eq!(zs, zb, "trial {trial}");
        }
    }

    #[test]
    fn se_matches_brute_force_l4() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        for trial in 0..100usize {
            let (inst, _) = planted_instance(4, &mut rng);
            let zs = se_solve(&inst).unwrap();
            assert!(
                zs.iter().all(|g| g.re.abs() <= 3 && g.im.abs() <= 3),
                "trial {trial}: solution escaped the oracle box"
            );
            let zb = brute_force_ils(&inst, 3).unwrap();
            let os = inst.objective(&zs);
            let ob = inst.objective(&zb);
            assert!(
                (os - ob).abs() <= 1e-9 * ob.max(1.0),
                "trial {trial}: se {os} vs brute {ob}"
            );
            assert_eq!(zs, zb, "trial {trial}");
        }
    }

    #[test]
    fn se_never_beats_by_less_than_babai() {
        // SE objective is at most the Babai rounding point's objective.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let inst = random_instance(3, &mut rng);
            let emb = real_embedding(&inst);
            let (q, r) = positive_qr(&emb.generator);
            let ytilde = q.transpose() * &emb.target;
            let n = 6;
            let mut z = vec![0i64; n];
            for i in (0..n).rev() {
                let lin: f64 = ((i + 1)..n).map(|j| r[(i, j)] * z[j] as f64).sum();
                z[i] = ((ytilde[i] - lin) / r[(i, i)]).round() as i64;
            }
            let babai = lift_solution(&z);
            let zs = se_solve(&inst).unwrap();
            assert!(inst.objective(&zs) <= inst.objective(&babai) + 1e-12);
        }
    }

    #[test]
    fn dyadic_scaling_leaves_solution_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..100 {
            let inst = random_instance(2, &mut rng);
            let z0 = se_solve(&inst).unwrap();
            for scale in [0.25, 0.5, 2.0, 8.0] {
                let scaled = IlsInstance::new(
                    inst.target.map(|v| v * scale),
                    inst.generator.map(|v| v * scale),
                );
                assert_eq!(se_solve(&scaled).unwrap(), z0, "scale {scale}");
            }
        }
    }

    #[test]
    fn translation_by_lattice_vector_shifts_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let inst = random_instance(2, &mut rng);
            let z0 = se_solve(&inst).unwrap();
            let w: Vec<GaussianInt> = (0..2)
                .map(|_| GaussianInt::new(rng.random_range(-2..=2), rng.random_range(-2..=2)))
                .collect();
            let shifted = IlsInstance::new(
                &inst.target + &inst.generator * to_cvec(&w),
                inst.generator.clone(),
            );
            let zs = se_solve(&shifted).unwrap();
            let expected: Vec<GaussianInt> = z0
                .iter()
                .zip(w.iter())
                .map(|(a, b)| GaussianInt::new(a.re + b.re, a.im + b.im))
                .collect();
            assert_eq!(zs, expected);
        }
    }

    #[test]
    fn deterministic_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let inst = random_instance(3, &mut rng);
        let a = se_solve(&inst).unwrap();
        let b = se_solve(&inst).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn degenerate_generator_is_rejected_unbounded() {
        let a = CMat::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)],
        );
        let inst = IlsInstance::new(CVec::from_vec(vec![c(0.3, 0.0), c(0.1, 0.2)]), a);
        assert!(matches!(
            se_solve(&inst),
            Err(Error::DegenerateLattice { .. })
        ));
    }

    #[test]
    fn bounded_search_handles_rank_deficiency() {
        // projector onto the complement of (1,1)/sqrt(2): rank 1
        let p = 0.5;
        let a = CMat::from_row_slice(
            2,
            2,
            &[c(p, 0.0), c(-p, 0.0), c(-p, 0.0), c(p, 0.0)],
        );
        let y = CVec::from_vec(vec![c(0.7, 0.1), c(-0.7, -0.1)]);
        let inst = IlsInstance::new(y, a);
        let opts = SearchOptions {
            coordinate_bound: Some(3),
            ..SearchOptions::default()
        };
        let zs = se_solve_with(&inst, opts).unwrap();
        let zb = brute_force_ils(&inst, 3).unwrap();
        let (os, ob) = (inst.objective(&zs), inst.objective(&zb));
        assert!((os - ob).abs() <= 1e-12);
    }

    #[test]
    fn budget_exceeded_surfaces() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let inst = random_instance(4, &mut rng);
        let opts = SearchOptions {
            node_budget: 3,
            coordinate_bound: None,
        };
        assert!(matches!(
            se_solve_with(&inst, opts),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
